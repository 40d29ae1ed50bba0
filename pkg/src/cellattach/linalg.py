"""Exact sparse echelon bases for graded slices of T(V).

A :class:`Slice` keeps two things: echelon rows (pivot = largest word,
pivot coefficient 1) used for membership tests, and the original vectors
that were found independent, which serve as a spanning set with labels.

Rows may live on a restricted set of coordinate words.  For subspaces of
a free Lie algebra the super-Lyndon words are such a set: restricting a
Lie element to them loses nothing, which keeps the rows short.
"""

import threading
from fractions import Fraction
from math import gcd

from .tensor import TensorElem


class SliceError(ValueError):
    pass


def _reduce(rows, v, p, tag=None, row_tags=None):
    """Reduce ``v`` in place against ``rows``; return the leading word left, or None.

    Over Q (p == 0) rows hold primitive integer vectors and ``v`` is
    rescaled by nonzero integers as it goes, so only its span is preserved.
    """
    if p:
        while v:
            piv = max(v)
            row = rows.get(piv)
            if row is None:
                return piv
            c = v[piv]
            for w, x in row.items():
                nv = (v.get(w, 0) - c * x) % p
                if nv:
                    v[w] = nv
                else:
                    del v[w]
            if tag is not None:
                for j, x in row_tags[piv].items():
                    nv = (tag.get(j, 0) - c * x) % p
                    if nv:
                        tag[j] = nv
                    else:
                        tag.pop(j, None)
        return None
    steps = 0
    while v:
        piv = max(v)
        row = rows.get(piv)
        if row is None:
            return piv
        c = v[piv]
        r0 = row[piv]
        g = gcd(c, r0)
        a, b = r0 // g, c // g
        if a != 1:
            for w in v:
                v[w] *= a
            if tag is not None:
                for j in tag:
                    tag[j] *= a
            steps += 1
            if steps % 8 == 0:
                _primitive(v, tag)
        for w, x in row.items():
            nv = v.get(w, 0) - b * x
            if nv:
                v[w] = nv
            else:
                del v[w]
        if tag is not None:
            for j, x in row_tags[piv].items():
                nv = tag.get(j, 0) - b * x
                if nv:
                    tag[j] = nv
                else:
                    tag.pop(j, None)
    return None


def _primitive(v, tag=None):
    g = 0
    for x in v.values():
        g = gcd(g, x)
        if g == 1:
            return
    if g > 1:
        for w in v:
            v[w] //= g
        if tag is not None:
            for j in tag:
                tag[j] = Fraction(tag[j], g)


def _make_row(v, piv, p, tag=None):
    """Normalise a reduced vector into a stored row (pivot 1 mod p; primitive, pivot > 0 over Q)."""
    if p:
        inv = pow(v[piv], -1, p)
        row = {w: x * inv % p for w, x in v.items()}
        rtag = None if tag is None else {j: x * inv % p for j, x in tag.items()}
        return row, rtag
    g = 0
    for x in v.values():
        g = gcd(g, x)
    if v[piv] < 0:
        g = -g
    row = {w: x // g for w, x in v.items()}
    rtag = None if tag is None else {j: Fraction(x, g) for j, x in tag.items()}
    return row, rtag


def _integral(r):
    """Clear denominators of a Q-vector in place (scaling by a positive integer)."""
    den, frac = 1, False
    for x in r.values():
        if type(x) is Fraction:
            frac = True
            den = den * x.denominator // gcd(den, x.denominator)
    if frac:
        for w, x in r.items():
            r[w] = int(x * den)
    return r


class Slice:
    """Echelon basis of a subspace of one graded component of T(V).

    ``key`` is the (dim, ycount) constraint (ycount may be None) and
    ``coords`` an optional set of words the rows are restricted to.
    """

    def __init__(self, alphabet, field, key, coords=None):
        self.alphabet = alphabet
        self.field = field
        self.key = key
        self.coords = coords
        self.rows = {}
        self.basis = []
        self.labels = []

    def copy(self):
        s = Slice(self.alphabet, self.field, self.key, self.coords)
        s.rows = dict(self.rows)
        s.basis = list(self.basis)
        s.labels = list(self.labels)
        return s

    @property
    def rank(self):
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    def _check(self, v):
        if not v.terms:
            return
        if v.alphabet != self.alphabet:
            raise SliceError("alphabet mismatch")
        dim, yc = v.bidegree
        if dim != self.key[0] or (self.key[1] is not None and yc != self.key[1]):
            raise SliceError(f"vector of bidegree {(dim, yc)} does not fit slice {self.key}")

    def _project(self, terms):
        if self.coords is None:
            r = dict(terms)
        else:
            c = self.coords
            r = {w: x for w, x in terms.items() if w in c}
        return r if self.field.p else _integral(r)

    def reduce(self, v):
        """Remainder of ``v`` (restricted to the coordinates), up to a nonzero scalar."""
        r = self._project(v.terms)
        _reduce(self.rows, r, self.field.p)
        return TensorElem(self.alphabet, r, self.field)

    def contains(self, v):
        self._check(v)
        r = self._project(v.terms)
        return _reduce(self.rows, r, self.field.p) is None

    def insert(self, v, label=None, check=True):
        """Add ``v`` to the span; return True if it was already there (absorbed)."""
        if check:
            self._check(v)
        r = self._project(v.terms)
        piv = _reduce(self.rows, r, self.field.p)
        if piv is None:
            return True
        self.rows[piv] = _make_row(r, piv, self.field.p)[0]
        self.basis.append(v)
        self.labels.append(label)
        return False

    def extend(self, vectors, labels=None):
        """Insert several vectors; return the indices of those that were new."""
        new = []
        for i, v in enumerate(vectors):
            if not self.insert(v, None if labels is None else labels[i]):
                new.append(i)
        return new

    def pivots(self):
        return sorted(self.rows, reverse=True)

    def echelon_rows(self):
        """Rows with pivot coefficient 1, largest pivot first."""
        out = []
        for w in self.pivots():
            row = self.rows[w]
            inv = self.field.inv(row[w])
            out.append(TensorElem(self.alphabet, {u: self.field.mul(x, inv) for u, x in row.items()},
                                  self.field))
        return out

    def __repr__(self):
        return f"Slice(key={self.key}, rank={self.rank})"


def echelon_insert(s, v):
    """Functional form: returns (slice, absorbed); the input slice is left untouched."""
    s = s.copy()
    absorbed = s.insert(v)
    return s, absorbed


class GradedMap:
    """A linear rule evaluated on basis vectors of a source slice."""

    def __init__(self, rule, source_key, target_key, target_coords=None):
        self.rule = rule
        self.source_key = source_key
        self.target_key = target_key
        self.target_coords = target_coords

    def __call__(self, v):
        out = self.rule(v)
        if out.terms:
            dim, yc = out.bidegree
            tk = self.target_key
            if dim != tk[0] or (tk[1] is not None and yc != tk[1]):
                raise SliceError(f"map output of bidegree {(dim, yc)} is not in {tk}")
        return out


def kernel_and_image(m, domain, modulo=None, kernel_coords=None):
    """Kernel and image of ``m`` on the span of ``domain.basis``.

    With ``modulo`` (a slice in the target), the map is taken into the
    quotient by that subspace.  Kernel rows are combinations of the domain
    basis; labels are combined into linear-combination labels when present.
    """
    p = domain.field.p
    field = domain.field
    image = Slice(domain.alphabet, field, m.target_key, m.target_coords)
    rows, row_tags = {}, {}
    if modulo is not None:
        rows.update(modulo.rows)
        row_tags.update({w: {} for w in modulo.rows})
    kernel = Slice(domain.alphabet, field, domain.key,
                   domain.coords if kernel_coords is None else kernel_coords)
    for i, b in enumerate(domain.basis):
        out = m(b)
        v = image._project(out.terms)
        tag = {i: 1}
        piv = _reduce(rows, v, p, tag, row_tags)
        if piv is None:
            vec, label = combine(domain.basis, domain.labels, tag, field)
            kernel.insert(vec, label)
            continue
        rows[piv], row_tags[piv] = _make_row(v, piv, p, tag)
        image.insert(out, domain.labels[i] if domain.labels else None, check=False)
    return kernel, image


def combine(vectors, labels, coeffs, field):
    """Sum c_i * vectors[i]; the label is the matching combination of labels if all exist."""
    from .tensor import Expr, raw_add

    p = field.p
    terms = {}
    for i, c in coeffs.items():
        terms = raw_add(terms, vectors[i].terms, p, c)
    vec = TensorElem(vectors[0].alphabet, terms, field)
    label = None
    if labels and all(labels[i] is not None for i in coeffs):
        label = Expr()
        for i in sorted(coeffs):
            label = label.combine(as_expr(labels[i]), field.signed(coeffs[i]))
        label = label.simplified()
    return vec, label


def as_expr(label):
    from .tensor import Expr

    return label if isinstance(label, Expr) else Expr.atom(label)


def quotient_dim(ambient, sub):
    """dim(ambient) - dim(sub) and representatives of a complement.

    Every row of ``sub`` must lie in ``ambient``.
    """
    for v in sub.basis:
        if not ambient.contains(v):
            raise SliceError(f"sub is not contained in ambient: offending row {v}")
    s = sub.copy()
    reps, labels = [], []
    for v, lab in zip(ambient.basis, ambient.labels):
        if not s.insert(v, lab):
            reps.append(v)
            labels.append(lab)
    return ambient.rank - sub.rank, reps, labels


class OnceCache:
    """Per-key once-only initialisation; concurrent callers of a key share one result."""

    def __init__(self):
        self._data = {}
        self._locks = {}
        self._guard = threading.Lock()

    def get(self, key, factory):
        try:
            return self._data[key]
        except KeyError:
            pass
        with self._guard:
            lock = self._locks.setdefault(key, threading.RLock())
        with lock:
            if key not in self._data:
                self._data[key] = factory()
            return self._data[key]

    def __contains__(self, key):
        return key in self._data
