"""Free graded Lie algebras, Lie ideals and finitely presented Lie algebras inside T(V)."""

from dataclasses import dataclass, field as dc_field

from .coeff import Q
from .linalg import OnceCache, Slice, as_expr
from .series import TruncSeries, free_lie_dims, pbw_series, witt_inverse, SeriesError
from .tensor import (Alphabet, Br, Expr, Gen, Generator, TensorElem, parse_bracket_expr,
                     parse_expr_ast, raw_bracket, raw_concat, SPACE)


class LieError(ValueError):
    pass


def is_lyndon(w):
    return all(w < w[i:] for i in range(1, len(w)))


class LieContext:
    """Caches word lists, coordinate sets and free Lie slices for one alphabet and field."""

    def __init__(self, alphabet, field=Q):
        self.alphabet = alphabet
        self.field = field
        self._words = OnceCache()
        self._coords = OnceCache()
        self._free = OnceCache()
        self._full = OnceCache()

    def gen(self, i):
        return TensorElem(self.alphabet, {(i,): 1}, self.field)

    def gen_label(self, i):
        return Gen(self.alphabet[i].name)

    def words(self, n, k):
        """All words of dimension n containing exactly k cell letters."""
        if n < 0 or k < 0:
            return ()
        return self._words.get((n, k), lambda: self._make_words(n, k))

    def _make_words(self, n, k):
        if n == 0:
            return ((),) if k == 0 else ()
        out = []
        A = self.alphabet
        for i in range(len(A)):
            for w in self.words(n - A.dims[i], k - A.ycounts[i]):
                out.append((i,) + w)
        return tuple(out)

    def coords(self, n, k):
        """Super-Lyndon words of bidegree (n, k): Lyndon words plus squares of odd Lyndon words."""
        return self._coords.get((n, k), lambda: self._make_coords(n, k))

    def _make_coords(self, n, k):
        c = {w for w in self.words(n, k) if is_lyndon(w)}
        if n % 2 == 0 and k % 2 == 0 and (n // 2) % 2 == 1:
            c.update(w + w for w in self.words(n // 2, k // 2) if is_lyndon(w))
        return frozenset(c)

    def bidegrees(self, cutoff, max_ycount):
        return [(n, k) for n in range(1, cutoff + 1) for k in range(max_ycount + 1)
                if self.words(n, k)]

    def new_slice(self, n, k, lie=True):
        return Slice(self.alphabet, self.field, (n, k), self.coords(n, k) if lie else None)

    def free_slice(self, n, k=0):
        """Span of left-normed brackets of generators in bidegree (n, k)."""
        return self._free.get((n, k), lambda: self._make_free(n, k))

    def _make_free(self, n, k):
        s = self.new_slice(n, k)
        A = self.alphabet
        p = self.field.p
        for i in range(len(A)):
            if A.dims[i] == n and A.ycounts[i] == k:
                s.insert(self.gen(i), self.gen_label(i), check=False)
        for i in range(len(A)):
            m, kk = n - A.dims[i], k - A.ycounts[i]
            if m < 1 or kk < 0 or not self.words(m, kk):
                continue
            prev = self.free_slice(m, kk)
            odd_g = A.dims[i] % 2 == 1
            odd_v = m % 2 == 1
            g = {(i,): 1}
            for v, lab in zip(prev.basis, prev.labels):
                t = TensorElem(self.alphabet, raw_bracket(v.terms, g, odd_g and odd_v, p), self.field)
                s.insert(t, Br(as_expr(lab), Expr.atom(self.gen_label(i))), check=False)
        if s.rank != len(s.coords):
            raise LieError(f"free Lie slice {(n, k)} has rank {s.rank}, expected {len(s.coords)}")
        return s

    def full_free_slice(self, n, k=0):
        """Free Lie slice echeloned on all words; used for Lie-membership tests."""
        def make():
            s = Slice(self.alphabet, self.field, (n, k))
            src = self.free_slice(n, k)
            for v, lab in zip(src.basis, src.labels):
                s.insert(v, lab, check=False)
            return s
        return self._full.get((n, k), make)

    def is_lie(self, v):
        if not v.terms:
            return True
        n, k = v.bidegree
        if k is None:
            return False
        return self.full_free_slice(n, k).contains(v)

    def bracket(self, v, i):
        """[v, generator i] for homogeneous v."""
        A = self.alphabet
        odd = v.dim % 2 == 1 and A.dims[i] % 2 == 1
        return TensorElem(self.alphabet, raw_bracket(v.terms, {(i,): 1}, odd, self.field.p), self.field)


def free_lie_slice(alphabet, n, field=Q, k=0):
    return LieContext(alphabet, field).free_slice(n, k)


class IdealFamily:
    """Lie ideal generated by ``seeds`` in the free Lie algebra of ``ctx``, per bidegree.

    With ``base`` (another family on the same context), slices contain the
    base ideal first; ``gens(key)`` then spans the new ideal modulo the base.
    Slices are computed lazily on request.
    """

    def __init__(self, ctx, seeds, labels=None, base=None):
        self.ctx = ctx
        self.base = base
        self.seeds = {}
        for j, s in enumerate(seeds):
            if not s.terms:
                continue
            if not ctx.is_lie(s):
                raise LieError(f"seed {s} is not a Lie element")
            lab = labels[j] if labels else None
            self.seeds.setdefault(s.bidegree, []).append((s, lab))
        self._cache = OnceCache()

    def get(self, n, k=0):
        return self._cache.get((n, k), lambda: self._make(n, k))

    def _make(self, n, k):
        ctx = self.ctx
        if self.base is not None:
            s = self.base.slice(n, k).copy()
        else:
            s = ctx.new_slice(n, k)
        start = len(s.basis)
        for v, lab in self.seeds.get((n, k), ()):
            s.insert(v, lab, check=False)
        A = ctx.alphabet
        full = len(ctx.coords(n, k))
        for i in range(len(A)):
            m, kk = n - A.dims[i], k - A.ycounts[i]
            if m < 1 or kk < 0 or not ctx.words(m, kk):
                continue
            vs, labs = self.gens(m, kk)
            for v, lab in zip(vs, labs):
                if s.rank == full:
                    return s, start
                t = ctx.bracket(v, i)
                if t.terms:
                    s.insert(t, None if lab is None else Br(as_expr(lab), Expr.atom(ctx.gen_label(i))),
                             check=False)
        return s, start

    def slice(self, n, k=0):
        return self.get(n, k)[0]

    def gens(self, n, k=0):
        s, start = self.get(n, k)
        return s.basis[start:], s.labels[start:]

    def dim(self, n, k=0):
        """Dimension of this ideal modulo the base ideal."""
        s, start = self.get(n, k)
        return len(s.basis) - start

    def dims(self, cutoff, k=0):
        return {n: self.dim(n, k) for n in range(1, cutoff + 1) if self.ctx.words(n, k)}


def ideal_closure(ctx, seeds, cutoff, labels=None, base=None, k=0):
    """Slices of the Lie ideal generated by ``seeds`` in every dim <= cutoff (ycount k)."""
    fam = IdealFamily(ctx, seeds, labels, base)
    return {n: fam.slice(n, k) for n in range(1, cutoff + 1) if ctx.words(n, k)}, fam


# -- presentations -------------------------------------------------------------

@dataclass
class LiePresentation:
    """Generators (name, dim) and relations as bracket-expression strings."""

    generators: list
    relations: list = dc_field(default_factory=list)

    def alphabet(self):
        return Alphabet([g if isinstance(g, Generator) else Generator(g[0], g[1], SPACE)
                         for g in self.generators])

    def parsed_relations(self, alphabet, field=Q):
        out = []
        for r in self.relations:
            v = parse_bracket_expr(r, alphabet, field)
            out.append(v)
        return out

    def to_dict(self):
        return {"generators": [{"name": g.name, "dim": g.dim} for g in self.generators],
                "relations": list(self.relations)}


def validate_presentation(pres, ctx):
    rels = pres.parsed_relations(ctx.alphabet, ctx.field)
    for src, v in zip(pres.relations, rels):
        if v.terms and not ctx.is_lie(v):
            raise LieError(f"relation {src!r} is not a Lie element")
    return rels


def presented_lie_slice(pres, n, field=Q, ctx=None):
    """(dim of L_n, free slice, relation-ideal slice) for the presented algebra."""
    ctx = ctx or LieContext(pres.alphabet(), field)
    rels = validate_presentation(pres, ctx)
    fam = IdealFamily(ctx, rels, [parse_expr_ast(r) for r in pres.relations])
    free = ctx.free_slice(n, 0) if ctx.words(n, 0) else ctx.new_slice(n, 0)
    ideal = fam.slice(n, 0) if ctx.words(n, 0) else ctx.new_slice(n, 0)
    return free.rank - ideal.rank, free, ideal


def components(gen_names, supports):
    """Union-find blocks: generators sharing a support set end up together."""
    parent = {g: g for g in gen_names}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for sup in supports:
        sup = list(sup)
        for a in sup[1:]:
            ra, rb = find(sup[0]), find(a)
            if ra != rb:
                parent[rb] = ra
    blocks = {}
    for g in gen_names:
        blocks.setdefault(find(g), []).append(g)
    return list(blocks.values())


def support(v):
    return {v.alphabet[i].name for w in v.terms for i in w}


def presented_lie_dims(pres, cutoff, field=Q):
    """Graded dims of the presented Lie algebra through ``cutoff``.

    The presentation is split into free-product factors (generators linked
    by relations); each factor is computed on its own and the enveloping
    series are recombined.  A factor whose quotient vanishes on a window of
    length max(generator dim) vanishes from then on.
    """
    alphabet = pres.alphabet()
    rels = pres.parsed_relations(alphabet, field)
    blocks = components(alphabet.names(), [support(r) for r in rels if r.terms])
    inv_total = TruncSeries.one(cutoff)
    for block in blocks:
        gens = [g for g in alphabet if g.name in block]
        brels = [src for src, r in zip(pres.relations, rels) if r.terms and support(r) <= set(block)]
        if brels:
            sub = LiePresentation(gens, brels)
            validate_presentation(sub, LieContext(sub.alphabet(), field))
        dims = block_lie_dims(gens, brels, cutoff, field)
        inv_total = inv_total + pbw_series(dims).inverse() - 1
    return witt_inverse(inv_total.inverse())


def block_lie_dims(gens, relations, cutoff, field=Q):
    if not relations:
        return free_lie_dims([g.dim for g in gens], cutoff)
    sub = LiePresentation(list(gens), list(relations))
    ctx = LieContext(sub.alphabet(), field)
    rels = sub.parsed_relations(ctx.alphabet, field)
    fam = IdealFamily(ctx, rels)
    window = max(g.dim for g in gens)
    dims = [0] * (cutoff + 1)
    zero_run = 0
    for n in range(1, cutoff + 1):
        if not ctx.words(n, 0):
            zero_run += 1
        else:
            d = len(ctx.coords(n, 0)) - fam.slice(n, 0).rank
            dims[n] = d
            zero_run = zero_run + 1 if d == 0 else 0
        if zero_run >= window:
            break
    return TruncSeries(dims)


# -- minimal generators and freeness ---------------------------------------------

@dataclass
class MinimalGenerators:
    dims: dict
    reps: dict  # n -> list of (TensorElem, label)


def minimal_generators(ideal, cutoff, k=0):
    """Per dim, J_n modulo [J, J]_n (and the base ideal); dims and representatives."""
    ctx = ideal.ctx
    p = ctx.field.p
    dims, reps = {}, {}
    present = [n for n in range(1, cutoff + 1) if ctx.words(n, k) and ideal.dim(n, k)]
    for n in present:
        s = ideal.base.slice(n, k).copy() if ideal.base is not None else ctx.new_slice(n, k)
        for a in present:
            b = n - a
            if b < a:
                break
            if b not in present:
                continue
            va, _ = ideal.gens(a, k)
            vb, _ = ideal.gens(b, k)
            odd = a % 2 == 1 and b % 2 == 1
            for i, u in enumerate(va):
                for j, v in enumerate(vb):
                    if a == b and j < i:
                        continue
                    t = raw_bracket(u.terms, v.terms, odd, p)
                    if t:
                        s.insert(TensorElem(ctx.alphabet, t, ctx.field), check=False)
        vs, labs = ideal.gens(n, k)
        new = [(v, lab) for v, lab in zip(vs, labs) if not s.insert(v, lab, check=False)]
        if new:
            dims[n] = len(new)
            reps[n] = new
    return MinimalGenerators(dims, reps)


@dataclass
class Verdict:
    ok: bool
    cutoff: int
    first_failure: int = None
    text: str = ""

    def __bool__(self):
        return self.ok


def lie_freeness_check(jdims, wdims, cutoff):
    """Compare dims of the free Lie algebra on W with the ideal dims through ``cutoff``."""
    J = jdims if isinstance(jdims, TruncSeries) else TruncSeries.from_dims(jdims, cutoff)
    W = wdims if isinstance(wdims, TruncSeries) else TruncSeries.from_dims(wdims, cutoff)
    if W[0]:
        raise SeriesError("W must vanish in dimension 0")
    free = witt_inverse((1 - W).inverse())
    bad = free.first_difference(J)
    if bad is None:
        return Verdict(True, cutoff, None, f"consistent-with-free <= {cutoff}")
    return Verdict(False, cutoff, bad, f"not free at dim {bad} (checked <= {cutoff})")


class AssocIdeal:
    """Two-sided ideal of T(V) generated by ``seeds``, optionally modulo a base ideal."""

    def __init__(self, ctx, seeds, base=None):
        self.ctx = ctx
        self.base = base
        self.seeds = {}
        for s in seeds:
            if s.terms:
                self.seeds.setdefault(s.dim, []).append(s)
        self._cache = OnceCache()

    def get(self, n):
        return self._cache.get(n, lambda: self._make(n))

    def _make(self, n):
        ctx = self.ctx
        s = self.base.get(n)[0].copy() if self.base is not None else ctx.new_slice(n, None, lie=False)
        start = len(s.basis)
        for v in self.seeds.get(n, ()):
            s.insert(v, check=False)
        p = ctx.field.p
        for i in ctx.alphabet.space_indices():
            m = n - ctx.alphabet.dims[i]
            if m < 1:
                continue
            g = {(i,): 1}
            for v in self.gens(m):
                s.insert(TensorElem(ctx.alphabet, raw_concat(g, v.terms, p), ctx.field), check=False)
                s.insert(TensorElem(ctx.alphabet, raw_concat(v.terms, g, p), ctx.field), check=False)
        return s, start

    def gens(self, m):
        s, start = self.get(m)
        return s.basis[start:]

    def dim(self, n):
        s, start = self.get(n)
        return len(s.basis) - start


def enveloping_ideal_check(ctx, relations, seeds, wdims, cutoff):
    """Check I(z) = UL_0(z) W(z) for the two-sided ideal I generated by the seeds in UL_0.

    UL_0 is T(V) modulo the two-sided ideal of the relations; all
    dimensions are computed directly in T(V).  Returns (Verdict, A, I).
    """
    R = AssocIdeal(ctx, relations)
    I = AssocIdeal(ctx, seeds, base=R)
    a = [1] + [0] * cutoff
    i_dims = [0] * (cutoff + 1)
    for n in range(1, cutoff + 1):
        nw = len(ctx.words(n, 0))
        if not nw:
            continue
        a[n] = nw - R.dim(n)
        i_dims[n] = I.dim(n)
    A = TruncSeries(a)
    Iser = TruncSeries(i_dims)
    W = wdims if isinstance(wdims, TruncSeries) else TruncSeries.from_dims(wdims, cutoff)
    expect = A * W.truncate(cutoff)
    bad = expect.first_difference(Iser)
    if bad is None:
        v = Verdict(True, cutoff, None, f"I(z) = UL0(z) W(z) <= {cutoff}")
    else:
        v = Verdict(False, cutoff, bad, f"I(z) != UL0(z) W(z) at dim {bad} (checked <= {cutoff})")
    return v, A, Iser
