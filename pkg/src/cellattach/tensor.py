"""Graded tensor algebra T(V): words, linear combinations, graded commutators.

Words are tuples of generator indices into an :class:`Alphabet`.  Lie
elements are carried by their expansion in T(V).
"""

import re
from dataclasses import dataclass
from fractions import Fraction

from .coeff import Q

SPACE = "space"
CELL = "cell"


@dataclass(frozen=True)
class Generator:
    name: str
    dim: int
    kind: str = SPACE

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"generator {self.name!r} needs dim >= 1, got {self.dim}")
        if self.kind not in (SPACE, CELL):
            raise ValueError(f"unknown generator kind {self.kind!r}")


class Alphabet:
    """Ordered set of graded generators; the order fixes the word order."""

    def __init__(self, generators):
        self.generators = tuple(generators)
        self.index = {}
        for i, g in enumerate(self.generators):
            if g.name in self.index:
                raise ValueError(f"duplicate generator name {g.name!r}")
            self.index[g.name] = i
        self.dims = tuple(g.dim for g in self.generators)
        self.ycounts = tuple(1 if g.kind == CELL else 0 for g in self.generators)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def __repr__(self):
        return "Alphabet(" + ", ".join(f"{g.name}:{g.dim}" for g in self.generators) + ")"

    def names(self):
        return [g.name for g in self.generators]

    def word_dim(self, word):
        return sum(self.dims[i] for i in word)

    def word_ycount(self, word):
        return sum(self.ycounts[i] for i in word)

    def word_str(self, word):
        return "*".join(self.generators[i].name for i in word) if word else "1"

    def space_indices(self):
        return [i for i, g in enumerate(self.generators) if g.kind == SPACE]

    def cell_indices(self):
        return [i for i, g in enumerate(self.generators) if g.kind == CELL]


# -- raw sparse kernels (dict word -> coeff); p == 0 means Q -------------------

def raw_add(a, b, p, scale=1):
    out = dict(a)
    for w, c in b.items():
        v = out.get(w, 0) + scale * c
        if p:
            v %= p
        if v:
            out[w] = v
        else:
            out.pop(w, None)
    return out


def raw_scale(a, c, p):
    if not c:
        return {}
    if p:
        return {w: x * c % p for w, x in a.items()}
    return {w: x * c for w, x in a.items()}


def raw_concat(a, b, p):
    out = {}
    for u, c in a.items():
        for v, e in b.items():
            w = u + v
            x = out.get(w, 0) + c * e
            out[w] = x % p if p else x
    return {w: x for w, x in out.items() if x}


def raw_bracket(a, b, odd_pair, p):
    """a*b - (-1)^{|a||b|} b*a; ``odd_pair`` is True when both dims are odd."""
    out = {}
    s = 1 if odd_pair else -1
    for u, c in a.items():
        for v, e in b.items():
            ce = c * e
            w = u + v
            x = out.get(w, 0) + ce
            out[w] = x % p if p else x
            w = v + u
            x = out.get(w, 0) + s * ce
            out[w] = x % p if p else x
    return {w: x for w, x in out.items() if x}


class TensorElem:
    """A finite linear combination of words with nonzero coefficients."""

    __slots__ = ("alphabet", "field", "terms", "_bideg")

    def __init__(self, alphabet, terms=None, field=Q):
        self.alphabet = alphabet
        self.field = field
        self.terms = {w: c for w, c in (terms or {}).items() if c}
        self._bideg = None

    @classmethod
    def generator(cls, alphabet, name, field=Q):
        return cls(alphabet, {(alphabet.index[name],): 1}, field)

    @classmethod
    def word(cls, alphabet, names, field=Q, coeff=1):
        return cls(alphabet, {tuple(alphabet.index[n] for n in names): field.coerce(coeff)}, field)

    def _same(self, other):
        if self.alphabet != other.alphabet or self.field != other.field:
            raise ValueError("alphabet or field mismatch")

    def _new(self, terms):
        return TensorElem(self.alphabet, terms, self.field)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, TensorElem):
            return NotImplemented
        return self.alphabet == other.alphabet and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        self._same(other)
        return self._new(raw_add(self.terms, other.terms, self.field.p))

    def __sub__(self, other):
        self._same(other)
        return self._new(raw_add(self.terms, other.terms, self.field.p, -1))

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        return self._new(raw_scale(self.terms, self.field.coerce(c), self.field.p))

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, other):
        if not isinstance(other, TensorElem):
            return self.scale(other)
        return concat_product(self, other)

    @property
    def bidegree(self):
        """(dim, ycount) if homogeneous, None for zero; raises if mixed."""
        if self._bideg is None and self.terms:
            degs = {(self.alphabet.word_dim(w), self.alphabet.word_ycount(w)) for w in self.terms}
            if len({d for d, _ in degs}) > 1:
                raise ValueError("element is not homogeneous in dimension")
            self._bideg = degs.pop() if len(degs) == 1 else (next(iter(degs))[0], None)
        return self._bideg

    @property
    def dim(self):
        b = self.bidegree
        return None if b is None else b[0]

    def __repr__(self):
        return f"TensorElem({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, reverse=True):
            c = self.field.signed(self.terms[w])
            parts.append(_term_str(c, self.alphabet.word_str(w), not parts))
        return " ".join(parts)


def _term_str(c, body, first):
    sign = "-" if c < 0 else "+"
    mag = abs(c)
    text = body if mag == 1 else f"{mag}*{body}"
    if first:
        return ("-" if c < 0 else "") + text
    return f"{sign} {text}"


def concat_product(a, b):
    a._same(b)
    return a._new(raw_concat(a.terms, b.terms, a.field.p))


def graded_bracket(a, b):
    a._same(b)
    if not a.terms or not b.terms:
        return a._new({})
    try:
        da, db = a.dim, b.dim
    except ValueError:
        raise ValueError("bracket requires homogeneous arguments") from None
    return a._new(raw_bracket(a.terms, b.terms, da % 2 == 1 and db % 2 == 1, a.field.p))


# -- bracket expressions -------------------------------------------------------
#
#   expr := ['+'|'-'] term (('+'|'-') term)*
#   term := [rational '*'] atom
#   atom := name | '[' expr ',' expr ']' | '0'

class ParseError(ValueError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class Gen:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Br:
    left: "Expr"
    right: "Expr"

    def __str__(self):
        return f"[{self.left},{self.right}]"


@dataclass(frozen=True)
class Expr:
    """Linear combination of atoms: tuple of (Fraction coefficient, atom)."""

    terms: tuple = ()

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for c, atom in self.terms:
            parts.append(_term_str(c, str(atom), not parts))
        return " ".join(parts)

    @classmethod
    def atom(cls, atom):
        return cls(((Fraction(1), atom),))

    def combine(self, other, c=1):
        return Expr(self.terms + tuple((c * k, a) for k, a in other.terms))

    def scaled(self, c):
        return Expr(tuple((c * k, a) for k, a in self.terms if c * k))

    def simplified(self):
        """Merge repeated atoms and drop zero coefficients, keeping first-seen order."""
        acc = {}
        for c, a in self.terms:
            acc[a] = acc.get(a, 0) + c
        return Expr(tuple((Fraction(c), a) for a, c in acc.items() if c))


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_']*)|(.))")


def _tokens(src):
    pos = 0
    out = []
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("num", m.group(1), start))
        elif m.group(2):
            out.append(("name", m.group(2), start))
        else:
            out.append(("op", m.group(3), start))
        pos = m.end()
    out.append(("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = _tokens(src)
        self.i = 0
        self.positions = {}  # id(node) -> source offset

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        terms = []
        sign = 1
        tok = self.peek()
        starts = []
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            self.i += 1
        starts.append(self.peek()[2])
        terms.extend(self.term(sign))
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.i += 1
                terms.extend(self.term(-1 if tok[1] == "-" else 1))
            else:
                e = Expr(tuple(terms))
                self.positions[id(e)] = starts[0]
                return e

    def term(self, sign):
        tok = self.peek()
        coeff = Fraction(sign)
        if tok[0] == "num":
            self.i += 1
            if self.peek()[1] == "*":
                self.i += 1
                coeff *= Fraction(tok[1])
                if coeff == 0:
                    self.atom()
                    return []
            elif Fraction(tok[1]) == 0:
                return []
            else:
                raise ParseError("a coefficient must be followed by '*'", self.peek()[2])
        return [(coeff, self.atom())]

    def atom(self):
        tok = self.peek()
        if tok[0] == "name":
            self.i += 1
            g = Gen(tok[1])
            self.positions[id(g)] = tok[2]
            return g
        if tok[1] == "[":
            self.i += 1
            left = self.expr()
            self.take("op", ",")
            right = self.expr()
            self.take("op", "]")
            return Br(left, right)
        got = tok[1] or "end of input"
        raise ParseError(f"expected a generator name or '[', found {got!r}", tok[2])


def _parse(src):
    p = _Parser(src)
    e = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    return e, p.positions


def parse_expr_ast(src):
    """Parse a bracket expression into an :class:`Expr` tree (no evaluation)."""
    return _parse(src)[0]


def format_expr(expr):
    return str(expr)


def evaluate(expr, alphabet, field=Q, positions=None):
    """Expand an expression tree into a homogeneous TensorElem."""
    return _eval_expr(expr, alphabet, field, positions or {})


def _eval_expr(expr, alphabet, field, positions):
    total = TensorElem(alphabet, None, field)
    dim = None
    for c, atom in expr.terms:
        val = _eval_atom(atom, alphabet, field, positions).scale(c)
        if val:
            if dim is not None and val.dim != dim:
                raise ParseError(f"mixed dimensions ({dim} and {val.dim}) in '{expr}'",
                                 positions.get(id(expr), 0))
            dim = val.dim
        total = total + val
    return total


def _eval_atom(atom, alphabet, field, positions):
    if isinstance(atom, Gen):
        if atom.name not in alphabet.index:
            raise ParseError(f"unknown name {atom.name!r}", positions.get(id(atom), 0))
        return TensorElem.generator(alphabet, atom.name, field)
    return graded_bracket(_eval_expr(atom.left, alphabet, field, positions),
                          _eval_expr(atom.right, alphabet, field, positions))


def parse_bracket_expr(src, alphabet, field=Q):
    """Parse and expand ``src``; the result is homogeneous in dimension (or zero)."""
    ast, positions = _parse(src)
    return evaluate(ast, alphabet, field, positions)
