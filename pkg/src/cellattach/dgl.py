"""The dgL (L_X ⨿ 𝕃⟨y_j⟩, d) of a cell attachment and its homology in degrees 0 and 1.

Bidegrees are (dimension, ycount); the differential lowers both by one.
The presented L_X is realised as the free Lie algebra on all generators
modulo the Lie ideal generated by the relations of L_X.
"""

from dataclasses import dataclass, field as dc_field

from .coeff import FieldSpec
from .lie import IdealFamily, LieContext, LiePresentation, LieError
from .linalg import GradedMap, as_expr, kernel_and_image
from .tensor import (Alphabet, Br, CELL, Expr, Gen, Generator, SPACE, TensorElem, parse_bracket_expr,
                     parse_expr_ast, raw_bracket)


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    name: str
    cell_dim: int
    attach: str

    @property
    def gen_dim(self):
        return self.cell_dim - 1


@dataclass
class AttachmentProblem:
    field: FieldSpec
    cutoff: int
    space: LiePresentation
    cells: list
    prime_samples: list = dc_field(default_factory=lambda: [5, 7, 11])
    k_names: list = None


def _koszul(prefix_dim):
    return -1 if prefix_dim % 2 else 1


def raw_differential(terms, dtab, dims, p):
    """Derivation extension of the generator table ``dtab`` (index -> raw dict or None)."""
    out = {}
    for w, c in terms.items():
        deg = 0
        for pos, i in enumerate(w):
            dv = dtab[i]
            if dv:
                s = _koszul(deg) * c
                pre, suf = w[:pos], w[pos + 1:]
                for u, e in dv.items():
                    key = pre + u + suf
                    x = out.get(key, 0) + s * e
                    out[key] = x % p if p else x
            deg += dims[i]
    return {w: x for w, x in out.items() if x}


class DglModel:
    """Validated attachment model with caches for its bigraded slices."""

    def __init__(self, problem, alphabet, relations, attaches, ctx=None):
        self.problem = problem
        self.field = problem.field
        self.cutoff = problem.cutoff
        self.alphabet = alphabet
        self.ctx = ctx or LieContext(alphabet, problem.field)
        self.relations = relations
        self.attaches = attaches
        self.cells = list(problem.cells)
        self.dtab = [None] * len(alphabet)
        for cell, a in zip(self.cells, attaches):
            self.dtab[alphabet.index[cell.name]] = dict(a.terms)
        rel_labels = [parse_expr_ast(r) for r in problem.space.relations]
        self.R = IdealFamily(self.ctx, relations, rel_labels)
        att_labels = [parse_expr_ast(c.attach) for c in self.cells]
        self.J = IdealFamily(self.ctx, attaches, att_labels, base=self.R)
        self._boundaries = {}

    @property
    def space_indices(self):
        return self.alphabet.space_indices()

    def d(self, v):
        return TensorElem(self.alphabet, raw_differential(v.terms, self.dtab, self.alphabet.dims,
                                                         self.field.p), self.field)

    def reachable(self):
        return self.ctx.bidegrees(self.cutoff, 2)

    def boundary_slice(self, n):
        """R + d(free ycount-2 slice) inside ycount 1, dimension n."""
        if n not in self._boundaries:
            ctx = self.ctx
            s = self.R.slice(n, 1).copy() if ctx.words(n, 1) else ctx.new_slice(n, 1)
            if ctx.words(n + 1, 2):
                for c in ctx.free_slice(n + 1, 2).basis:
                    dc = self.d(c)
                    if dc.terms:
                        s.insert(dc, check=False)
            self._boundaries[n] = s
        return self._boundaries[n]


def _parse_problem(problem):
    space = problem.space
    if problem.cutoff < 0:
        raise ModelError("cutoff must be nonnegative")
    space_gens = [Generator(g.name, g.dim, SPACE) for g in space.generators]
    names = set()
    for g in space_gens:
        if g.name in names:
            raise ModelError(f"duplicate generator name {g.name!r}")
        names.add(g.name)
    cell_gens = []
    for c in problem.cells:
        if c.name in names:
            raise ModelError(f"duplicate generator name {c.name!r}")
        if c.cell_dim < 3:
            raise ModelError(f"cell {c.name!r}: cell dimension must be >= 3, got {c.cell_dim}")
        names.add(c.name)
        cell_gens.append(Generator(c.name, c.cell_dim - 1, CELL))
    maxdim = max([g.dim for g in space_gens + cell_gens], default=0)
    if problem.cutoff < maxdim:
        raise ModelError(f"cutoff {problem.cutoff} is below the largest generator dim {maxdim}")
    alphabet = Alphabet(space_gens + cell_gens)
    relations = space.parsed_relations(alphabet, problem.field)
    space_alpha = Alphabet(space_gens)
    attaches = []
    for c in problem.cells:
        a_space = parse_bracket_expr(c.attach, space_alpha, problem.field)
        a = TensorElem(alphabet, a_space.terms, problem.field)
        n = c.cell_dim - 1
        if a.terms and a.dim != n - 1:
            raise ModelError(f"cell e^{n + 1} requires attach class of dim {n - 1}; "
                             f"{c.attach!r} has dim {a.dim}")
        attaches.append(a)
    return alphabet, relations, attaches


def validate_problem(problem):
    """Names, dimensions and syntax only; no Lie-membership tests."""
    _parse_problem(problem)


def build_model(problem):
    alphabet, relations, attaches = _parse_problem(problem)
    ctx = LieContext(alphabet, problem.field)
    for src, v in zip(problem.space.relations, relations):
        if v.terms and not ctx.is_lie(v):
            raise LieError(f"relation {src!r} is not a Lie element")
    for c, a in zip(problem.cells, attaches):
        if a.terms and not ctx.is_lie(a):
            raise ModelError(f"attach {c.attach!r} is not a Lie element")
    return DglModel(problem, alphabet, relations, attaches, ctx)


def differential(m, v):
    return m.d(v)


@dataclass
class Homology0:
    dims: dict
    reps: dict  # n -> list of (TensorElem, label)
    l0_dims: dict
    ideal_dims: dict


def homology_deg0(m, cutoff=None, with_reps=True):
    """dims of L_0/[d'V_1] per dimension, via the Lie ideal of the attach classes."""
    N = m.cutoff if cutoff is None else cutoff
    ctx = m.ctx
    dims, reps, l0, jd = {}, {}, {}, {}
    for n in range(1, N + 1):
        if not ctx.words(n, 0):
            continue
        free = len(ctx.coords(n, 0))
        l0[n] = free - m.R.slice(n, 0).rank
        jd[n] = m.J.dim(n, 0)
        dims[n] = free - m.J.slice(n, 0).rank
        if with_reps and dims[n]:
            s = m.J.slice(n, 0).copy()
            f = ctx.free_slice(n, 0)
            reps[n] = [(v, lab) for v, lab in zip(f.basis, f.labels) if not s.insert(v, lab, check=False)]
    return Homology0(dims, reps, l0, jd)


def homology_deg0_kerim(m, cutoff=None):
    """Same dims as :func:`homology_deg0`, computed as L_0 / d(L_1) with no ideal closure."""
    N = m.cutoff if cutoff is None else cutoff
    ctx = m.ctx
    out = {}
    for n in range(1, N + 1):
        if not ctx.words(n, 0):
            continue
        s = m.R.slice(n, 0).copy()
        if ctx.words(n + 1, 1):
            for b in ctx.free_slice(n + 1, 1).basis:
                db = m.d(b)
                if db.terms:
                    s.insert(db, check=False)
        out[n] = len(ctx.coords(n, 0)) - s.rank
    return out


@dataclass
class Homology1:
    dims: dict            # n -> dim (H L)_1 in dimension n
    cycle_dims: dict      # n -> dim of cycles modulo the relation ideal
    k_dims: dict          # n -> number of module generators
    k_reps: dict          # n -> list of (TensorElem, label)
    reps: dict            # n -> basis of (H L)_1 as (TensorElem, label), modulo boundaries


def homology_deg1(m, cutoff=None):
    """(H L)_1 per dimension together with minimal generators as a (H L)_0-module.

    Module generators are found dimension by dimension: the cycles are
    compared with boundaries plus the span of [c, x] for previously found
    classes c and space generators x.  Explicit kernels are only computed
    where new generators appear.
    """
    N = m.cutoff if cutoff is None else cutoff
    ctx = m.ctx
    A = m.alphabet
    p = m.field.p
    dims, zdims, kdims, kreps, reps = {}, {}, {}, {}, {}
    for n in range(1, N + 1):
        if not ctx.words(n, 1):
            continue
        F1 = ctx.free_slice(n, 1)
        target = m.R.slice(n - 1, 0).copy() if ctx.words(n - 1, 0) else ctx.new_slice(n - 1, 0)
        before = target.rank
        for b in F1.basis:
            db = m.d(b)
            if db.terms:
                target.insert(db, check=False)
        rank_d = target.rank - before
        S = m.boundary_slice(n).copy()
        zdim = F1.rank - rank_d - m.R.slice(n, 1).rank
        h1 = F1.rank - rank_d - S.rank
        new = []
        for i in m.space_indices:
            k = n - A.dims[i]
            for v, lab in reps.get(k, ()):
                t = TensorElem(A, raw_bracket(v.terms, {(i,): 1}, k % 2 == 1 and A.dims[i] % 2 == 1, p),
                               m.field)
                if t.terms and not S.insert(t, check=False):
                    new.append((t, None if lab is None else Br(as_expr(lab), Expr.atom(Gen(A[i].name)))))
        missing = h1 - len(new)
        found = []
        if missing > 0:
            dmap = GradedMap(m.d, (n, 1), (n - 1, 0), ctx.coords(n - 1, 0) if ctx.words(n - 1, 0) else None)
            modulo = m.R.slice(n - 1, 0) if ctx.words(n - 1, 0) else None
            kernel, _ = kernel_and_image(dmap, F1, modulo=modulo)
            for v, lab in zip(kernel.basis, kernel.labels):
                if not S.insert(v, check=False):
                    found.append((v, lab))
            if len(found) != missing:
                raise LieError(f"module generator count mismatch at dim {n}: {len(found)} vs {missing}")
        zdims[n] = zdim
        dims[n] = h1
        if found:
            kdims[n] = len(found)
            kreps[n] = found
        if found or new:
            reps[n] = found + new
    return Homology1(dims, zdims, kdims, kreps, reps)


def is_cycle(m, v):
    if not v.terms:
        return True
    n, k = v.bidegree
    dv = m.d(v)
    if not dv.terms:
        return True
    if k != 1:
        return False
    return m.R.slice(n - 1, 0).contains(dv) if m.ctx.words(n - 1, 0) else False


def adjoint_action(m, h0rep, h1rep):
    """Right action [c, x] of a degree-0 element on a degree-1 cycle.

    Returns (representative, is_zero) where ``is_zero`` says whether the
    class vanishes modulo boundaries and the relation ideal.
    """
    if h0rep.terms and h0rep.bidegree[1] != 0:
        raise ModelError("acting element must have ycount 0")
    if not is_cycle(m, h1rep):
        raise ModelError("representative not a cycle")
    if not h0rep.terms or not h1rep.terms:
        return TensorElem(m.alphabet, None, m.field), True
    odd = h1rep.dim % 2 == 1 and h0rep.dim % 2 == 1
    t = TensorElem(m.alphabet, raw_bracket(h1rep.terms, h0rep.terms, odd, m.field.p), m.field)
    if not t.terms:
        return t, True
    return t, m.boundary_slice(t.dim).contains(t)


def same_class(m, a, b):
    """Whether two degree-1 cycles of the same dimension are homologous."""
    diff = a - b
    if not diff.terms:
        return True
    return m.boundary_slice(diff.dim).contains(diff)
