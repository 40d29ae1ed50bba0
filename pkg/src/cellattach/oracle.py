"""Brute-force recomputation of free Lie and ideal dimensions.

Everything is spanned exhaustively (all left-normed brackets of generator
sequences, all iterated adjoint actions on the seeds), expanded on full
word coordinates and ranked with FLINT.  Nothing here shares code with
the echelon engine beyond the expression parser.
"""

import flint

from .dgl import build_model, homology_deg0
from .tensor import Alphabet, Generator, SPACE, parse_bracket_expr

GUARD = 14


def _bracket(a, b, da, db, p):
    out = {}
    s = 1 if (da * db) % 2 else -1  # [a,b] = ab - (-1)^{|a||b|} ba
    for u, x in a.items():
        for v, y in b.items():
            out[u + v] = out.get(u + v, 0) + x * y
            out[v + u] = out.get(v + u, 0) + s * x * y
    if p:
        return {w: c % p for w, c in out.items() if c % p}
    return {w: c for w, c in out.items() if c}


def _sequences(dims, n):
    """All generator-index sequences of total dimension n."""
    if n == 0:
        yield ()
        return
    for i, d in enumerate(dims):
        if d <= n:
            for rest in _sequences(dims, n - d):
                yield (i,) + rest


def _words(dims, n):
    return sorted(_sequences(dims, n))


def _ad_chain(v, dv, seq, dims, p):
    for i in seq:
        v = _bracket(v, {(i,): 1}, dv, dims[i], p)
        dv += dims[i]
        if not v:
            break
    return v


def _rank(vectors, cols, p):
    rows = []
    for v in vectors:
        if not v:
            continue
        den = 1
        for c in v.values():
            if hasattr(c, "denominator"):
                den = den * c.denominator // _gcd(den, c.denominator)
        rows.append([int(v.get(w, 0) * den) for w in cols])
    if not rows:
        return 0
    if p:
        return flint.nmod_mat(rows, p).rank()
    return flint.fmpz_mat(rows).rank()


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def free_dims(dims, cutoff, p=0):
    out = {}
    for n in range(1, cutoff + 1):
        cols = _words(dims, n)
        if not cols:
            continue
        vecs = []
        for seq in _sequences(dims, n):
            vecs.append(_ad_chain({(seq[0],): 1}, dims[seq[0]], seq[1:], dims, p))
        out[n] = _rank(vecs, cols, p)
    return out


def ideal_dims(dims, seeds, cutoff, p=0):
    """seeds: list of (raw dict, dim)."""
    out = {}
    for n in range(1, cutoff + 1):
        cols = _words(dims, n)
        if not cols:
            continue
        vecs = []
        for s, ds in seeds:
            if ds <= n:
                for seq in _sequences(dims, n - ds):
                    vecs.append(_ad_chain(dict(s), ds, seq, dims, p))
        out[n] = _rank(vecs, cols, p)
    return out


def oracle_tables(problem):
    """n -> (free, relation ideal, relation + attach ideal, quotient) by exhaustive spanning."""
    N = problem.cutoff
    p = problem.field.p
    gens = [Generator(g.name, g.dim, SPACE) for g in problem.space.generators]
    alpha = Alphabet(gens)
    dims = [g.dim for g in gens]
    rels, atts = [], []
    for r in problem.space.relations:
        v = parse_bracket_expr(r, alpha, problem.field)
        if v.terms:
            rels.append((v.terms, v.dim))
    for c in problem.cells:
        v = parse_bracket_expr(c.attach, alpha, problem.field)
        if v.terms:
            atts.append((v.terms, v.dim))
    fd = free_dims(dims, N, p)
    rd = ideal_dims(dims, rels, N, p)
    jd = ideal_dims(dims, rels + atts, N, p)
    return {n: (fd[n], rd[n], jd[n], fd[n] - jd[n]) for n in fd}


def main_tables(problem):
    m = build_model(problem)
    h0 = homology_deg0(m, with_reps=False)
    out = {}
    for n in range(1, problem.cutoff + 1):
        if not m.ctx.words(n, 0):
            continue
        out[n] = (m.ctx.free_slice(n, 0).rank, m.R.slice(n, 0).rank, m.J.slice(n, 0).rank, h0.dims[n])
    return out


def compare(problem):
    """(identical, text) comparing the engine against the brute-force spans."""
    a = main_tables(problem)
    b = oracle_tables(problem)
    head = f"{'n':>3}  {'free':>11}  {'relations':>11}  {'ideal':>11}  {'quotient':>11}   (engine/oracle)"
    lines = [head]
    diff = []
    for n in sorted(set(a) | set(b)):
        x, y = a.get(n), b.get(n)
        cells = "  ".join(f"{f'{u}/{v}':>11}" for u, v in zip(x or (None,) * 4, y or (None,) * 4))
        lines.append(f"{n:>3}  {cells}")
        if x != y:
            diff.append(n)
    lines.append("identical" if not diff else "differ at dims " + ", ".join(map(str, diff)))
    return not diff, "\n".join(lines)
