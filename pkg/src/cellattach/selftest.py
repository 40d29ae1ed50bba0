"""Bundled examples with their expected values, run over Q, F_5 and F_7."""

import time

from .attach import StageError
from .dgl import build_model
from .series import TruncSeries, free_lie_dims, pbw_series
from .tensor import parse_bracket_expr

FIELDS = ("Q", "Fp:5", "Fp:7")


def poly(terms, order):
    """Series from {exponent: coefficient}."""
    return TruncSeries.from_dims(terms, order)


def prod(*factors):
    out = factors[0]
    for f in factors[1:]:
        out = out * f
    return out


def _dims(lst):
    return {n: c for n, c in enumerate(lst) if c}


class CaseFailure(AssertionError):
    pass


def expect(cond, msg):
    if not cond:
        raise CaseFailure(msg)


def _common(rep):
    for c in rep.cross_checks:
        expect(c.ok, f"cross-check {c.name}: {c.detail}")
    expect(rep.free_verdict.ok, f"free verdict: {rep.free_verdict.text}")
    expect(rep.semi_inert_verdict.ok, f"semi-inert verdict: {rep.semi_inert_verdict.text}")
    expect(str(rep.cutoff) in rep.free_verdict.text and str(rep.cutoff) in rep.semi_inert_verdict.text,
           "verdicts must state their cutoff")


def _cycle(problem, src):
    m = build_model(problem)
    v = parse_bracket_expr(src, m.alphabet, m.field)
    expect(v.terms, f"{src} parses to zero")
    expect(not m.d(v).terms, f"d({src}) = {m.d(v)}, expected 0")


def check_two_cone(problem, rep, deltas):
    N = rep.cutoff
    _cycle(problem, "[a,y] - [b,x]")
    _common(rep)
    sv = rep.semi_inert_verdict
    expect(_dims(sv.h0_dims) == {2: 2, 4: 1}, f"H0 dims {_dims(sv.h0_dims)}")
    expect(_dims(sv.k_dims) == {9: 1}, f"K dims {_dims(sv.k_dims)}")
    z2 = poly({0: 1, 2: -1}, N)
    want = prod(z2, z2, poly({0: 1, 4: -1}, N)) - poly({9: 1}, N)
    expect(TruncSeries(rep.loop_series_inverse) == want, f"inverse series {rep.loop_series_inverse}")


def check_fat_wedge(problem, rep, deltas):
    N = rep.cutoff
    _cycle(problem, "[x,a]+[y,b]+[z,c]")
    _common(rep)
    sv = rep.semi_inert_verdict
    expect(_dims(sv.h0_dims) == {2: 3}, f"H0 dims {_dims(sv.h0_dims)}")
    expect(_dims(sv.k_dims) == {7: 1}, f"K dims {_dims(sv.k_dims)}")
    z2 = poly({0: 1, 2: -1}, N)
    want = prod(z2, z2, z2) - poly({7: 1}, N)
    expect(TruncSeries(rep.loop_series_inverse) == want, f"inverse series {rep.loop_series_inverse}")


def check_three_cone(problem, rep, deltas):
    _cycle(problem, "[e,w2]+[g,w1]")
    _common(rep)
    sv = rep.semi_inert_verdict
    expect(_dims(sv.k_dims) == {37: 1}, f"K dims {_dims(sv.k_dims)}")
    expect(sv.h1_dims[37] == 1, f"H1 in dim 37 is {sv.h1_dims[37]}")


def check_odd_tower(problem, rep, deltas):
    N = rep.cutoff
    expect(len(rep.stages) == 3, f"{len(rep.stages)} stages")
    for i, s in enumerate(rep.stages):
        expect(s.free_verdict.ok and s.semi_inert_verdict.ok, f"stage {i} not free and semi-inert")
        kd = _dims(s.semi_inert_verdict.k_dims)
        cells = {}
        for c in s.cells:
            cells[c["cellDim"] - 1] = cells.get(c["cellDim"] - 1, 0) + 1
        expect(kd == cells, f"stage {i}: K dims {kd}, expected the cell generators {cells}")
    _common(rep)
    gr = rep.gr_presentation
    expect(not gr.relations, f"final presentation has relations {gr.relations}")
    v = {}
    for g in gr.generators:
        v[g["dim"]] = v.get(g["dim"], 0) + 1
    tensor = (1 - poly(v, N)).inverse()
    expect(pbw_series(free_lie_dims(v, N)) == tensor, "PBW identity for the free Lie algebra")
    expect(TruncSeries(rep.loop_series) == tensor, f"loop series {rep.loop_series}")


def _lam_next(lam):
    return 4 * lam - 2


def _kappa_next(lam):
    return 3 * lam - 1


def check_example4_n1(problem, rep, deltas):
    lam1 = problem.space.generators[0].dim + 1
    _common(rep)
    expect(all(c.cell_dim == _kappa_next(lam1) for c in problem.cells), "cell dims follow kappa")
    kd = _dims(rep.semi_inert_verdict.k_dims)
    expect(kd == {_lam_next(lam1) - 1: 1}, f"K dims {kd}, expected one generator of dim lambda_2 - 1")


def check_example4_n2(problem, rep, deltas):
    lam1 = problem.space.generators[0].dim + 1
    lam2 = _lam_next(lam1)
    expect(len(rep.stages) == 2, f"{len(rep.stages)} stages")
    s0, s1 = rep.stages
    _common(s0)
    _common(s1)
    expect(_dims(s0.semi_inert_verdict.k_dims) == {lam2 - 1: 2}, f"stage 0 K dims {_dims(s0.semi_inert_verdict.k_dims)}")
    expect(all(c["cellDim"] == _kappa_next(lam2) for c in s1.cells), "stage 1 cell dims follow kappa")
    lam3 = _lam_next(lam2)
    expect(_dims(s1.semi_inert_verdict.k_dims) == {lam3 - 1: 1}, f"stage 1 K dims {_dims(s1.semi_inert_verdict.k_dims)}")
    gr = rep.gr_presentation
    expect(len(gr.generators) == 7 and len(gr.relations) == 6,
           f"final presentation has {len(gr.generators)} generators and {len(gr.relations)} relations")


CASES = [
    ("two_cone", check_two_cone),
    ("fat_wedge", check_fat_wedge),
    ("three_cone_reduced", check_three_cone),
    ("odd_cell_tower", check_odd_tower),
    ("example4_n1", check_example4_n1),
    ("example4_n2", check_example4_n2),
]


def run_case(name, check, field, source=None):
    from .cli import load_problem, read_source, run

    problem, deltas = load_problem(source if source is not None else read_source(name), field=field)
    try:
        rep = run(problem, deltas)
    except StageError as e:
        raise CaseFailure(str(e)) from None
    check(problem, rep, deltas)
    return rep


def run_selftest(filt=None, out=None, fields=FIELDS, sources=None):
    """Print one line per case and field; True when everything passed."""
    ok = True
    for name, check in CASES:
        if filt and filt not in name:
            continue
        for f in fields:
            t = time.perf_counter()
            try:
                run_case(name, check, f, (sources or {}).get(name))
                line = f"PASS {name} [{f}]"
            except CaseFailure as e:
                ok = False
                line = f"FAIL {name} [{f}]: {e}"
            print(f"{line} ({time.perf_counter() - t:.1f}s)", file=out)
    print("selftest: " + ("all passed" if ok else "FAILURES"), file=out)
    return ok
