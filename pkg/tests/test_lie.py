import pytest
from hypothesis import given, settings, strategies as st

from _support import seeded
from cellattach import oracle
from cellattach.coeff import FieldSpec, Q
from cellattach.lie import (IdealFamily, LieContext, LieError, LiePresentation, components, is_lyndon,
                            lie_freeness_check, minimal_generators, presented_lie_dims, support)
from cellattach.series import TruncSeries, free_lie_dims
from cellattach.tensor import Alphabet, Generator, TensorElem, parse_bracket_expr


def ctx_for(dims, field=Q):
    return LieContext(Alphabet([Generator(f"g{i}", d) for i, d in enumerate(dims)]), field)


@pytest.mark.parametrize("w,ok", [((0,), True), ((0, 1), True), ((1, 0), False), ((0, 0), False),
                                  ((0, 0, 1), True), ((0, 1, 0, 1), False), ((0, 1, 1), True)])
def test_is_lyndon(w, ok):
    assert is_lyndon(w) == ok


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=3), st.sampled_from([0, 5, 7]))
def test_free_slice_rank_is_witt_dimension(dims, p):
    ctx = ctx_for(dims, FieldSpec(p))
    want = free_lie_dims(dims, 10)
    for n in range(1, 11):
        got = ctx.free_slice(n, 0).rank if ctx.words(n, 0) else 0
        assert got == want[n]


def test_is_lie_membership():
    ctx = ctx_for([2, 2])
    A = ctx.alphabet
    assert ctx.is_lie(parse_bracket_expr("[[g0,g1],g0]", A))
    assert not ctx.is_lie(TensorElem.word(A, ["g0", "g1"]))
    assert ctx.is_lie(TensorElem(A))


def test_odd_square_is_lie():
    ctx = ctx_for([1])
    assert ctx.is_lie(TensorElem.word(ctx.alphabet, ["g0", "g0"]))


def test_ideal_dims_match_oracle():
    dims = [2, 2, 2]
    ctx = ctx_for(dims)
    A = ctx.alphabet
    seeds = [parse_bracket_expr(s, A) for s in ("[g1,g2]", "[g2,g0]")]
    fam = IdealFamily(ctx, seeds)
    want = oracle.ideal_dims(dims, [(s.terms, s.dim) for s in seeds], 10)
    assert {n: fam.dim(n) for n in want} == want


def test_ideal_with_base_counts_modulo_base():
    ctx = ctx_for([2, 2])
    A = ctx.alphabet
    R = IdealFamily(ctx, [parse_bracket_expr("[g0,g1]", A)])
    J = IdealFamily(ctx, [TensorElem.generator(A, "g0")], base=R)
    # modulo [g0,g1] the algebra is abelian on g0, g1; killing g0 leaves g1
    assert J.dim(2) == 1
    assert ctx.free_slice(2).rank - J.slice(2).rank == 1
    assert all(ctx.free_slice(n).rank == J.slice(n).rank for n in range(4, 11, 2))


def test_non_lie_seed_rejected():
    ctx = ctx_for([2, 2])
    with pytest.raises(LieError):
        IdealFamily(ctx, [TensorElem.word(ctx.alphabet, ["g0", "g1"])])


@pytest.mark.parametrize("gens,rels,want", [
    ([("x", 2), ("y", 2)], ["[x,y]"], {2: 2}),
    ([("x", 1)], ["[x,x]"], {1: 1}),
    ([("x", 2), ("y", 3)], [], None),
    ([("x", 2), ("y", 2), ("z", 3)], ["[x,y]"], None),
])
def test_presented_dims(gens, rels, want):
    pres = LiePresentation([Generator(n, d) for n, d in gens], rels)
    got = presented_lie_dims(pres, 12)
    if want is not None:
        assert got == TruncSeries.from_dims(want, 12)
    else:
        # compare with the brute-force quotient over the whole alphabet
        A = pres.alphabet()
        seeds = [(v.terms, v.dim) for v in pres.parsed_relations(A) if v.terms]
        dims = [d for _, d in gens]
        free = oracle.free_dims(dims, 12)
        ideal = oracle.ideal_dims(dims, seeds, 12)
        assert [got[n] for n in range(1, 13)] == [free.get(n, 0) - ideal.get(n, 0) for n in range(1, 13)]


def test_presented_dims_rejects_non_lie_relation():
    pres = LiePresentation([Generator("x", 2), Generator("y", 2)], ["[x,y] + [x,[x,y]]"])
    with pytest.raises(ValueError):
        presented_lie_dims(pres, 8)


def test_components():
    blocks = components(["a", "b", "c", "d"], [{"a", "c"}, {"d"}, {"c", "d"}])
    assert sorted(map(sorted, blocks)) == [["a", "c", "d"], ["b"]]


def test_support():
    A = Alphabet([Generator("x", 2), Generator("y", 2), Generator("z", 2)])
    assert support(parse_bracket_expr("[[x,y],x]", A)) == {"x", "y"}


def test_minimal_generators_two_cone():
    """The ideal of [[x,y],x], [[x,y],y] in L(x,y) is free on W = {6: 2, 8: 1, ...}."""
    ctx = ctx_for([2, 2])
    A = ctx.alphabet
    seeds = [parse_bracket_expr(s, A) for s in ("[[g0,g1],g0]", "[[g0,g1],g1]")]
    fam = IdealFamily(ctx, seeds)
    mg = minimal_generators(fam, 14)
    assert mg.dims[6] == 2
    jd = fam.dims(14)
    assert lie_freeness_check(jd, mg.dims, 14).ok


def test_freeness_check_reports_first_failure():
    v = lie_freeness_check({2: 2, 4: 2}, {2: 2, 4: 2}, 6)
    assert not v.ok and v.first_failure == 4
    assert v.text == "not free at dim 4 (checked <= 6)"
    ok = lie_freeness_check({2: 2, 4: 1, 6: 2}, {2: 2}, 6)
    assert ok.ok and ok.text == "consistent-with-free <= 6"


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_random_ideal_against_oracle(seed):
    rng = seeded(seed)
    dims = [rng.randint(1, 3) for _ in range(2)]
    ctx = ctx_for(dims)
    A = ctx.alphabet
    g = A.names()
    src = rng.choice([f"[{g[0]},{g[1]}]", f"[[{g[0]},{g[1]}],{g[0]}]", f"[{g[0]},{g[0]}]", g[1]])
    seed_v = parse_bracket_expr(src, A)
    if not seed_v.terms:
        return
    fam = IdealFamily(ctx, [seed_v])
    want = oracle.ideal_dims(dims, [(seed_v.terms, seed_v.dim)], 9)
    assert {n: fam.dim(n) for n in want} == want
