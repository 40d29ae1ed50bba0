import pytest

from _support import cp2, non_free, problem, two_cone
from cellattach.attach import (AttachError, AttachmentReport, StageDelta, StageError, analyze, blocks_of,
                               check_free, check_semi_inert, gr_presentation, iterate, loop_series)
from cellattach.dgl import Cell
from cellattach.lie import presented_lie_dims
from cellattach.series import TruncSeries, free_product_series, pbw_series
from cellattach.tensor import Generator


@pytest.fixture(scope="module")
def tc_report():
    return analyze(two_cone(cutoff=14))


@pytest.fixture(scope="module")
def cp2_report():
    return analyze(cp2())


def test_blocks_follow_supports():
    pr = problem([("x", 2), ("y", 2), ("z", 3), ("s", 1)], ["[z,z]"], [("a", 6, "[x,y]"), ("b", 5, "0")])
    blocks = sorted(map(sorted, blocks_of(pr)))
    assert blocks == [["a", "x", "y"], ["b"], ["s"], ["z"]]


def test_verdicts_carry_cutoff(tc_report):
    r = tc_report
    assert r.free_verdict.text == "consistent-with-free <= 14 over Q, Fp:5, Fp:7"
    assert r.semi_inert_verdict.text == "semi-inert <= 14"
    assert all("14" in c.detail for c in r.cross_checks)
    assert r.ok


def test_two_cone_presentation(tc_report):
    gr = tc_report.gr_presentation
    assert gr.form == "free-product"
    assert [g["dim"] for g in gr.generators] == [2, 2, 9]
    assert sorted(gr.relations) == ["[[x,y],x]", "[[x,y],y]"]
    assert gr.k_generators[0].name == "w" and gr.k_generators[0].dim == 9


def test_two_cone_routes_agree(tc_report):
    r = tc_report
    gr = pbw_series(presented_lie_dims(r.gr_presentation.presentation(), 14))
    assert gr.to_list() == r.loop_series


def test_cp2_is_free_not_semi_inert(cp2_report):
    r = cp2_report
    assert r.free_verdict.ok
    assert not r.semi_inert_verdict.ok
    assert r.semi_inert_verdict.first_failure == 5
    assert r.gr_presentation.form == "semidirect"
    assert all(c.ok for c in r.cross_checks)


def test_cp2_series_is_loop_homology_of_cp2(cp2_report):
    # H(Omega CP^2) = Lambda(z^1) (x) Q[z^4]
    want = (TruncSeries([1, 1], 12) * (1 - TruncSeries.monomial(4, 12)).inverse()).to_list()
    assert cp2_report.loop_series == want


def test_non_free_fixture():
    v = check_free(non_free())
    assert not v.ok and v.first_failure == 4
    assert v.text == "not free at dim 4 (checked <= 10) over Q"
    assert all(f.first_failure == 4 for f in v.per_field)
    with pytest.raises(AttachError):
        check_semi_inert(non_free())
    with pytest.raises(AttachError):
        gr_presentation(non_free())
    with pytest.raises(AttachError):
        loop_series(non_free())
    r = analyze(non_free())
    assert r.semi_inert_verdict.text == "undefined: attachment not free (checked <= 10)"
    assert not r.ok


def test_public_wrappers_agree(tc_report):
    pr = two_cone(cutoff=14)
    assert check_free(pr).text == tc_report.free_verdict.text
    assert check_semi_inert(pr).k_dims == tc_report.semi_inert_verdict.k_dims
    series, check = loop_series(pr)
    assert check.ok and series.to_list() == tc_report.loop_series


def test_free_product_of_summands():
    N = 12
    a = problem([("x", 2), ("y", 2)], [], [("a", 8, "[[x,y],x]"), ("b", 8, "[[x,y],y]")], N)
    b = problem([("s", 1)], [], [("c", 4, "[s,s]")], N)
    both = problem([("x", 2), ("y", 2), ("s", 1)], [],
                   [("a", 8, "[[x,y],x]"), ("b", 8, "[[x,y],y]"), ("c", 4, "[s,s]")], N)
    ra, rb, rab = analyze(a), analyze(b), analyze(both)
    want = free_product_series(TruncSeries(ra.loop_series), TruncSeries(rb.loop_series))
    assert rab.loop_series == want.to_list()
    assert len(rab.blocks) == 2


def test_wedge_with_passive_sphere():
    r = analyze(problem([("x", 2), ("y", 2), ("t", 4)], [], [("a", 6, "[x,y]")], 12))
    assert r.ok
    # free on t in dim 4, and an abelian pair from the cell on [x,y]
    sphere = (1 - TruncSeries.monomial(4, 12)).inverse()
    torus = pbw_series({2: 2}, 12)
    assert r.loop_series == free_product_series(torus, sphere).to_list()


def test_k_names():
    pr = two_cone(cutoff=12)
    pr.k_names = ["u"]
    assert analyze(pr).gr_presentation.k_generators[0].name == "u"
    pr.k_names = ["u", "v"]
    with pytest.raises(AttachError, match="kNames lists 2 names but 1"):
        analyze(pr)


def test_default_k_name_avoids_clash():
    pr = problem([("w", 2), ("y", 2)], [], [("a", 8, "[[w,y],w]"), ("b", 8, "[[w,y],y]")], 12)
    names = [k.name for k in analyze(pr).gr_presentation.k_generators]
    assert names and "w" not in names


def test_json_round_trip(tc_report, cp2_report):
    for r in (tc_report, cp2_report, analyze(non_free())):
        back = AttachmentReport.from_json(r.to_json())
        assert back == r
        assert back.to_json() == r.to_json()


def test_render_mentions_everything(tc_report):
    text = tc_report.render()
    for needle in ("field Q, cutoff 14", "free: consistent-with-free <= 14", "semi-inert <= 14",
                   "w (dim 9)", "check anick-formula: pass", "loop series: 1 + 2 z^2"):
        assert needle in text


def test_iterate_runs_stages():
    pr = problem([("x", 2), ("y", 2)], [], [("a", 6, "[x,y]")], 12)
    delta = StageDelta([Generator("t", 3)], [], [Cell("c", 7, "[x,t]")], None, None)
    r = iterate(pr, [delta])
    assert len(r.stages) == 2
    assert r.stages[-1] is not r.stages[0]
    assert r.free_verdict.ok


def test_iterate_stops_on_non_semi_inert_stage():
    delta = StageDelta([Generator("t", 2)], [], [], None, None)
    with pytest.raises(StageError) as e:
        iterate(cp2(), [delta])
    assert e.value.stage == 0
    assert "not semi-inert at dim 5" in str(e.value)
