"""Verdicts and outputs for a cell attachment: freeness, semi-inertness,
the associated graded presentation and the loop-homology series.

The space generators and cells are split into blocks that share no
relation or attaching class; the dgL is a free product of the block dgLs,
so each block is analysed on its own and the series are recombined.
"""

from dataclasses import dataclass, field as dc_field, fields, is_dataclass, replace
import json

from .coeff import FieldSpec
from .dgl import (AttachmentProblem, build_model, validate_problem, homology_deg0, homology_deg0_kerim,
                  homology_deg1)
from .lie import (LieContext, LiePresentation, block_lie_dims, components, enveloping_ideal_check, lie_freeness_check,
                  minimal_generators, presented_lie_dims, support, validate_presentation)
from .series import TruncSeries, anick_series, pbw_series, witt_inverse
from .tensor import Alphabet, Generator, SPACE, format_expr, parse_bracket_expr


class AttachError(ValueError):
    pass


class StageError(AttachError):
    """A stage of an iterated attachment was not semi-inert."""

    def __init__(self, msg, stage, reports):
        super().__init__(msg)
        self.stage = stage
        self.reports = reports


# -- report ----------------------------------------------------------------------

def _camel(name):
    head, *rest = name.split("_")
    return head + "".join(r.title() for r in rest)


class _Json:
    """camelCase JSON (de)serialisation for flat report dataclasses."""

    _nested = {}

    def to_dict(self):
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, list):
                v = [x.to_dict() if is_dataclass(x) else x for x in v]
            elif is_dataclass(v):
                v = v.to_dict()
            out[_camel(f.name)] = v
        return out

    @classmethod
    def from_dict(cls, data):
        kw = {}
        for f in fields(cls):
            key = _camel(f.name)
            if key not in data:
                continue
            v = data[key]
            sub = cls._nested.get(f.name)
            if sub is not None and v is not None:
                sub = globals()[sub] if isinstance(sub, str) else sub
                v = [sub.from_dict(x) for x in v] if isinstance(v, list) else sub.from_dict(v)
            kw[f.name] = v
        return cls(**kw)


@dataclass
class Check(_Json):
    name: str
    ok: bool
    detail: str = ""


@dataclass
class FieldFreeness(_Json):
    field: str
    ok: bool
    text: str
    first_failure: int = None
    j_dims: list = dc_field(default_factory=list)
    w_dims: list = dc_field(default_factory=list)
    h0_dims: list = dc_field(default_factory=list)


@dataclass
class FreeVerdict(_Json):
    ok: bool
    text: str
    first_failure: int = None
    per_field: list = dc_field(default_factory=list)

    _nested = {"per_field": FieldFreeness}


@dataclass
class KGenerator(_Json):
    name: str
    dim: int
    cycle: str


@dataclass
class SemiInertVerdict(_Json):
    ok: bool
    text: str
    first_failure: int = None
    k_dims: list = dc_field(default_factory=list)
    h0_dims: list = dc_field(default_factory=list)
    h1_dims: list = dc_field(default_factory=list)
    representatives: list = dc_field(default_factory=list)

    _nested = {"representatives": KGenerator}


@dataclass
class GrPresentation(_Json):
    form: str
    generators: list
    relations: list
    k_generators: list = dc_field(default_factory=list)
    h1_dims: list = dc_field(default_factory=list)

    _nested = {"k_generators": KGenerator}

    def presentation(self):
        return LiePresentation([Generator(g["name"], g["dim"]) for g in self.generators], list(self.relations))


@dataclass
class Block(_Json):
    generators: list
    cells: list
    active: bool


@dataclass
class AttachmentReport(_Json):
    field: str
    cutoff: int
    prime_samples: list
    cells: list
    blocks: list
    free_verdict: FreeVerdict
    semi_inert_verdict: SemiInertVerdict
    gr_presentation: GrPresentation
    loop_series: list
    loop_series_inverse: list
    cross_checks: list
    notes: list = dc_field(default_factory=list)
    stages: list = dc_field(default_factory=list)

    _nested = {"blocks": Block, "free_verdict": FreeVerdict, "semi_inert_verdict": SemiInertVerdict,
               "gr_presentation": GrPresentation, "cross_checks": Check, "stages": "AttachmentReport"}

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @property
    def ok(self):
        return (self.free_verdict.ok and bool(self.semi_inert_verdict.ok)
                and all(c.ok for c in self.cross_checks))

    def render(self):
        return render_report(self)


# -- analysis ----------------------------------------------------------------------

def _dims_list(d, order):
    if isinstance(d, TruncSeries):
        return d.truncate(order).to_list()
    return TruncSeries.from_dims(d, order).to_list()


def _sub_problem(problem, block, field=None):
    names = set(block)
    gens = [g for g in problem.space.generators if g.name in names]
    alpha = Alphabet([Generator(g.name, g.dim, SPACE) for g in problem.space.generators])
    rels = []
    for r in problem.space.relations:
        v = parse_bracket_expr(r, alpha, problem.field)
        if v.terms and support(v) <= names:
            rels.append(r)
    cells = [c for c in problem.cells if c.name in names]
    return AttachmentProblem(field or problem.field, problem.cutoff, LiePresentation(gens, rels), cells,
                             problem.prime_samples, problem.k_names)


def blocks_of(problem):
    """Split generators and cells into independent blocks, in order of first appearance."""
    space = problem.space
    alpha = Alphabet([Generator(g.name, g.dim, SPACE) for g in space.generators])
    names = [g.name for g in space.generators] + [c.name for c in problem.cells]
    supports = []
    for r in space.relations:
        v = parse_bracket_expr(r, alpha, problem.field)
        if v.terms:
            supports.append(support(v))
    for c in problem.cells:
        v = parse_bracket_expr(c.attach, alpha, problem.field)
        supports.append({c.name} | (support(v) if v.terms else set()))
    return components(names, supports)


@dataclass
class _BlockData:
    names: list
    cells: list
    active: bool
    l0: TruncSeries
    h0: TruncSeries = None
    h1: TruncSeries = None
    k: TruncSeries = None
    k_reps: list = None
    per_field: dict = None      # field string -> (Verdict, jdims, wdims, h0dims)
    envelope: object = None
    kerim_ok: bool = True
    kerim_detail: str = ""
    model: object = None


class Analysis:
    """All computations for one attachment problem, done once and shared by the verdicts."""

    def __init__(self, problem, env_cutoff=14, check_cutoff=14):
        self.problem = problem
        self.N = problem.cutoff
        self.env_cutoff = min(env_cutoff, self.N)
        self.check_cutoff = min(check_cutoff, self.N)
        validate_problem(problem)  # Lie-membership is checked per block
        self.blocks = [self._block(b) for b in blocks_of(problem)]

    def _fields(self):
        f = self.problem.field
        out = [f]
        if f.is_rational:
            out += [FieldSpec(p) for p in self.problem.prime_samples]
        return out

    def _block(self, names):
        pr = self.problem
        N = self.N
        cells = [c.name for c in pr.cells if c.name in names]
        sub = _sub_problem(pr, names)
        if not cells:
            validate_presentation(sub.space, LieContext(sub.space.alphabet(), pr.field))
            dims = block_lie_dims(sub.space.alphabet(), sub.space.relations, N, pr.field)
            return _BlockData(list(names), [], False, pbw_series(dims))
        per_field = {}
        b = None
        for f in self._fields():
            m = build_model(_sub_problem(pr, names, f))
            h0 = homology_deg0(m, with_reps=False)
            mg = minimal_generators(m.J, N)
            ver = lie_freeness_check(h0.ideal_dims, mg.dims, N)
            per_field[str(f)] = (ver, h0.ideal_dims, mg.dims, h0.dims)
            if f == pr.field:
                b = _BlockData(list(names), cells, True, pbw_series(TruncSeries.from_dims(h0.l0_dims, N)),
                               h0=TruncSeries.from_dims(h0.dims, N), model=m)
                b.envelope = enveloping_ideal_check(m.ctx, m.relations, m.attaches, mg.dims, self.env_cutoff)[0]
                kerim = homology_deg0_kerim(m, self.check_cutoff)
                bad = [n for n in kerim if kerim[n] != h0.dims.get(n, 0)]
                b.kerim_ok = not bad
                b.kerim_detail = f"agree <= {self.check_cutoff}" if not bad else f"differ at dim {bad[0]}"
                if ver.ok:
                    h1 = homology_deg1(m)
                    b.h1 = TruncSeries.from_dims(h1.dims, N)
                    b.k = TruncSeries.from_dims(h1.k_dims, N)
                    b.k_reps = [(n, v, lab) for n in sorted(h1.k_reps) for v, lab in h1.k_reps[n]]
        b.per_field = per_field
        return b

    # -- aggregated series

    def _free_product(self, series):
        inv = TruncSeries.one(self.N)
        for s in series:
            inv = inv + s.inverse() - 1
        return inv.inverse()

    def ul0(self):
        return self._free_product(b.l0 for b in self.blocks)

    def uh0(self):
        return self._free_product(pbw_series(b.h0) if b.active else b.l0 for b in self.blocks)

    def h0_dims(self):
        return witt_inverse(self.uh0())

    def h1_series(self):
        """Degree-1 homology of the free product: UH0(z) * sum_b H1_b(z)/UH0_b(z)."""
        acc = TruncSeries.zero(self.N)
        for b in self.blocks:
            if b.active:
                acc = acc + b.h1 * pbw_series(b.h0).inverse()
        return self.uh0() * acc

    def k_series(self):
        acc = TruncSeries.zero(self.N)
        for b in self.blocks:
            if b.active:
                acc = acc + b.k
        return acc

    def v1(self):
        counts = {}
        for c in self.problem.cells:
            counts[c.cell_dim - 1] = counts.get(c.cell_dim - 1, 0) + 1
        return TruncSeries.from_dims(counts, self.N)

    # -- verdicts

    def free(self):
        N = self.N
        per = []
        first_bad = None
        for f in self._fields():
            key = str(f)
            ok, text, fail = True, f"consistent-with-free <= {N}", None
            j = {}
            w = {}
            h0 = {}
            for b in self.blocks:
                if not b.active:
                    continue
                ver, jd, wd, hd = b.per_field[key]
                for src, dst in ((jd, j), (wd, w), (hd, h0)):
                    for n, d in src.items():
                        dst[n] = dst.get(n, 0) + d
                if not ver.ok and (fail is None or ver.first_failure < fail):
                    ok, text, fail = False, ver.text, ver.first_failure
            per.append(FieldFreeness(key, ok, text, fail, _dims_list(j, N), _dims_list(w, N), _dims_list(h0, N)))
            if not ok and first_bad is None:
                first_bad = (key, fail, text)
        if first_bad is None and len(per) > 1:
            ref = per[0].h0_dims
            for ff in per[1:]:
                if ff.h0_dims != ref:
                    n = next(i for i, (a, c) in enumerate(zip(ref, ff.h0_dims)) if a != c)
                    first_bad = (ff.field, n, f"not free: quotient dims differ between {per[0].field} and "
                                              f"{ff.field} at dim {n} (checked <= {N})")
                    break
        if first_bad is None:
            names = ", ".join(ff.field for ff in per)
            return FreeVerdict(True, f"consistent-with-free <= {N} over {names}", None, per)
        key, n, text = first_bad
        if "differ" not in text:
            text = f"{text} over {key}"
        return FreeVerdict(False, text, n, per)

    def semi_inert(self):
        N = self.N
        fv = self.free()
        h0 = self.h0_dims()
        if not fv.ok:
            return SemiInertVerdict(False, f"undefined: attachment not free (checked <= {N})", None, [],
                                    h0.to_list(), [], [])
        first = None
        for b in self.blocks:
            if b.active:
                bad = (pbw_series(b.h0) * b.k).first_difference(b.h1)
                if bad is not None and (first is None or bad < first):
                    first = bad
        reps = self.k_generators()
        k = self.k_series()
        h1 = self.h1_series()
        if first is None:
            return SemiInertVerdict(True, f"semi-inert <= {N}", None, k.to_list(), h0.to_list(), h1.to_list(), reps)
        return SemiInertVerdict(False, f"not semi-inert at dim {first} (checked <= {N})", first, k.to_list(),
                                h0.to_list(), h1.to_list(), reps)

    def k_generators(self):
        found = []
        for b in self.blocks:
            if b.active and b.k_reps:
                for n, v, lab in b.k_reps:
                    found.append((n, format_expr(lab) if lab is not None else str(v)))
        found.sort(key=lambda t: t[0])
        names = self._k_names(len(found))
        return [KGenerator(nm, n, cyc) for nm, (n, cyc) in zip(names, found)]

    def _k_names(self, count):
        given = self.problem.k_names
        if given is not None:
            if len(given) != count:
                raise AttachError(f"kNames lists {len(given)} names but {count} module generators were "
                                  f"found (<= {self.N})")
            return list(given)
        used = {g.name for g in self.problem.space.generators} | {c.name for c in self.problem.cells}
        if count == 1 and "w" not in used:
            return ["w"]
        out, i = [], 1
        while len(out) < count:
            if f"w{i}" not in used:
                out.append(f"w{i}")
            i += 1
        return out

    def degree0_presentation(self):
        pr = self.problem
        rels = list(pr.space.relations)
        alpha = Alphabet([Generator(g.name, g.dim, SPACE) for g in pr.space.generators])
        for c in pr.cells:
            if parse_bracket_expr(c.attach, alpha, pr.field).terms:
                rels.append(c.attach)
        return LiePresentation(list(pr.space.generators), rels)

    def gr_presentation(self, semi=None):
        semi = semi or self.semi_inert()
        base = self.degree0_presentation()
        gens = [{"name": g.name, "dim": g.dim} for g in base.generators]
        if semi.ok:
            ks = semi.representatives
            return GrPresentation("free-product", gens + [{"name": k.name, "dim": k.dim} for k in ks],
                                  list(base.relations), ks)
        return GrPresentation("semidirect", gens, list(base.relations), [], semi.h1_dims)

    def loop_series(self, semi=None, gr=None):
        """Route (i): Anick's formula; route (ii): the associated graded presentation."""
        semi = semi or self.semi_inert()
        gr = gr or self.gr_presentation(semi)
        N = self.N
        anick = anick_series(self.ul0(), self.uh0(), self.v1())
        if gr.form == "free-product":
            other = pbw_series(presented_lie_dims(gr.presentation(), N, self.problem.field))
        else:
            uh0 = pbw_series(presented_lie_dims(self.degree0_presentation(), N, self.problem.field))
            other = uh0 * (1 - TruncSeries(gr.h1_dims, N)).inverse() if gr.h1_dims else uh0
        bad = anick.first_difference(other)
        if bad is None:
            check = Check("anick-formula", True, f"both routes agree <= {N}")
        else:
            check = Check("anick-formula", False, f"routes differ first at z^{bad}: "
                                                  f"{anick[bad]} vs {other[bad]} (checked <= {N})")
        return anick, check

    def cross_checks(self, semi, gr, anick_check, series):
        N = self.N
        out = [anick_check]
        neg = [n for n, c in enumerate(series) if c < 0]
        out.append(Check("series-nonnegative", not neg,
                         f"all coefficients >= 0 <= {N}" if not neg else f"negative coefficient at z^{neg[0]}"))
        k = self.check_cutoff
        kerim = [b for b in self.blocks if b.active and not b.kerim_ok]
        out.append(Check("h0-ideal-vs-kernel-image", not kerim,
                         f"agree <= {k}" if not kerim else kerim[0].kerim_detail))
        pres = presented_lie_dims(self.degree0_presentation(), k, self.problem.field)
        mine = self.h0_dims().truncate(k)
        bad = mine.first_difference(pres)
        out.append(Check("h0-vs-presented-quotient", bad is None,
                         f"agree <= {k}" if bad is None else f"differ at dim {bad} (checked <= {k})"))
        env = [b.envelope for b in self.blocks if b.active]
        env_bad = [v for v in env if not v.ok]
        out.append(Check("enveloping-ideal", not env_bad,
                         env_bad[0].text if env_bad else f"I(z) = UL0(z) W(z) <= {self.env_cutoff}"))
        if self.problem.field.is_rational and self.problem.prime_samples:
            fv = self.free()
            ref = fv.per_field[0]
            diff = [ff.field for ff in fv.per_field[1:] if (ff.h0_dims, ff.j_dims) != (ref.h0_dims, ref.j_dims)]
            out.append(Check("prime-agreement", not diff,
                             f"Q dims match {', '.join(ff.field for ff in fv.per_field[1:])} <= {N}"
                             if not diff else f"dims differ over {diff[0]} (checked <= {N})"))
        return out

    def report(self):
        pr = self.problem
        N = self.N
        fv = self.free()
        semi = self.semi_inert()
        gr = self.gr_presentation(semi)
        series, check = self.loop_series(semi, gr)
        checks = self.cross_checks(semi, gr, check, series)
        notes = [f"all verdicts are certified through dimension {N} only"]
        if pr.field.is_rational and pr.prime_samples:
            notes.append("freeness over subrings of Q is approximated by Q plus the sampled primes "
                         + ", ".join(map(str, pr.prime_samples)))
        if not pr.field.is_rational:
            notes.append("enveloping series over a prime field use the characteristic-0 PBW formula")
        notes.append("module freeness is tested through Hilbert series, which do not depend on the side")
        if semi.ok:
            notes.append("K generators are given by degree-1 cycle representatives, not by lifts to loop homology")
        return AttachmentReport(
            field=str(pr.field), cutoff=N, prime_samples=list(pr.prime_samples),
            cells=[{"name": c.name, "cellDim": c.cell_dim, "attach": c.attach} for c in pr.cells],
            blocks=[Block(b.names, b.cells, b.active) for b in self.blocks],
            free_verdict=fv, semi_inert_verdict=semi, gr_presentation=gr,
            loop_series=series.to_list(), loop_series_inverse=series.inverse().to_list(),
            cross_checks=checks, notes=notes)


# -- public operations -------------------------------------------------------------

def check_free(problem):
    return Analysis(problem).free()


def check_semi_inert(problem):
    a = Analysis(problem)
    fv = a.free()
    if not fv.ok:
        raise AttachError(f"semi-inertness needs a free attachment: {fv.text}")
    return a.semi_inert()


def gr_presentation(problem):
    a = Analysis(problem)
    if not a.free().ok:
        raise AttachError("the associated graded presentation needs a free attachment")
    return a.gr_presentation()


def loop_series(problem):
    """(series, Check) with the Anick-formula comparison."""
    a = Analysis(problem)
    if not a.free().ok:
        raise AttachError("the loop series formula needs a free attachment")
    return a.loop_series()


def analyze(problem, **kw):
    return Analysis(problem, **kw).report()


@dataclass
class StageDelta:
    generators: list = dc_field(default_factory=list)
    relations: list = dc_field(default_factory=list)
    cells: list = dc_field(default_factory=list)
    cutoff: int = None
    k_names: list = None


def next_problem(problem, report, delta):
    gr = report.gr_presentation.presentation()
    space = LiePresentation(gr.generators + list(delta.generators), gr.relations + list(delta.relations))
    return AttachmentProblem(problem.field, delta.cutoff if delta.cutoff is not None else problem.cutoff,
                             space, list(delta.cells), list(problem.prime_samples), delta.k_names)


def iterate(problem, deltas, **kw):
    """Run the first problem, then each delta on top of the previous associated graded presentation."""
    reports = []
    cur = problem
    for i in range(len(deltas) + 1):
        if i:
            cur = next_problem(cur, reports[-1], deltas[i - 1])
        rep = analyze(cur, **kw)
        reports.append(rep)
        if not rep.semi_inert_verdict.ok and i < len(deltas):
            sv = rep.semi_inert_verdict
            raise StageError(f"stage {i}: {sv.text}; H1 dims {_nonzero(sv.h1_dims)}", i, reports)
    return replace(reports[-1], stages=reports) if deltas else reports[-1]


# -- text -----------------------------------------------------------------------------

def _nonzero(lst):
    return "{" + ", ".join(f"{n}: {c}" for n, c in enumerate(lst) if c) + "}"


def render_report(r, indent=""):
    lines = [f"{indent}field {r.field}, cutoff {r.cutoff}"]
    if r.cells:
        lines.append(indent + "cells: " + ", ".join(f"{c['name']} (e^{c['cellDim']}) -> {c['attach']}"
                                                   for c in r.cells))
    lines.append(f"{indent}free: {r.free_verdict.text}")
    for ff in r.free_verdict.per_field:
        lines.append(f"{indent}  {ff.field}: {ff.text}; W {_nonzero(ff.w_dims)}")
    sv = r.semi_inert_verdict
    lines.append(f"{indent}semi-inert: {sv.text}")
    lines.append(f"{indent}  H0 dims {_nonzero(sv.h0_dims)}")
    if sv.h1_dims:
        lines.append(f"{indent}  H1 dims {_nonzero(sv.h1_dims)}")
        lines.append(f"{indent}  K dims {_nonzero(sv.k_dims)}")
    for k in sv.representatives:
        lines.append(f"{indent}  {k.name} (dim {k.dim}) = {k.cycle}")
    gr = r.gr_presentation
    gens = ", ".join(f"{g['name']}:{g['dim']}" for g in gr.generators)
    lines.append(f"{indent}presentation ({gr.form}): <{gens}>")
    for rel in gr.relations:
        lines.append(f"{indent}  {rel} = 0")
    inv = TruncSeries(r.loop_series_inverse)
    lines.append(f"{indent}loop series: {TruncSeries(r.loop_series)}")
    lines.append(f"{indent}inverse:     {inv}")
    for c in r.cross_checks:
        lines.append(f"{indent}check {c.name}: {'pass' if c.ok else 'FAIL'} ({c.detail})")
    for n in r.notes:
        lines.append(f"{indent}note: {n}")
    if r.stages:
        lines.append(f"{indent}stages: {len(r.stages)}")
        for i, s in enumerate(r.stages):
            lines.append(f"{indent}-- stage {i}")
            lines.extend(render_report(replace(s, stages=[]), indent + "   ").splitlines())
    return "\n".join(lines)
