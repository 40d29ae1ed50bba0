"""Command-line front end: analyze | series | selftest | oracle."""

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema

from .attach import AttachError, StageDelta, StageError, analyze, iterate
from .coeff import FieldError, FieldSpec
from .dgl import AttachmentProblem, Cell, ModelError
from .lie import LieError, LiePresentation
from .series import SeriesError, TruncSeries
from .tensor import Alphabet, Generator, ParseError, SPACE, parse_bracket_expr, parse_expr_ast

OK, INPUT_ERROR, NEGATIVE = 0, 1, 2

_GEN = {"type": "object", "required": ["name", "dim"], "additionalProperties": False,
        "properties": {"name": {"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_']*$"},
                       "dim": {"type": "integer", "minimum": 1}}}
_SPACE = {"type": "object", "additionalProperties": False,
          "properties": {"generators": {"type": "array", "items": _GEN},
                         "relations": {"type": "array", "items": {"type": "string"}}}}
_CELL = {"type": "object", "required": ["name", "cellDim", "attach"], "additionalProperties": False,
         "properties": {"name": {"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_']*$"},
                        "cellDim": {"type": "integer", "minimum": 3},
                        "attach": {"type": "string"}}}
_NAMES = {"type": "array", "items": {"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_']*$"}}
SCHEMA = {
    "type": "object",
    "required": ["space", "cells"],
    "additionalProperties": False,
    "properties": {
        "field": {"type": "string"},
        "cutoff": {"type": "integer", "minimum": 0},
        "primeSamples": {"type": "array", "items": {"type": "integer"}},
        "space": dict(_SPACE, required=["generators"]),
        "cells": {"type": "array", "items": _CELL},
        "kNames": _NAMES,
        "stages": {"type": "array", "items": {
            "type": "object", "additionalProperties": False,
            "properties": {"space": _SPACE, "cells": {"type": "array", "items": _CELL},
                           "cutoff": {"type": "integer", "minimum": 0}, "kNames": _NAMES}}},
    },
}


class InputError(ValueError):
    pass


def _pointer(path):
    return "/" + "/".join(str(p) for p in path)


def corpus_names():
    return sorted(p.name[:-5] for p in resources.files("cellattach.corpus").iterdir() if p.name.endswith(".json"))


def read_source(src):
    """JSON text of a problem file; bare names resolve to the bundled corpus."""
    path = Path(src)
    if path.exists():
        return path.read_text()
    name = src[:-5] if src.endswith(".json") else src
    if name in corpus_names():
        return resources.files("cellattach.corpus").joinpath(name + ".json").read_text()
    raise InputError(f"no such file or corpus entry: {src}")


def _cells(items):
    return [Cell(c["name"], c["cellDim"], c["attach"]) for c in items]


def _check_exprs(data, field):
    """Parse every expression up front so errors carry their JSON pointer."""
    gens = [Generator(g["name"], g["dim"], SPACE) for g in data["space"]["generators"]]
    alpha = Alphabet(gens)
    exprs = [(("space", "relations", i), r) for i, r in enumerate(data["space"].get("relations", []))]
    exprs += [(("cells", i, "attach"), c["attach"]) for i, c in enumerate(data["cells"])]
    for path, src in exprs:
        try:
            parse_bracket_expr(src, alpha, field)
        except ValueError as e:
            raise InputError(f"{_pointer(path)}: {e}") from None
    for j, st in enumerate(data.get("stages", [])):
        for i, r in enumerate(st.get("space", {}).get("relations", [])):
            _syntax(("stages", j, "space", "relations", i), r)
        for i, c in enumerate(st.get("cells", [])):
            _syntax(("stages", j, "cells", i, "attach"), c["attach"])


def _syntax(path, src):
    try:
        parse_expr_ast(src)
    except ParseError as e:
        raise InputError(f"{_pointer(path)}: {e}") from None


def load_problem(text, cutoff=None, field=None, primes=None):
    """(AttachmentProblem, [StageDelta]) from problem-file JSON text and CLI overrides."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e}") from None
    errors = sorted(jsonschema.Draft7Validator(SCHEMA).iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise InputError(f"{_pointer(e.absolute_path)}: {e.message}")
    try:
        fs = FieldSpec.parse(field or data.get("field", "Q"))
    except FieldError as e:
        raise InputError(f"/field: {e}") from None
    ps = primes if primes is not None else data.get("primeSamples", [5, 7, 11])
    for i, p in enumerate(ps):
        try:
            FieldSpec(p)
        except FieldError as e:
            raise InputError(f"/primeSamples/{i}: {e}") from None
    _check_exprs(data, fs)
    N = cutoff if cutoff is not None else data.get("cutoff", 18)
    space = LiePresentation([Generator(g["name"], g["dim"]) for g in data["space"]["generators"]],
                            list(data["space"].get("relations", [])))
    problem = AttachmentProblem(fs, N, space, _cells(data["cells"]), list(ps), data.get("kNames"))
    deltas = []
    for st in data.get("stages", []):
        sp = st.get("space", {})
        deltas.append(StageDelta([Generator(g["name"], g["dim"]) for g in sp.get("generators", [])],
                                 list(sp.get("relations", [])), _cells(st.get("cells", [])),
                                 cutoff if cutoff is not None else st.get("cutoff"), st.get("kNames")))
    return problem, deltas


def run(problem, deltas):
    return iterate(problem, deltas) if deltas else analyze(problem)


def _parse_primes(s):
    if s is None:
        return None
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--primes expects a comma-separated list of integers, got {s!r}") from None


def _load(args):
    return load_problem(read_source(args.file), args.cutoff, args.field, _parse_primes(args.primes))


def cmd_analyze(args, out):
    problem, deltas = _load(args)
    report = run(problem, deltas)
    if args.json:
        print(report.to_json(), file=out)
    else:
        print(report.render(), file=out)
    return OK if report.ok and all(s.ok for s in report.stages) else NEGATIVE


def cmd_series(args, out):
    problem, deltas = _load(args)
    report = run(problem, deltas)
    if args.json:
        print(json.dumps({"cutoff": report.cutoff, "loopSeries": report.loop_series,
                          "loopSeriesInverse": report.loop_series_inverse}), file=out)
    else:
        print(f"{'n':>3}  {'dim':>10}  {'inverse':>10}", file=out)
        for n, (c, i) in enumerate(zip(report.loop_series, report.loop_series_inverse)):
            print(f"{n:>3}  {c:>10}  {i:>10}", file=out)
        print(f"loop series: {TruncSeries(report.loop_series)}", file=out)
    return OK if report.ok else NEGATIVE


def cmd_selftest(args, out):
    from .selftest import run_selftest

    return OK if run_selftest(args.filter, out) else NEGATIVE


def cmd_oracle(args, out):
    from .oracle import GUARD, compare

    problem, _ = _load(args)
    if problem.cutoff > GUARD and not args.force:
        raise InputError(f"oracle cutoff {problem.cutoff} exceeds the guard {GUARD}; pass --force to run anyway")
    same, text = compare(problem)
    print(text, file=out)
    return OK if same else NEGATIVE


def build_parser():
    ap = argparse.ArgumentParser(prog="cellattach",
                                 description="Loop-space homology of cell attachments from Lie models.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="problem file, or the name of a bundled corpus entry")
        p.add_argument("--cutoff", type=int, help="dimension cutoff N (default: from file, else 18)")
        p.add_argument("--field", help="Q or Fp:<p>")
        p.add_argument("--primes", help="comma-separated primes sampled when the field is Q")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("analyze", help="verdicts, presentation and loop series")
    common(p)
    p.set_defaults(func=cmd_analyze)
    p = sub.add_parser("series", help="loop-homology Hilbert series only")
    common(p)
    p.set_defaults(func=cmd_series)
    p = sub.add_parser("selftest", help="run the bundled examples")
    p.add_argument("--filter", help="run only cases whose name contains this string")
    p.set_defaults(func=cmd_selftest)
    p = sub.add_parser("oracle", help="brute-force recomputation of free Lie and ideal dims")
    common(p)
    p.add_argument("--force", action="store_true", help="allow cutoffs above the guard")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except StageError as e:
        print(f"error: {e}", file=sys.stderr)
        return NEGATIVE
    except (InputError, ParseError, ModelError, LieError, FieldError, AttachError, SeriesError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
