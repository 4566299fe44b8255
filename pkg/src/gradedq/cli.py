"""Command line front door: job files in, deterministic reports out.

A job is a single JSON document (schema = 1) declaring a chart and the
inputs of the requested checks; expressions use one infix grammar shared
with the canonical renderer:

    terms     a + b, a - b, unary -
    products  a*b (also the wedge of derivation symbols)
    powers    a^2 (nonnegative integer exponents)
    atoms     rational literals 3, 1/6; generators by name; d/d<name>

Exit codes: 0 all requested checks pass, 1 at least one check failed,
2 malformed input (parse or schema or shape errors), 3 an internal
two-route verdict assertion broke, which is always a bug.  Reports are
byte-stable for a fixed job file and seed: checks are sorted by name,
all residuals are rendered canonically, and timing goes to stderr only.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .galg import Chart, ChartError, GPoly
from .mvf import DERIV_PREFIX, MVF, extended_chart
from .qgeom import (
    DeformationDatum,
    InternalInvariantError,
    QField,
    SubmanifoldSpec,
    coiso_deform_check,
    coisotropic_check,
    default_truncation,
    is_homological,
    q_deform_check,
    simul_deform_check,
    split_valgebra_report,
    valgebra_split,
    x_field,
)
from .vderive import DerivedFamily, derived_bracket
from .courant import (
    CourantData,
    courant_axioms_check,
    dirac_check,
    dirac_deform_check,
    standard_courant,
)


class JobError(ValueError):
    pass


# -- expression grammar ----------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<dgen>d/d[A-Za-z_]\w*)|(?P<num>\d+(?:/\d+)?)|(?P<ident>[A-Za-z_]\w*)"
    r"|(?P<op>[-+*^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise JobError(f"cannot tokenize expression at: {text[pos:pos+20]!r}")
        pos = m.end()
        for kind in ("dgen", "num", "ident", "op"):
            val = m.group(kind)
            if val is not None:
                out.append((kind, val))
                break
    return out


class _Parser:
    def __init__(self, chart: Chart, tokens: list[tuple[str, str]]):
        self.chart = chart
        self.ext = extended_chart(chart)
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise JobError(f"expected {op!r}, found {val!r}")

    def parse(self) -> MVF:
        value = self.expr()
        if self.pos != len(self.tokens):
            raise JobError(f"trailing tokens after expression: {self.tokens[self.pos:]}")
        return value

    def expr(self) -> MVF:
        value = self.term()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if val == "+" else value - rhs
            else:
                return value

    def term(self) -> MVF:
        value = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                value = value * self.factor()
            else:
                return value

    def factor(self) -> MVF:
        value = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val = self.take()
            if kind != "num" or "/" in val:
                raise JobError("exponent must be a nonnegative integer")
            value = MVF(self.chart, value.poly ** int(val))
        return value

    def atom(self) -> MVF:
        kind, val = self.take()
        if kind == "num":
            return MVF.const(self.chart, Fraction(val))
        if kind == "ident":
            if val not in self.chart.names:
                raise JobError(f"unknown generator {val!r}")
            return MVF.from_function(self.chart.gen(val))
        if kind == "dgen":
            name = val[len(DERIV_PREFIX):]
            if name not in self.chart.names:
                raise JobError(f"unknown generator in {val!r}")
            return MVF.partial_gen(self.chart, name)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "op" and val == "-":
            return -self.atom()
        raise JobError(f"unexpected token {val!r}")


def parse_mvf(chart: Chart, text: str) -> MVF:
    """Parse the expression grammar into a multivector field."""
    if not isinstance(text, str):
        raise JobError(f"expected an expression string, got {type(text).__name__}")
    return _Parser(chart, _tokenize(text)).parse()


def parse_gpoly(chart: Chart, text: str) -> GPoly:
    value = parse_mvf(chart, text)
    if value.max_multiplicity() != 0 and not value.is_zero():
        raise JobError(f"expected a function, got derivation factors in {text!r}")
    return value.function_part()


# -- job loading ------------------------------------------------------------------


@dataclass
class Job:
    raw: dict
    path: str

    def section(self, key: str, required: bool = False) -> Optional[dict]:
        value = self.raw.get(key)
        if value is None:
            if required:
                raise JobError(f"job is missing the {key!r} section")
            return None
        if not isinstance(value, dict):
            raise JobError(f"job section {key!r} must be an object")
        return value

    def option(self, key: str, default=None):
        options = self.raw.get("options") or {}
        return options.get(key, default)


def load_job(path: str) -> Job:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise JobError(f"cannot read job file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise JobError(f"job file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise JobError("job file must hold a JSON object")
    if raw.get("schema") != 1:
        raise JobError("job file must declare schema = 1")
    return Job(raw=raw, path=path)


def job_chart(job: Job) -> Chart:
    section = job.section("chart", required=True)
    gens = section.get("generators")
    if not isinstance(gens, list):
        raise JobError("chart.generators must be a list")
    try:
        return Chart([(g[0], g[1], g[2]) for g in gens])
    except (ChartError, IndexError, TypeError) as exc:
        raise JobError(f"bad chart: {exc}") from exc


def job_qfield(job: Job, chart: Chart) -> QField:
    text = job.raw.get("q")
    if text is None:
        raise JobError("job is missing the 'q' expression")
    try:
        return QField.from_mvf(parse_mvf(chart, text))
    except ChartError as exc:
        raise JobError(f"bad q: {exc}") from exc


def job_submanifold(job: Job, chart: Chart) -> SubmanifoldSpec:
    section = job.section("submanifold", required=True)
    try:
        return SubmanifoldSpec(
            chart,
            section.get("k0", -1),
            x=section.get("x", ()),
            y=section.get("y", ()),
            xi=section.get("xi", ()),
            eta=section.get("eta", ()),
        )
    except ChartError as exc:
        raise JobError(f"bad submanifold: {exc}") from exc


def job_datum(job: Job, spec: SubmanifoldSpec) -> Optional[DeformationDatum]:
    section = job.section("datum")
    if section is None:
        return None
    chart = spec.chart
    try:
        sigma = {
            name: parse_gpoly(chart, text)
            for name, text in (section.get("sigma") or {}).items()
        }
        phi = {}
        for entry in section.get("phi") or []:
            ename, xname, text = entry
            phi[(ename, xname)] = parse_gpoly(chart, text)
        return DeformationDatum(spec, sigma, phi)
    except (ChartError, ValueError, TypeError) as exc:
        raise JobError(f"bad datum: {exc}") from exc


def job_courant(job: Job) -> CourantData:
    section = job.section("courant", required=True)
    base = section.get("base")
    if not isinstance(base, list) or not all(isinstance(b, str) for b in base):
        raise JobError("courant.base must be a list of coordinate names")

    def parse_twist(raw_h, data_chart_builder):
        twist = {}
        for entry in raw_h or []:
            a, b, c, text = entry
            twist[(int(a), int(b), int(c))] = text
        return twist

    try:
        if section.get("standard"):
            twist_src = parse_twist(section.get("twist"), None)
            data = standard_courant(base)
            if twist_src:
                twist = {
                    key: parse_gpoly(data.chart, text) for key, text in twist_src.items()
                }
                data = CourantData(base, data.rank, data.g, data.f, twist)
            return data
        rank = section.get("rank")
        g = [[Fraction(str(x)) for x in row] for row in section.get("g", [])]
        probe = CourantData(base, rank, g)
        f_rows = section.get("f")
        f = None
        if f_rows is not None:
            f = [[parse_gpoly(probe.chart, text) for text in row] for row in f_rows]
        twist_src = parse_twist(section.get("h"), None)
        h = {key: parse_gpoly(probe.chart, text) for key, text in twist_src.items()}
        return CourantData(base, rank, g, f, h)
    except (ChartError, ValueError, TypeError) as exc:
        raise JobError(f"bad courant data: {exc}") from exc


# -- report assembly -----------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    lines: list[str] = field(default_factory=list)


def _residual_lines(pairs) -> list[str]:
    return [f"{label}: {value.render()}" for label, value in pairs]


def render_report(command: str, job: Job, options: dict, results: list[CheckResult]) -> str:
    results = sorted(results, key=lambda r: r.name)
    overall = all(r.passed for r in results)
    out = ["gradedq report", f"command: {command}"]
    for key in sorted(options):
        out.append(f"{key}: {options[key]}")
    for result in results:
        out.append(f"check {result.name}: {'PASS' if result.passed else 'FAIL'}")
        out.extend(f"  {line}" for line in result.lines)
    out.append(f"overall: {'PASS' if overall else 'FAIL'}")
    return "\n".join(out) + "\n"


def machine_report(command: str, job: Job, options: dict, results: list[CheckResult]) -> dict:
    results = sorted(results, key=lambda r: r.name)
    return {
        "schema": 1,
        "command": command,
        "options": {k: options[k] for k in sorted(options)},
        "checks": [
            {"name": r.name, "passed": r.passed, "lines": r.lines} for r in results
        ],
        "overall": all(r.passed for r in results),
    }


def _requested(args, available: Sequence[str], defaults: Sequence[str]) -> list[str]:
    if args.check:
        wanted = [c.strip() for c in args.check.split(",") if c.strip()]
        unknown = [c for c in wanted if c not in available]
        if unknown:
            raise JobError(f"unknown checks {unknown}; available: {sorted(available)}")
        return wanted
    return list(defaults)


# -- commands --------------------------------------------------------------------------


def cmd_check_q(job: Job, args) -> list[CheckResult]:
    chart = job_chart(job)
    q = job_qfield(job, chart)
    available = ["is_homological", "q_deform"]
    defaults = ["is_homological"] + (["q_deform"] if "qt" in job.raw else [])
    results = []
    for name in _requested(args, available, defaults):
        if name == "is_homological":
            rep = is_homological(q)
            results.append(
                CheckResult(name, rep.ok, _residual_lines(rep.residuals()))
            )
        else:
            if "qt" not in job.raw:
                raise JobError("q_deform needs a 'qt' expression in the job")
            qt = parse_mvf(chart, job.raw["qt"])
            rep = q_deform_check(q, qt)
            lines = []
            comps = rep.mc_components()
            for degree in (2, 0, -2):
                value = comps.get(degree, MVF.zero(chart))
                lines.append(f"mc residual at degree {degree:+d}: {value.render()}")
            lines.append(f"deformed field homological: {rep.deformed.ok}")
            lines.append(f"verdicts agree: {rep.agree}")
            results.append(CheckResult(name, rep.ok, lines))
    return results


def cmd_derived(job: Job, args) -> list[CheckResult]:
    chart = job_chart(job)
    q = job_qfield(job, chart)
    spec = job_submanifold(job, chart)
    fam = DerivedFamily(q.mvf, valgebra_split(spec))
    arity = int(job.option("arity", 2))

    basis: list[tuple[str, MVF]] = []
    declared = job.raw.get("basis")
    if declared:
        for text in declared:
            basis.append((text, parse_mvf(chart, text)))
    else:
        for yname in spec.y:
            basis.append((f"d/d{yname}", MVF.partial_gen(chart, yname)))
        for ename in spec.eta:
            basis.append((f"d/d{ename}", MVF.partial_gen(chart, ename)))
        for fname in spec.xi:
            for ename in spec.eta:
                expr = f"{fname}*d/d{ename}"
                basis.append((expr, parse_mvf(chart, expr)))

    lines = []
    m0 = derived_bracket(fam, [])
    lines.append(f"m_0 = {m0.render()}")
    lines.append(f"flat: {m0.is_zero()}")
    from itertools import combinations_with_replacement

    for k in range(1, arity + 1):
        for combo in combinations_with_replacement(range(len(basis)), k):
            labels = ", ".join(basis[i][0] for i in combo)
            try:
                value = derived_bracket(fam, [basis[i][1] for i in combo])
            except ChartError as exc:
                raise JobError(f"basis element outside the abelian part: {exc}")
            lines.append(f"m_{k}({labels}) = {value.render()}")
    return [CheckResult("derived_table", True, lines)]


def cmd_coiso(job: Job, args) -> list[CheckResult]:
    chart = job_chart(job)
    q = job_qfield(job, chart)
    spec = job_submanifold(job, chart)
    datum = job_datum(job, spec)
    seed = int(args.seed if args.seed is not None else job.option("seed", 1))
    samples = int(args.samples if args.samples is not None else job.option("samples", 20))
    order = args.truncation if args.truncation is not None else job.option("truncation")

    available = ["valgebra", "coisotropic", "coiso_deform", "simul_deform"]
    defaults = ["valgebra", "coisotropic"]
    if datum is not None:
        defaults.append("coiso_deform")
        if "qt" in job.raw:
            defaults.append("simul_deform")
    results = []
    for name in _requested(args, available, defaults):
        if name == "valgebra":
            rep = split_valgebra_report(spec, seed=seed, samples=samples)
            lines = [f"samples: {rep.samples}"] + rep.failures
            results.append(CheckResult(name, rep.ok, lines))
        elif name == "coisotropic":
            rep = coisotropic_check(q, spec, datum)
            results.append(CheckResult(name, rep.ok, _residual_lines(rep.residuals)))
        elif name == "coiso_deform":
            if datum is None:
                raise JobError("coiso_deform needs a 'datum' section")
            rep = coiso_deform_check(q, spec, datum, order=order)
            lines = [
                f"mc residual: {rep.mc_residual.render()}",
                f"truncation order: {rep.order}",
                f"exact (order >= degree bound {rep.bound}): {rep.exact}",
                f"conormal check: {rep.coiso.ok}",
                f"verdicts agree: {rep.agree}",
            ]
            if rep.in_aprime is not None:
                lines.append(f"residual stays multiplicity <= 1: {rep.in_aprime}")
            results.append(CheckResult(name, rep.ok, lines))
        else:
            if datum is None or "qt" not in job.raw:
                raise JobError("simul_deform needs 'qt' and a 'datum' section")
            qt = parse_mvf(chart, job.raw["qt"])
            rep = simul_deform_check(q, qt, spec, datum, order=order)
            lines = [
                f"field residual: {rep.residual.v.render()}",
                f"abelian residual: {rep.residual.a.render()}",
                f"deformed field homological: {rep.deformed_hom.ok}",
                f"graph conormal check: {rep.coiso.ok}",
                f"verdicts agree: {rep.agree}",
            ]
            results.append(CheckResult(name, rep.ok, lines))
    return results


def cmd_courant(job: Job, args) -> list[CheckResult]:
    data = job_courant(job)
    section = job.section("courant", required=True)
    seed = int(args.seed if args.seed is not None else job.option("seed", 1))
    samples = int(args.samples if args.samples is not None else job.option("samples", 8))
    order = args.truncation if args.truncation is not None else job.option("truncation")

    def parse_phi():
        phi = {}
        for entry in section.get("phi") or []:
            qq, pp, text = entry
            phi[(int(qq), int(pp))] = parse_gpoly(data.chart, text)
        return phi

    available = ["axioms", "dirac", "dirac_deform"]
    defaults = ["axioms"]
    if section.get("dirac_n") is not None:
        defaults.append("dirac")
        if section.get("phi"):
            defaults.append("dirac_deform")
    results = []
    for name in _requested(args, available, defaults):
        if name == "axioms":
            rep = courant_axioms_check(data, samples=samples, seed=seed)
            lines = [
                f"theta square: {rep.theta_square.render()}",
                f"axioms on sampled sections: {rep.axioms_ok}",
                f"field homological: {rep.hom.ok}",
            ]
            results.append(CheckResult(name, rep.ok, lines))
            continue
        n = section.get("dirac_n")
        if n is None:
            raise JobError(f"{name} needs courant.dirac_n")
        n = int(n)
        if name == "dirac":
            rep = dirac_check(data, n, parse_phi() or None)
            lines = [
                f"isotropy: {rep.isotropy_ok}",
                f"involutivity: {rep.involutivity_ok}",
                f"conormal annihilation: {rep.coiso.ok}",
            ]
            if rep.conormal_first is not None:
                lines.append(f"index condition (conormal): {rep.tensor_first_ok()}")
                lines.append(f"index condition (involutivity): {rep.tensor_second_ok()}")
            if rep.off_block_invertible is not None:
                lines.append(f"pairing off-block invertible: {rep.off_block_invertible}")
            lines.extend(
                f"residual {label}: {value.render()}"
                for label, value in rep.coiso.failures()
            )
            results.append(CheckResult(name, rep.ok, lines))
        else:
            phi = parse_phi()
            if not phi:
                raise JobError("dirac_deform needs courant.phi entries")
            rep = dirac_deform_check(data, n, phi, order=order)
            lines = [
                f"mc residual: {rep.mc_residual.render()}",
                f"truncation order: {rep.order}",
                f"no truncation active: {rep.exact}",
                f"dirac check (conormal): {rep.dirac.ok}",
                f"dirac check (sections): {rep.dirac.classical_ok}",
                f"verdicts agree: {rep.agree}",
            ]
            results.append(CheckResult(name, rep.ok, lines))
    return results


COMMANDS = {
    "check-q": cmd_check_q,
    "derived": cmd_derived,
    "coiso": cmd_coiso,
    "courant": cmd_courant,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradedq",
        description="exact checks for graded homological structures and their deformations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--job", required=True, help="path to a schema=1 JSON job file")
        p.add_argument("--check", default=None, help="comma-separated check names")
        p.add_argument("--truncation", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--machine-out", default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    started = time.monotonic()
    try:
        job = load_job(args.job)
        options = {
            "seed": args.seed if args.seed is not None else job.option("seed", 1),
            "samples": args.samples
            if args.samples is not None
            else job.option("samples", "default"),
            "truncation": args.truncation
            if args.truncation is not None
            else job.option("truncation", "default"),
        }
        results = COMMANDS[args.command](job, args)
    except (JobError, ChartError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except InternalInvariantError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 3

    text = render_report(args.command, job, options, results)
    sys.stdout.write(text)
    if args.machine_out:
        payload = machine_report(args.command, job, options, results)
        with open(args.machine_out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"elapsed: {time.monotonic() - started:.3f}s", file=sys.stderr)
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
