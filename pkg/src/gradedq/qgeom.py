"""Mixed-degree homological fields and submanifold deformation checks.

A QField is a multivector field with shifted-degree components at +1 and
-1 only; it is homological when its self-bracket vanishes, which splits
into three degree components checked separately.

A SubmanifoldSpec names a coordinate submanifold concentrated in one
degree k0: the base splits into tangential x's and normal y's (the
submanifold sits at y = 0), the degree -k0 fiber coordinates split into
retained xi's and complementary eta's, and every other fiber coordinate
is a gamma, set to zero when the k0-slice is probed.  Deformations are
pairs (sigma, phi): a shift y -> sigma(x) of the base and a graph
eta -> phi(x) * xi of the fiber part.

The abelian part carved out by the spec consists of the fields whose
coefficients use only (x, xi) and whose derivation factors use only
d/dy and d/deta; the projection onto it is a termwise filter.  All
deformation checks run twice, once through Maurer-Cartan series of
derived brackets and once through direct conormal evaluation on the
graph, and insist the verdicts coincide.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .galg import Chart, ChartError, GPoly
from .linfty import MVFSpace
from .mvf import (
    DERIV_PREFIX,
    CoframeElement,
    MVF,
    eval_coframe,
    extended_chart,
    restrict,
    sn_bracket,
)
from .vderive import (
    CPair,
    DerivedFamily,
    VAlgebraSplit,
    combined_mc_residual,
    derived_mc_residual,
    valgebra_check,
)


class InternalInvariantError(AssertionError):
    """Two independently computed verdicts disagreed; always a bug."""


# -- the Q-field ----------------------------------------------------------------


@dataclass(frozen=True)
class QField:
    """Field with shifted-degree components at +1 (plus) and -1 (minus) only."""

    plus: MVF
    minus: MVF

    @staticmethod
    def from_mvf(z: MVF) -> "QField":
        comps = z.by_shifted_degree()
        bad = sorted(set(comps) - {1, -1})
        if bad:
            raise ChartError(
                f"field has components at shifted degrees {bad}; only +1/-1 allowed"
            )
        zero = MVF.zero(z.chart)
        return QField(comps.get(1, zero), comps.get(-1, zero))

    @property
    def chart(self) -> Chart:
        return self.plus.chart

    @property
    def mvf(self) -> MVF:
        return self.plus + self.minus


@dataclass
class HomologicalReport:
    plus_plus: MVF
    mixed: MVF
    minus_minus: MVF

    @property
    def ok(self) -> bool:
        return (
            self.plus_plus.is_zero()
            and self.mixed.is_zero()
            and self.minus_minus.is_zero()
        )

    def residuals(self):
        return [
            ("[Q+,Q+]", self.plus_plus),
            ("2[Q+,Q-]", self.mixed),
            ("[Q-,Q-]", self.minus_minus),
        ]


def is_homological(q: QField) -> HomologicalReport:
    """Split [Q,Q] into its three degree components and test each for zero."""
    return HomologicalReport(
        plus_plus=sn_bracket(q.plus, q.plus),
        mixed=sn_bracket(q.plus, q.minus).scale(2),
        minus_minus=sn_bracket(q.minus, q.minus),
    )


@dataclass
class QDeformReport:
    mc_residual: MVF
    base: HomologicalReport
    deformed: HomologicalReport

    @property
    def agree(self) -> bool:
        return (not self.mc_residual.is_zero()) != self.deformed.ok

    @property
    def ok(self) -> bool:
        return self.mc_residual.is_zero()

    def mc_components(self) -> dict[int, MVF]:
        return self.mc_residual.by_shifted_degree()


def q_deform_check(q: QField, qt: MVF) -> QDeformReport:
    """[Q, Qt] + (1/2)[Qt, Qt] against direct homologicity of Q + Qt.

    The two verdicts are related by the exact identity
    [Q+Qt, Q+Qt] = [Q,Q] + 2([Q,Qt] + (1/2)[Qt,Qt]), which is asserted;
    a violation is an engine bug, not an input property.
    """
    QField.from_mvf(qt)
    mc = sn_bracket(q.mvf, qt) + sn_bracket(qt, qt).scale(Fraction(1, 2))
    base = is_homological(q)
    deformed = is_homological(QField.from_mvf(q.mvf + qt))
    total_new = sn_bracket(q.mvf + qt, q.mvf + qt)
    total_old = sn_bracket(q.mvf, q.mvf)
    if total_new - total_old != mc.scale(2):
        raise InternalInvariantError("deformation residual identity failed")
    report = QDeformReport(mc_residual=mc, base=base, deformed=deformed)
    if base.ok and not report.agree:
        raise InternalInvariantError("deformation verdicts disagree")
    return report


# -- submanifold data -------------------------------------------------------------


@dataclass(frozen=True)
class SubmanifoldSpec:
    """Coordinate submanifold concentrated in degree k0 with a chosen complement."""

    chart: Chart
    k0: int
    x: tuple[str, ...]
    y: tuple[str, ...]
    xi: tuple[str, ...]
    eta: tuple[str, ...]

    def __init__(self, chart, k0, x=(), y=(), xi=(), eta=()):
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "k0", int(k0))
        object.__setattr__(self, "x", tuple(x))
        object.__setattr__(self, "y", tuple(y))
        object.__setattr__(self, "xi", tuple(xi))
        object.__setattr__(self, "eta", tuple(eta))
        self._validate()

    def _validate(self) -> None:
        chart = self.chart
        if self.k0 > 0:
            raise ChartError("concentration degree must be <= 0")
        base = set(chart.base_names())
        if set(self.x) | set(self.y) != base or set(self.x) & set(self.y):
            raise ChartError("x and y must partition the base coordinates")
        d0 = -self.k0
        level = {n for n in chart.fiber_names() if chart.degree_of(n) == d0}
        if self.k0 == 0 and (self.xi or self.eta):
            raise ChartError("degree-0 concentration carries no fiber split")
        if self.k0 < 0 and (set(self.xi) | set(self.eta) != level or set(self.xi) & set(self.eta)):
            raise ChartError(
                f"xi and eta must partition the degree-{d0} fiber coordinates"
            )
        seen = set(self.x) | set(self.y) | set(self.xi) | set(self.eta)
        if len(seen) != len(self.x) + len(self.y) + len(self.xi) + len(self.eta):
            raise ChartError("submanifold splits overlap")

    @property
    def gamma(self) -> tuple[str, ...]:
        d0 = -self.k0
        return tuple(
            n for n in self.chart.fiber_names() if self.chart.degree_of(n) != d0
        )

    def conormal_names(self) -> tuple[str, ...]:
        return self.y + self.eta


@dataclass(frozen=True)
class DeformationDatum:
    """Deformation (sigma, phi): y^j -> sigma^j(x), eta^q -> phi^q_p(x) xi^p."""

    spec: SubmanifoldSpec
    sigma: Mapping[str, GPoly]
    phi: Mapping[tuple[str, str], GPoly]

    def __init__(self, spec: SubmanifoldSpec, sigma=None, phi=None):
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "sigma", dict(sigma or {}))
        object.__setattr__(self, "phi", dict(phi or {}))
        self._validate()

    def _validate(self) -> None:
        spec = self.spec
        chart = spec.chart
        xonly = set(spec.x)
        for yname, s in self.sigma.items():
            if yname not in spec.y:
                raise ChartError(f"{yname} is not a normal coordinate")
            if s.chart != chart:
                raise ChartError("sigma component over a different chart")
            support = {
                chart.names[i] for m in s.terms for i, e in enumerate(m) if e
            }
            if not support <= xonly:
                raise ChartError(f"sigma^{yname} must depend on tangential x only")
        for (ename, xname), c in self.phi.items():
            if ename not in spec.eta or xname not in spec.xi:
                raise ChartError(f"phi index ({ename}, {xname}) outside the fiber split")
            if c.chart != chart:
                raise ChartError("phi coefficient over a different chart")
            support = {
                chart.names[i] for m in c.terms for i, e in enumerate(m) if e
            }
            if not support <= xonly:
                raise ChartError("phi coefficients must depend on tangential x only")

    @staticmethod
    def zero(spec: SubmanifoldSpec) -> "DeformationDatum":
        return DeformationDatum(spec, {}, {})

    def is_zero(self) -> bool:
        return all(s.is_zero() for s in self.sigma.values()) and all(
            c.is_zero() for c in self.phi.values()
        )


# -- the injection I and projection P ---------------------------------------------


def _term_footprint(chart: Chart, mono) -> tuple[set, set]:
    """(function-generator names, derivation-target names) used by a term."""
    nf = len(chart)
    fnames = {chart.names[i] for i in range(nf) if mono[i]}
    dnames = {chart.names[i - nf] for i in range(nf, 2 * nf) if mono[i]}
    return fnames, dnames


def in_abelian_part(spec: SubmanifoldSpec, z: MVF) -> bool:
    """Coefficients in (x, xi) and derivation factors along (y, eta) only."""
    allowed_f = set(spec.x) | set(spec.xi)
    allowed_d = set(spec.y) | set(spec.eta)
    for mono in z.poly.terms:
        fnames, dnames = _term_footprint(spec.chart, mono)
        if not (fnames <= allowed_f and dnames <= allowed_d):
            return False
    return True


def build_P(spec: SubmanifoldSpec):
    """Projection onto the abelian part: a termwise filter.

    Derivation factors along x, xi or gamma kill a term; coefficients are
    evaluated at y = eta = gamma = 0, which kills any term whose
    coefficient touches those coordinates.
    """
    chart = spec.chart
    allowed_f = set(spec.x) | set(spec.xi)
    allowed_d = set(spec.y) | set(spec.eta)
    ext = extended_chart(chart)

    def project(z: MVF) -> MVF:
        if z.chart != chart:
            raise ChartError("field over a different chart")
        kept = {}
        for mono, c in z.poly.terms.items():
            fnames, dnames = _term_footprint(chart, mono)
            if fnames <= allowed_f and dnames <= allowed_d:
                kept[mono] = c
        return MVF(chart, GPoly(ext, kept))

    return project


@dataclass(frozen=True)
class AInjection:
    """Generator rules of the inclusion of the abelian part into the fields."""

    spec: SubmanifoldSpec

    def function(self, f: GPoly) -> MVF:
        out = MVF.from_function(f)
        if not in_abelian_part(self.spec, out):
            raise ChartError("function uses coordinates outside (x, xi)")
        return out

    def normal_shift(self, sigma: Mapping[str, GPoly]) -> MVF:
        out = MVF.zero(self.spec.chart)
        for yname, s in sigma.items():
            out = out + MVF.from_function(s) * MVF.partial_gen(self.spec.chart, yname)
        return self.embed(out)

    def w(self, eta_name: str) -> MVF:
        if eta_name not in self.spec.eta:
            raise ChartError(f"{eta_name} is not a complementary fiber coordinate")
        return MVF.partial_gen(self.spec.chart, eta_name)

    def embed(self, z: MVF) -> MVF:
        if not in_abelian_part(self.spec, z):
            raise ChartError("element lies outside the abelian part")
        return z


def build_I(spec: SubmanifoldSpec) -> AInjection:
    return AInjection(spec)


def valgebra_split(spec: SubmanifoldSpec) -> VAlgebraSplit:
    return VAlgebraSplit(
        chart=spec.chart,
        project=build_P(spec),
        contains=lambda z: in_abelian_part(spec, z),
    )


def x_field(datum: DeformationDatum) -> MVF:
    """X_a = sigma^j d/dy^j + phi^q_p xi^p d/deta^q."""
    spec = datum.spec
    chart = spec.chart
    out = MVF.zero(chart)
    for yname, s in datum.sigma.items():
        out = out + MVF.from_function(s) * MVF.partial_gen(chart, yname)
    for (ename, xname), c in datum.phi.items():
        out = out + MVF.from_function(c * chart.gen(xname)) * MVF.partial_gen(chart, ename)
    return out


def graph_substitution(datum: DeformationDatum) -> dict[str, GPoly]:
    """y -> sigma(x), eta -> phi(x) xi, gamma -> 0."""
    spec = datum.spec
    chart = spec.chart
    subs: dict[str, GPoly] = {}
    for yname in spec.y:
        subs[yname] = datum.sigma.get(yname, chart.zero())
    for ename in spec.eta:
        img = chart.zero()
        for xname in spec.xi:
            c = datum.phi.get((ename, xname))
            if c is not None:
                img = img + c * chart.gen(xname)
        subs[ename] = img
    for gname in spec.gamma:
        subs[gname] = chart.zero()
    return subs


def graph_coframes(datum: DeformationDatum) -> list[tuple[str, CoframeElement]]:
    """Conormal frame of the graph, the differentials of its defining equations.

    mu^j   = d(y^j - sigma^j(x))        = dy^j - (d sigma^j/d x^i) dx^i
    kappa^q = d(eta^q - phi^q_p(x) xi^p) = d eta^q - phi^q_p d xi^p
                                           - (d phi^q_p/d x^i) xi^p dx^i

    The last summand matters whenever phi varies over the base: without it
    the frame fails to annihilate the graph's tangent lifts of d/dx.
    """
    spec = datum.spec
    chart = spec.chart
    out = []
    for yname in spec.y:
        coeffs = {yname: chart.one()}
        s = datum.sigma.get(yname)
        if s is not None:
            for xname in spec.x:
                coeffs[xname] = -s.partial(xname)
        out.append((f"mu_{yname}", CoframeElement(chart, coeffs)))
    for ename in spec.eta:
        coeffs: dict[str, GPoly] = {ename: chart.one()}
        for fname in spec.xi:
            c = datum.phi.get((ename, fname))
            if c is not None:
                coeffs[fname] = -c
        for xname in spec.x:
            slope = chart.zero()
            for fname in spec.xi:
                c = datum.phi.get((ename, fname))
                if c is not None:
                    slope = slope + c.partial(xname) * chart.gen(fname)
            if not slope.is_zero():
                coeffs[xname] = -slope
        out.append((f"kappa_{ename}", CoframeElement(chart, coeffs)))
    return out


# -- conormal annihilation ----------------------------------------------------------


@dataclass
class CoisoReport:
    residuals: list[tuple[str, GPoly]]

    @property
    def ok(self) -> bool:
        return all(r.is_zero() for _, r in self.residuals)

    def failures(self):
        return [(label, r) for label, r in self.residuals if not r.is_zero()]


def coisotropic_check(
    q: QField, spec: SubmanifoldSpec, datum: Optional[DeformationDatum] = None
) -> CoisoReport:
    """Evaluate the restricted field against every conormal tuple of the graph.

    The field is restricted to the k0-slice of the graph (gamma = 0,
    y = sigma, eta = phi xi); each multiplicity-l component is then paired
    with all l-tuples from the conormal frame, and the multiplicity-0
    component must vanish under restriction outright.
    """
    datum = datum or DeformationDatum.zero(spec)
    if datum.spec != spec:
        raise ChartError("datum built for a different submanifold spec")
    restricted = restrict(q.mvf, graph_substitution(datum))
    frame = graph_coframes(datum)
    residuals: list[tuple[str, GPoly]] = []
    subs = graph_substitution(datum)
    for l, comp in restricted.by_multiplicity().items():
        if l == 0:
            residuals.append(("Z|_graph", comp.function_part()))
            continue
        for picks in _tuples_with_replacement(len(frame), l):
            labels = ",".join(frame[i][0] for i in picks)
            covs = [frame[i][1] for i in picks]
            value = eval_coframe(comp, covs).substitute(subs)
            residuals.append((f"Z({labels})", value))
    return CoisoReport(residuals=residuals)


def _tuples_with_replacement(n: int, l: int):
    from itertools import combinations_with_replacement

    return combinations_with_replacement(range(n), l)


# -- Maclaurin expansion of the conormal pairing --------------------------------------


def truncation_bound(z: MVF, spec: SubmanifoldSpec) -> int:
    """Arity above which iterated brackets with a deformation field vanish.

    Each bracket with X_a either differentiates the coefficient by a
    normal coordinate or converts one d/dx or d/dxi factor, so the count
    of those per term bounds the surviving arity.
    """
    chart = spec.chart
    nf = len(chart)
    normal_idx = [chart.index(n) for n in spec.y + spec.eta]
    conv_idx = [nf + chart.index(n) for n in spec.x + spec.xi]
    best = 0
    for mono in z.poly.terms:
        w = sum(mono[i] for i in normal_idx) + sum(mono[i] for i in conv_idx)
        best = max(best, w)
    return best


def default_truncation(z: MVF, spec: SubmanifoldSpec) -> int:
    """Base-degree of the field plus the rank of the split fibers plus two,
    raised to the exact bound if that is larger."""
    chart = spec.chart
    nf = len(chart)
    base_idx = [i for i in range(nf) if chart.kinds[i] == "base"]
    base_deg = max(
        (sum(m[i] for i in base_idx) for m in z.poly.terms), default=0
    )
    rule = base_deg + len(spec.xi) + len(spec.eta) + 2
    return max(rule, truncation_bound(z, spec))


@dataclass
class MaclaurinResult:
    value: MVF
    order: int
    bound: int

    @property
    def exact(self) -> bool:
        return self.order >= self.bound


def maclaurin_expand(
    z: MVF, datum: DeformationDatum, order: Optional[int] = None
) -> MaclaurinResult:
    """H(Z) = sum_k (1/k!) (I o P) [...[Z, -X_a], ..., -X_a], truncated.

    For polynomial coefficients the series is finite and the result's
    pairing with the flat conormal frame reproduces the pairing of Z with
    the graph conormal frame, term by term.
    """
    spec = datum.spec
    split = valgebra_split(spec)
    v = -x_field(datum)
    bound = truncation_bound(z, spec)
    if order is None:
        order = default_truncation(z, spec)
    total = MVF.zero(spec.chart)
    t = z
    fact = 1
    for k in range(order + 1):
        if k:
            fact *= k
            t = sn_bracket(t, v)
        if t.is_zero():
            break
        total = total + split.project(t).scale(Fraction(1, fact))
    return MaclaurinResult(value=total, order=order, bound=bound)


# -- deformation checks ----------------------------------------------------------------


@dataclass
class CoisoDeformReport:
    mc_residual: MVF
    coiso: CoisoReport
    order: int
    bound: int
    in_aprime: Optional[bool]

    @property
    def exact(self) -> bool:
        return self.order >= self.bound

    @property
    def agree(self) -> bool:
        return self.mc_residual.is_zero() == self.coiso.ok

    @property
    def ok(self) -> bool:
        return self.mc_residual.is_zero()


def coiso_deform_check(
    q: QField,
    spec: SubmanifoldSpec,
    datum: DeformationDatum,
    order: Optional[int] = None,
) -> CoisoDeformReport:
    """Maurer-Cartan residual of -(sigma, phi) against the direct graph check.

    The candidate is validated as a genuine deformation datum (sigma over
    x only, phi a linear fiber map), the residual is computed in the
    derived family of Q, and the conormal evaluation of the graph is run
    independently; for exact truncation the verdicts must coincide.
    """
    if datum.spec != spec:
        raise ChartError("datum built for a different submanifold spec")
    fam = DerivedFamily(q.mvf, valgebra_split(spec))
    if order is None:
        order = default_truncation(q.mvf, spec)
    bound = truncation_bound(q.mvf, spec)
    v = -x_field(datum)
    mc = derived_mc_residual(fam, v, order)
    coiso = coisotropic_check(q, spec, datum)
    in_aprime: Optional[bool] = None
    if q.mvf.max_multiplicity() <= 1:
        in_aprime = all(
            mc.term_multiplicity(m) <= 1 for m in mc.poly.terms
        )
    report = CoisoDeformReport(
        mc_residual=mc, coiso=coiso, order=order, bound=bound, in_aprime=in_aprime
    )
    if report.exact and not report.agree:
        raise InternalInvariantError(
            "Maurer-Cartan and conormal verdicts disagree at exact truncation"
        )
    return report


@dataclass
class SimulDeformReport:
    residual: CPair
    deformed_hom: HomologicalReport
    coiso: CoisoReport
    order: int

    @property
    def agree(self) -> bool:
        v_ok = self.residual.v.is_zero()
        a_ok = self.residual.a.is_zero()
        return (v_ok and a_ok) == (self.deformed_hom.ok and self.coiso.ok)

    @property
    def ok(self) -> bool:
        return self.residual.v.is_zero() and self.residual.a.is_zero()


def simul_deform_check(
    q: QField,
    qt: MVF,
    spec: SubmanifoldSpec,
    datum: DeformationDatum,
    order: Optional[int] = None,
) -> SimulDeformReport:
    """Joint deformation (Qt, -(sigma, phi)) through the combined structure.

    Requires a purely positive Q and a shifted-degree-1 Qt; the residual's
    two components are cross-checked against direct homologicity of Q + Qt
    and the conormal check of the graph under Q + Qt.
    """
    if datum.spec != spec:
        raise ChartError("datum built for a different submanifold spec")
    if not qt.is_zero() and qt.shifted_degree() != 1:
        raise ChartError("deformations of the field must have shifted degree 1")
    fam = DerivedFamily(q.mvf, valgebra_split(spec))
    if order is None:
        order = max(
            default_truncation(q.mvf, spec), default_truncation(qt, spec) + 1
        )
    v = -x_field(datum)
    residual = combined_mc_residual(fam, qt, v, order)
    q_new = QField.from_mvf(q.mvf + qt)
    deformed_hom = is_homological(q_new)
    coiso = coisotropic_check(q_new, spec, datum)

    # Component identities relating the combined series to its two factors.
    expected_v = -(sn_bracket(q.mvf, qt) + sn_bracket(qt, qt).scale(Fraction(1, 2)))
    if residual.v != expected_v:
        raise InternalInvariantError("combined residual: field component mismatch")
    fam_new = DerivedFamily(q_new.mvf, valgebra_split(spec))
    if residual.a != derived_mc_residual(fam_new, v, order):
        raise InternalInvariantError("combined residual: abelian component mismatch")

    report = SimulDeformReport(
        residual=residual, deformed_hom=deformed_hom, coiso=coiso, order=order
    )
    if order >= truncation_bound(q.mvf + qt, spec) and not report.agree:
        raise InternalInvariantError("simultaneous deformation verdicts disagree")
    return report


# -- randomized structural report -----------------------------------------------------


def split_valgebra_report(
    spec: SubmanifoldSpec, seed: int, samples: int
):
    """Convenience wrapper running the V-algebra axioms for a spec's split."""
    from .randgen import random_mvf, random_gpoly

    split = valgebra_split(spec)
    rng = random.Random(seed)
    chart = spec.chart

    def ambient(r: random.Random) -> MVF:
        return random_mvf(chart, r, nterms=2, max_mult=2)

    def abelian(r: random.Random) -> MVF:
        out = MVF.zero(chart)
        names = spec.y + spec.eta
        for _ in range(2):
            f = random_gpoly(chart, r, nterms=1, max_factors=2, names=spec.x + spec.xi)
            t = MVF.from_function(f)
            for _ in range(r.randint(0, 2)):
                if not names:
                    break
                t = t * MVF.partial_gen(chart, r.choice(names))
                if t.is_zero():
                    break
            out = out + t
        return out

    return valgebra_check(split, rng, samples, ambient, abelian)
