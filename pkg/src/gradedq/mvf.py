"""Multivector fields on a graded chart.

A multivector field is a polynomial in the chart generators together
with one derivation symbol d/d<gen> per generator, so an MVF wraps a
GPoly over an extended chart.  The commutation degree of d/d<gen> is
1 - |gen| (a wedge of vector fields is the symmetric product of their
down-shifts), which makes d/dx odd on a degree-0 coordinate while
d/dxi on a degree-1 fiber is even and squares freely.

Per term, the multiplicity l counts derivation factors, the inherited
degree is |Z| = (function degree) - sum |gen| over derivation factors,
the total degree is |Z| + l, and the shifted degree ||Z|| = |Z| + l - 1
is the grading for which the Schouten-Nijenhuis bracket is a graded Lie
bracket.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Mapping, Sequence

from .galg import Chart, ChartError, GPoly, Monomial

DERIV_PREFIX = "d/d"


@lru_cache(maxsize=None)
def extended_chart(chart: Chart) -> Chart:
    """Chart plus one derivation generator d/d<name> of degree 1 - |name|."""
    gens = list(chart.gens)
    for name, deg, _ in chart.gens:
        gens.append((DERIV_PREFIX + name, 1 - deg, "deriv"))
    return Chart(gens)


class MVF:
    """Multivector field: a GPoly over the extended chart of `chart`."""

    __slots__ = ("chart", "poly")

    def __init__(self, chart: Chart, poly: GPoly):
        if poly.chart != extended_chart(chart):
            raise ChartError("polynomial is not over the extended chart")
        self.chart = chart
        self.poly = poly

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(chart: Chart) -> "MVF":
        return MVF(chart, extended_chart(chart).zero())

    @staticmethod
    def from_function(f: GPoly) -> "MVF":
        ext = extended_chart(f.chart)
        pad = (0,) * len(f.chart)
        return MVF(f.chart, GPoly(ext, {m + pad: c for m, c in f.terms.items()}))

    @staticmethod
    def partial_gen(chart: Chart, name: str) -> "MVF":
        chart.index(name)
        return MVF(chart, extended_chart(chart).gen(DERIV_PREFIX + name))

    @staticmethod
    def const(chart: Chart, c) -> "MVF":
        return MVF(chart, extended_chart(chart).const(c))

    # -- algebra -------------------------------------------------------------

    def _check(self, other: "MVF") -> None:
        if self.chart != other.chart:
            raise ChartError("chart mismatch")

    def __eq__(self, other) -> bool:
        if not isinstance(other, MVF):
            return NotImplemented
        return self.chart == other.chart and self.poly == other.poly

    def __hash__(self) -> int:
        return hash((self.chart, self.poly))

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __add__(self, other: "MVF") -> "MVF":
        self._check(other)
        return MVF(self.chart, self.poly + other.poly)

    def __neg__(self) -> "MVF":
        return MVF(self.chart, -self.poly)

    def __sub__(self, other: "MVF") -> "MVF":
        return self + (-other)

    def __mul__(self, other):
        """Wedge product; scalars act by scaling."""
        if isinstance(other, Rational):
            return MVF(self.chart, self.poly.scale(other))
        self._check(other)
        return MVF(self.chart, self.poly * other.poly)

    __rmul__ = __mul__

    def scale(self, c) -> "MVF":
        return MVF(self.chart, self.poly.scale(c))

    # -- per-term grading ------------------------------------------------------

    def _nf(self) -> int:
        return len(self.chart)

    def term_multiplicity(self, mono: Monomial) -> int:
        return sum(mono[self._nf() :])

    def term_total_degree(self, mono: Monomial) -> int:
        return self.poly.chart.monomial_degree(mono)

    def term_shifted_degree(self, mono: Monomial) -> int:
        return self.term_total_degree(mono) - 1

    def by_multiplicity(self) -> dict[int, "MVF"]:
        parts: dict[int, dict] = {}
        for m, c in self.poly.terms.items():
            parts.setdefault(self.term_multiplicity(m), {})[m] = c
        ext = self.poly.chart
        return {l: MVF(self.chart, GPoly(ext, t)) for l, t in sorted(parts.items())}

    def by_shifted_degree(self) -> dict[int, "MVF"]:
        parts: dict[int, dict] = {}
        for m, c in self.poly.terms.items():
            parts.setdefault(self.term_shifted_degree(m), {})[m] = c
        ext = self.poly.chart
        return {d: MVF(self.chart, GPoly(ext, t)) for d, t in sorted(parts.items())}

    def shifted_degree(self):
        """||Z|| when homogeneous, else None (zero counts as None)."""
        degs = {self.term_shifted_degree(m) for m in self.poly.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def multiplicity(self):
        """Common multiplicity of all terms, or None."""
        ls = {self.term_multiplicity(m) for m in self.poly.terms}
        if len(ls) == 1:
            return ls.pop()
        return None

    def max_multiplicity(self) -> int:
        return max((self.term_multiplicity(m) for m in self.poly.terms), default=0)

    def function_part(self) -> GPoly:
        """The multiplicity-0 component as a plain chart polynomial."""
        nf = self._nf()
        terms = {
            m[:nf]: c
            for m, c in self.poly.terms.items()
            if not any(m[nf:])
        }
        return GPoly(self.chart, terms)

    def render(self) -> str:
        return self.poly.render()

    def __repr__(self) -> str:
        return f"MVF({self.render()})"

    # -- derivation action -----------------------------------------------------

    def apply_to(self, f: "MVF") -> "MVF":
        """Apply a multiplicity-1 field to a multiplicity-0 field."""
        nf = self._nf()
        if any(self.term_multiplicity(m) != 1 for m in self.poly.terms):
            raise ChartError("only vector fields act on functions")
        if any(f.term_multiplicity(m) != 0 for m in f.poly.terms):
            raise ChartError("vector fields act on functions only")
        out = extended_chart(self.chart).zero()
        for mono, c in self.poly.terms.items():
            out = out + _vector_term_apply(self.poly.chart, nf, mono, f.poly).scale(c)
        return MVF(self.chart, out)


def _vector_term_apply(ext: Chart, nf: int, mono: Monomial, g: GPoly) -> GPoly:
    """coefficient * d/d<u> applied to g, for a single multiplicity-1 term."""
    u = next(i for i in range(nf, len(ext)) if mono[i])
    coeff = GPoly(ext, {mono[:u] + (0,) + mono[u + 1 :]: Fraction(1)})
    return coeff * g.partial(ext.names[u - nf])


# -- Schouten-Nijenhuis bracket -------------------------------------------------


def sn_bracket(z1: MVF, z2: MVF) -> MVF:
    """Schouten-Nijenhuis bracket, a graded Lie bracket for ||.||.

    Determined by bilinearity from [f,g] = 0, [X,f] = X(f), the commutator
    of vector fields, graded antisymmetry in the shifted degrees, and the
    graded Leibniz rule over the wedge product; the bracket of an l1- and
    an l2-vector has multiplicity l1 + l2 - 1.
    """
    z1._check(z2)
    ext = z1.poly.chart
    nf = len(z1.chart)
    out = ext.zero()
    for m1, c1 in z1.poly.terms.items():
        for m2, c2 in z2.poly.terms.items():
            out = out + _term_bracket(ext, nf, m1, m2).scale(c1 * c2)
    return MVF(z1.chart, out)


def _mult(mono: Monomial, nf: int) -> int:
    return sum(mono[nf:])


@lru_cache(maxsize=None)
def _term_bracket(ext: Chart, nf: int, m1: Monomial, m2: Monomial) -> GPoly:
    """Bracket of two coefficient-1 terms, by recursion on multiplicity."""
    l1 = _mult(m1, nf)
    l2 = _mult(m2, nf)

    if l2 >= 2:
        # Peel the first derivation factor off the second argument:
        # [Z, A ^ B] = [Z, A] ^ B + (-1)**(||Z|| * |A|_total) A ^ [Z, B].
        u = next(i for i in range(nf, len(ext)) if m2[i])
        a = m2[:u] + (1,) + (0,) * (len(ext) - u - 1)
        b = (0,) * nf + m2[nf:u] + (m2[u] - 1,) + m2[u + 1 :]
        a_poly = GPoly(ext, {a: Fraction(1)})
        b_poly = GPoly(ext, {b: Fraction(1)})
        sh1 = ext.monomial_degree(m1) - 1
        tot_a = ext.monomial_degree(a)
        first = _term_bracket(ext, nf, m1, a) * b_poly
        second = a_poly * _term_bracket(ext, nf, m1, b)
        sign = -1 if (sh1 * tot_a) % 2 else 1
        return first + second.scale(sign)

    if l1 >= 2:
        sh1 = ext.monomial_degree(m1) - 1
        sh2 = ext.monomial_degree(m2) - 1
        sign = -1 if (1 + sh1 * sh2) % 2 else 1
        return _term_bracket(ext, nf, m2, m1).scale(sign)

    if l1 == 0 and l2 == 0:
        return ext.zero()

    if l1 == 1 and l2 == 0:
        return _vector_term_apply(ext, nf, m1, GPoly(ext, {m2: Fraction(1)}))

    if l1 == 0 and l2 == 1:
        sh1 = ext.monomial_degree(m1) - 1
        sh2 = ext.monomial_degree(m2) - 1
        sign = -1 if (1 + sh1 * sh2) % 2 else 1
        return _term_bracket(ext, nf, m2, m1).scale(sign)

    # Two vector fields: the commutator of derivations, reassembled from
    # its values on the generators.
    u = next(i for i in range(nf, len(ext)) if m1[i])
    v = next(i for i in range(nf, len(ext)) if m2[i])
    cu = GPoly(ext, {m1[:u] + (0,) + m1[u + 1 :]: Fraction(1)})
    cv = GPoly(ext, {m2[:v] + (0,) + m2[v + 1 :]: Fraction(1)})
    sh1 = ext.monomial_degree(m1) - 1
    sh2 = ext.monomial_degree(m2) - 1
    sign = -1 if (sh1 * sh2) % 2 else 1
    first = cu * cv.partial(ext.names[u - nf]) * ext.gen(ext.names[v])
    second = cv * cu.partial(ext.names[v - nf]) * ext.gen(ext.names[u])
    return first - second.scale(sign)


# -- coframe evaluation ----------------------------------------------------------


class CoframeElement:
    """Combination sum_u c_u(chart) * d<u>, stored as {generator: coefficient}.

    Each component must have a well-defined combined parity: the parity
    of its coefficient plus the parity of the dual derivation symbol, and
    all components must share it, so the contraction operator of the
    element is a graded derivation of that parity.
    """

    __slots__ = ("chart", "coeffs", "parity")

    def __init__(self, chart: Chart, coeffs: Mapping[str, GPoly]):
        self.chart = chart
        clean: dict[str, GPoly] = {}
        parities = set()
        for name, c in coeffs.items():
            i = chart.index(name)
            if c.chart != chart:
                raise ChartError("coframe coefficient over a different chart")
            if c.is_zero():
                continue
            coeff_parities = {chart.monomial_degree(m) % 2 for m in c.terms}
            if len(coeff_parities) > 1:
                raise ChartError("coframe coefficient mixes parities")
            clean[name] = c
            parities.add((coeff_parities.pop() + 1 - chart.degrees[i]) % 2)
        if len(parities) > 1:
            raise ChartError("coframe element mixes parities")
        self.coeffs = clean
        self.parity = parities.pop() if parities else 0

    @staticmethod
    def d(chart: Chart, name: str) -> "CoframeElement":
        return CoframeElement(chart, {name: chart.one()})

    def coefficient(self, name: str) -> GPoly:
        return self.coeffs.get(name, self.chart.zero())


def _lift(chart: Chart, f: GPoly) -> GPoly:
    ext = extended_chart(chart)
    pad = (0,) * len(chart)
    return GPoly(ext, {m + pad: c for m, c in f.terms.items()})


def contract_coframe(z: MVF, cov: CoframeElement) -> MVF:
    """Contraction with one coframe element, as a graded derivation.

    Each derivation factor d/d<u> is replaced in place by the coefficient
    of d<u> in the element; the replacement crosses the preceding factors
    with the element's parity and any reordering of the inserted
    coefficient is handled by the graded product itself.
    """
    if cov.chart != z.chart:
        raise ChartError("coframe element over a different chart")
    ext = z.poly.chart
    nf = len(z.chart)
    lifted = {nf + z.chart.index(n): _lift(z.chart, c) for n, c in cov.coeffs.items()}
    out = ext.zero()
    for mono, c in z.poly.terms.items():
        running = GPoly(ext, {tuple(mono[:nf]) + (0,) * nf: c})
        pre_total = ext.monomial_degree(tuple(mono[:nf]) + (0,) * nf)
        for i in range(nf, len(ext)):
            e = mono[i]
            if not e:
                continue
            coeff = lifted.get(i)
            if coeff is not None:
                suffix = [0] * len(ext)
                suffix[i] = e - 1
                for j in range(i + 1, len(ext)):
                    suffix[j] = mono[j]
                sign = -1 if (cov.parity * pre_total) % 2 else 1
                piece = running * coeff * GPoly(ext, {tuple(suffix): Fraction(e)})
                out = out + piece.scale(sign)
            block = [0] * len(ext)
            block[i] = e
            running = running * GPoly(ext, {tuple(block): Fraction(1)})
            pre_total += e * ext.degrees[i]
    return MVF(z.chart, out)


def eval_coframe(z: MVF, covs: Sequence[CoframeElement]) -> GPoly:
    """Pair an l-vector with l coframe elements.

    The elements contract in order, first element first; graded
    alternation of the result in the coframe arguments is a consequence
    of the derivation property, checked by tests, not an input.
    """
    ls = {z.term_multiplicity(m) for m in z.poly.terms}
    if ls and ls != {len(covs)}:
        raise ChartError(
            f"multiplicity mismatch: field has multiplicities {sorted(ls)}, "
            f"{len(covs)} coframe elements given"
        )
    out = z
    for cov in covs:
        out = contract_coframe(out, cov)
    nf = len(z.chart)
    terms = {}
    for mono, c in out.poly.terms.items():
        if any(mono[nf:]):
            raise AssertionError("contraction left derivation factors behind")
        terms[mono[:nf]] = c
    return GPoly(z.chart, terms)


def restrict(z: MVF, locus: Mapping[str, GPoly]) -> MVF:
    """Substitute in the function part only; derivation factors are kept."""
    for name in locus:
        if name.startswith(DERIV_PREFIX):
            raise ChartError("substitution targets must be chart generators")
        z.chart.index(name)
    images = {name: _lift(z.chart, img) for name, img in locus.items()}
    return MVF(z.chart, z.poly.substitute(images))
