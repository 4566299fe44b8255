"""Exact graded-commutative polynomials over a named coordinate chart.

A Chart is an ordered list of generators (name, degree, kind).  A GPoly
stores its terms as a dict mapping an exponent tuple (aligned with the
chart order) to a nonzero Fraction, e.g. on the chart (x, xi1, xi2) with
degrees (0, 1, 1):

    {(2, 0, 0): Fraction(1), (1, 1, 1): Fraction(2)}   <->   x^2 + 2*x*xi1*xi2

Generators of odd degree square to zero, so their exponents are 0 or 1,
and merging monomials into chart order applies the rule
v*w = (-1)**(|v||w|) w*v.  Coefficients are exact rationals throughout;
there is no floating point anywhere in this module.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

KINDS = ("base", "fiber", "deriv")

_IDENT = re.compile(r"[A-Za-z_]\w*\Z")
_DERIV_IDENT = re.compile(r"d/d[A-Za-z_]\w*\Z")

Monomial = tuple  # exponent tuple, one entry per chart generator


class ChartError(ValueError):
    pass


class Chart:
    """Ordered graded coordinate system.

    "base" generators have degree 0, "fiber" generators degree >= 1 (the
    linear fiber coordinates of a graded bundle), and "deriv" generators
    (created internally for multivector charts) may carry any degree.
    """

    __slots__ = ("gens", "names", "degrees", "parities", "kinds", "_index", "_hash")

    def __init__(self, gens: Iterable[tuple[str, int, str]]):
        gens = tuple((str(n), int(d), str(k)) for (n, d, k) in gens)
        names = tuple(g[0] for g in gens)
        if len(set(names)) != len(names):
            raise ChartError("duplicate generator names")
        for name, deg, kind in gens:
            if kind not in KINDS:
                raise ChartError(f"unknown generator kind {kind!r}")
            pattern = _DERIV_IDENT if kind == "deriv" else _IDENT
            if not pattern.match(name):
                raise ChartError(f"bad generator name {name!r}")
            if kind == "base" and deg != 0:
                raise ChartError(f"base generator {name} must have degree 0")
            if kind == "fiber" and deg < 1:
                raise ChartError(f"fiber generator {name} must have degree >= 1")
        self.gens = gens
        self.names = names
        self.degrees = tuple(g[1] for g in gens)
        self.parities = tuple(d % 2 for d in self.degrees)
        self.kinds = tuple(g[2] for g in gens)
        self._index = {n: i for i, n in enumerate(names)}
        self._hash = hash(gens)

    def __len__(self) -> int:
        return len(self.gens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Chart) and self.gens == other.gens

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}:{d}" for n, d, _ in self.gens)
        return f"Chart({inner})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ChartError(f"unknown generator {name!r}") from None

    def degree_of(self, name: str) -> int:
        return self.degrees[self.index(name)]

    def base_names(self) -> tuple[str, ...]:
        return tuple(n for n, k in zip(self.names, self.kinds) if k == "base")

    def fiber_names(self) -> tuple[str, ...]:
        return tuple(n for n, k in zip(self.names, self.kinds) if k == "fiber")

    # -- constructors for polynomials on this chart ------------------------

    def zero(self) -> "GPoly":
        return GPoly(self, {})

    def const(self, c) -> "GPoly":
        c = Fraction(c)
        if c == 0:
            return self.zero()
        return GPoly(self, {(0,) * len(self.gens): c})

    def one(self) -> "GPoly":
        return self.const(1)

    def gen(self, name: str) -> "GPoly":
        i = self.index(name)
        expo = [0] * len(self.gens)
        expo[i] = 1
        return GPoly(self, {tuple(expo): Fraction(1)})

    def monomial_degree(self, mono: Monomial) -> int:
        return sum(e * d for e, d in zip(mono, self.degrees))


def _mono_mul(chart: Chart, m1: Monomial, m2: Monomial):
    """Merge two monomials into chart order; None when an odd square appears.

    The second monomial's factors are moved left into position; each odd
    factor of m2 crossing an odd factor of m1 with larger chart index
    flips the sign.
    """
    par = chart.parities
    cross = 0
    odd1 = [i for i, e in enumerate(m1) if e and par[i]]
    for j, e2 in enumerate(m2):
        if not e2 or not par[j]:
            continue
        if m1[j]:
            return None
        for i in odd1:
            if i > j:
                cross += 1
    sign = -1 if cross % 2 else 1
    return sign, tuple(a + b for a, b in zip(m1, m2))


class GPoly:
    """Graded-commutative polynomial with exact rational coefficients."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Mapping[Monomial, Fraction]):
        self.chart = chart
        self.terms = {m: c for m, c in terms.items() if c != 0}

    # -- ring structure ----------------------------------------------------

    def _check_chart(self, other: "GPoly") -> None:
        if self.chart != other.chart:
            raise ChartError("chart mismatch")

    def __eq__(self, other) -> bool:
        if not isinstance(other, GPoly):
            return NotImplemented
        return self.chart == other.chart and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.chart, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "GPoly") -> "GPoly":
        self._check_chart(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m, 0) + c
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        return GPoly(self.chart, terms)

    def __neg__(self) -> "GPoly":
        return GPoly(self.chart, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "GPoly") -> "GPoly":
        return self + (-other)

    def scale(self, c) -> "GPoly":
        c = Fraction(c)
        if c == 0:
            return self.chart.zero()
        return GPoly(self.chart, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Rational):
            return self.scale(other)
        self._check_chart(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                merged = _mono_mul(self.chart, m1, m2)
                if merged is None:
                    continue
                sign, m = merged
                v = out.get(m, 0) + sign * c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return GPoly(self.chart, out)

    def __rmul__(self, other):
        if isinstance(other, Rational):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "GPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = self.chart.one()
        for _ in range(n):
            out = out * self
        return out

    # -- grading -----------------------------------------------------------

    def degree_parts(self) -> dict[int, "GPoly"]:
        """Split into homogeneous components, keyed by degree."""
        parts: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            parts.setdefault(self.chart.monomial_degree(m), {})[m] = c
        return {d: GPoly(self.chart, t) for d, t in sorted(parts.items())}

    def homogeneous_degree(self):
        """The common degree of all terms, or None (zero or inhomogeneous)."""
        degs = {self.chart.monomial_degree(m) for m in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def degree_in(self, names: Sequence[str]) -> int:
        """Largest total exponent of the given generators; 0 for the zero poly."""
        idx = [self.chart.index(n) for n in names]
        return max((sum(m[i] for i in idx) for m in self.terms), default=0)

    def truncate_in(self, names: Sequence[str], order: int) -> "GPoly":
        """Drop terms whose total exponent in `names` exceeds `order`."""
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        idx = [self.chart.index(n) for n in names]
        return GPoly(
            self.chart,
            {m: c for m, c in self.terms.items() if sum(m[i] for i in idx) <= order},
        )

    # -- calculus ----------------------------------------------------------

    def partial(self, name: str) -> "GPoly":
        """Left graded partial derivative with respect to one generator.

        One factor of the generator is moved to the front of the monomial
        and removed; for an odd generator the move crosses the odd factors
        to its left, each crossing contributing -1.
        """
        u = self.chart.index(name)
        par = self.chart.parities
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            e = m[u]
            if not e:
                continue
            sign = 1
            if par[u]:
                cross = sum(m[i] for i in range(u) if par[i])
                sign = -1 if cross % 2 else 1
            mono = m[:u] + (e - 1,) + m[u + 1 :]
            v = out.get(mono, 0) + sign * e * c
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
        return GPoly(self.chart, out)

    def substitute(self, images: Mapping[str, "GPoly"]) -> "GPoly":
        """Algebra substitution generator -> polynomial of the same degree.

        Images must be homogeneous of the generator's degree (or zero);
        anything else would not extend to a graded algebra map.
        """
        if not images:
            return self
        imgs: dict[int, GPoly] = {}
        for name, img in images.items():
            i = self.chart.index(name)
            self._check_chart(img)
            d = img.homogeneous_degree()
            if d is not None and d != self.chart.degrees[i]:
                raise ChartError(
                    f"degree-violating substitution for {name}: "
                    f"{self.chart.degrees[i]} -> {d}"
                )
            imgs[i] = img
        out = self.chart.zero()
        for m, c in self.terms.items():
            term = self.chart.const(c)
            for i, e in enumerate(m):
                if not e:
                    continue
                factor = imgs.get(i)
                if factor is None:
                    mono = [0] * len(self.chart)
                    mono[i] = e
                    term = term * GPoly(self.chart, {tuple(mono): Fraction(1)})
                else:
                    term = term * factor**e
                if term.is_zero():
                    break
            out = out + term
        return out

    # -- rendering ---------------------------------------------------------

    def render(self) -> str:
        """Canonical textual form: sorted terms, explicit rational coefficients.

        The output is stable across runs and re-parses to the identical
        polynomial under the expression grammar of the command line tools.
        """
        if not self.terms:
            return "0"
        frags = []
        for mono, c in sorted(self.terms.items()):
            factors = []
            for name, e in zip(self.chart.names, mono):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            frags.append(("- " if c < 0 else "+ ") + body)
        first = frags[0]
        text = ("-" + first[2:]) if first.startswith("- ") else first[2:]
        for frag in frags[1:]:
            text += " " + frag
        return text

    def __repr__(self) -> str:
        return f"GPoly({self.render()})"
