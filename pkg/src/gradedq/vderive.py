"""Higher derived brackets from a split of the multivector Lie algebra.

A VAlgebraSplit carves an abelian subalgebra out of the multivector
fields of a chart: `project` is the projection P onto it, `contains`
decides membership structurally (the canonical form of an element uses
only the designated derivation directions with coefficients in the
designated subring), and the kernel of P must be a subalgebra.  Given an
ambient element Delta, the derived family

    m_0 = P(Delta),   m_k(a_1, ..., a_k) = P[...[[Delta, a_1], a_2], ..., a_k]

is graded symmetric and, when [Delta, Delta] = 0, satisfies every
homotopy Jacobi identity; both facts are verified by tests rather than
assumed.  The combined structure on the shift of the ambient algebra
plus the abelian part is also built here; it requires Delta to have no
negative-degree component.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .galg import Chart, ChartError
from .linfty import MVFSpace, StructureMaps, mc_residual
from .mvf import MVF, sn_bracket


@dataclass(frozen=True)
class VAlgebraSplit:
    chart: Chart
    project: Callable[[MVF], MVF]
    contains: Callable[[MVF], bool]

    def embed(self, a: MVF) -> MVF:
        """The injection of the abelian part; identity on canonical forms."""
        if not self.contains(a):
            raise ChartError("element lies outside the abelian part")
        return a


@dataclass(frozen=True)
class DerivedFamily:
    delta: MVF
    split: VAlgebraSplit

    def delta_components(self) -> tuple[MVF, MVF]:
        """Split Delta into its shifted-degree +1 and -1 parts."""
        comps = self.delta.by_shifted_degree()
        plus = comps.get(1, MVF.zero(self.split.chart))
        minus = comps.get(-1, MVF.zero(self.split.chart))
        for d in comps:
            if d not in (1, -1):
                raise ChartError(f"Delta has a component of shifted degree {d}")
        return plus, minus


def derived_bracket(fam: DerivedFamily, args: Sequence[MVF], head: Optional[MVF] = None) -> MVF:
    """P[...[[head, a_1], a_2], ..., a_k]; the 0-ary value is P(head)."""
    split = fam.split
    t = fam.delta if head is None else head
    for a in args:
        t = sn_bracket(t, split.embed(a))
    return split.project(t)


def structure_maps(fam: DerivedFamily) -> StructureMaps:
    """Derived families of the two components of Delta, as closures."""
    plus, minus = fam.delta_components()
    space = MVFSpace(fam.split.chart)

    def pos(k: int):
        return lambda *args: derived_bracket(fam, args, head=plus)

    def neg(k: int):
        return lambda *args: derived_bracket(fam, args, head=minus)

    return StructureMaps(space, pos=pos, neg=neg)


def derived_mc_residual(fam: DerivedFamily, v: MVF, order: int) -> MVF:
    """sum_{k<=order} (1/k!) P(ad_v^k applied to Delta), iteratively.

    Same value as the generic series through the structure maps, without
    recomputing the nested brackets at every arity.
    """
    split = fam.split
    sd = v.shifted_degree()
    if not v.is_zero() and sd != 0:
        raise ValueError(f"Maurer-Cartan candidates must have degree 0, got {sd}")
    split.embed(v)
    total = MVF.zero(split.chart)
    t = fam.delta
    fact = 1
    for k in range(order + 1):
        if k:
            fact *= k
            t = sn_bracket(t, v)
        total = total + split.project(t).scale(Fraction(1, fact))
        if t.is_zero():
            break
    return total


# -- structural checks -------------------------------------------------------


@dataclass
class VAlgebraReport:
    samples: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def valgebra_check(
    split: VAlgebraSplit,
    rng: random.Random,
    samples: int,
    ambient_sampler: Callable[[random.Random], MVF],
    abelian_sampler: Callable[[random.Random], MVF],
) -> VAlgebraReport:
    """Probe the three split axioms on random inputs.

    Checks, with witnesses on failure: P o I = id on the abelian part,
    [I(a), I(b)] = 0, and the kernel-subalgebra condition
    P[x, y] = P[I(P(x)), y] + P[x, I(P(y))].
    """
    report = VAlgebraReport(samples=samples)
    for _ in range(samples):
        a = abelian_sampler(rng)
        b = abelian_sampler(rng)
        if not split.contains(a):
            report.failures.append(f"sampler left the abelian part: {a.render()}")
            continue
        pa = split.project(a)
        if pa != a:
            report.failures.append(f"P o I != id at {a.render()} -> {pa.render()}")
        br = sn_bracket(a, b)
        if not br.is_zero():
            report.failures.append(
                f"abelian part not abelian: [{a.render()}, {b.render()}] = {br.render()}"
            )
        x = ambient_sampler(rng)
        y = ambient_sampler(rng)
        lhs = split.project(sn_bracket(x, y))
        rhs = split.project(sn_bracket(split.project(x), y)) + split.project(
            sn_bracket(x, split.project(y))
        )
        if lhs != rhs:
            report.failures.append(
                "kernel not a subalgebra at "
                f"x = {x.render()}, y = {y.render()}: "
                f"P[x,y] = {lhs.render()} vs {rhs.render()}"
            )
    return report


# -- the combined structure on V[1] (+) a ------------------------------------


@dataclass(frozen=True)
class CPair:
    """Element of the direct sum: a shifted ambient part and an abelian part."""

    v: MVF
    a: MVF

    def __add__(self, other: "CPair") -> "CPair":
        return CPair(self.v + other.v, self.a + other.a)


class CombinedSpace:
    """V[1] (+) a with the summand degrees ||v|| - 1 and ||a||."""

    def __init__(self, chart: Chart):
        self.chart = chart

    def zero(self) -> CPair:
        z = MVF.zero(self.chart)
        return CPair(z, z)

    def add(self, x: CPair, y: CPair) -> CPair:
        return x + y

    def scale(self, c, x: CPair) -> CPair:
        return CPair(x.v.scale(c), x.a.scale(c))

    def is_zero(self, x: CPair) -> bool:
        return x.v.is_zero() and x.a.is_zero()

    def degree(self, x: CPair):
        degs = set()
        dv = x.v.shifted_degree()
        if dv is not None:
            degs.add(dv - 1)
        da = x.a.shifted_degree()
        if da is not None:
            degs.add(da)
        if len(degs) == 1:
            return degs.pop()
        return None


def combined_maps(fam: DerivedFamily) -> StructureMaps:
    """Structure maps on V[1] (+) a for a purely positive Delta.

    m_0 is the curvature P(Delta); m_1(v[1], a) = (-[Delta, v][1],
    P(v + [Delta, a])); m_2 on two shifted arguments is
    (-1)**||v|| [v, w][1]; with one shifted argument and abelian arguments
    the maps are the derived brackets of v, and on abelian arguments only
    they are the derived brackets of Delta.  Every other combination is
    zero, and mixing in a negative component of Delta is refused because
    the degree bookkeeping of the two summands no longer matches.
    """
    plus, minus = fam.delta_components()
    if not minus.is_zero():
        raise ChartError("combined structure requires positive Delta")
    delta = plus
    split = fam.split
    space = CombinedSpace(split.chart)
    zero = MVF.zero(split.chart)

    def dispatch(slots: tuple[int, ...], els: Sequence[MVF]) -> CPair:
        """One pure-component term; slots marks 0 = shifted, 1 = abelian."""
        k = len(slots)
        nv = slots.count(0)
        if k == 1:
            if nv == 1:
                return CPair(-sn_bracket(delta, els[0]), split.project(els[0]))
            return CPair(zero, split.project(sn_bracket(delta, split.embed(els[0]))))
        if nv == 0:
            return CPair(zero, derived_bracket(fam, els, head=delta))
        if nv == 1:
            pos = slots.index(0)
            v = els[pos]
            rest = [els[i] for i in range(k) if i != pos]
            dv = v.shifted_degree()
            if dv is None:
                raise ValueError("combined maps need homogeneous inputs")
            sign = 1
            for i in range(pos):
                da = els[i].shifted_degree()
                if da is None:
                    raise ValueError("combined maps need homogeneous inputs")
                if ((dv - 1) * da) % 2:
                    sign = -sign
            return CPair(zero, derived_bracket(fam, rest, head=v).scale(sign))
        if nv == 2 and k == 2:
            v, w = els
            dv = v.shifted_degree()
            if dv is None:
                raise ValueError("combined maps need homogeneous inputs")
            return CPair(sn_bracket(v, w).scale(-1 if dv % 2 else 1), zero)
        return space.zero()

    def pos_family(k: int):
        if k == 0:
            return lambda: CPair(zero, split.project(delta))

        def mk(*args: CPair) -> CPair:
            total = space.zero()
            for slots in _slot_patterns(k):
                els = []
                dead = False
                for slot, arg in zip(slots, args):
                    el = arg.v if slot == 0 else arg.a
                    if el.is_zero():
                        dead = True
                        break
                    els.append(el)
                if dead:
                    continue
                total = space.add(total, dispatch(slots, els))
            return total

        return mk

    return StructureMaps(space, pos=pos_family)


def _slot_patterns(k: int):
    from itertools import product

    return product((0, 1), repeat=k)


def combined_mc_residual(fam: DerivedFamily, v: MVF, a: MVF, order: int) -> CPair:
    """Maurer-Cartan series of (v[1], a) through the combined maps."""
    maps = combined_maps(fam)
    return mc_residual(maps, CPair(v, a), order)
