"""Strong homotopy structures as indexed families of graded symmetric maps.

A StructureMaps holds a positive family m_k (each map raises degree by 1)
and a negative family n_k (each lowers it by 1) over some graded vector
space; the mixed-degree structure is encoded by both families at once and
all obstructions are measured by the Jacobiators of the summed family
m_k + n_k.  Spaces are duck-typed: anything with zero/add/scale/is_zero/
degree works, and two implementations are provided, one backed by
multivector fields and one by finite tables for counterexample hunting.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from .gcore import antisym_sign, koszul_sign, shift_iso_sign, shuffles
from .galg import Chart
from .mvf import MVF, sn_bracket


class ArityGapError(ValueError):
    pass


class MVFSpace:
    """Multivector fields on a chart, graded by the shifted degree."""

    def __init__(self, chart: Chart):
        self.chart = chart

    def zero(self) -> MVF:
        return MVF.zero(self.chart)

    def add(self, a: MVF, b: MVF) -> MVF:
        return a + b

    def scale(self, c, a: MVF) -> MVF:
        return a.scale(c)

    def is_zero(self, a: MVF) -> bool:
        return a.is_zero()

    def degree(self, a: MVF):
        return a.shifted_degree()


class TableSpace:
    """Finite-dimensional graded space; elements are {basis name: Fraction}."""

    def __init__(self, degrees: Mapping[str, int]):
        self.degrees = dict(degrees)

    def basis(self, name: str) -> dict:
        return {name: Fraction(1)}

    def zero(self) -> dict:
        return {}

    def add(self, a: dict, b: dict) -> dict:
        out = dict(a)
        for k, v in b.items():
            w = out.get(k, 0) + v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
        return out

    def scale(self, c, a: dict) -> dict:
        c = Fraction(c)
        if c == 0:
            return {}
        return {k: c * v for k, v in a.items()}

    def is_zero(self, a: dict) -> bool:
        return not a

    def degree(self, a: dict):
        degs = {self.degrees[k] for k in a}
        if len(degs) == 1:
            return degs.pop()
        return None


class ShiftedSpace:
    """The n-th suspension: same elements, degrees lowered by n."""

    def __init__(self, inner, n: int = 1):
        self.inner = inner
        self.n = n

    def zero(self):
        return self.inner.zero()

    def add(self, a, b):
        return self.inner.add(a, b)

    def scale(self, c, a):
        return self.inner.scale(c, a)

    def is_zero(self, a):
        return self.inner.is_zero(a)

    def degree(self, a):
        d = self.inner.degree(a)
        return None if d is None else d - self.n


_MISSING = object()


def _family_lookup(family):
    """Normalize a family spec to a lookup arity -> map | None | _MISSING.

    None means the whole family is absent (identically zero); a dict gives
    explicit arities and anything else is a gap; a callable must cover
    every arity.
    """
    if family is None:
        return lambda k: None
    if isinstance(family, Mapping):
        table = dict(family)
        return lambda k: table.get(k, _MISSING)
    return family


class StructureMaps:
    """Families {m_k} and {n_k} of graded symmetric multilinear maps."""

    def __init__(self, space, pos=None, neg=None):
        self.space = space
        self._pos = _family_lookup(pos)
        self._neg = _family_lookup(neg)

    def _resolve(self, lookup, k: int):
        f = lookup(k)
        if f is _MISSING:
            return None, True
        return f, False

    def scan_gaps(self, arities: Sequence[int]) -> list[int]:
        gaps = []
        for k in arities:
            for lookup in (self._pos, self._neg):
                if lookup(k) is _MISSING and k not in gaps:
                    gaps.append(k)
        return gaps

    def _apply(self, lookup, k: int, args) -> object:
        f = lookup(k)
        if f is _MISSING:
            raise ArityGapError(f"missing arities: [{k}]")
        if f is None:
            return self.space.zero()
        return f(*args)

    def m(self, k: int, *args):
        return self._apply(self._pos, k, args)

    def n(self, k: int, *args):
        return self._apply(self._neg, k, args)

    def c(self, k: int, *args):
        """The summed family m_k + n_k."""
        return self.space.add(self.m(k, *args), self.n(k, *args))


def _input_degrees(space, inputs) -> list[int]:
    degs = []
    for v in inputs:
        d = space.degree(v)
        if d is None:
            raise ValueError("jacobiator inputs must be nonzero homogeneous")
        degs.append(d)
    return degs


def jacobiator(s: StructureMaps, n: int, inputs: Sequence) -> object:
    """n-th Jacobiator of the summed family on homogeneous inputs.

    J_n = sum over i+j = n+1 and (j, n-j)-shuffles tau of
    e(tau) c_i(c_j(v_tau(1), ..., v_tau(j)), v_tau(j+1), ..., v_tau(n)),
    including the j = 0 column, which feeds the curvature c_0 into c_{n+1}
    and vanishes for flat families.
    """
    if n < 1 or len(inputs) != n:
        raise ValueError(f"jacobiator needs exactly n >= 1 inputs, got {len(inputs)}")
    space = s.space
    degs = _input_degrees(space, inputs)
    gaps = s.scan_gaps(sorted({j for j in range(n + 1)} | {n + 1 - j for j in range(n + 1)}))
    if gaps:
        raise ArityGapError(f"missing arities: {gaps}")
    total = space.zero()
    for j in range(0, n + 1):
        i = n + 1 - j
        for tau in shuffles(j, n):
            sign = koszul_sign(tau, degs)
            inner = s.c(j, *[inputs[t - 1] for t in tau[:j]])
            outer = s.c(i, inner, *[inputs[t - 1] for t in tau[j:]])
            total = space.add(total, space.scale(sign, outer))
    return total


def blended_compat_residual(s: StructureMaps, n: int, inputs: Sequence) -> object:
    """Mixed-family obstruction: the m-on-n plus n-on-m shuffle sum."""
    if n < 1 or len(inputs) != n:
        raise ValueError(f"residual needs exactly n >= 1 inputs, got {len(inputs)}")
    space = s.space
    degs = _input_degrees(space, inputs)
    gaps = s.scan_gaps(sorted({j for j in range(n + 1)} | {n + 1 - j for j in range(n + 1)}))
    if gaps:
        raise ArityGapError(f"missing arities: {gaps}")
    total = space.zero()
    for j in range(0, n + 1):
        i = n + 1 - j
        for tau in shuffles(j, n):
            sign = koszul_sign(tau, degs)
            head = [inputs[t - 1] for t in tau[:j]]
            tail = [inputs[t - 1] for t in tau[j:]]
            piece = space.add(
                s.m(i, s.n(j, *head), *tail),
                s.n(i, s.m(j, *head), *tail),
            )
            total = space.add(total, space.scale(sign, piece))
    return total


def mc_residual(s: StructureMaps, v, order: int) -> object:
    """sum_{k=0..order} (1/k!) (m_k + n_k)(v, ..., v) for a degree-0 element.

    Exact whenever the family vanishes above the truncation order; callers
    that know a degree bound report exactness separately.
    """
    space = s.space
    d = space.degree(v)
    if not space.is_zero(v) and d != 0:
        raise ValueError(f"Maurer-Cartan candidates must have degree 0, got {d}")
    gaps = s.scan_gaps(range(order + 1))
    if gaps:
        raise ArityGapError(f"missing arities: {gaps}")
    total = space.zero()
    fact = 1
    for k in range(order + 1):
        if k:
            fact *= k
        total = space.add(total, space.scale(Fraction(1, fact), s.c(k, *([v] * k))))
    return total


def check_symmetric(space, fn: Callable, arity: int, samples: Sequence[Sequence]) -> Optional[str]:
    """Probe graded symmetry on sample tuples; returns a witness or None."""
    for args in samples:
        degs = _input_degrees(space, args)
        for i in range(arity - 1):
            swapped = list(args)
            swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
            sign = -1 if (degs[i] * degs[i + 1]) % 2 else 1
            lhs = fn(*swapped)
            rhs = space.scale(sign, fn(*args))
            if not space.is_zero(space.add(lhs, space.scale(-1, rhs))):
                return f"not graded symmetric at slot {i}"
    return None


def check_antisymmetric(space, fn: Callable, arity: int, samples: Sequence[Sequence]) -> Optional[str]:
    for args in samples:
        degs = _input_degrees(space, args)
        for i in range(arity - 1):
            swapped = list(args)
            swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
            perm = list(range(1, arity + 1))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            sign = antisym_sign(perm, degs)
            lhs = fn(*swapped)
            rhs = space.scale(sign, fn(*args))
            if not space.is_zero(space.add(lhs, space.scale(-1, rhs))):
                return f"not graded antisymmetric at slot {i}"
    return None


def shift_pack(base_space, l_family: Mapping[int, Callable], check_on=()) -> StructureMaps:
    """Turn an antisymmetric family {l_k} on V into a symmetric one on V[1].

    m_k(v_1[1], ..., v_k[1]) = shift sign * (l_k(v_1, ..., v_k))[1], with
    the sign of the suspension isomorphism on the unshifted degrees.
    Optional sample tuples are probed for antisymmetry of l_k first.
    """
    shifted = ShiftedSpace(base_space, 1)
    packed = {}
    for k, lk in l_family.items():
        samples = [args for args in check_on if len(args) == k]
        if samples:
            witness = check_antisymmetric(base_space, lk, k, samples)
            if witness is not None:
                raise ValueError(f"l_{k} failed its symmetry check: {witness}")

        def mk(*args, _lk=lk):
            degs = _input_degrees(base_space, args)
            return base_space.scale(shift_iso_sign(degs), _lk(*args))

        packed[k] = mk
    return StructureMaps(shifted, pos=packed)


def shift_unpack(base_space, s: StructureMaps, arities: Sequence[int]) -> dict[int, Callable]:
    """Inverse packing: recover the antisymmetric family on V from V[1] maps."""
    out = {}
    for k in arities:

        def lk(*args, _k=k):
            degs = _input_degrees(base_space, args)
            return base_space.scale(shift_iso_sign(degs), s.m(_k, *args))

        out[k] = lk
    return out


def dgla_structure(chart: Chart, q: MVF) -> StructureMaps:
    """The differential graded Lie structure [q, .], [., .] packed onto the shift.

    The bracket is the multivector bracket and q must be homological; the
    result is a flat positive structure when ||q|| = 1 and a negative one
    when ||q|| = -1.
    """
    space = MVFSpace(chart)
    d = q.shifted_degree()
    l_family = {
        1: lambda v: sn_bracket(q, v),
        2: lambda v, w: sn_bracket(v, w),
    }
    shifted = ShiftedSpace(space, 1)
    packed_all = shift_pack(space, l_family)
    if d == -1:
        return StructureMaps(shifted, pos={1: None, 2: packed_all._pos(2)},
                             neg={1: packed_all._pos(1), 2: None})
    return packed_all
