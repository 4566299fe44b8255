"""Deterministic pseudo-random inputs for property checks and reports.

Every sampler takes an explicit random.Random so that a fixed seed
reproduces a run byte for byte; coefficients are small exact rationals.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .galg import Chart, GPoly
from .mvf import MVF

COEFFS = (
    Fraction(1),
    Fraction(-1),
    Fraction(2),
    Fraction(-2),
    Fraction(3),
    Fraction(1, 2),
    Fraction(-1, 3),
)


def random_coeff(rng: random.Random) -> Fraction:
    return rng.choice(COEFFS)


def random_gpoly(
    chart: Chart,
    rng: random.Random,
    *,
    nterms: int = 2,
    max_factors: int = 2,
    names=None,
) -> GPoly:
    """Sum of `nterms` random monomials with at most `max_factors` factors."""
    names = tuple(names if names is not None else chart.names)
    out = chart.zero()
    for _ in range(nterms):
        term = chart.const(random_coeff(rng))
        for _ in range(rng.randint(0, max_factors)):
            if not names:
                break
            term = term * chart.gen(rng.choice(names))
            if term.is_zero():
                break
        out = out + term
    return out


def random_mvf(
    chart: Chart,
    rng: random.Random,
    *,
    nterms: int = 2,
    max_mult: int = 3,
    max_factors: int = 2,
    coeff_names=None,
) -> MVF:
    """Random multivector field, generally inhomogeneous."""
    out = MVF.zero(chart)
    for _ in range(nterms):
        t = MVF.const(chart, random_coeff(rng))
        for _ in range(rng.randint(0, max_mult)):
            t = t * MVF.partial_gen(chart, rng.choice(chart.names))
            if t.is_zero():
                break
        f = random_gpoly(chart, rng, nterms=1, max_factors=max_factors, names=coeff_names)
        t = MVF.from_function(f) * t
        out = out + t
    return out


def random_homogeneous_mvf(
    chart: Chart,
    rng: random.Random,
    *,
    nterms: int = 2,
    max_mult: int = 3,
    max_factors: int = 2,
    shifted_degree=None,
    coeff_names=None,
    attempts: int = 200,
) -> MVF:
    """A nonzero component of fixed (or arbitrary) shifted degree."""
    for _ in range(attempts):
        z = random_mvf(
            chart,
            rng,
            nterms=nterms,
            max_mult=max_mult,
            max_factors=max_factors,
            coeff_names=coeff_names,
        )
        comps = z.by_shifted_degree()
        if shifted_degree is None:
            if comps:
                return comps[rng.choice(sorted(comps))]
        elif shifted_degree in comps:
            return comps[shifted_degree]
    raise RuntimeError(
        f"could not sample a homogeneous field of shifted degree {shifted_degree}"
    )


def random_constant_mvf(
    chart: Chart,
    rng: random.Random,
    *,
    nterms: int = 2,
    max_mult: int = 3,
    shifted_degree=None,
    attempts: int = 200,
) -> MVF:
    """Constant-coefficient field; any such field brackets to zero with itself."""
    for _ in range(attempts):
        out = MVF.zero(chart)
        for _ in range(nterms):
            t = MVF.const(chart, random_coeff(rng))
            for _ in range(rng.randint(1, max_mult)):
                t = t * MVF.partial_gen(chart, rng.choice(chart.names))
                if t.is_zero():
                    break
            out = out + t
        if shifted_degree is None:
            if not out.is_zero():
                return out
        else:
            comps = out.by_shifted_degree()
            if shifted_degree in comps:
                return comps[shifted_degree]
    raise RuntimeError("could not sample a constant field")
