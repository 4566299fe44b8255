"""Sign bookkeeping for graded-commutative algebra.

Degrees are plain ints, signs are +1/-1, and a permutation of {1..n} is
the tuple of its images (tau(1), ..., tau(n)).  Everything downstream
(polynomial products, wedge products, bracket expansions, Jacobiator
sums) funnels its sign decisions through this module.
"""

from __future__ import annotations

from itertools import combinations, permutations
from typing import Sequence


def check_permutation(perm: Sequence[int]) -> None:
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}: {perm!r}")


def perm_parity(perm: Sequence[int]) -> int:
    """(-1)**tau: -1 exactly when tau has an odd number of inversions."""
    check_permutation(perm)
    inv = sum(1 for i, j in combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def koszul_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign picked up when (v_1, ..., v_n) is reordered to (v_tau(1), ...).

    Each transposition of adjacent homogeneous elements of degrees d, d'
    contributes (-1)**(d*d'); the product is independent of the chosen
    decomposition, so it can be read off the inversions directly: every
    inversion between two odd-degree elements flips the sign.
    """
    check_permutation(perm)
    if len(perm) != len(degrees):
        raise ValueError(
            "arity mismatch: permutation of length %d with %d degrees"
            % (len(perm), len(degrees))
        )
    sign = 1
    for i, j in combinations(range(len(perm)), 2):
        if perm[i] > perm[j] and degrees[perm[i] - 1] % 2 and degrees[perm[j] - 1] % 2:
            sign = -sign
    return sign


def antisym_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """(-1)**tau times the Koszul sign, the sign rule of antisymmetric maps."""
    return perm_parity(perm) * koszul_sign(perm, degrees)


def is_shuffle(perm: Sequence[int], j: int) -> bool:
    """True when perm is increasing on its first j and last n-j slots."""
    first, rest = perm[:j], perm[j:]
    return all(a < b for a, b in zip(first, first[1:])) and all(
        a < b for a, b in zip(rest, rest[1:])
    )


def shuffles(j: int, n: int) -> list[tuple[int, ...]]:
    """All (j, n-j)-shuffles of {1..n}, lexicographic in the first block."""
    if j < 0 or n < 0 or j > n:
        raise ValueError(f"invalid shuffle type ({j}, {n - j})")
    out = []
    universe = range(1, n + 1)
    for first in combinations(universe, j):
        rest = tuple(k for k in universe if k not in first)
        out.append(first + rest)
    return out


def all_permutations(n: int) -> list[tuple[int, ...]]:
    return [p for p in permutations(range(1, n + 1))]


def shift_iso_sign(degrees: Sequence[int]) -> int:
    """Sign of the suspension isomorphism on a k-fold tensor product.

    For unshifted degrees |v_1|, ..., |v_k| the sign is
    (-1)**(sum_i (k - i)|v_i|); it converts between antisymmetric families
    on V and symmetric families on the shift V[1].
    """
    k = len(degrees)
    expo = sum((k - i) * d for i, d in enumerate(degrees, start=1))
    return -1 if expo % 2 else 1
