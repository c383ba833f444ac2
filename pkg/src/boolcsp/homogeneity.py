"""Homogeneous sets: certificates, the horn forced-set algorithm, the
model-majority extraction, and an exhaustive search for small localized sets.

A set H is homogeneous for an instance with color c when the instance
stays satisfiable with every variable of H pinned to c.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import InputError
from .instances import Assignment, Instance
from .solvers import solve_horn, solve_with_assumptions
from .streams import ConstraintStream


@dataclass(frozen=True)
class HomogeneityCertificate:
    H: frozenset[int]
    color: int
    prefix_len: int
    verified: bool


def verify_homogeneous(instance: Instance, H: Iterable[int], color: int) -> bool:
    """Satisfiability of the instance with all of H pinned to the color."""
    if color not in (0, 1):
        raise InputError("color must be 0 or 1")
    pins = Assignment({v: color for v in H})
    return solve_with_assumptions(instance, pins).is_sat


def model_to_homogeneous(nu: Assignment, L: Sequence[int]) -> tuple[frozenset[int], int]:
    """The larger color class of the model restricted to L; ties go to color 0."""
    ones = frozenset(v for v in L if nu.values[v] == 1)
    zeros = frozenset(v for v in L if nu.values[v] == 0)
    if len(ones) > len(zeros):
        return ones, 1
    return zeros, 0


def homog_horn(
    stream: ConstraintStream,
    L: Sequence[int],
    prefix_len: int,
    threshold: float | None = None,
) -> HomogeneityCertificate:
    """Forced-set split on a horn stream prefix.

    Variables forced true by the prefix form F (the minimal model). When F
    covers more than the threshold share of L (default half), the forced
    part of L is homogeneous with color 1; otherwise the unforced part is
    homogeneous with color 0 by conjunction-closure of horn model sets.
    The returned certificate is re-verified by an assumption solve.
    """
    L = sorted(set(L))
    min_vars = (L[-1] + 1) if L else 0
    prefix = stream.prefix_instance(prefix_len, min_vars=min_vars)
    res = solve_horn(prefix)
    if not res.is_sat:
        raise InputError("stream prefix is unsatisfiable; streams must be finitely satisfiable")
    forced = res.forced or frozenset()
    cut = (len(L) / 2) if threshold is None else threshold
    forced_in_l = frozenset(v for v in L if v in forced)
    if len(forced_in_l) > cut:
        H, color = forced_in_l, 1
    else:
        H, color = frozenset(v for v in L if v not in forced), 0
    verified = verify_homogeneous(prefix, H, color)
    return HomogeneityCertificate(H, color, prefix_len, verified)


def exhaustive_homogeneous_search(
    instance: Instance, L: Sequence[int]
) -> HomogeneityCertificate | None:
    """Largest homogeneous subset of L, by descending size, color 0 before 1,
    subsets in lexicographic order. Exponential in |L|; desk scale only."""
    L = sorted(set(L))
    if len(L) > 20:
        raise InputError("exhaustive homogeneity search is capped at |L| = 20")
    for size in range(len(L), -1, -1):
        for color in (0, 1):
            for subset in combinations(L, size):
                if verify_homogeneous(instance, subset, color):
                    return HomogeneityCertificate(frozenset(subset), color, len(instance.constraints), True)
    return None
