"""
This module finds the near-field distance as the root of a decreasing spread function.

The spread of effective distances falls with the separation d. The solver expands a bracket geometrically from
an initial guess, checks that the spread is monotone inside the bracket and bisects to a relative tolerance.
It always returns a separation that satisfies the criterion, i.e. the upper end of the final interval.

Classes:
    Bracket: An interval [lo, hi] around the crossing.
    BisectionResult: The located crossing.

Functions:
    expand_bracket: Grow an interval around the crossing from an initial guess.
    check_monotone: Sample the function inside a bracket and fail on an increase.
    bisect_decreasing: Bisect a bracket until its width is within tolerance.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from nearfield_boundary.constants import (
    BRACKET_EXPANSION_FACTOR,
    MAX_BRACKET_EXPANSIONS,
    MONOTONE_CHECK_SAMPLES,
)
from nearfield_boundary.errors import NoConvergenceError, NonMonotoneSpreadError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Bracket:
    """
    Attributes:
        lo (float): A separation whose value exceeds the target, or the floor.
        hi (float): A separation whose value is within the target.
        expansions (int): Number of growth steps taken.
        floor_reached (bool): Whether the value at the floor already satisfies the target.
    """

    lo: float
    hi: float
    expansions: int
    floor_reached: bool = False


@dataclass(frozen=True)
class BisectionResult:
    root: float
    lo: float
    iterations: int


def expand_bracket(
    func: Callable[[float], float],
    target: float,
    guess: float,
    floor: float,
    factor: float = BRACKET_EXPANSION_FACTOR,
    max_expansions: int = MAX_BRACKET_EXPANSIONS,
) -> Bracket:
    """
    Grow an interval [lo, hi] with func(lo) > target >= func(hi), func decreasing, lo >= floor.

    Args:
        func (Callable[[float], float]): The decreasing function.
        target (float): The target value.
        guess (float): The initial guess, clipped to the floor.
        floor (float): The smallest admissible argument.
        factor (float, optional): Growth factor per step. Defaults to BRACKET_EXPANSION_FACTOR.
        max_expansions (int, optional): Steps before giving up. Defaults to MAX_BRACKET_EXPANSIONS.

    Returns:
        Bracket: The bracket. If func(floor) <= target, lo == hi == floor and floor_reached is set.

    Raises:
        NoConvergenceError: If no bracket is found within max_expansions steps.
    """
    x = max(guess, floor)
    value = func(x)
    expansions = 0
    if value > target:
        lo = x
        hi = x * factor
        while func(hi) > target:
            expansions += 1
            if expansions >= max_expansions:
                raise NoConvergenceError(
                    f"Spread still above {target} at d={hi} after {expansions} expansions"
                )
            lo, hi = hi, hi * factor
        return Bracket(lo, hi, expansions)

    hi = x
    lo = max(x / factor, floor)
    while func(lo) <= target:
        if lo == floor:
            logger.info("Criterion already met at the smallest separation %s", floor)
            return Bracket(floor, floor, expansions, floor_reached=True)
        expansions += 1
        if expansions >= max_expansions:
            raise NoConvergenceError(
                f"Spread still below {target} at d={lo} after {expansions} expansions"
            )
        hi, lo = lo, max(lo / factor, floor)
    return Bracket(lo, hi, expansions)


def check_monotone(
    func: Callable[[float], float],
    bracket: Bracket,
    samples: int = MONOTONE_CHECK_SAMPLES,
) -> list[tuple[float, float]]:
    """
    Sample func at log-spaced points across the bracket and raise if it increases.

    The tolerance of 64 ulp at the bracket end absorbs rounding in the effective distances.

    Returns:
        list[tuple[float, float]]: The sampled (x, func(x)) points.

    Raises:
        NonMonotoneSpreadError: If a sample exceeds its predecessor beyond rounding.
    """
    if bracket.lo <= 0 or bracket.hi <= bracket.lo:
        return []
    xs = np.geomspace(bracket.lo, bracket.hi, samples)
    points = [(float(x), func(float(x))) for x in xs]
    atol = 64 * np.finfo(np.float64).eps * bracket.hi
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if y1 > y0 + atol:
            raise NonMonotoneSpreadError(
                f"Spread increases from {y0} at d={x0} to {y1} at d={x1}", points
            )
    return points


def bisect_decreasing(
    func: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    rel_tol: float,
) -> BisectionResult:
    """
    Bisect [lo, hi] with func(lo) > target >= func(hi) until hi - lo <= rel_tol * midpoint.

    Args:
        func (Callable[[float], float]): The decreasing function.
        target (float): The target value.
        lo (float): Lower end of the bracket.
        hi (float): Upper end of the bracket.
        rel_tol (float): Relative width at which bisection stops.

    Returns:
        BisectionResult: root == hi, which satisfies func(root) <= target.
    """
    iterations = 0
    while hi - lo > rel_tol * (lo + hi) / 2:
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        if func(mid) > target:
            lo = mid
        else:
            hi = mid
        iterations += 1
        logger.debug("Iter %d: bracket [%.9g, %.9g]", iterations, lo, hi)
    return BisectionResult(hi, lo, iterations)

