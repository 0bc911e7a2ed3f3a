import math

import numpy as np
import pytest
import torch
from fire import Fire

from nearfield_boundary.errors import NoConvergenceError, NonMonotoneSpreadError
from nearfield_boundary.util.reduction import (
    PairExtremes,
    pair_effective_distances,
    paired_effective_distances,
    reduce_pair_extremes,
)
from nearfield_boundary.util.solver import Bracket, bisect_decreasing, check_monotone, expand_bracket


def random_points(seed: int, num_ap: int = 37, num_ue: int = 23):
    generator = torch.Generator().manual_seed(seed)
    ap = torch.rand(num_ap, 3, generator=generator, dtype=torch.float64)
    ap[:, 1] += 5.0
    ue = torch.rand(num_ue, 3, generator=generator, dtype=torch.float64) * 0.1
    compensation = torch.rand(num_ue, generator=generator, dtype=torch.float64) * 0.01
    return ap, ue, compensation


def test_merge_breaks_ties_by_lowest_index():
    a = PairExtremes(1.0, 5, 0.0, 7)
    b = PairExtremes(1.0, 3, 0.0, 9)
    assert a.merge(b) == PairExtremes(1.0, 3, 0.0, 7)
    assert b.merge(a) == a.merge(b)
    c = PairExtremes(2.0, 11, -1.0, 12)
    assert a.merge(b).merge(c) == a.merge(b.merge(c))


def test_reduction_independent_of_chunking():
    ap, ue, compensation = random_points(0)
    distances = pair_effective_distances(ap, ue, compensation).reshape(-1)
    reference = reduce_pair_extremes(ap, ue, compensation)
    assert reference.max_value == float(distances.max())
    assert reference.max_index == int(torch.argmax(distances))
    assert reference.min_index == int(torch.argmin(distances))
    for chunk_pairs in (1, 23, 100, 10**6):
        for workers in (None, 1, 4):
            assert reduce_pair_extremes(ap, ue, compensation, chunk_pairs, workers) == reference


def test_reduction_ties_across_chunks():
    ap = torch.tensor([[0.0, 1.0, 0.0]] * 6, dtype=torch.float64)
    ue = torch.zeros(2, 3, dtype=torch.float64)
    compensation = torch.zeros(2, dtype=torch.float64)
    extremes = reduce_pair_extremes(ap, ue, compensation, chunk_pairs=2, workers=3)
    assert extremes == PairExtremes(1.0, 0, 1.0, 0)


def test_matched_pairs_use_the_same_arithmetic():
    ap, ue, compensation = random_points(1, num_ap=23, num_ue=23)
    full = pair_effective_distances(ap, ue, compensation)
    matched = paired_effective_distances(ap, ue, compensation)
    assert torch.equal(torch.diagonal(full), matched)


def test_bracket_and_bisection():
    target = 0.1

    def decreasing(x):
        return 1.0 / x

    bracket = expand_bracket(decreasing, target, guess=1.0, floor=1e-3)
    assert decreasing(bracket.lo) > target >= decreasing(bracket.hi)
    result = bisect_decreasing(decreasing, target, bracket.lo, bracket.hi, 1e-6)
    assert result.root == pytest.approx(10.0, rel=1e-6)
    assert decreasing(result.root) <= target
    assert result.root - result.lo <= 1e-6 * (result.root + result.lo) / 2

    bracket = expand_bracket(decreasing, target, guess=1000.0, floor=1e-3)
    assert decreasing(bracket.lo) > target >= decreasing(bracket.hi)


def test_bracket_floor():
    bracket = expand_bracket(lambda x: 0.0, 0.1, guess=1.0, floor=0.25)
    assert bracket.floor_reached
    assert bracket.hi == 0.25


def test_bracket_gives_up():
    with pytest.raises(NoConvergenceError):
        expand_bracket(lambda x: 1.0, 0.1, guess=1.0, floor=0.5, max_expansions=10)


def test_non_monotone_detected():
    def bumpy(x):
        return 1.0 / x + 0.5 * math.sin(x)

    with pytest.raises(NonMonotoneSpreadError) as info:
        check_monotone(bumpy, Bracket(1.0, 20.0, 0), samples=16)
    assert len(info.value.samples) == 16
    assert len(check_monotone(lambda x: 1.0 / x, Bracket(1.0, 20.0, 0))) == 8
    assert np.all(np.diff([x for x, _ in info.value.samples]) > 0)


if __name__ == "__main__":
    Fire()
