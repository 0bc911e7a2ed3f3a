"""
This module provides small comparison helpers shared by the command line and the validation harness.

Functions:
    relative_difference: |measured - reference| / |reference|.
    pairwise_relative_differences: Relative differences between every pair of methods.
    compare_objects: Fields whose values differ between two dataclass instances.
"""

import math
from dataclasses import fields, is_dataclass
from itertools import combinations
from typing import Any, Optional

from nearfield_boundary.config import Method


def relative_difference(measured: float, reference: float) -> float:
    if reference == 0:
        return 0.0 if measured == 0 else math.inf
    return abs(measured - reference) / abs(reference)


def pairwise_relative_differences(
    distances: dict[Method, Optional[float]]
) -> dict[str, float]:
    """
    Relative differences between the distances of every pair of methods, keyed "a_vs_b".

    The second method of each pair is the reference. Missing distances are skipped.

    Args:
        distances (dict[Method, Optional[float]]): Near-field distance by method.

    Returns:
        dict[str, float]: Relative differences by method pair.
    """
    available = [(method, value) for method, value in distances.items() if value is not None]
    return {
        f"{a.value}_vs_{b.value}": relative_difference(value_a, value_b)
        for (a, value_a), (b, value_b) in combinations(available, 2)
    }


def compare_objects(obj1: Any, obj2: Any, pre: str = "") -> list[str]:
    """
    Dotted names of the fields that differ between two dataclass instances, nested dataclasses included.
    """
    if not (is_dataclass(obj1) and is_dataclass(obj2)):
        return [pre.rstrip(".")]
    names = []
    for field in fields(obj1):
        value1, value2 = getattr(obj1, field.name), getattr(obj2, field.name)
        if value1 != value2:
            names.extend(compare_objects(value1, value2, f"{pre}{field.name}."))
    return names
