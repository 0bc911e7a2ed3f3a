"""
This module provides the data-parallel max/min reduction of effective distances over AP-UE element pairs.

Pairs are enumerated row-major over (ap_index, ue_index), so the flat pair index is ap_index * num_ue + ue_index.
The pair grid is cut into chunks of whole AP rows, each chunk yields a `PairExtremes`, and the partial results
are merged with an associative, commutative merge that breaks ties by the lowest flat index. The result is
bit-identical for every chunk size and worker count.

Classes:
    PairExtremes: Max and min effective distance with their flat pair indices.

Functions:
    pair_effective_distances: Effective distances of all pairs of two point sets.
    paired_effective_distances: Effective distances of matched pairs.
    chunk_extremes: The extremes of one chunk of AP rows.
    reduce_pair_extremes: The extremes of all pairs, computed chunk-wise in parallel.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import Optional

import torch

from nearfield_boundary.constants import DEFAULT_CHUNK_PAIRS

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairExtremes:
    """
    Attributes:
        max_value (float): The largest effective distance.
        max_index (int): Flat pair index of the largest value.
        min_value (float): The smallest effective distance.
        min_index (int): Flat pair index of the smallest value.
    """

    max_value: float
    max_index: int
    min_value: float
    min_index: int

    def merge(self, other: "PairExtremes") -> "PairExtremes":
        if (other.max_value, -other.max_index) > (self.max_value, -self.max_index):
            max_value, max_index = other.max_value, other.max_index
        else:
            max_value, max_index = self.max_value, self.max_index
        if (other.min_value, other.min_index) < (self.min_value, self.min_index):
            min_value, min_index = other.min_value, other.min_index
        else:
            min_value, min_index = self.min_value, self.min_index
        return PairExtremes(max_value, max_index, min_value, min_index)


def pair_effective_distances(
    ap: torch.Tensor, ue: torch.Tensor, compensation: torch.Tensor
) -> torch.Tensor:
    """
    Effective distances of all pairs.

    Args:
        ap (torch.Tensor): (num_ap, 3) AP positions.
        ue (torch.Tensor): (num_ue, 3) UE positions.
        compensation (torch.Tensor): (num_ue,) compensation distances.

    Returns:
        torch.Tensor: (num_ap, num_ue) distances |ap - ue| + compensation.
    """
    dx = ap[:, 0, None] - ue[None, :, 0]
    dy = ap[:, 1, None] - ue[None, :, 1]
    dz = ap[:, 2, None] - ue[None, :, 2]
    return torch.sqrt(dx * dx + dy * dy + dz * dz) + compensation[None, :]


def paired_effective_distances(
    ap: torch.Tensor, ue: torch.Tensor, compensation: torch.Tensor
) -> torch.Tensor:
    """
    Effective distances of matched pairs (ap[k], ue[k]); same arithmetic as `pair_effective_distances`.
    """
    dx = ap[:, 0] - ue[:, 0]
    dy = ap[:, 1] - ue[:, 1]
    dz = ap[:, 2] - ue[:, 2]
    return torch.sqrt(dx * dx + dy * dy + dz * dz) + compensation


@torch.inference_mode()
def chunk_extremes(
    ap: torch.Tensor,
    ue: torch.Tensor,
    compensation: torch.Tensor,
    start: int,
    stop: int,
) -> PairExtremes:
    """
    The extremes over AP rows [start, stop) and all UE elements.
    """
    distances = pair_effective_distances(ap[start:stop], ue, compensation).reshape(-1)
    # argmax/argmin return the first occurrence, i.e. the lowest flat index
    max_local = int(torch.argmax(distances))
    min_local = int(torch.argmin(distances))
    offset = start * ue.shape[0]
    return PairExtremes(
        float(distances[max_local]),
        offset + max_local,
        float(distances[min_local]),
        offset + min_local,
    )


def reduce_pair_extremes(
    ap: torch.Tensor,
    ue: torch.Tensor,
    compensation: torch.Tensor,
    chunk_pairs: int = DEFAULT_CHUNK_PAIRS,
    workers: Optional[int] = None,
) -> PairExtremes:
    """
    The extremes over all AP-UE pairs.

    Args:
        ap (torch.Tensor): (num_ap, 3) AP positions.
        ue (torch.Tensor): (num_ue, 3) UE positions.
        compensation (torch.Tensor): (num_ue,) compensation distances.
        chunk_pairs (int, optional): Approximate number of pairs per chunk. Defaults to DEFAULT_CHUNK_PAIRS.
        workers (Optional[int], optional): Threads evaluating chunks. None or 1 runs chunks sequentially and
            leaves parallelism to torch's intra-op threads.

    Returns:
        PairExtremes: The merged extremes.
    """
    num_ap, num_ue = ap.shape[0], ue.shape[0]
    rows = max(1, chunk_pairs // max(num_ue, 1))
    bounds = [(start, min(start + rows, num_ap)) for start in range(0, num_ap, rows)]
    logger.debug(
        "Reducing %d x %d pairs in %d chunks of %d AP rows",
        num_ap,
        num_ue,
        len(bounds),
        rows,
    )
    if workers is None or workers <= 1 or len(bounds) == 1:
        partials = [
            chunk_extremes(ap, ue, compensation, start, stop) for start, stop in bounds
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(
                pool.map(
                    lambda bound: chunk_extremes(ap, ue, compensation, *bound), bounds
                )
            )
    return reduce(PairExtremes.merge, partials)
