"""
Point-parallel execution. Point j always draws its starting point from its own
stream SeedSequence(seed, spawn_key=(j,)), chunks are fixed by chunk_size, and
chunk outputs are folded in index order, so results do not depend on the
number of workers or on completion order.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Callable, Dict, List, Sequence

import numpy as np

from src.modsurface.group import CosetPoint
from src.modsurface.sampling import haar_sample

logger = logging.getLogger(__name__)

ChunkKernel = Callable[..., Dict[str, np.ndarray]]


def point_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def start_points(seed: int, indices: Sequence[int]) -> List[CosetPoint]:
    return [haar_sample(point_rng(seed, j)) for j in indices]


def chunk_indices(n_points: int, chunk_size: int) -> List[range]:
    return [range(lo, min(lo + chunk_size, n_points)) for lo in range(0, n_points, chunk_size)]


def _timed(kernel: ChunkKernel, indices: range) -> Dict[str, np.ndarray]:
    started = time.perf_counter()
    out = kernel(indices)
    logger.debug(f"Chunk {indices.start}..{indices.stop - 1} done in {time.perf_counter() - started:.2f}s")
    return out


def map_points(kernel: ChunkKernel, n_points: int, chunk_size: int, workers: int, *args) -> Dict[str, np.ndarray]:
    """
    Run kernel(*args, indices) over all chunks and concatenate each output array
    along axis 0 in index order.
    """
    chunks = chunk_indices(n_points, chunk_size)
    bound = partial(_timed, partial(kernel, *args))
    logger.info(f"Dispatching {len(chunks)} chunk(s) of up to {chunk_size} points to {workers} worker(s)")
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(bound, chunks))
    else:
        outputs = [bound(c) for c in chunks]
    keys = outputs[0].keys()
    return {k: np.concatenate([o[k] for o in outputs], axis=0) for k in keys}


def dyadic_checkpoints(m_max: int, start_log2: int = 1) -> List[int]:
    """2^k for k >= start_log2 up to m_max, with m_max appended when it is not a power of two"""
    points = []
    k = start_log2
    while 2 ** k <= m_max:
        points.append(2 ** k)
        k += 1
    if not points or points[-1] != m_max:
        points.append(m_max)
    return points
