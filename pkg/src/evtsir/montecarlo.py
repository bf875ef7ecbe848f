"""Deterministic Monte Carlo orchestration.

Work is cut into fixed-size chunks.  Chunk ``k`` always draws from
``stream.at(k)``, so the concatenated output depends only on the stream and
the chunk size, never on how many workers ran the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np

from .fading import Scenario, sample_sir
from .streams import DEFAULT_SEED, RandomStream

__all__ = [
    "RandomStream",
    "DEFAULT_SEED",
    "MaximaStudy",
    "Estimate",
    "run_chunked",
    "run_maxima_study",
    "estimate_with_se",
    "chunk_size_for",
]

# Draws per chunk; large enough to amortise Python overhead, small enough to
# keep a chunk's working set in the tens of megabytes.
_DRAWS_PER_CHUNK = 1 << 20


@dataclass(frozen=True)
class MaximaStudy:
    scenario: Scenario
    L: int
    reps: int
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.L < 1 or self.reps < 1:
            raise ValueError(f"need L >= 1 and reps >= 1, got L={self.L}, reps={self.reps}")

    @property
    def stream(self) -> RandomStream:
        return RandomStream(self.seed, stream_id=1)


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    n: int

    def __iter__(self):
        yield self.mean
        yield self.stderr


def chunk_size_for(width: int) -> int:
    """Rows per chunk when each row needs ``width`` draws."""
    return max(1, _DRAWS_PER_CHUNK // max(1, width))


def run_chunked(
    task: Callable[[np.random.Generator, int], np.ndarray],
    n: int,
    chunk: int,
    stream: RandomStream,
    workers: int = 1,
) -> np.ndarray:
    """Evaluate ``task(generator, count)`` over ``n`` rows in fixed chunks.

    ``task`` must be picklable when ``workers > 1``.  Results are concatenated
    in chunk order along the first axis.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    counts = [min(chunk, n - k * chunk) for k in range(math.ceil(n / chunk))]
    jobs = [(stream.at(k), c) for k, c in enumerate(counts)]
    if workers <= 1 or len(jobs) == 1:
        parts = [task(st.generator(), c) for st, c in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_call, [task] * len(jobs), jobs))
    return np.concatenate(parts, axis=0)


def _call(task, job):
    st, c = job
    return task(st.generator(), c)


def _maxima_chunk(s: Scenario, L: int, rng: np.random.Generator, count: int) -> np.ndarray:
    return sample_sir(s, rng, (count, L)).max(axis=1)


def run_maxima_study(study: MaximaStudy, workers: int = 1) -> np.ndarray:
    """``reps`` maxima, each over ``L`` independent SIR draws."""
    task = partial(_maxima_chunk, study.scenario, study.L)
    return run_chunked(task, study.reps, chunk_size_for(study.L), study.stream, workers)


def estimate_with_se(values) -> Estimate:
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 2:
        raise ValueError("need at least two values for a standard error")
    return Estimate(float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size)), int(v.size))
