"""Monte-Carlo frequencies of the genericity predicates on random spaces."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .constructions import random_space
from .metric import (
    codiameter,
    collinear_triples,
    components_at_scale,
    is_totally_anisometric,
    min_cayley_menger,
)

PARALLEL_MIN_SAMPLES = 256


@dataclass
class FrequencyTable:
    n: int
    samples: int
    seed: int
    tol: float
    anisometric_fraction: float
    collinear_fraction: float
    no_collinear_fraction: float
    negative_cayley_menger_fraction: float
    mean_components_at_half_cdm: float

    def as_dict(self) -> dict:
        return asdict(self)


def sample_seeds(seed: int, samples: int) -> list[int]:
    """Independent per-sample seeds derived from one master seed."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(samples, dtype=np.uint64)]


def _one(args: tuple[int, int, float]) -> tuple[bool, bool, bool, int]:
    n, seed, tol = args
    X = random_space(n, seed, "safe-band")
    anis, _ = is_totally_anisometric(X, tol)
    collinear = bool(collinear_triples(X, 0.0, tol))
    negative = X.n >= 4 and min_cayley_menger(X)[0] < 0
    comps = len(components_at_scale(X, codiameter(X) / 2)) if X.n >= 2 else 1
    return anis, collinear, negative, comps


def worker_count() -> int:
    cap = os.environ.get("GHSPACE_THREADS")
    workers = os.cpu_count() or 1
    if cap:
        workers = min(workers, max(1, int(cap)))
    return workers


def genericity_frequencies(n: int, samples: int, seed: int, tol: float = 1e-12) -> FrequencyTable:
    """Draw ``samples`` safe-band spaces of size ``n`` and tabulate the predicates.

    The table depends only on the arguments; samples are aggregated in draw
    order whatever the worker count.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    if samples < 1:
        raise ValueError("samples must be positive")
    jobs = [(n, s, tol) for s in sample_seeds(seed, samples)]
    workers = worker_count()
    if workers > 1 and samples >= PARALLEL_MIN_SAMPLES:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_one, jobs, chunksize=max(1, samples // (4 * workers))))
    else:
        rows = [_one(j) for j in jobs]
    anis, coll, neg, comps = (np.array(col) for col in zip(*rows))
    return FrequencyTable(
        n=n,
        samples=samples,
        seed=seed,
        tol=tol,
        anisometric_fraction=float(anis.mean()),
        collinear_fraction=float(coll.mean()),
        no_collinear_fraction=float(1.0 - coll.mean()),
        negative_cayley_menger_fraction=float(neg.mean()),
        mean_components_at_half_cdm=float(comps.mean()),
    )
