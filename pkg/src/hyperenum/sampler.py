"""Uniform sampling from H_r(k) via the pairing model, and Monte Carlo
estimators built on it.

The ``M`` points (``k_i`` copies of vertex ``i``) are shuffled and cut into
consecutive blocks of ``r``; this is a uniform partition into unordered
groups. Every simple hypergraph arises from exactly ``prod k_i!`` partitions,
so rejecting the non-simple ones leaves the uniform distribution.

Random numbers come from numpy's PCG64 generator. A single stream is
``numpy.random.default_rng(seed)``; with ``workers > 1`` worker ``w`` uses
``numpy.random.default_rng([seed, w])`` and draws its share of the samples
(the first ``samples % workers`` workers take one extra). Results are
reproducible given ``(seed, workers)``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from hyperenum.hypercore import DegreeSequence, Hypergraph, NonDivisible
from hyperenum.oracle import Structure, count_structure

DEFAULT_MAX_ATTEMPTS = 10**6


class AttemptsExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class PairingOutcome:
    groups: tuple[tuple[int, ...], ...]
    simple: bool
    hypergraph: Optional[Hypergraph]


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    stderr: float
    samples_accepted: int
    samples_attempted: int
    acceptance_rate: float
    seed: int
    workers: int = 1

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _degrees(k) -> tuple[int, ...]:
    return tuple(k.degrees) if isinstance(k, DegreeSequence) else tuple(k)


class _Pairing:
    def __init__(self, k, r: int):
        degrees = _degrees(k)
        m = sum(degrees)
        if m % r:
            raise NonDivisible(f"M={m} is not divisible by r={r}")
        self.n = len(degrees)
        self.r = r
        self.m = m
        self.owner = np.repeat(np.arange(self.n), degrees)

    def draw(self, rng: np.random.Generator) -> PairingOutcome:
        if self.m == 0:
            return PairingOutcome((), True, Hypergraph(self.n, self.r, ()))
        perm = rng.permutation(self.m)
        blocks = np.sort(perm.reshape(-1, self.r), axis=1)
        groups = tuple(sorted(map(tuple, blocks.tolist())))
        verts = np.sort(self.owner[blocks], axis=1)
        if self.r > 1 and np.any(verts[:, 1:] == verts[:, :-1]):
            return PairingOutcome(groups, False, None)
        edges = sorted(map(tuple, verts.tolist()))
        if any(a == b for a, b in zip(edges, edges[1:])):
            return PairingOutcome(groups, False, None)
        return PairingOutcome(groups, True, Hypergraph.trusted(self.n, self.r, edges))

    def uniform(self, rng: np.random.Generator, max_attempts: int) -> tuple[Hypergraph, int]:
        for attempt in range(1, max_attempts + 1):
            out = self.draw(rng)
            if out.simple:
                return out.hypergraph, attempt
        raise AttemptsExhausted(f"no simple pairing in {max_attempts} attempts")


def sample_pairing(k, r: int, rng: np.random.Generator) -> PairingOutcome:
    """One uniformly random pairing of the ``M`` points into groups of size ``r``."""
    return _Pairing(k, r).draw(rng)


def sample_uniform(k, r: int, rng: np.random.Generator, max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> Hypergraph:
    """Uniform random element of H_r(k) by rejection from the pairing model."""
    return _Pairing(k, r).uniform(rng, max_attempts)[0]


@lru_cache(maxsize=1 << 16)
def _structure_count(h: Hypergraph, structure: Structure) -> int:
    return count_structure(h, structure)


def _statistic(h: Hypergraph, kind: str, payload) -> int:
    if kind == "avoid":
        return int(not (payload & h.edge_set))
    return _structure_count(h, payload)


def _run_stream(args) -> tuple[int, int, int, int]:
    """Return ``(accepted, attempted, sum, sum of squares)`` for one stream."""
    k, r, kind, payload, samples, seed, max_attempts = args
    rng = np.random.default_rng(seed)
    pairing = _Pairing(k, r)
    attempted = total = total_sq = 0
    for _ in range(samples):
        h, tries = pairing.uniform(rng, max_attempts)
        attempted += tries
        value = _statistic(h, kind, payload)
        total += value
        total_sq += value * value
    return samples, attempted, total, total_sq


def _estimate(k, r, kind, payload, samples, seed, workers, max_attempts, binary) -> EstimateReport:
    if samples < 1:
        raise ValueError("samples must be positive")
    _Pairing(k, r)  # divisibility check before spawning anything
    if workers <= 1:
        parts = [_run_stream((k, r, kind, payload, samples, seed, max_attempts))]
    else:
        shares = [samples // workers + (w < samples % workers) for w in range(workers)]
        jobs = [(k, r, kind, payload, s, [seed, w], max_attempts) for w, s in enumerate(shares) if s]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_stream, jobs))
    accepted = sum(p[0] for p in parts)
    attempted = sum(p[1] for p in parts)
    total = sum(p[2] for p in parts)
    total_sq = sum(p[3] for p in parts)
    mean = total / accepted
    if binary:
        stderr = math.sqrt(mean * (1 - mean) / accepted)
    elif accepted > 1:
        var = (total_sq - total * total / accepted) / (accepted - 1)
        stderr = math.sqrt(max(var, 0.0) / accepted)
    else:
        stderr = float("nan")
    return EstimateReport(mean, stderr, accepted, attempted, accepted / attempted, seed, max(workers, 1))


def estimate_avoid_probability(
    k, r: int, X, samples: int, seed: int, *, workers: int = 1, max_attempts: int = DEFAULT_MAX_ATTEMPTS
) -> EstimateReport:
    """Fraction of uniform samples containing no edge of ``X``."""
    forbidden = frozenset(tuple(sorted(e)) for e in (X.edges if hasattr(X, "edges") else X))
    return _estimate(_degrees(k), r, "avoid", forbidden, samples, seed, workers, max_attempts, binary=True)


def estimate_expectation(
    k, r: int, structure, samples: int, seed: int, *, workers: int = 1, max_attempts: int = DEFAULT_MAX_ATTEMPTS
) -> EstimateReport:
    """Sample mean of the number of perfect matchings / loose Hamilton cycles."""
    structure = Structure(structure)
    return _estimate(_degrees(k), r, "structure", structure, samples, seed, workers, max_attempts, binary=False)
