"""Brute-force ground truth for small instances.

Hypergraphs with degree sequence ``k`` are generated canonically: the active
vertex is the lowest vertex with positive residual degree, and every edge
containing it is chosen (in increasing lexicographic order) before the search
moves on. All other vertices of such an edge are larger than the active
vertex, so edges picked at different active vertices can never coincide and
every hypergraph is produced exactly once.

Because of that, the number of completions only depends on the residual
degree vector, which the counter memoizes.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Callable, Iterable, Iterator, Optional, Sequence

from hyperenum.hypercore import DegreeSequence, ForbiddenSet, Hypergraph, NonDivisible

DEFAULT_BUDGET = 10**9


class InstanceTooLarge(RuntimeError):
    pass


class DegenerateDenominator(ZeroDivisionError):
    pass


class EmptyClass(ZeroDivisionError):
    pass


class DegenerateCycle(ValueError):
    """Loose Hamilton cycles need at least three edges."""


class OracleMismatch(AssertionError):
    """Two independent exact routes disagreed."""


class Structure(enum.Enum):
    PERFECT_MATCHING = "pm"
    LOOSE_HAMILTON = "hc"


@dataclass
class EnumerationResult:
    count: int
    elapsed: float
    nodes_explored: int
    reason: Optional[str] = None


def _as_degrees(k) -> tuple[int, ...]:
    return tuple(k.degrees) if isinstance(k, DegreeSequence) else tuple(k)


def _edge_set(X) -> frozenset:
    if X is None:
        return frozenset()
    if isinstance(X, ForbiddenSet):
        return frozenset(X.edges)
    if isinstance(X, Hypergraph):
        return frozenset(X.edges)
    return frozenset(tuple(sorted(e)) for e in X)


def _infeasible_reason(degrees: Sequence[int], r: int) -> Optional[str]:
    if any(d < 0 for d in degrees):
        return "negative residual degree"
    if sum(degrees) % r:
        return f"M={sum(degrees)} not divisible by r={r}"
    return None


class _Search:
    """Shared machinery of the memoized counter and the plain enumerator."""

    def __init__(self, n, r, forbidden=frozenset(), budget=DEFAULT_BUDGET):
        self.n = n
        self.r = r
        self.forbidden = forbidden
        self.budget = budget
        self.nodes = 0
        self.memo: dict[tuple[int, ...], int] = {}

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise InstanceTooLarge(f"search exceeded budget of {self.budget} nodes")

    def choices(self, res: tuple[int, ...], v: int) -> Iterator[tuple[list, list]]:
        """Yield ``(edges, new_residual)`` for every legal edge set at active vertex ``v``."""
        new = list(res)
        need = new[v]
        others = [u for u in range(v + 1, self.n) if new[u] > 0]
        cands = [(v,) + c for c in combinations(others, self.r - 1) if (v,) + c not in self.forbidden]
        chosen: list[tuple[int, ...]] = []

        def pick(start, left):
            self.tick()
            if left == 0:
                yield chosen[:], new[:]
                return
            for idx in range(start, len(cands) - left + 1):
                e = cands[idx]
                if any(new[u] == 0 for u in e[1:]):
                    continue
                for u in e:
                    new[u] -= 1
                chosen.append(e)
                yield from pick(idx + 1, left - 1)
                chosen.pop()
                for u in e:
                    new[u] += 1

        yield from pick(0, need)

    def count(self, res: tuple[int, ...]) -> int:
        v = next((i for i, d in enumerate(res) if d), None)
        if v is None:
            return 1
        hit = self.memo.get(res)
        if hit is not None:
            return hit
        self.tick()
        total = 0
        for _, new in self.choices(res, v):
            total += self.count(tuple(new))
        self.memo[res] = total
        return total

    def walk(self, res: tuple[int, ...], acc: list) -> Iterator[list]:
        v = next((i for i, d in enumerate(res) if d), None)
        if v is None:
            yield acc
            return
        self.tick()
        for edges, new in self.choices(res, v):
            yield from self.walk(tuple(new), acc + edges)


def _count_branch(args) -> tuple[int, int]:
    n, r, forbidden, budget, residuals = args
    s = _Search(n, r, forbidden, budget)
    total = sum(s.count(res) for res in residuals)
    return total, s.nodes


def enumerate_avoiding(
    k,
    r: int,
    X=None,
    *,
    budget: int = DEFAULT_BUDGET,
    visitor: Optional[Callable[[Hypergraph], None]] = None,
    workers: int = 1,
) -> EnumerationResult:
    """Count hypergraphs with degrees ``k`` avoiding ``X``.

    With a ``visitor`` every hypergraph is materialized and passed to it in
    canonical order (single-threaded); otherwise the memoized counter runs,
    optionally splitting the first branching level across ``workers`` processes.
    """
    t0 = time.perf_counter()
    degrees = _as_degrees(k)
    reason = _infeasible_reason(degrees, r)
    if reason:
        return EnumerationResult(0, time.perf_counter() - t0, 0, reason)
    n = len(degrees)
    forbidden = _edge_set(X)
    s = _Search(n, r, forbidden, budget)
    if visitor is not None:
        count = 0
        for edges in s.walk(degrees, []):
            visitor(Hypergraph.trusted(n, r, edges))
            count += 1
        return EnumerationResult(count, time.perf_counter() - t0, s.nodes)
    v = next((i for i, d in enumerate(degrees) if d), None)
    if workers > 1 and v is not None:
        branches = [tuple(new) for _, new in s.choices(degrees, v)]
        chunks = [branches[i::workers] for i in range(workers)]
        jobs = [(n, r, forbidden, budget, chunk) for chunk in chunks if chunk]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_count_branch, jobs))
        count = sum(c for c, _ in parts)
        nodes = s.nodes + sum(m for _, m in parts)
        return EnumerationResult(count, time.perf_counter() - t0, nodes)
    count = s.count(degrees)
    return EnumerationResult(count, time.perf_counter() - t0, s.nodes)


def iter_hypergraphs(k, r: int, X=None, *, budget: int = DEFAULT_BUDGET) -> Iterator[Hypergraph]:
    """Yield every simple r-uniform hypergraph with degrees ``k`` avoiding ``X``."""
    degrees = _as_degrees(k)
    if _infeasible_reason(degrees, r):
        return
    s = _Search(len(degrees), r, _edge_set(X), budget)
    for edges in s.walk(degrees, []):
        yield Hypergraph.trusted(len(degrees), r, edges)


def count_avoiding(k, r: int, X=None, *, budget: int = DEFAULT_BUDGET, workers: int = 1) -> int:
    """Exact ``|H_r(k, X)|``; 0 for infeasible degree sequences."""
    return enumerate_avoiding(k, r, X, budget=budget, workers=workers).count


def count_all(k, r: int, *, budget: int = DEFAULT_BUDGET, workers: int = 1) -> int:
    return count_avoiding(k, r, None, budget=budget, workers=workers)


def count_containing(k, r: int, X, *, budget: int = DEFAULT_BUDGET, check: bool = False) -> int:
    """Number of hypergraphs with degrees ``k`` containing every edge of ``X``.

    Computed as ``count_avoiding(k - x, X)``. With ``check=True`` it is also
    counted directly by filtering the full enumeration of degree sequence
    ``k``, and the two must agree.
    """
    degrees = _as_degrees(k)
    edges = _edge_set(X)
    x = [0] * len(degrees)
    for e in edges:
        for v in e:
            x[v] += 1
    if any(b > a for a, b in zip(degrees, x)):
        return 0
    residual = tuple(a - b for a, b in zip(degrees, x))
    via_identity = count_avoiding(residual, r, edges, budget=budget)
    if check:
        direct = sum(1 for h in iter_hypergraphs(degrees, r, budget=budget) if edges <= h.edge_set)
        if direct != via_identity:
            raise OracleMismatch(f"containing: direct {direct} != via k-x {via_identity}")
    return via_identity


def xi_exact(k, r: int, e: Sequence[int], *, budget: int = DEFAULT_BUDGET) -> Fraction:
    """``|F| / |F^c|`` where ``F`` holds the hypergraphs with degrees ``k`` containing ``e``."""
    e = tuple(sorted(e))
    inside = count_containing(k, r, [e], budget=budget)
    outside = count_all(k, r, budget=budget) - inside
    if outside == 0:
        raise DegenerateDenominator(f"no hypergraph with these degrees avoids {e}")
    return Fraction(inside, outside)


def prob_avoid_exact(k, r: int, X, *, budget: int = DEFAULT_BUDGET) -> Fraction:
    total = count_all(k, r, budget=budget)
    if total == 0:
        raise EmptyClass("no hypergraph has this degree sequence")
    return Fraction(count_avoiding(k, r, X, budget=budget), total)


def prob_contain_exact(k, r: int, X, *, budget: int = DEFAULT_BUDGET) -> Fraction:
    total = count_all(k, r, budget=budget)
    if total == 0:
        raise EmptyClass("no hypergraph has this degree sequence")
    return Fraction(count_containing(k, r, X, budget=budget), total)


# --- substructures -----------------------------------------------------------


def _masks(h: Hypergraph) -> list[int]:
    return [sum(1 << v for v in e) for e in h.edges]


def iter_perfect_matchings(h: Hypergraph) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield each perfect matching of ``h`` once, as a sorted tuple of edges."""
    n, r = h.n, h.r
    if n % r:
        return
    masks = _masks(h)
    by_min: dict[int, list[int]] = {}
    for i, e in enumerate(h.edges):
        for v in e:
            by_min.setdefault(v, []).append(i)
    full = (1 << n) - 1
    chosen: list[int] = []

    def rec(covered):
        if covered == full:
            yield tuple(h.edges[i] for i in chosen)
            return
        low = (~covered & full) & -(~covered & full)
        v = low.bit_length() - 1
        for i in by_min.get(v, ()):
            if masks[i] & covered == 0:
                chosen.append(i)
                yield from rec(covered | masks[i])
                chosen.pop()

    yield from rec(0)


def count_perfect_matchings(h: Hypergraph) -> int:
    return sum(1 for _ in iter_perfect_matchings(h))


def iter_loose_hamilton(h: Hypergraph) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield each loose Hamilton cycle of ``h`` once, as a sorted tuple of edges.

    A cycle is walked as ``e_0, ..., e_{t-1}`` with consecutive edges sharing
    exactly one vertex and non-consecutive edges disjoint. It is reported once:
    ``e_0`` has the smallest edge index and ``index(e_1) < index(e_{t-1})``.
    """
    n, r = h.n, h.r
    if r < 2 or n % (r - 1):
        return
    t = n // (r - 1)
    if t < 3:
        raise DegenerateCycle(f"n={n}, r={r} gives a cycle of {t} edges")
    if len(h.edges) < t:
        return
    masks = _masks(h)
    inc: dict[int, list[int]] = {}
    for i, e in enumerate(h.edges):
        for v in e:
            inc.setdefault(v, []).append(i)
    seq: list[int] = []

    def bits(m):
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def rec(covered, exits, close):
        # exits: vertices of the last edge available as the next link
        # close: vertices of e_0 available as the final link back
        j = len(seq)
        if j == t - 1:
            for w in bits(exits):
                for i in inc[w]:
                    if i <= seq[0] or i <= seq[1] or i in seq:
                        continue
                    common = masks[i] & covered
                    if common.bit_count() == 2 and common & (1 << w) and common & close:
                        yield tuple(sorted(h.edges[x] for x in seq + [i]))
            return
        for w in bits(exits):
            for i in inc[w]:
                if i <= seq[0] or i in seq:
                    continue
                if masks[i] & covered != 1 << w:
                    continue
                seq.append(i)
                nxt = masks[i] & ~(1 << w)
                yield from rec(covered | masks[i], nxt, close if j > 1 else close & ~(1 << w))
                seq.pop()

    for i0 in range(len(h.edges)):
        seq.append(i0)
        # the link to e_1 and the link from e_{t-1} must differ; ``close`` is
        # narrowed to exclude the e_0 -> e_1 link once e_1 is chosen
        yield from rec(masks[i0], masks[i0], masks[i0])
        seq.pop()


def count_loose_hamilton(h: Hypergraph) -> int:
    return sum(1 for _ in iter_loose_hamilton(h))


def pm_complete(n: int, r: int) -> int:
    """Perfect matchings of the complete r-uniform hypergraph on ``n`` vertices."""
    if n % r:
        raise NonDivisible(f"r={r} does not divide n={n}")
    m = n // r
    return factorial(n) // (factorial(m) * factorial(r) ** m)


def hc_complete(n: int, r: int) -> int:
    """Loose Hamilton cycles of the complete r-uniform hypergraph on ``n`` vertices."""
    if n % (r - 1):
        raise NonDivisible(f"r-1={r - 1} does not divide n={n}")
    t = n // (r - 1)
    if t < 3:
        raise DegenerateCycle(f"n={n}, r={r} gives a cycle of {t} edges")
    num = (r - 1) * factorial(n)
    den = 2 * n * factorial(r - 2) ** t
    assert num % den == 0
    return num // den


def _structure_iter(structure: Structure):
    if structure is Structure.PERFECT_MATCHING:
        return iter_perfect_matchings
    return iter_loose_hamilton


def count_structure(h: Hypergraph, structure: Structure) -> int:
    if structure is Structure.PERFECT_MATCHING:
        return count_perfect_matchings(h)
    return count_loose_hamilton(h)


def expectation_exact(
    k, r: int, structure: Structure, *, budget: int = DEFAULT_BUDGET, check: bool = False
) -> Fraction:
    """Exact expected number of perfect matchings / loose Hamilton cycles.

    Summed over every candidate structure ``X`` in the complete hypergraph as
    ``P(X in H)``; with ``check=True`` also averaged over the whole class.
    """
    degrees = _as_degrees(k)
    n = len(degrees)
    total = count_all(degrees, r, budget=budget)
    if total == 0:
        raise EmptyClass("no hypergraph has this degree sequence")
    structure = Structure(structure)
    if structure is Structure.PERFECT_MATCHING and n % r:
        return Fraction(0)
    if structure is Structure.LOOSE_HAMILTON and n % (r - 1):
        return Fraction(0)
    candidates = pm_complete(n, r) if structure is Structure.PERFECT_MATCHING else hc_complete(n, r)
    if candidates > budget:
        raise InstanceTooLarge(f"{candidates} candidate structures exceed budget of {budget}")
    complete = Hypergraph.complete(n, r)
    hits = sum(count_containing(degrees, r, X, budget=budget) for X in _structure_iter(structure)(complete))
    by_structure = Fraction(hits, total)
    if check:
        acc = 0
        seen = 0
        for h in iter_hypergraphs(degrees, r, budget=budget):
            acc += count_structure(h, structure)
            seen += 1
        by_average = Fraction(acc, seen)
        if by_average != by_structure:
            raise OracleMismatch(f"expectation: average {by_average} != sum over structures {by_structure}")
    return by_structure
