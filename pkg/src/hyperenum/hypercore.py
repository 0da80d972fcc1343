"""Core types for r-uniform hypergraphs with a prescribed degree sequence.

Vertices are the integers ``0..n-1``. Edges are stored as strictly
increasing tuples, hypergraphs as lexicographically sorted tuples of edges,
so structural equality is plain tuple equality.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class InvalidDegree(ValueError):
    pass


class NonDivisible(ValueError):
    pass


class InvalidInstance(ValueError):
    """Raised when an instance or hypergraph fails structural checks.

    ``problems`` lists every problem found, not only the first.
    """

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def falling_factorial(a: int, b: int) -> int:
    """Return ``a (a-1) ... (a-b+1)``; 1 for ``b == 0`` and 0 for ``b > a``."""
    if a < 0 or b < 0:
        raise ValueError(f"falling_factorial needs non-negative arguments, got ({a}, {b})")
    return math.perm(a, b)


def degree_stats(degrees: Iterable[int]) -> tuple[int, int, int]:
    """Return ``(M, M2, kmax)`` with ``M2 = sum k_i (k_i - 1)``."""
    degrees = list(degrees)
    bad = [(i, d) for i, d in enumerate(degrees) if d < 0]
    if bad:
        raise InvalidDegree(f"negative degrees at {bad}")
    m = sum(degrees)
    m2 = sum(d * (d - 1) for d in degrees)
    kmax = max(degrees, default=0)
    return m, m2, kmax


@dataclass(frozen=True)
class DegreeSequence:
    degrees: tuple[int, ...]
    M: int = field(init=False, repr=False)
    M2: int = field(init=False, repr=False)
    kmax: int = field(init=False, repr=False)

    def __post_init__(self):
        degrees = tuple(int(d) for d in self.degrees)
        m, m2, kmax = degree_stats(degrees)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "M", m)
        object.__setattr__(self, "M2", m2)
        object.__setattr__(self, "kmax", kmax)

    @classmethod
    def regular(cls, n: int, k: int) -> DegreeSequence:
        return cls((k,) * n)

    @property
    def n(self) -> int:
        return len(self.degrees)

    def __len__(self) -> int:
        return len(self.degrees)

    def __getitem__(self, i):
        return self.degrees[i]

    def __iter__(self):
        return iter(self.degrees)

    def __sub__(self, other: DegreeSequence | Sequence[int]) -> DegreeSequence:
        other = tuple(other)
        if len(other) != self.n:
            raise ValueError("degree sequences of different length")
        return DegreeSequence(tuple(a - b for a, b in zip(self.degrees, other)))

    def dominates(self, other: DegreeSequence | Sequence[int]) -> bool:
        return all(a >= b for a, b in zip(self.degrees, other))


class Edge(tuple):
    """A simple edge: strictly increasing tuple of distinct vertex indices."""

    def __new__(cls, vertices: Iterable[int]):
        vs = tuple(sorted(int(v) for v in vertices))
        if len(set(vs)) != len(vs):
            raise InvalidInstance([f"edge {vs} repeats a vertex"])
        return super().__new__(cls, vs)


def _edge_problems(n: int, r: int, edges: Sequence[Sequence[int]]) -> list[str]:
    problems = []
    seen: Counter = Counter()
    for e in edges:
        vs = tuple(sorted(e))
        if len(vs) != r:
            problems.append(f"edge {list(e)} has {len(vs)} vertices, expected {r}")
        if len(set(vs)) != len(vs):
            problems.append(f"edge {list(e)} repeats a vertex")
        out = [v for v in vs if not 0 <= v < n]
        if out:
            problems.append(f"edge {list(e)} has vertices outside [0, {n}): {out}")
        seen[vs] += 1
    for vs, c in sorted(seen.items()):
        if c > 1:
            problems.append(f"edge {list(vs)} appears {c} times")
    return problems


@dataclass(frozen=True)
class Hypergraph:
    """Simple r-uniform hypergraph on vertices ``0..n-1`` in canonical form."""

    n: int
    r: int
    edges: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        problems = _edge_problems(self.n, self.r, self.edges)
        if self.n < 0 or self.r < 1:
            problems.insert(0, f"need n >= 0 and r >= 1, got n={self.n}, r={self.r}")
        if problems:
            raise InvalidInstance(problems)
        object.__setattr__(self, "edges", tuple(sorted(tuple(sorted(e)) for e in self.edges)))

    @classmethod
    def trusted(cls, n: int, r: int, edges: Iterable[tuple[int, ...]]) -> Hypergraph:
        """Build without validation; ``edges`` must already be sorted simple tuples."""
        h = object.__new__(cls)
        object.__setattr__(h, "n", n)
        object.__setattr__(h, "r", r)
        object.__setattr__(h, "edges", tuple(sorted(edges)))
        return h

    @classmethod
    def complete(cls, n: int, r: int) -> Hypergraph:
        from itertools import combinations

        return cls.trusted(n, r, combinations(range(n), r))

    def canonical(self) -> Hypergraph:
        return Hypergraph(self.n, self.r, self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, e) -> bool:
        return tuple(sorted(e)) in self.edge_set

    @property
    def edge_set(self) -> frozenset:
        # cached lazily; the dataclass is frozen so bypass __setattr__
        try:
            return self.__dict__["_edge_set"]
        except KeyError:
            s = frozenset(self.edges)
            self.__dict__["_edge_set"] = s
            return s

    def degrees(self) -> DegreeSequence:
        return degree_sequence_of(self)

    def relabel(self, perm: Sequence[int]) -> Hypergraph:
        """Image under the vertex map ``v -> perm[v]``."""
        return Hypergraph.trusted(self.n, self.r, (tuple(sorted(perm[v] for v in e)) for e in self.edges))

    def to_json(self) -> dict:
        return {"n": self.n, "r": self.r, "edges": [list(e) for e in self.edges]}


def degree_sequence_of(h: Hypergraph) -> DegreeSequence:
    deg = [0] * h.n
    for e in h.edges:
        for v in e:
            deg[v] += 1
    return DegreeSequence(tuple(deg))


@dataclass(frozen=True)
class ForbiddenSet:
    X: Hypergraph

    @classmethod
    def empty(cls, n: int, r: int) -> ForbiddenSet:
        return cls(Hypergraph(n, r, ()))

    @classmethod
    def of(cls, n: int, r: int, edges: Iterable[Sequence[int]]) -> ForbiddenSet:
        return cls(Hypergraph(n, r, tuple(tuple(e) for e in edges)))

    @property
    def t(self) -> int:
        return len(self.X.edges)

    @property
    def x(self) -> DegreeSequence:
        return degree_sequence_of(self.X)

    @property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        return self.X.edges

    def __iter__(self):
        return iter(self.X.edges)

    def __len__(self) -> int:
        return self.t


@dataclass(frozen=True)
class Instance:
    k: DegreeSequence
    r: int
    X: ForbiddenSet

    def __post_init__(self):
        if self.X.X.n != self.k.n or self.X.X.r != self.r:
            raise InvalidInstance(
                [f"forbidden set is on (n={self.X.X.n}, r={self.X.X.r}), "
                 f"instance is (n={self.k.n}, r={self.r})"]
            )

    @classmethod
    def build(cls, degrees: Sequence[int], r: int, forbidden: Iterable[Sequence[int]] = ()) -> Instance:
        k = DegreeSequence(tuple(degrees))
        return cls(k, r, ForbiddenSet.of(k.n, r, forbidden))

    @property
    def n(self) -> int:
        return self.k.n

    @property
    def divisible(self) -> bool:
        return self.r > 0 and self.k.M % self.r == 0

    @property
    def containment_feasible(self) -> bool:
        return self.k.dominates(self.X.x)

    @classmethod
    def from_json(cls, data: dict) -> Instance:
        """Parse ``{"n", "r", "degrees", "forbidden"}``; collects every schema error."""
        problems = []
        if not isinstance(data, dict):
            raise InvalidInstance(["instance must be a JSON object"])
        for key in ("n", "r", "degrees"):
            if key not in data:
                problems.append(f"missing key {key!r}")
        if problems:
            raise InvalidInstance(problems)
        n, r, degrees = data["n"], data["r"], data["degrees"]
        forbidden = data.get("forbidden", [])
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            problems.append(f"n must be a non-negative integer, got {n!r}")
        if not isinstance(r, int) or isinstance(r, bool) or r < 1:
            problems.append(f"r must be a positive integer, got {r!r}")
        if not isinstance(degrees, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in degrees):
            problems.append("degrees must be a list of integers")
        elif isinstance(n, int) and len(degrees) != n:
            problems.append(f"degrees has length {len(degrees)}, expected n={n}")
        elif any(d < 0 for d in degrees):
            problems.append("degrees must be non-negative")
        if not isinstance(forbidden, list) or not all(
            isinstance(e, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in e) for e in forbidden
        ):
            problems.append("forbidden must be a list of integer lists")
        elif not problems:
            problems.extend(_edge_problems(n, r, forbidden))
        if problems:
            raise InvalidInstance(problems)
        return cls.build(degrees, r, forbidden)

    @classmethod
    def load(cls, path) -> Instance:
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidInstance([f"malformed JSON: {exc}"]) from exc
        return cls.from_json(data)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "degrees": list(self.k.degrees),
            "forbidden": [list(e) for e in self.X.edges],
        }


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]
    divisible: bool
    containment_feasible: bool

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_instance(inst: Instance, containment: bool = False) -> ValidationReport:
    """Report every violated precondition of ``inst``.

    Simplicity and range of the forbidden edges are enforced when the
    instance is built, so only the count-level conditions are checked here.
    """
    violations = []
    if not inst.divisible:
        violations.append(f"M={inst.k.M} is not divisible by r={inst.r}")
    if inst.r > inst.n:
        violations.append(f"r={inst.r} > n={inst.n}: no simple edge exists")
    feasible = inst.containment_feasible
    if containment and not feasible:
        bad = [i for i, (a, b) in enumerate(zip(inst.k, inst.X.x)) if b > a]
        violations.append(f"forbidden degree exceeds k at vertices {bad}")
    return ValidationReport(tuple(violations), inst.divisible, feasible)
