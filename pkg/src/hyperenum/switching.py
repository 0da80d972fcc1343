"""Forward and reverse switchings between hypergraphs that contain a fixed
edge ``e`` and hypergraphs that avoid it.

A forward tuple ``(z1, z2, y1, y2, f1, f2)`` on ``G*`` (which contains ``e``)
removes ``e, f1, f2`` and inserts

    g  = (e - {z1, z2}) + {y1, y2}
    gj = (fj - {yj}) + {zj}          for j = 1, 2.

A reverse tuple ``(z1, z2, y1, y2, g1, g2)`` on ``G`` (which avoids ``e``)
undoes it. Tuples are ordered: swapping the roles of ``f1`` and ``f2`` gives
a different tuple. Edge references are indices into the canonical edge list
of the hypergraph the tuple acts on.

Two reverse sets are available. ``mode="narrow"`` requires ``gj & e == {zj}``.
``mode="inverse"`` only requires ``zj in gj``; it is exactly the set of
images of forward tuples, which is what makes the double count of legal
switchings balance. Both sets obey the ``2 r (r-1) kmax^3`` bound.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Iterator, Optional, Union

from hyperenum.hypercore import DegreeSequence, Hypergraph, InvalidInstance
from hyperenum.oracle import DEFAULT_BUDGET, iter_hypergraphs


class EdgeNotPresent(ValueError):
    pass


class EdgePresent(ValueError):
    pass


class NotInStarSet(ValueError):
    pass


class NotInSSet(ValueError):
    pass


class ClassificationError(AssertionError):
    pass


@dataclass(frozen=True)
class SwitchTuple:
    z1: int
    z2: int
    y1: int
    y2: int
    f1: int
    f2: int


class Verdict(enum.Enum):
    LEGAL = "Legal"
    ILLEGAL_I = "Illegal_I"
    ILLEGAL_IIA = "Illegal_IIa"
    ILLEGAL_IIB = "Illegal_IIb"
    ILLEGAL_III = "Illegal_III"
    # illegal, but none of the four cases applies; see classify_forward
    ILLEGAL_UNCLASSIFIED = "Illegal_unclassified"


@dataclass(frozen=True)
class LegalityVerdict:
    verdict: Verdict
    witness: Optional[str] = None

    @property
    def legal(self) -> bool:
        return self.verdict is Verdict.LEGAL


@dataclass(frozen=True)
class MultiHypergraph:
    """Result of a switching that broke simplicity: edges are sorted vertex
    multisets and may repeat."""

    n: int
    r: int
    edges: tuple[tuple[int, ...], ...]

    @property
    def loops(self) -> list[tuple[int, ...]]:
        return [e for e in self.edges if len(set(e)) < len(e)]

    @property
    def repeated(self) -> list[tuple[int, ...]]:
        return sorted(e for e, c in Counter(self.edges).items() if c > 1)

    @property
    def is_simple(self) -> bool:
        return not self.loops and not self.repeated

    def __contains__(self, e) -> bool:
        return tuple(sorted(e)) in self.edges

    def degrees(self) -> DegreeSequence:
        deg = [0] * self.n
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return DegreeSequence(tuple(deg))


SwitchResult = Union[Hypergraph, MultiHypergraph]


def _build(n: int, r: int, edges: list[tuple[int, ...]]) -> SwitchResult:
    edges = sorted(tuple(sorted(e)) for e in edges)
    multi = MultiHypergraph(n, r, tuple(edges))
    if multi.is_simple:
        return Hypergraph.trusted(n, r, edges)
    return multi


def _edge_index(G: Hypergraph, e) -> Optional[int]:
    e = tuple(sorted(e))
    if e not in G.edge_set:
        return None
    # edges are sorted, so bisect would do; lists are short
    return G.edges.index(e)


# --- forward ------------------------------------------------------------------


def enumerate_forward_tuples(G: Hypergraph, e) -> Iterator[SwitchTuple]:
    """Yield every tuple of ``S*(G, e)``."""
    ie = _edge_index(G, e)
    if ie is None:
        raise EdgeNotPresent(f"{tuple(e)} is not an edge of G")
    e = G.edges[ie]
    m = len(G.edges)
    for z1, z2 in permutations(e, 2):
        for i1 in range(m):
            if i1 == ie:
                continue
            for y1 in G.edges[i1]:
                if y1 == z1 or y1 == z2:
                    continue
                for i2 in range(m):
                    if i2 == ie or i2 == i1:
                        continue
                    for y2 in G.edges[i2]:
                        if y2 in (z1, z2, y1):
                            continue
                        yield SwitchTuple(z1, z2, y1, y2, i1, i2)


def star_set_size(G: Hypergraph, e) -> int:
    return sum(1 for _ in enumerate_forward_tuples(G, e))


def _in_star_set(G: Hypergraph, ie: int, tup: SwitchTuple) -> bool:
    m = len(G.edges)
    if not (0 <= tup.f1 < m and 0 <= tup.f2 < m):
        return False
    if len({ie, tup.f1, tup.f2}) != 3 or len({tup.z1, tup.z2, tup.y1, tup.y2}) != 4:
        return False
    e = G.edges[ie]
    return (
        tup.z1 in e and tup.z2 in e and tup.y1 in G.edges[tup.f1] and tup.y2 in G.edges[tup.f2]
    )


def _forward_edges(G: Hypergraph, e: tuple[int, ...], tup: SwitchTuple):
    f1, f2 = G.edges[tup.f1], G.edges[tup.f2]
    # multiset arithmetic: removing one copy of y / z, keeping any duplicate
    g = [v for v in e if v not in (tup.z1, tup.z2)] + [tup.y1, tup.y2]
    g1 = list(f1)
    g1.remove(tup.y1)
    g1.append(tup.z1)
    g2 = list(f2)
    g2.remove(tup.y2)
    g2.append(tup.z2)
    return tuple(sorted(g)), tuple(sorted(g1)), tuple(sorted(g2))


def apply_forward(G: Hypergraph, e, tup: SwitchTuple) -> SwitchResult:
    """``(G - {e, f1, f2}) + {g, g1, g2}``; a MultiHypergraph if not simple."""
    ie = _edge_index(G, e)
    if ie is None or not _in_star_set(G, ie, tup):
        raise NotInStarSet(f"{tup} is not in S*(G, {tuple(e)})")
    e = G.edges[ie]
    keep = [h for i, h in enumerate(G.edges) if i not in (ie, tup.f1, tup.f2)]
    return _build(G.n, G.r, keep + list(_forward_edges(G, e, tup)))


def _forward_defect(result: SwitchResult, e) -> Optional[str]:
    if isinstance(result, MultiHypergraph):
        parts = []
        if result.loops:
            parts.append(f"loops {result.loops}")
        if result.repeated:
            parts.append(f"repeated {result.repeated}")
        if e in result:
            parts.append(f"contains {tuple(e)}")
        return "; ".join(parts)
    if tuple(e) in result.edge_set:
        return f"contains {tuple(e)}"
    return None


def _forward_case(G: Hypergraph, ie: int, tup: SwitchTuple, cross: bool = True) -> Optional[tuple[Verdict, str]]:
    e = set(G.edges[ie])
    f = {1: set(G.edges[tup.f1]), 2: set(G.edges[tup.f2])}
    z = {1: tup.z1, 2: tup.z2}
    y = {1: tup.y1, 2: tup.y2}
    for j in (1, 2):
        if z[j] in f[j]:
            return Verdict.ILLEGAL_I, f"z{j}={z[j]} lies in e and f{j}"
        if y[j] in e:
            return Verdict.ILLEGAL_I, f"y{j}={y[j]} lies in e and f{j}"
    core = e - {tup.z1, tup.z2}
    others = [(i, set(h)) for i, h in enumerate(G.edges) if i not in (ie, tup.f1, tup.f2)]
    for i, h in others:
        if h & e == core and h & f[1] == {y[1]} and h & f[2] == {y[2]}:
            return Verdict.ILLEGAL_IIA, f"edge {G.edges[i]} equals g"
    for i, h in others:
        for j in (1, 2):
            if h & f[j] == f[j] - {y[j]} and h & e == {z[j]}:
                return Verdict.ILLEGAL_IIB, f"edge {G.edges[i]} equals g{j}"
    for j in (1, 2):
        if f[j] - {y[j]} == e - {z[j]}:
            return Verdict.ILLEGAL_III, f"g{j} recreates e"
    # z_{3-j} in e and f_j: the only way g1 and g2 can coincide when no case above applies
    for j in (1, 2):
        if cross and z[3 - j] in f[j]:
            return Verdict.ILLEGAL_I, f"cross: z{3 - j}={z[3 - j]} lies in e and f{j}"
    return None


def classify_forward(G: Hypergraph, e, tup: SwitchTuple, *, verify: bool = False) -> LegalityVerdict:
    """Decide legality by building the switched hypergraph, then name the
    first illegality case that applies, in the order I, IIa, IIb, III.

    When none of the four cases applies, case I is read with ``j`` ranging
    over both edges: ``z2`` in ``f1`` (or ``z1`` in ``f2``) counts, and is
    tagged ``cross`` in the witness. Without it, ``g1 == g2`` collisions
    would fall through every case. Illegal tuples
    that match no case at all get ``ILLEGAL_UNCLASSIFIED``; this happens when
    the repeated edge shares extra vertices with ``f1`` or ``f2``, which needs
    a vertex of degree 3.

    With ``verify=True`` the result is also re-validated from scratch.
    """
    ie = _edge_index(G, e)
    if ie is None or not _in_star_set(G, ie, tup):
        raise NotInStarSet(f"{tup} is not in S*(G, {tuple(e)})")
    e = G.edges[ie]
    result = apply_forward(G, e, tup)
    defect = _forward_defect(result, e)
    if verify:
        try:
            Hypergraph(G.n, G.r, result.edges)
            simple = True
        except InvalidInstance:
            simple = False
        legal = simple and e not in result.edges
        if legal != (defect is None) or result.degrees() != G.degrees():
            raise ClassificationError(f"{tup}: inconsistent legality check")
    if defect is None:
        return LegalityVerdict(Verdict.LEGAL)
    case = _forward_case(G, ie, tup)
    if case is None:
        return LegalityVerdict(Verdict.ILLEGAL_UNCLASSIFIED, defect)
    return LegalityVerdict(*case)


# --- reverse ------------------------------------------------------------------


def enumerate_reverse_tuples(G: Hypergraph, e, mode: str = "narrow") -> Iterator[SwitchTuple]:
    """Yield the reverse tuples on ``G`` (which must avoid ``e``).

    The bridging edge is always ``g = (e - {z1, z2}) + {y1, y2}`` with
    ``y1, y2`` outside ``e``; it must be an edge of ``G``.
    """
    if mode not in ("narrow", "inverse"):
        raise ValueError(f"unknown mode {mode!r}")
    e = tuple(sorted(e))
    if e in G.edge_set:
        raise EdgePresent(f"{e} is an edge of G")
    es = set(e)
    inc: dict[int, list[int]] = {}
    for i, h in enumerate(G.edges):
        for v in h:
            inc.setdefault(v, []).append(i)
    for z1, z2 in permutations(e, 2):
        core = es - {z1, z2}
        # g contains core, avoids z1, z2 and has exactly two vertices outside e
        pool = inc.get(min(core), []) if core else range(len(G.edges))
        bridges = []
        for i in pool:
            h = set(G.edges[i])
            if h & es == core:
                outside = sorted(h - es)
                bridges.append(outside)
        if not bridges:
            continue
        if mode == "narrow":
            g1s = [i for i in inc.get(z1, ()) if set(G.edges[i]) & es == {z1}]
            g2s = [i for i in inc.get(z2, ()) if set(G.edges[i]) & es == {z2}]
        else:
            g1s = inc.get(z1, [])
            g2s = inc.get(z2, [])
        for a, b in bridges:
            for y1, y2 in ((a, b), (b, a)):
                for i1 in g1s:
                    for i2 in g2s:
                        if i1 != i2:
                            yield SwitchTuple(z1, z2, y1, y2, i1, i2)


def _in_s_set(G: Hypergraph, e: tuple[int, ...], tup: SwitchTuple, mode: str) -> bool:
    m = len(G.edges)
    if not (0 <= tup.f1 < m and 0 <= tup.f2 < m) or tup.f1 == tup.f2:
        return False
    if len({tup.z1, tup.z2, tup.y1, tup.y2}) != 4:
        return False
    es = set(e)
    if tup.z1 not in es or tup.z2 not in es or tup.y1 in es or tup.y2 in es:
        return False
    g1, g2 = set(G.edges[tup.f1]), set(G.edges[tup.f2])
    if mode == "narrow":
        if g1 & es != {tup.z1} or g2 & es != {tup.z2}:
            return False
    elif tup.z1 not in g1 or tup.z2 not in g2:
        return False
    g = tuple(sorted((es - {tup.z1, tup.z2}) | {tup.y1, tup.y2}))
    return g in G.edge_set


def apply_reverse(G: Hypergraph, e, tup: SwitchTuple, mode: str = "inverse") -> SwitchResult:
    """``(G - {g, g1, g2}) + {e, f1, f2}``; a MultiHypergraph if not simple."""
    e = tuple(sorted(e))
    if e in G.edge_set or not _in_s_set(G, e, tup, mode):
        raise NotInSSet(f"{tup} is not in S(G, {e}) ({mode})")
    g = tuple(sorted((set(e) - {tup.z1, tup.z2}) | {tup.y1, tup.y2}))
    ig = G.edges.index(g)
    f1 = list(G.edges[tup.f1])
    f1.remove(tup.z1)
    f1.append(tup.y1)
    f2 = list(G.edges[tup.f2])
    f2.remove(tup.z2)
    f2.append(tup.y2)
    keep = [h for i, h in enumerate(G.edges) if i not in (ig, tup.f1, tup.f2)]
    return _build(G.n, G.r, keep + [e, tuple(f1), tuple(f2)])


def reverse_is_legal(G: Hypergraph, e, tup: SwitchTuple, mode: str = "inverse") -> bool:
    """Legal iff the result is simple (it then contains ``e`` and keeps the degrees)."""
    return isinstance(apply_reverse(G, e, tup, mode), Hypergraph)


def induced_reverse_tuple(G_star: Hypergraph, e, tup: SwitchTuple, G: Hypergraph) -> SwitchTuple:
    """Reverse tuple on ``G = apply_forward(G_star, e, tup)`` that undoes ``tup``."""
    _, g1, g2 = _forward_edges(G_star, tuple(sorted(e)), tup)
    return SwitchTuple(tup.z1, tup.z2, tup.y1, tup.y2, G.edges.index(g1), G.edges.index(g2))


# --- audit --------------------------------------------------------------------


@dataclass
class AuditReport:
    n: int
    r: int
    degrees: list[int]
    edge: list[int]
    M: int
    kmax: int
    size_F: int = 0
    size_Fc: int = 0
    star_bound: int = 0
    max_star_size: int = 0
    reverse_bound: int = 0
    max_reverse_size: dict = field(default_factory=dict)
    max_legal_reverse: dict = field(default_factory=dict)
    min_legal_forward: Optional[int] = None
    sum_legal_forward: int = 0
    sum_legal_reverse: dict = field(default_factory=dict)
    identity_residual: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    unclassified: int = 0
    cross_only: int = 0
    involution_failures: int = 0
    degree_failures: int = 0
    xi: Optional[str] = None
    xi_float: Optional[float] = None
    xi_shape: float = 0.0
    xi_switching_bound: Optional[float] = None
    rows: list = field(default_factory=list)

    @property
    def bound_a_ok(self) -> bool:
        return self.max_star_size <= self.star_bound

    @property
    def bound_b_ok(self) -> bool:
        return all(v <= self.reverse_bound for v in self.max_legal_reverse.values())

    @property
    def identity_ok(self) -> bool:
        return self.identity_residual.get("inverse") == 0

    def summary(self) -> dict:
        d = asdict(self)
        d.pop("rows")
        d.update(bound_a_ok=self.bound_a_ok, bound_b_ok=self.bound_b_ok, identity_ok=self.identity_ok)
        return d

    def to_json(self, rows: bool = True) -> str:
        d = self.summary()
        if rows:
            d["rows"] = self.rows
        return json.dumps(d, indent=2)


def audit_bounds(k, r: int, e, *, budget: int = DEFAULT_BUDGET, keep_rows: bool = True) -> AuditReport:
    """Check every switching count over the whole class with degrees ``k``.

    Verifies the bound on ``|S*|``, the bound on legal reverse switchings,
    the double count of legal switchings, the completeness of the
    illegality cases, degree preservation and the forward/reverse inverse
    property, then reports the exact ratio ``|F| / |F^c|`` next to the bound
    these counts imply.
    """
    k = k if isinstance(k, DegreeSequence) else DegreeSequence(tuple(k))
    e = tuple(sorted(e))
    rep = AuditReport(k.n, r, list(k.degrees), list(e), k.M, k.kmax)
    rep.star_bound = r * (r - 1) * k.M**2
    rep.reverse_bound = 2 * r * (r - 1) * k.kmax**3
    modes = ("narrow", "inverse")
    rep.max_reverse_size = {m: 0 for m in modes}
    rep.max_legal_reverse = {m: 0 for m in modes}
    rep.sum_legal_reverse = {m: 0 for m in modes}
    verdicts: Counter = Counter()
    for G in iter_hypergraphs(k, r, budget=budget):
        if e in G.edge_set:
            rep.size_F += 1
            star = legal = 0
            for tup in enumerate_forward_tuples(G, e):
                star += 1
                result = apply_forward(G, e, tup)
                if result.degrees() != k:
                    rep.degree_failures += 1
                v = classify_forward(G, e, tup, verify=True)
                verdicts[v.verdict.value] += 1
                if v.verdict is Verdict.ILLEGAL_UNCLASSIFIED:
                    rep.unclassified += 1
                elif v.witness and v.witness.startswith("cross"):
                    rep.cross_only += 1
                if v.legal:
                    legal += 1
                    back = apply_reverse(result, e, induced_reverse_tuple(G, e, tup, result))
                    if back != G:
                        rep.involution_failures += 1
            rep.max_star_size = max(rep.max_star_size, star)
            rep.min_legal_forward = legal if rep.min_legal_forward is None else min(rep.min_legal_forward, legal)
            rep.sum_legal_forward += legal
            if keep_rows:
                rep.rows.append({"side": "F", "edges": [list(h) for h in G.edges], "star_size": star,
                                 "legal_forward": legal})
        else:
            rep.size_Fc += 1
            row = {"side": "Fc", "edges": [list(h) for h in G.edges]}
            for mode in modes:
                size = legal = 0
                for tup in enumerate_reverse_tuples(G, e, mode):
                    size += 1
                    result = apply_reverse(G, e, tup, mode)
                    if result.degrees() != k:
                        rep.degree_failures += 1
                    if isinstance(result, Hypergraph):
                        legal += 1
                rep.max_reverse_size[mode] = max(rep.max_reverse_size[mode], size)
                rep.max_legal_reverse[mode] = max(rep.max_legal_reverse[mode], legal)
                rep.sum_legal_reverse[mode] += legal
                row[f"reverse_size_{mode}"] = size
                row[f"legal_reverse_{mode}"] = legal
            if keep_rows:
                rep.rows.append(row)
    rep.identity_residual = {m: rep.sum_legal_forward - rep.sum_legal_reverse[m] for m in modes}
    rep.verdicts = dict(sorted(verdicts.items()))
    if rep.size_Fc:
        xi = Fraction(rep.size_F, rep.size_Fc)
        rep.xi, rep.xi_float = str(xi), float(xi)
    if k.M:
        rep.xi_shape = float(Fraction(2 * k.kmax**3, k.M**2))
    if rep.min_legal_forward:
        rep.xi_switching_bound = rep.max_legal_reverse["inverse"] / rep.min_legal_forward
    return rep
