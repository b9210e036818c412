"""
Coloring decomposition, staged path construction between triangulations with
bounded mutual intersection, distance bounds and the same-component decision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import networkx as nx

from .arcs import Arc, segments
from .combing import comb_along
from .errors import BoundViolated, ExceedsCutoff, FlipGraphError, UnboundedIntersection
from .flips import PathCertificate, bfs_geodesic, relative_arcs, same_triangulation
from .triangulation import Triangulation

__all__ = ["ArcAdjacencyGraph", "arc_adjacency_graph", "ColorDecomposition", "color_decomposition",
           "UnboundedWitness", "mutual_intersection_bound", "StageReport", "construct_path",
           "flip_distance_bounds", "lower_bound_display", "different_threshold",
           "ComponentDecision", "decide_same_component", "coloring_bound", "power_degree_bound",
           "growth_bound", "crossed_pair_distances"]


def coloring_bound(K: int) -> int:
    """Number of colors needed: ``2 * 3**K - 1``."""
    return 2 * 3 ** K - 1


def power_degree_bound(K: int) -> int:
    return 2 * 3 ** K - 2


def growth_bound(k: int) -> int:
    """Largest intersection reachable after ``k`` simultaneous flips: ``(4**k - 1) / 3``."""
    return (4 ** k - 1) // 3


def flip_distance_bounds(K: int) -> tuple[int, int]:
    """
    ``(lower, upper)`` for triangulations whose mutual intersection bound is
    exactly ``K``.  ``lower`` is the largest ``N`` with ``(4**N - 1) / 3 <= K``.
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    N = 0
    while growth_bound(N + 1) <= K:
        N += 1
    return N, 2 * K * K * 3 ** K - K * K


def lower_bound_display(K: int) -> tuple[str, float]:
    """The alternative closed form ``log4(3(K+1))``, reported next to the implemented bound."""
    return f"log4({3 * (K + 1)})", math.log(3 * (K + 1), 4)


def different_threshold(N: int) -> int:
    """An arc with this many crossings rules out every path of length at most ``N``."""
    return growth_bound(N + 1)


# ---------------------------------------------------------------- adjacency graph

@dataclass
class ArcAdjacencyGraph:
    triangulation: Triangulation
    graph: nx.Graph

    @property
    def max_degree(self) -> int:
        return max((d for _, d in self.graph.degree), default=0)

    def distance(self, a: int, b: int) -> int:
        return nx.shortest_path_length(self.graph, a, b)

    def power(self, K: int) -> nx.Graph:
        if K <= 0:
            H = nx.Graph()
            H.add_nodes_from(self.graph.nodes)
            return H
        return nx.power(self.graph, K)


def arc_adjacency_graph(S: Triangulation) -> ArcAdjacencyGraph:
    """Edges of ``S`` joined whenever they bound a common triangle."""
    G = nx.Graph()
    G.add_nodes_from(S.edges)
    for t in range(S.num_triangles):
        es = sorted({S.edge_of[3 * t + k] for k in range(3)})
        for i in range(len(es)):
            for j in range(i + 1, len(es)):
                G.add_edge(es[i], es[j])
    return ArcAdjacencyGraph(S, G)


def crossed_pair_distances(S: Triangulation, T: Triangulation) -> Iterator[tuple[int, int, int, int]]:
    """``(crossings of the arc of T, edge a, edge b, distance)`` for edges of ``S`` crossed by one arc of ``T``."""
    G = arc_adjacency_graph(S)
    for beta in relative_arcs(T, S):
        crossed = sorted(set(beta.crossings(S)))
        for i in range(len(crossed)):
            for j in range(i + 1, len(crossed)):
                yield len(beta.sides), crossed[i], crossed[j], G.distance(crossed[i], crossed[j])


# ---------------------------------------------------------------- mutual bound

@dataclass(frozen=True)
class UnboundedWitness:
    """Produces, for each threshold ``k``, an arc description with intersection at least ``k``."""
    description: str
    produce: Callable[[int], tuple[object, int]]

    def witnesses(self, thresholds) -> list[tuple[int, object, int]]:
        out = []
        for k in thresholds:
            arc, value = self.produce(k)
            if value < k:
                raise BoundViolated(f"witness for threshold {k} only reaches {value}")
            out.append((k, arc, value))
        return out


def _one_sided(S: Triangulation, T: Triangulation) -> int:
    return max((len(a.sides) for a in relative_arcs(S, T)), default=0)


def mutual_intersection_bound(S, T):
    """Least ``K`` with ``i(a, T) <= K`` for arcs ``a`` of ``S`` and vice versa."""
    if isinstance(S, Triangulation) and isinstance(T, Triangulation):
        return max(_one_sided(S, T), _one_sided(T, S))
    from . import infinite
    return infinite.mutual_intersection_bound(S, T)


# ---------------------------------------------------------------- coloring

@dataclass(frozen=True)
class ColorDecomposition:
    assignment: dict        # edge id of S -> color in 1..colors_used
    colors_used: int

    def classes(self) -> list[list[int]]:
        out = [[] for _ in range(self.colors_used)]
        for e, c in sorted(self.assignment.items()):
            out[c - 1].append(e)
        return out


def color_decomposition(S: Triangulation, T: Triangulation, K: int) -> ColorDecomposition:
    """
    Color the edges of ``S`` so that every arc of ``T`` crosses at most one
    edge of each color, using at most ``2 * 3**K - 1`` colors.
    """
    actual = mutual_intersection_bound(S, T)
    if actual > K:
        raise BoundViolated(f"mutual intersection is {actual}, above the stated bound {K}")
    if K == 0:
        return ColorDecomposition({e: 1 for e in S.edges}, 1)
    H = arc_adjacency_graph(S).power(K)
    raw = nx.greedy_color(H, strategy="largest_first")
    assignment = {e: raw[e] + 1 for e in S.edges}
    used = max(assignment.values())
    if used > coloring_bound(K):
        raise BoundViolated(f"{used} colors exceed {coloring_bound(K)}")
    dec = ColorDecomposition(assignment, used)
    for beta in relative_arcs(T, S):
        seen: dict[int, int] = {}
        for e in set(beta.crossings(S)):
            c = assignment[e]
            if c in seen:
                raise BoundViolated(f"an arc of T crosses edges {seen[c]} and {e} of color {c}")
            seen[c] = e
    return dec


# ---------------------------------------------------------------- path construction

@dataclass(frozen=True)
class StageReport:
    color: int
    arcs: tuple[int, ...]           # edges of S combed along in this stage
    moves: int
    subsurface_sizes: tuple[int, ...]
    disjoint: bool
    cleaned_up: bool


def _stage_subsurfaces(arcs: list[Arc], X: Triangulation) -> tuple[tuple[int, ...], bool]:
    sets = [frozenset(seg[0] for seg in segments(a, X)) for a in arcs if a.sides]
    disjoint = all(not (sets[i] & sets[j]) for i in range(len(sets)) for j in range(i + 1, len(sets)))
    return tuple(len(s) for s in sets), disjoint


@dataclass(frozen=True)
class PathConstruction:
    certificate: PathCertificate
    K: int
    colors: ColorDecomposition
    stages: tuple[StageReport, ...] = field(default=())


def construct_path(S: Triangulation, T: Triangulation, detailed: bool = False):
    """
    A flip path from ``T`` to ``S``: comb ``T`` along each color class of
    ``S`` in turn.  Every stage takes at most ``K**2`` moves and the total is
    at most ``2 K**2 3**K - K**2``.
    """
    K = mutual_intersection_bound(S, T)
    if not isinstance(K, int):
        raise UnboundedIntersection("mutual intersection is unbounded; no finite path exists")
    colors = color_decomposition(S, T, K)
    X = T
    moves = []
    stage_lengths = []
    reports = []
    if K > 0:
        for ci, cls in enumerate(colors.classes(), start=1):
            rel = relative_arcs(S, X)
            mu = [rel[e] for e in cls]
            sizes, disjoint = _stage_subsurfaces(mu, X)
            if any(n > K + 1 for n in sizes):
                raise BoundViolated(f"stage {ci}: a subsurface has {max(sizes)} triangles, more than {K + 1}")
            res = comb_along(X, mu)
            stage = list(res.certificate.moves)
            Y = res.projected
            cleaned = False
            if len(stage) > K * K:
                try:
                    chain = bfs_geodesic(X, Y, cutoff=K * K)
                except ExceedsCutoff:
                    raise BoundViolated(f"stage {ci} needs more than {K * K} moves") from None
                stage = [Z.move for Z in chain[1:]]
                Y = chain[-1]
                cleaned = True
            moves += stage
            stage_lengths.append(len(stage))
            reports.append(StageReport(ci, tuple(cls), len(stage), sizes, disjoint, cleaned))
            X = Y
        if not same_triangulation(X, S):
            raise FlipGraphError("staged combing did not reach the target triangulation")
    upper = flip_distance_bounds(K)[1]
    if len(moves) > upper:
        raise BoundViolated(f"path of length {len(moves)} exceeds the bound {upper}")
    cert = PathCertificate(T, tuple(moves), S, tuple(stage_lengths))
    if detailed:
        return PathConstruction(cert, K, colors, tuple(reports))
    return cert


# ---------------------------------------------------------------- decision

@dataclass(frozen=True)
class ComponentDecision:
    verdict: str                    # "Same" or "Different"
    evidence: object                # PathCertificate or UnboundedWitness
    bound: int | None = None

    @property
    def same(self) -> bool:
        return self.verdict == "Same"


def decide_same_component(S, T) -> ComponentDecision:
    """Same component iff the mutual intersection bound is finite."""
    if isinstance(S, Triangulation) and isinstance(T, Triangulation):
        cert = construct_path(S, T)
        return ComponentDecision("Same", cert, mutual_intersection_bound(S, T))
    from . import infinite
    return infinite.decide_same_component(S, T)
