"""
Simultaneous flips, flip paths and the exact breadth-first oracle.

Triangulations of one surface are related through a shared flip history
(``Triangulation.parent``), through roots with identical gluing and names,
or, for polygons, through vertex labels.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import networkx as nx

from .arcs import (Arc, arc_edge, arc_key, edge_arcs, reduce_arc, track_back,
                   track_many)
from .errors import ExceedsCutoff, IncompatibleSurfaces, InvalidMove, Stuck
from .quads import (FlipMove, apply_simultaneous_flip, flippable, quad_triangles,
                    validate_move)
from .triangulation import BOUNDARY, Triangulation

__all__ = ["FlipMove", "PathCertificate", "apply_simultaneous_flip", "flippable",
           "relative_arcs", "state_key", "neighbors", "bfs_ball", "bfs_distance",
           "make_edge", "realize", "verify_certificate", "intersection_via_make_edge",
           "same_triangulation", "polygon_arc", "bfs_geodesic", "replay"]


@dataclass(frozen=True)
class PathCertificate:
    start: Triangulation
    moves: tuple[FlipMove, ...]
    end: Triangulation
    stages: tuple[int, ...] = field(default=(), compare=False)

    def __len__(self):
        return len(self.moves)


# ---------------------------------------------------------------- relating triangulations

def polygon_arc(T: Triangulation, u: str, v: str) -> Arc:
    """The unique arc between two labelled vertices of a polygon."""
    cu = next(c for c in range(len(T.gluing)) if T.corner_labels[c] == u)
    targets = {c // 3: c for c in range(len(T.gluing)) if T.corner_labels[c] == v}
    prev = {cu // 3: None}
    queue = deque([cu // 3])
    t = cu // 3
    while queue:
        t = queue.popleft()
        if t in targets:
            break
        for k in range(3):
            p = T.gluing[3 * t + k]
            if p != BOUNDARY and p // 3 not in prev:
                prev[p // 3] = 3 * t + k
                queue.append(p // 3)
    end = targets[t]
    sides = []
    while prev[t] is not None:
        sides.append(prev[t])
        t = prev[t] // 3
    return reduce_arc(Arc(cu, sides[::-1], end), T)


def relative_arcs(S: Triangulation, T: Triangulation) -> list[Arc]:
    """Edges of ``S`` (in edge-id order) as reduced arcs relative to ``T``."""
    if S is T:
        return edge_arcs(T)
    LS, LT = S.lineage(), T.lineage()
    # separately built roots with identical gluing and names carry the same marking
    if LS[0] is LT[0] or (LS[0] == LT[0] and LS[0].edge_names == LT[0].edge_names):
        p = 1
        while p < min(len(LS), len(LT)) and LS[p] is LT[p]:
            p += 1
        arcs = edge_arcs(S)
        for X in reversed(LS[p:]):
            arcs = track_back(arcs, X)
        for X in LT[p:]:
            arcs = track_many(arcs, X.parent, X.move, X)
        return arcs
    if S.is_labeled_disk() and T.is_labeled_disk():
        ls = {S.vertex_label(v) for v in range(S.num_vertices)}
        lt = {T.vertex_label(v) for v in range(T.num_vertices)}
        if ls == lt and S.num_triangles == T.num_triangles:
            return [polygon_arc(T, *S.edge_endpoints(e)) for e in S.edges]
    raise IncompatibleSurfaces("triangulations share neither a flip history nor a labelled polygon")


def state_key(X: Triangulation, ref: Triangulation) -> frozenset:
    """Isotopy-class key of ``X`` in the frame of ``ref``."""
    if X.is_labeled_disk() and ref.is_labeled_disk():
        return frozenset(X.edge_label_pair(e) for e in X.edges)
    return frozenset(arc_key(a, ref) for a in relative_arcs(X, ref))


def same_triangulation(S: Triangulation, T: Triangulation) -> bool:
    return all(not a.sides for a in relative_arcs(S, T))


# ---------------------------------------------------------------- neighbours

def independent_moves(T: Triangulation, edges: Iterable[int] | None = None) -> Iterator[FlipMove]:
    """Every non-empty set of flippable edges with pairwise triangle-disjoint quadrilaterals."""
    cand = [e for e in (T.edges if edges is None else edges) if flippable(T, e)]
    quads = {e: set(quad_triangles(T, e)) for e in cand}

    def rec(i, chosen, used):
        if i == len(cand):
            if chosen:
                yield FlipMove(chosen)
            return
        yield from rec(i + 1, chosen, used)
        e = cand[i]
        if not quads[e] & used:
            yield from rec(i + 1, chosen + [e], used | quads[e])

    yield from rec(0, [], set())


def neighbors(T: Triangulation, simultaneous: bool = True) -> Iterator[tuple[FlipMove, Triangulation]]:
    moves = independent_moves(T) if simultaneous else \
        (FlipMove([e]) for e in T.edges if flippable(T, e))
    for m in moves:
        yield m, apply_simultaneous_flip(T, m)


def bfs_ball(S: Triangulation, radius: int | None = None, simultaneous: bool = True,
             max_states: int = 200000) -> tuple[nx.Graph, dict]:
    """
    Breadth-first exploration of the flip graph around ``S``.

    Returns the graph on state keys (node attribute ``dist``) and a map from
    key to a representative triangulation descending from ``S``.
    """
    k0 = state_key(S, S)
    G = nx.Graph()
    G.add_node(k0, dist=0)
    reps = {k0: S}
    frontier = [S]
    d = 0
    while frontier and (radius is None or d < radius):
        nxt = []
        for X in frontier:
            kx = state_key(X, S)
            for _, Y in neighbors(X, simultaneous):
                ky = state_key(Y, S)
                if ky not in reps:
                    if len(reps) >= max_states:
                        raise ExceedsCutoff("state budget exhausted")
                    reps[ky] = Y
                    G.add_node(ky, dist=d + 1)
                    nxt.append(Y)
                if ky in G and G.nodes[ky]["dist"] <= d + 1:
                    G.add_edge(kx, ky)
        frontier = nxt
        d += 1
    if radius is not None:
        # edges between two boundary states of the ball
        for X in frontier:
            kx = state_key(X, S)
            for _, Y in neighbors(X, simultaneous):
                ky = state_key(Y, S)
                if ky in G:
                    G.add_edge(kx, ky)
    return G, reps


def bfs_distance(S: Triangulation, T: Triangulation, cutoff: int = 64,
                 simultaneous: bool = True) -> int:
    """Exact simultaneous-flip distance, or ``ExceedsCutoff``."""
    target = state_key(T, S)
    k0 = state_key(S, S)
    if target == k0:
        return 0
    seen = {k0}
    frontier = [S]
    for d in range(1, cutoff + 1):
        nxt = []
        for X in frontier:
            for _, Y in neighbors(X, simultaneous):
                ky = state_key(Y, S)
                if ky == target:
                    return d
                if ky not in seen:
                    seen.add(ky)
                    nxt.append(Y)
        if not nxt:
            break
        frontier = nxt
    raise ExceedsCutoff(f"distance exceeds {cutoff}")


def bfs_geodesic(S: Triangulation, T: Triangulation, cutoff: int = 64) -> list[Triangulation]:
    """A shortest path ``[S, ..., X]`` with ``X`` isotopic to ``T`` (each step one move)."""
    target = state_key(T, S)
    k0 = state_key(S, S)
    if target == k0:
        return [S]
    seen = {k0}
    frontier = [S]
    for _ in range(cutoff):
        nxt = []
        for X in frontier:
            for _, Y in neighbors(X):
                ky = state_key(Y, S)
                if ky == target:
                    return Y.lineage()[len(S.lineage()) - 1:]
                if ky not in seen:
                    seen.add(ky)
                    nxt.append(Y)
        frontier = nxt
    raise ExceedsCutoff(f"distance exceeds {cutoff}")


# ---------------------------------------------------------------- making arcs edges

def _reducing_edge(T: Triangulation, a: Arc) -> int | None:
    """An edge crossed by ``a`` whose flip lowers ``i(a, T)``: outermost crossings first."""
    order = [a.sides[0], a.sides[-1]] + list(a.sides[1:-1])
    tried = set()
    for s in order:
        e = T.edge_of[s]
        if e in tried or not flippable(T, e):
            continue
        tried.add(e)
        if s in (a.sides[0], a.sides[-1]):
            return e
        (b,) = track_many([a], T, FlipMove([e]))
        if len(b.sides) < len(a.sides):
            return e
    return None


def make_edge(T: Triangulation, a: Arc, carry: Sequence[Arc] = ()) -> tuple[Triangulation, PathCertificate, list[Arc]]:
    """
    Flip edges crossed by ``a`` until it becomes an edge.  Returns the new
    triangulation, the certificate, and ``carry`` tracked along.
    """
    start = T
    moves = []
    arcs = [reduce_arc(a, T)] + list(carry)
    while arcs[0].sides:
        e = _reducing_edge(T, arcs[0])
        if e is None:
            raise Stuck("no flippable edge reduces the intersection with the arc")
        m = FlipMove([e])
        T2 = apply_simultaneous_flip(T, m)
        arcs = track_many(arcs, T, m, T2)
        T = T2
        moves.append(m)
    return T, PathCertificate(start, tuple(moves), T), arcs[1:]


def realize(T: Triangulation, targets: Sequence[Arc], carry: Sequence[Arc] = (),
            parallel: bool = True) -> tuple[Triangulation, list[FlipMove], list[Arc], list[Arc]]:
    """
    Flip ``T`` until every target arc (pairwise disjoint, relative to ``T``)
    is an edge.  With ``parallel`` one flip per unfinished target is batched
    into each simultaneous move whenever their quadrilaterals are disjoint.
    """
    start_T, start_targets, start_carry = T, list(targets), list(carry)
    budget = 4 * sum(len(t.sides) for t in targets) + 4
    for mode in ((True, False) if parallel else (False,)):
        T, tg, cr = start_T, [reduce_arc(x, start_T) for x in start_targets], list(start_carry)
        moves: list[FlipMove] = []
        ok = True
        while any(x.sides for x in tg):
            chosen, used = [], set()
            for x in tg:
                if not x.sides:
                    continue
                e = _reducing_edge(T, x)
                if e is None:
                    if mode:
                        continue
                    raise Stuck("no flippable edge reduces the intersection with a target arc")
                q = set(quad_triangles(T, e))
                if e not in chosen and not q & used:
                    chosen.append(e)
                    used |= q
                if not mode:
                    break
            if not chosen:
                ok = False
                break
            m = FlipMove(chosen)
            T2 = apply_simultaneous_flip(T, m)
            both = track_many(tg + cr, T, m, T2)
            tg, cr = both[:len(tg)], both[len(tg):]
            T = T2
            moves.append(m)
            if len(moves) > budget:
                ok = False
                break
        if ok:
            return T, moves, tg, cr
    raise Stuck("could not realize the target arcs")


def intersection_via_make_edge(a: Arc, b: Arc, T: Triangulation) -> int:
    """Oracle: flip until ``a`` is an edge, then count how often ``b`` crosses it."""
    T2, _, (b2,) = make_edge(T, a, [b])
    (a2,) = relative_arcs_single(a, T, T2)
    e = arc_edge(a2, T2)
    return sum(1 for x in b2.crossings(T2) if x == e)


def relative_arcs_single(a: Arc, T: Triangulation, X: Triangulation) -> list[Arc]:
    """Track one arc from ``T`` to its descendant ``X``."""
    arcs = [a]
    chain = X.lineage()
    idx = next(i for i, Y in enumerate(chain) if Y is T)
    for Y in chain[idx + 1:]:
        arcs = track_many(arcs, Y.parent, Y.move, Y)
    return arcs


# ---------------------------------------------------------------- certificates

def replay(start: Triangulation, moves: Sequence[FlipMove]) -> Triangulation:
    T = start
    for m in moves:
        T = apply_simultaneous_flip(T, m)
    return T


def verify_certificate(cert: PathCertificate) -> bool:
    """Replay every move from the start and check the end is reached."""
    try:
        T = cert.start
        for m in cert.moves:
            validate_move(T, m)
            T = apply_simultaneous_flip(T, m)
    except InvalidMove:
        return False
    if T.is_labeled_disk() and cert.end.is_labeled_disk():
        return T.diagonals() == cert.end.diagonals()
    try:
        return same_triangulation(cert.end, T)
    except IncompatibleSurfaces:
        return False
