"""
Combing a triangulation along an oriented multiarc.

Every edge of ``T`` is cut by the multiarc into subarcs.  A subarc ending on
the interior of an arc of the multiarc is extended along that arc, following
its orientation, up to its terminal vertex.  The extended subarcs together
with the multiarc form a triangulation containing the multiarc.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .arcs import (Arc, Multiarc, arc_key, check_disjoint, compare_on_side,
                   edge_arc, reduce_arc, segments, track_many)
from .errors import FlipGraphError, NotAdjacent
from .flips import PathCertificate, realize, relative_arcs
from .quads import FlipMove, apply_simultaneous_flip, validate_move
from .triangulation import Triangulation, next_side

__all__ = ["CombingResult", "comb_along", "comb_arcs", "check_lipschitz", "adjacent_move"]


@dataclass(frozen=True)
class CombingResult:
    projected: Triangulation
    arc_images: dict            # edge id of T -> tuple of image arcs (relative to T)
    arcs: tuple[Arc, ...]       # every arc of the projection, relative to T
    certificate: PathCertificate


def _crossings_by_edge(T: Triangulation, mu: Sequence[Arc]) -> dict[int, list[tuple[int, int]]]:
    segs = [segments(a, T) for a in mu]
    found: dict[int, list[tuple[int, int]]] = {}
    for i, a in enumerate(mu):
        for j, s in enumerate(a.sides):
            found.setdefault(T.edge_of[s], []).append((i, j))
    for e, pts in found.items():
        ref = T.edge_sides(e)[0]

        def cmp(p, q, ref=ref):
            return compare_on_side((segs[p[0]], p[1]), (segs[q[0]], q[1]), ref, T)

        pts.sort(key=functools.cmp_to_key(cmp))
    return found


def comb_arcs(T: Triangulation, mu: Iterable[Arc]) -> tuple[list[Arc], dict]:
    """
    The arcs of the combed triangulation relative to ``T`` (without flipping),
    and the image of every edge of ``T``.
    """
    mu = [reduce_arc(a, T) for a in mu]
    check_disjoint(mu, T)
    order = _crossings_by_edge(T, mu)
    images: dict[int, tuple[Arc, ...]] = {}

    def after(p):
        a = mu[p[0]]
        return T.gluing[a.sides[p[1]]]

    def tail(p):
        a = mu[p[0]]
        return list(a.sides[p[1] + 1:]), a.end

    def reverse_tail(p):
        a = mu[p[0]]
        return a.end, [T.gluing[x] for x in reversed(a.sides[p[1] + 1:])]

    for e in T.edges:
        pts = order.get(e, [])
        if not pts:
            images[e] = (edge_arc(T, e),)
            continue
        ref = T.edge_sides(e)[0]
        ends = [None] + pts + [None]
        out = []
        for left, right in zip(ends, ends[1:]):
            if left is None:
                side = after(right)
                start = ref if side == ref else next_side(side)
                sides = []
            else:
                start, sides = reverse_tail(left)
                side = after(left)
            if right is None:
                end = next_side(ref) if side == ref else side
            else:
                if after(right) != side:
                    sides.append(side)
                more, end = tail(right)
                sides += more
            img = reduce_arc(Arc(start, sides, end), T)
            if not img.is_trivial():
                out.append(img)
        images[e] = tuple(out)

    keys = {}
    for a in mu:
        keys.setdefault(arc_key(a, T), a)
    for e in T.edges:
        for a in images[e]:
            keys.setdefault(arc_key(a, T), a)
    arcs = list(keys.values())
    if len(arcs) != T.num_edges:
        raise FlipGraphError(f"combing produced {len(arcs)} arcs, expected {T.num_edges}")
    return arcs, images


def comb_along(T: Triangulation, mu: Multiarc | Iterable[Arc], parallel: bool = True) -> CombingResult:
    """
    Project ``T`` to a triangulation containing the oriented multiarc ``mu``
    (arcs relative to ``T``).  The projection is reached from ``T`` by flips,
    so it stays related to ``T``.
    """
    mu = list(mu)
    arcs, images = comb_arcs(T, mu)
    targets = [a for a in arcs if a.sides]
    P, moves, _, _ = realize(T, targets, parallel=parallel)
    return CombingResult(P, images, tuple(arcs), PathCertificate(T, tuple(moves), P))


def adjacent_move(T: Triangulation, T2: Triangulation) -> FlipMove | None:
    """The simultaneous flip taking ``T`` to ``T2``; ``None`` if equal; raises if not adjacent."""
    rel = relative_arcs(T2, T)
    crossed = sorted({T.edge_of[s] for a in rel for s in a.sides})
    if not crossed:
        return None
    m = FlipMove(crossed)
    try:
        validate_move(T, m)
    except FlipGraphError:
        raise NotAdjacent("triangulations are not related by one simultaneous flip") from None
    X = apply_simultaneous_flip(T, m)
    back = track_many(rel, T, m, X)
    if any(a.sides for a in back):
        raise NotAdjacent("triangulations are not related by one simultaneous flip")
    return m


def check_lipschitz(T: Triangulation, T2: Triangulation, mu: Iterable[Arc]) -> bool:
    """Whether combing ``T`` and an adjacent ``T2`` along ``mu`` gives equal or adjacent results."""
    mu = list(mu)
    m = adjacent_move(T, T2)
    P1 = comb_along(T, mu).projected
    if m is None:
        return True
    X = apply_simultaneous_flip(T, m)
    P2 = comb_along(X, track_many(mu, T, m, X)).projected
    try:
        adjacent_move(P1, P2)
    except NotAdjacent:
        return False
    return True

