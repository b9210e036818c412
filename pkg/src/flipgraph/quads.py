"""
Quadrilateral bookkeeping for flips.

Flipping edge ``e`` with sides ``s = (t, k)`` and ``s' = (t', k')`` (``s < s'``)
names the quadrilateral features once and records where each one lives before
and after the flip::

        c                          c
       / \\                        /|\\
   X2 / t \\ X1                X2 / | \\ X1
     /     \\                     /  |  \\
    a---e---b        ->        a t  |e' t' b
     \\     /                     \\  |  /
   Y1 \\ t'/ Y2                Y1 \\ | / Y2
       \\ /                         \\|/
        d                          d

Corners are ``a, b, c, d``; boundary sides ``X1, X2, Y1, Y2``; the diagonal is
``D``.  Positions inside a triangle are ``2*c`` for corner ``c`` and
``2*k + 1`` for side ``k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import NotFlippable, QuadrilateralsOverlap, UnknownEdge, InvalidMove
from .triangulation import BOUNDARY, Triangulation


def corner_pos(c: int) -> int:
    return 2 * (c % 3)


def side_pos(k: int) -> int:
    return 2 * (k % 3) + 1


@dataclass(frozen=True)
class FlipMove:
    """A set of edges flipped simultaneously."""
    edges: frozenset

    def __init__(self, edges: Iterable[int]):
        object.__setattr__(self, "edges", frozenset(int(e) for e in edges))

    def __iter__(self):
        return iter(sorted(self.edges))

    def __len__(self):
        return len(self.edges)

    def __repr__(self):
        return f"FlipMove({sorted(self.edges)})"


def flippable(T: Triangulation, e: int) -> bool:
    """An edge can be flipped iff it is interior and bounds two distinct triangles."""
    sides = T.edge_sides(e)
    return len(sides) == 2 and sides[0] // 3 != sides[1] // 3


def quad_triangles(T: Triangulation, e: int) -> tuple[int, int]:
    s, s2 = T.edge_sides(e)
    return s // 3, s2 // 3


def validate_move(T: Triangulation, m: FlipMove) -> None:
    if not isinstance(m, FlipMove):
        m = FlipMove(m)
    if not m.edges:
        raise InvalidMove("a flip move needs at least one edge")
    used: dict[int, int] = {}
    for e in sorted(m.edges):
        if not 0 <= e < T.num_edges:
            raise UnknownEdge(f"unknown edge {e!r}")
        if not flippable(T, e):
            raise NotFlippable(f"edge {T.edge_names[e]} does not bound two distinct triangles")
        for t in quad_triangles(T, e):
            if t in used:
                raise QuadrilateralsOverlap(
                    f"quadrilaterals of {T.edge_names[used[t]]} and {T.edge_names[e]} share triangle {T.triangle_names[t]}")
            used[t] = e


@dataclass(frozen=True)
class FlipLayout:
    """Feature tables of every flipped quadrilateral, before and after."""
    old: dict           # (triangle, pos) -> (edge, feature name)
    new: dict
    old_where: dict     # (edge, feature name) -> list of (triangle, pos)
    new_where: dict
    quad_of: dict       # triangle -> flipped edge


def _invert(table: dict) -> dict:
    out: dict = {}
    for key, val in sorted(table.items()):
        out.setdefault(val, []).append(key)
    return out


def flip_layout(T: Triangulation, m: FlipMove) -> FlipLayout:
    old, new, quad_of = {}, {}, {}
    for e in m:
        s, s2 = T.edge_sides(e)
        t, k = divmod(s, 3)
        u, j = divmod(s2, 3)
        quad_of[t] = quad_of[u] = e
        for off, name in enumerate("abc"):
            old[(t, corner_pos(k + off))] = (e, name)
        for off, name in enumerate(("D", "X1", "X2")):
            old[(t, side_pos(k + off))] = (e, name)
        for off, name in enumerate("bad"):
            old[(u, corner_pos(j + off))] = (e, name)
        for off, name in enumerate(("D", "Y1", "Y2")):
            old[(u, side_pos(j + off))] = (e, name)
        # t becomes (d, c, a) with sides D, X2, Y1; t' becomes (c, d, b) with sides D, Y2, X1
        for off, name in enumerate("dca"):
            new[(t, corner_pos(k + off))] = (e, name)
        for off, name in enumerate(("D", "X2", "Y1")):
            new[(t, side_pos(k + off))] = (e, name)
        for off, name in enumerate("cdb"):
            new[(u, corner_pos(j + off))] = (e, name)
        for off, name in enumerate(("D", "Y2", "X1")):
            new[(u, side_pos(j + off))] = (e, name)
    return FlipLayout(old, new, _invert(old), _invert(new), quad_of)


def apply_simultaneous_flip(T: Triangulation, m: FlipMove | Iterable[int]) -> Triangulation:
    """
    Replace every edge of ``m`` by the other diagonal of its quadrilateral.

    The new diagonal keeps the edge id of the old one, and the result records
    ``T`` as its parent.
    """
    if not isinstance(m, FlipMove):
        m = FlipMove(m)
    validate_move(T, m)
    lay = flip_layout(T, m)
    n = len(T.gluing)
    # content[new side] = old side occupying it, or None for the new diagonal
    content: dict[int, int | None] = {}
    diag: dict[int, list[int]] = {}
    for (t, pos), (e, name) in lay.new.items():
        if pos % 2 == 0:
            continue
        s_new = 3 * t + pos // 2
        if name == "D":
            content[s_new] = None
            diag.setdefault(e, []).append(s_new)
        else:
            (ot, opos), = [key for key in lay.old_where[(e, name)]]
            content[s_new] = 3 * ot + opos // 2
    relocate = {old: new for new, old in content.items() if old is not None}
    gluing = list(T.gluing)
    edge_of = list(T.edge_of)
    labels = list(T.corner_labels)
    for s_new, s_old in content.items():
        if s_old is None:
            e = next(x for x, pair in diag.items() if s_new in pair)
            a, b = diag[e]
            gluing[s_new] = b if s_new == a else a
            edge_of[s_new] = e
        else:
            p = T.gluing[s_old]
            q = BOUNDARY if p == BOUNDARY else relocate.get(p, p)
            gluing[s_new] = q
            if q != BOUNDARY:
                gluing[q] = s_new
            edge_of[s_new] = T.edge_of[s_old]
    for (t, pos), (e, name) in lay.new.items():
        if pos % 2 == 0:
            (ot, opos) = lay.old_where[(e, name)][0]
            labels[3 * t + pos // 2] = T.corner_labels[3 * ot + opos // 2]
    assert len(gluing) == n
    return Triangulation(tuple(gluing), tuple(edge_of), tuple(labels),
                         T.triangle_names, T.edge_names, parent=T, move=m)
