"""
Arcs relative to a triangulation.

An arc is stored as a path in the dual graph: the corner it leaves from, the
sides it exits through in order, and the corner it arrives at.  A path with no
immediate backtrack and no crossing next to its own endpoint is a geodesic of
the dual tree in the universal cover, hence in minimal position with the
triangulation; it is the unique reduced representative of its isotopy class.
An arc crossing nothing runs along the side between its two corners, i.e. it
is an edge.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import FlipGraphError, NotDisjoint, NotReduced, Unrealizable, UnknownEdge
from .quads import FlipLayout, FlipMove, corner_pos, flip_layout, side_pos, validate_move
from .triangulation import BOUNDARY, Triangulation, next_side, prev_side


@dataclass(frozen=True)
class Arc:
    start: int                 # corner id
    sides: tuple[int, ...]     # exit sides, in order
    end: int                   # corner id

    def __init__(self, start: int, sides: Iterable[int], end: int):
        object.__setattr__(self, "start", int(start))
        object.__setattr__(self, "sides", tuple(int(s) for s in sides))
        object.__setattr__(self, "end", int(end))

    def __len__(self):
        return len(self.sides)

    def crossings(self, T: Triangulation) -> list[int]:
        """Edge ids crossed, in order."""
        return [T.edge_of[s] for s in self.sides]

    def endpoints(self, T: Triangulation) -> tuple[str, str]:
        return T.corner_labels[self.start], T.corner_labels[self.end]

    def reversed(self, T: Triangulation) -> "Arc":
        return Arc(self.end, [T.gluing[s] for s in reversed(self.sides)], self.start)

    def is_trivial(self) -> bool:
        return not self.sides and self.start == self.end


# ---------------------------------------------------------------- segments
# A segment is (triangle, entry position, exit position).

def segments(a: Arc, T: Triangulation) -> list[tuple[int, int, int]]:
    """Triangle-by-triangle decomposition; raises ``Unrealizable`` on bad input."""
    n = len(T.gluing)
    if not (0 <= a.start < n and 0 <= a.end < n):
        raise Unrealizable("endpoint corner out of range")
    tri, entry = a.start // 3, corner_pos(a.start)
    out = []
    for s in a.sides:
        if not 0 <= s < n or s // 3 != tri:
            raise Unrealizable(f"side {s} does not lie on the current triangle {tri}")
        p = T.gluing[s]
        if p == BOUNDARY:
            raise Unrealizable(f"arc crosses boundary side {s}")
        out.append((tri, entry, side_pos(s)))
        tri, entry = p // 3, side_pos(p)
    if a.end // 3 != tri:
        raise Unrealizable("arc does not end on a corner of the last triangle entered")
    out.append((tri, entry, corner_pos(a.end)))
    return out


def arc_from_segments(segs: Sequence[tuple[int, int, int]]) -> Arc:
    t0, e0, _ = segs[0]
    tn, _, xn = segs[-1]
    if e0 % 2 or xn % 2:
        raise Unrealizable("path does not start and end at corners")
    return Arc(3 * t0 + e0 // 2, [3 * t + x // 2 for t, _, x in segs[:-1]], 3 * tn + xn // 2)


# ---------------------------------------------------------------- edges as arcs

def edge_arc(T: Triangulation, e: int, reverse: bool = False) -> Arc:
    """Edge ``e`` as an arc along its lowest-numbered side."""
    s = T.edge_sides(e)[0]
    a = Arc(s, (), next_side(s))
    return Arc(a.end, (), a.start) if reverse else a


def edge_arcs(T: Triangulation) -> list[Arc]:
    return [edge_arc(T, e) for e in T.edges]


def arc_edge(a: Arc, T: Triangulation) -> int | None:
    """The edge an arc with no crossings runs along (``None`` otherwise)."""
    if a.sides or a.start == a.end:
        return None
    t, c, d = a.start // 3, a.start % 3, a.end % 3
    side = 3 * t + (c if d == (c + 1) % 3 else d)
    return T.edge_of[side]


def _normalize_edge(a: Arc, T: Triangulation) -> Arc:
    e = arc_edge(a, T)
    s = 3 * (a.start // 3) + (a.start % 3 if a.end % 3 == (a.start % 3 + 1) % 3 else a.end % 3)
    forward = a.start == s      # runs along side s in its own direction
    ref = T.edge_sides(e)[0]
    if ref != s:
        forward = not forward   # glued side runs the other way
    return edge_arc(T, e, reverse=not forward)


# ---------------------------------------------------------------- reduction

def is_reduced(a: Arc, T: Triangulation) -> bool:
    segments(a, T)
    for x, y in zip(a.sides, a.sides[1:]):
        if T.gluing[x] == y:
            return False
    if a.sides:
        if a.sides[0] % 3 != (a.start + 1) % 3:
            return False
        if T.gluing[a.sides[-1]] % 3 != (a.end + 1) % 3:
            return False
        return True
    return a == _normalize_edge(a, T) if a.start != a.end else False


def reduce_arc(a: Arc, T: Triangulation) -> Arc:
    """
    Remove backtracks and end bigons.  The result is the unique reduced
    representative; a null-homotopic input comes back with ``is_trivial()``.
    """
    segments(a, T)
    start, end, sides = a.start, a.end, list(a.sides)
    changed = True
    while changed:
        changed = False
        stack: list[int] = []
        for s in sides:
            if stack and T.gluing[stack[-1]] == s:
                stack.pop()
                changed = True
            else:
                stack.append(s)
        sides = stack
        if sides:
            s = sides[0]
            c, k = start % 3, s % 3
            if k == c:
                start = next_side(T.gluing[s])
                sides.pop(0)
                changed = True
            elif (k + 1) % 3 == c:
                start = T.gluing[s]
                sides.pop(0)
                changed = True
        if sides:
            s = sides[-1]
            p = T.gluing[s]
            c, k = end % 3, p % 3
            if k == c:
                end = next_side(s)
                sides.pop()
                changed = True
            elif (k + 1) % 3 == c:
                end = s
                sides.pop()
                changed = True
    out = Arc(start, sides, end)
    if not sides and start != end:
        out = _normalize_edge(out, T)
    return out


def arc_key(a: Arc, T: Triangulation) -> tuple:
    """Hashable isotopy-class key of a reduced arc, independent of direction."""
    if not a.sides:
        e = arc_edge(a, T)
        if e is None:
            raise FlipGraphError("trivial arc has no key")
        return ("e", e)
    r = a.reversed(T)
    return min(("w", a.start, a.sides, a.end), ("w", r.start, r.sides, r.end))


def oriented_key(a: Arc, T: Triangulation) -> tuple:
    if not a.sides:
        return ("e", arc_edge(a, T), a.start == edge_arc(T, arc_edge(a, T)).start)
    return ("w", a.start, a.sides, a.end)


def crossings_with_triangulation(a: Arc, T: Triangulation) -> int:
    """``i(a, T)`` for a reduced arc."""
    if not is_reduced(a, T):
        raise NotReduced("arc is not reduced with respect to T")
    return len(a.sides)


# ---------------------------------------------------------------- lifts

def _classify(p: int, x: int, y: int) -> str:
    if p == x or p == y:
        return "S"
    return "R" if (p - x) % 6 < (y - x) % 6 else "L"


@dataclass(frozen=True)
class LinkedLift:
    """A lift of B meeting the fixed lift of A, seen along their common strip."""
    a_start: int        # first index of A's segments in the common strip
    a_stop: int         # last index
    b_start: int
    direction: int      # +1: B runs along A, -1: against, 0: single triangle
    classes: tuple[str, str]    # side of A holding B's outer features (start end, stop end)

    @property
    def crossing(self) -> bool:
        return set(self.classes) == {"R", "L"}

    @property
    def b_left_to_right(self) -> bool:
        """Whether B, in its own direction, passes from A's left to A's right."""
        first, last = self.classes
        if self.direction >= 0:
            return (first, last) == ("L", "R")
        return (first, last) == ("R", "L")


def linked_lifts(A: Sequence[tuple[int, int, int]], B: Sequence[tuple[int, int, int]],
                 cyclic: bool = False) -> Iterator[LinkedLift]:
    """
    Enumerate the lifts of B sharing at least one triangle with a fixed lift of
    A.  ``B`` may be the cyclic segment list of a closed curve.
    """
    nB = len(B)
    by_tri: dict[int, list[int]] = {}
    for j, seg in enumerate(B):
        by_tri.setdefault(seg[0], []).append(j)

    def bseg(j):
        return B[j % nB] if cyclic else B[j]

    def has(j):
        return cyclic or 0 <= j < nB

    for i, (ta, xa, ya) in enumerate(A):
        for j in by_tri.get(ta, ()):
            _, xb, yb = B[j]
            if xa % 2 == 1 and xa in (xb, yb):
                continue        # the strip already started before i
            if ya % 2 == 1 and ya == yb:
                direction = 1
            elif ya % 2 == 1 and ya == xb:
                direction = -1
            else:
                direction = 0
            i1, j1 = i, j
            while direction and A[i1][2] % 2 == 1:
                exit_side = A[i1][2]
                if direction == 1 and bseg(j1)[2] == exit_side and has(j1 + 1):
                    i1, j1 = i1 + 1, j1 + 1
                elif direction == -1 and bseg(j1)[1] == exit_side and has(j1 - 1):
                    i1, j1 = i1 + 1, j1 - 1
                else:
                    break
            if direction == 1:
                p_first, p_last = xb, bseg(j1)[2]
            elif direction == -1:
                p_first, p_last = yb, bseg(j1)[1]
            else:
                p_first, p_last = xb, yb
            c_first = _classify(p_first, xa, ya)
            c_last = _classify(p_last, A[i1][1], A[i1][2])
            yield LinkedLift(i, i1, j, direction, (c_first, c_last))


def intersection_of_arcs(a: Arc, b: Arc, T: Triangulation) -> int:
    """
    Geometric intersection number of the interiors of two reduced arcs,
    counted as lifts of ``b`` whose endpoints separate those of a fixed lift
    of ``a``.
    """
    A, B = segments(a, T), segments(b, T)
    return sum(1 for lift in linked_lifts(A, B) if lift.crossing)


def total_intersection(a: Arc, arcs: Iterable[Arc], T: Triangulation) -> int:
    return sum(intersection_of_arcs(a, b, T) for b in arcs)


# ---------------------------------------------------------------- multiarcs

@dataclass(frozen=True)
class Multiarc:
    """Arcs with pairwise disjoint interiors; each arc's direction is its orientation."""
    arcs: tuple[Arc, ...]

    def __init__(self, arcs: Iterable[Arc] = ()):
        object.__setattr__(self, "arcs", tuple(arcs))

    def __iter__(self):
        return iter(self.arcs)

    def __len__(self):
        return len(self.arcs)


def make_multiarc(arcs: Iterable[Arc], T: Triangulation, check: bool = True) -> Multiarc:
    arcs = [reduce_arc(a, T) for a in arcs]
    if check:
        check_disjoint(arcs, T)
    return Multiarc(arcs)


def check_disjoint(arcs: Sequence[Arc], T: Triangulation) -> None:
    keys = [arc_key(a, T) for a in arcs]
    if len(set(keys)) != len(keys):
        raise NotDisjoint("multiarc contains the same arc twice")
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            if intersection_of_arcs(arcs[i], arcs[j], T):
                raise NotDisjoint(f"arcs {i} and {j} intersect in their interiors")


# ---------------------------------------------------------------- flips

def _retriangulate(a: Arc, quad_of: dict, src: dict, dst_where: dict) -> list[tuple[int, int, int]]:
    """Re-express the segments of ``a`` after swapping the diagonals of the quads."""
    segs = a
    out = []
    i = 0
    while i < len(segs):
        t, x, y = segs[i]
        if t not in quad_of:
            out.append(segs[i])
            i += 1
            continue
        e, f1 = src[(t, x)]
        j = i
        while src[(segs[j][0], segs[j][2])][1] == "D":
            j += 1
        _, f2 = src[(segs[j][0], segs[j][2])]
        out.extend(_emit(e, f1, f2, dst_where))
        i = j + 1
    return out


def _emit(e: int, f1: str, f2: str, where: dict) -> list[tuple[int, int, int]]:
    at1 = dict(where[(e, f1)])
    at2 = dict(where[(e, f2)])
    common = sorted(set(at1) & set(at2))
    if common:
        t = common[0]
        return [(t, at1[t], at2[t])]
    (t1, p1), = at1.items()
    (t2, p2), = at2.items()
    d1 = dict(where[(e, "D")])
    return [(t1, p1, d1[t1]), (t2, d1[t2], p2)]


def track_through_flip(a: Arc, T: Triangulation, m: FlipMove | Iterable[int]) -> Arc:
    """The isotopic arc, reduced, relative to ``apply_simultaneous_flip(T, m)``."""
    from .quads import apply_simultaneous_flip
    m = m if isinstance(m, FlipMove) else FlipMove(m)
    validate_move(T, m)
    lay = flip_layout(T, m)
    T2 = apply_simultaneous_flip(T, m)
    return reduce_arc(arc_from_segments(_retriangulate(segments(a, T), lay.quad_of, lay.old, lay.new_where)), T2)


def track_many(arcs: Sequence[Arc], T: Triangulation, m: FlipMove, T2: Triangulation | None = None) -> list[Arc]:
    from .quads import apply_simultaneous_flip
    lay = flip_layout(T, m)
    T2 = T2 if T2 is not None else apply_simultaneous_flip(T, m)
    return [reduce_arc(arc_from_segments(_retriangulate(segments(a, T), lay.quad_of, lay.old, lay.new_where)), T2)
            for a in arcs]


def track_back(arcs: Sequence[Arc], T2: Triangulation) -> list[Arc]:
    """Arcs relative to ``T2`` re-expressed relative to ``T2.parent``."""
    P, m = T2.parent, T2.move
    if P is None:
        raise FlipGraphError("triangulation has no parent")
    lay = flip_layout(P, m)
    return [reduce_arc(arc_from_segments(_retriangulate(segments(a, T2), lay.quad_of, lay.new, lay.old_where)), P)
            for a in arcs]


# ---------------------------------------------------------------- order along an edge

def _strand_forward(segs, j):
    """Segments after crossing ``j``."""
    return segs[j + 1:]


def _strand_backward(segs, j):
    """Segments before crossing ``j``, walked backwards with entry/exit swapped."""
    return [(t, y, x) for (t, x, y) in reversed(segs[:j + 1])]


def _walk(SA, SB) -> int:
    for (ta, xa, ya), (tb, xb, yb) in zip(SA, SB):
        assert ta == tb and xa == xb
        fa, fb = (ya - xa) % 6, (yb - xb) % 6
        if fa != fb:
            return -1 if fa > fb else 1
        if ya % 2 == 0:
            return 0
    return 0


def crossing_strands(segs, j, s: int, T: Triangulation):
    """For crossing ``j`` of a path over the edge of side ``s``: strands entering through ``s`` and through its partner."""
    fwd, bwd = _strand_forward(segs, j), _strand_backward(segs, j)
    exit_side = 3 * segs[j][0] + segs[j][2] // 2
    if exit_side == s:
        return bwd, fwd
    return fwd, bwd


def compare_on_side(A, B, s: int, T: Triangulation) -> int:
    """
    Order of two crossing points on side ``s`` (coordinate from corner ``s%3``
    towards the next corner): ``-1`` if A comes first.  ``A``/``B`` are
    ``(segments, crossing index)`` pairs.
    """
    a_in, a_out = crossing_strands(A[0], A[1], s, T)
    b_in, b_out = crossing_strands(B[0], B[1], s, T)
    r = _walk(a_in, b_in)
    if r:
        return r
    return -_walk(a_out, b_out)


# ---------------------------------------------------------------- input helpers

def arc_from_crossings(T: Triangulation, start_label: str, end_label: str,
                       edges: Sequence[int]) -> Arc:
    """Realize an arc given endpoint labels and the edge ids it crosses."""
    found: list[Arc] = []

    def extend(c0, tri, entry, i, sides):
        if len(found) > 64:
            return
        if i == len(edges):
            for c in range(3):
                corner = 3 * tri + c
                if T.corner_labels[corner] == end_label and not (not sides and corner == c0):
                    found.append(Arc(c0, sides, corner))
            return
        for k in range(3):
            s = 3 * tri + k
            if T.edge_of[s] == edges[i] and T.gluing[s] != BOUNDARY:
                p = T.gluing[s]
                extend(c0, p // 3, p, i + 1, sides + [s])

    for e in edges:
        if not 0 <= e < T.num_edges:
            raise UnknownEdge(f"unknown edge {e!r}")
    for c0 in range(len(T.gluing)):
        if T.corner_labels[c0] == start_label:
            extend(c0, c0 // 3, None, 0, [])
    if not found:
        raise Unrealizable(f"no path from {start_label} to {end_label} crossing {list(edges)}")
    reduced = [f for f in found if is_reduced(f, T)]
    return sorted(reduced or found, key=lambda x: (x.start, x.sides, x.end))[0]
