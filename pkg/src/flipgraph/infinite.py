"""
Finitely described infinite triangulations.

A periodic triangulation repeats one cell along the integers.  Side labels may
carry a cell offset (``l@+1`` is side ``l`` of the next cell).  Only finite
windows of cells are ever materialized.

The flute model used throughout is a bi-infinite chain of annuli.  Cell ``i``
holds two triangles glued along ``c[i]`` and ``d[i]``; its two boundary loops
``l[i]`` and ``l[i+1]`` carry the punctures ``v[i]`` and ``v[i+1]``.  The core
curve of cell ``i`` crosses ``c[i]`` and ``d[i]`` once each, and twisting the
cell along it moves the pair of spanning arcs ``c[i], d[i]`` by one winding.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .arcs import Arc, edge_arc, intersection_of_arcs, linked_lifts, reduce_arc, segments
from .errors import (FlipGraphError, InfiniteCornerOrbit, InterfaceMismatch, NotReduced,
                     UnknownEdge, UnsupportedDescriptor, WindowTooSmall)
from .flips import PathCertificate, realize
from .quads import FlipMove, apply_simultaneous_flip, side_pos
from .triangulation import BOUNDARY, Triangulation, build_from_gluing, next_side

__all__ = ["PeriodicTriangulation", "build_flute", "FLUTE_PATTERN", "farey_window", "ClosedCurve",
           "dehn_twist_arcs", "TwistProfile", "Constant", "Affine", "EventuallyPeriodic", "Explicit",
           "TwistedFamily", "twisted_family", "decide_component_profiles", "periodic_flip"]

_SHIFTED = re.compile(r"^(?P<lab>[^@\s]+)@(?P<off>[+-]?\d+)$")
_WINDOW_NAME = re.compile(r"^(?P<lab>.+)\[(?P<cell>-?\d+)\]$")


def split_offset(raw: str) -> tuple[str, int]:
    m = _SHIFTED.match(raw)
    if m:
        return m.group("lab"), int(m.group("off"))
    return raw, 0


# ---------------------------------------------------------------- periodic triangulations

@dataclass(frozen=True)
class PeriodicTriangulation:
    """
    One cell of triangles, repeated for every integer.  ``cell`` lists
    ``(triangle name, ((label, offset), ...))``; ``core`` optionally names the
    sides ``(triangle name, k)`` crossed in order by the core curve of a cell
    and ``test_label`` the cell edge used as test arc.
    """
    cell: tuple
    core: tuple = ()
    test_label: str | None = None
    _partner: dict = field(default=None, compare=False, repr=False, hash=False)
    _vertex_class: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        uses: dict[str, list[tuple[int, int, int]]] = {}
        for t, (_, labels) in enumerate(self.cell):
            if len(labels) != 3:
                raise FlipGraphError(f"triangle {self.cell[t][0]} has {len(labels)} sides")
            for k, (lab, off) in enumerate(labels):
                uses.setdefault(lab, []).append((t, k, off))
        partner = {}
        for lab, occ in uses.items():
            shifted = any(off for _, _, off in occ)
            if len(occ) > 2 or (shifted and len(occ) != 2):
                raise InterfaceMismatch(
                    f"label {lab!r}: the interface sides of consecutive cells do not match up")
            if len(occ) == 2:
                (t1, k1, o1), (t2, k2, o2) = occ
                # side (t1, k1) of cell i meets side (t2, k2) of cell i + o1 - o2
                partner[(t1, k1)] = (t2, k2, o1 - o2)
                partner[(t2, k2)] = (t1, k1, o2 - o1)
        object.__setattr__(self, "_partner", partner)
        object.__setattr__(self, "_vertex_class", self._corner_orbits())

    @property
    def triangles_per_cell(self) -> int:
        return len(self.cell)

    def glue(self, cell: int, t: int, k: int):
        """The side glued to side ``k`` of triangle ``t`` in ``cell``, or ``None``."""
        p = self._partner.get((t, k))
        if p is None:
            return None
        return cell + p[2], p[0], p[1]

    def _corner_orbits(self) -> dict:
        """Map (t, k) to (vertex class, cell offset of the class representative)."""
        out: dict = {}
        classes = 0
        for t in range(len(self.cell)):
            for k in range(3):
                if (t, k) in out:
                    continue
                orbit = self._orbit(t, k)
                rep_cell = max(c for c, _, _ in orbit)
                for c, tt, kk in orbit:
                    out[(tt, kk)] = (classes, rep_cell - c)
                classes += 1
        return out

    def _orbit(self, t: int, k: int) -> list[tuple[int, int, int]]:
        seen = {(t, k): 0}
        orbit = [(0, t, k)]
        # forward: corner k of t -> corner after the glued side
        cell, tt, kk = 0, t, k
        while True:
            g = self.glue(cell, tt, kk)
            if g is None:
                break
            cell, tt, kk = g[0], g[1], (g[2] + 1) % 3
            if (tt, kk) in seen:
                if seen[(tt, kk)] != cell:
                    raise InfiniteCornerOrbit(f"the vertex at corner {k} of {self.cell[t][0]} has infinite valence")
                return orbit
            seen[(tt, kk)] = cell
            orbit.append((cell, tt, kk))
        cell, tt, kk = 0, t, k
        while True:
            g = self.glue(cell, tt, (kk - 1) % 3)
            if g is None:
                return orbit
            cell, tt, kk = g[0], g[1], g[2]
            if (tt, kk) in seen:
                if seen[(tt, kk)] != cell:
                    raise InfiniteCornerOrbit(f"the vertex at corner {k} of {self.cell[t][0]} has infinite valence")
                return orbit
            seen[(tt, kk)] = cell
            orbit.append((cell, tt, kk))

    @property
    def vertex_classes(self) -> int:
        return 1 + max(c for c, _ in self._vertex_class.values())

    def vertex_name(self, t: int, k: int, cell: int) -> str:
        cls, shift = self._vertex_class[(t, k)]
        base = "v" if self.vertex_classes == 1 else f"v{cls}"
        return f"{base}[{cell + shift}]"

    def window(self, lo: int, hi: int | None = None) -> Triangulation:
        """Cells ``lo..hi``; ``window(w)`` alone means cells ``-w..w``."""
        if hi is None:
            lo, hi = -lo, lo
        if hi < lo:
            raise WindowTooSmall("empty window")
        rows, corners = [], {}
        for i in range(lo, hi + 1):
            for t, (name, labels) in enumerate(self.cell):
                tname = f"{name}[{i}]"
                rows.append((tname, [f"{lab}[{i + off}]" for lab, off in labels]))
                corners[tname] = tuple(self.vertex_name(t, k, i) for k in range(3))
        return build_from_gluing(rows, corners)

    def core_curve(self, T: Triangulation, cell: int) -> "ClosedCurve":
        if not self.core:
            raise UnsupportedDescriptor("the pattern has no designated core curve")
        names = {n: t for t, n in enumerate(T.triangle_names)}
        sides = []
        for tname, k in self.core:
            key = f"{tname}[{cell}]"
            if key not in names:
                raise WindowTooSmall(f"cell {cell} is outside the window")
            sides.append(3 * names[key] + k)
        return ClosedCurve(sides, T)

    def test_arc(self, T: Triangulation, cell: int) -> Arc:
        if self.test_label is None:
            raise UnsupportedDescriptor("the pattern has no designated test arc")
        try:
            return edge_arc(T, T.edge_by_name(f"{self.test_label}[{cell}]"))
        except KeyError:
            raise WindowTooSmall(f"cell {cell} is outside the window") from None

    def cell_edges(self, T: Triangulation, cell: int) -> list[int]:
        """Edges of ``T`` (a window) whose label belongs to ``cell``."""
        out = []
        for e in T.edges:
            m = _WINDOW_NAME.match(T.edge_names[e])
            if m and int(m.group("cell")) == cell:
                out.append(e)
        return out


FLUTE_PATTERN = ((("A", (("c", 0), ("l", 1), ("d", 0)))),
                 (("B", (("d", 0), ("c", 0), ("l", 0)))))


def build_flute(cell: Sequence[tuple[str, Sequence]] | None = None,
                core: Sequence[tuple[str, int]] | None = None,
                test_label: str | None = None) -> PeriodicTriangulation:
    """
    A periodic triangulation from a cell pattern; labels are either
    ``(label, offset)`` pairs or strings such as ``"l@+1"``.  With no pattern,
    the standard annulus-per-cell flute.
    """
    if cell is None:
        return PeriodicTriangulation(FLUTE_PATTERN, (("A", 0), ("B", 0)), "c")
    norm = []
    for name, labels in cell:
        norm.append((name, tuple(split_offset(x) if isinstance(x, str) else (x[0], int(x[1]))
                                 for x in labels)))
    return PeriodicTriangulation(tuple(norm), tuple(core or ()), test_label)


def periodic_flip(P: PeriodicTriangulation, labels: Iterable[str]) -> PeriodicTriangulation:
    """
    Flip the edges with the given labels in every cell at once.  Valid iff
    the flip is valid on a window, where it is checked next to its neighbours.
    The result carries no core curve.
    """
    labels = list(labels)
    W = P.window(-2, 2)
    try:
        m = FlipMove(W.edge_by_name(f"{lab}[{i}]") for lab in labels for i in (-1, 0, 1))
    except KeyError as exc:
        raise UnknownEdge(f"unknown label {exc}") from None
    X = apply_simultaneous_flip(W, m)
    cell = []
    for t, name in enumerate(X.triangle_names):
        mt = _WINDOW_NAME.match(name)
        if int(mt.group("cell")) != 0:
            continue
        labs = []
        for k in range(3):
            me = _WINDOW_NAME.match(X.edge_names[X.edge_of[3 * t + k]])
            labs.append((me.group("lab"), int(me.group("cell"))))
        cell.append((mt.group("lab"), tuple(labs)))
    return PeriodicTriangulation(tuple(cell))


# ---------------------------------------------------------------- Farey windows

def farey_window(depth: int) -> Triangulation:
    """Farey triangles between 0/1 and 1/0 up to mediant depth ``depth``."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    zero, one, inf = (0, 1), (1, 1), (1, 0)
    tris = [(zero, one, inf)]
    frontier = [(zero, one), (one, inf)]
    for _ in range(depth):
        nxt = []
        for a, b in frontier:
            m = (a[0] + b[0], a[1] + b[1])
            tris.append((a, m, b))
            nxt += [(a, m), (m, b)]
        frontier = nxt

    def pos(v):
        return math.inf if v[1] == 0 else Fraction(v[0], v[1])

    def name(v):
        return f"{v[0]}/{v[1]}"

    rows, corners = [], {}
    for i, tri in enumerate(tris):
        a, b, c = sorted(tri, key=pos)
        tname = f"f{i}"
        rows.append((tname, [f"{name(a)}-{name(b)}", f"{name(b)}-{name(c)}", f"{name(a)}-{name(c)}"]))
        corners[tname] = (name(a), name(b), name(c))
    return build_from_gluing(rows, corners)


# ---------------------------------------------------------------- closed curves

class ClosedCurve:
    """A closed curve as the cyclic list of sides it exits through."""

    def __init__(self, sides: Iterable[int], T: Triangulation):
        self.sides = tuple(int(s) for s in sides)
        n = len(self.sides)
        if n == 0:
            raise NotReduced("a closed curve must cross at least one edge")
        turns = set()
        for j, s in enumerate(self.sides):
            nxt = self.sides[(j + 1) % n]
            if T.gluing[s] == BOUNDARY:
                raise FlipGraphError("closed curve leaves through a boundary side")
            p = T.gluing[s]
            if nxt // 3 != p // 3:
                raise FlipGraphError("consecutive sides are not in a common triangle")
            if nxt == p:
                raise NotReduced("closed curve backtracks")
            corner = nxt if nxt == next_side(p) else p
            turns.add((T.vertex_of[corner], nxt == next_side(p)))
        if len(turns) == 1:
            raise NotReduced("closed curve only encircles a single vertex")

    def __len__(self):
        return len(self.sides)

    def __repr__(self):
        return f"ClosedCurve({list(self.sides)})"

    def segments(self, T: Triangulation) -> list[tuple[int, int, int]]:
        return [(s // 3, side_pos(T.gluing[self.sides[j - 1]] % 3), side_pos(s % 3))
                for j, s in enumerate(self.sides)]

    def crossings(self, T: Triangulation) -> list[int]:
        return [T.edge_of[s] for s in self.sides]

    def intersection(self, a: Arc, T: Triangulation) -> int:
        return sum(1 for lift in linked_lifts(segments(a, T), self.segments(T), cyclic=True)
                   if lift.crossing)


def _loop(delta: ClosedCurve, j: int, forward: bool, T: Triangulation) -> list[int]:
    n = len(delta.sides)
    if forward:
        return [delta.sides[(j + k) % n] for k in range(n)]
    return [T.gluing[delta.sides[(j - 1 - k) % n]] for k in range(n)]


def dehn_twist_arcs(T: Triangulation, delta: ClosedCurve, n: int, arcs: Iterable[Arc]) -> list[Arc]:
    """
    Twist reduced arcs ``n`` times along ``delta``: at each crossing the arc
    turns left onto ``delta``, goes around it, and carries on.  Negative ``n``
    twists the other way.
    """
    out = []
    D = delta.segments(T)
    for a in arcs:
        a = reduce_arc(a, T)
        if n == 0:
            out.append(a)
            continue
        lifts = [x for x in linked_lifts(segments(a, T), D, cyclic=True) if x.crossing]
        sides = list(a.sides)
        for lift in sorted(lifts, key=lambda x: (x.a_start, x.a_stop), reverse=True):
            forward = (not lift.b_left_to_right) == (n > 0)
            sides[lift.a_start:lift.a_start] = _loop(delta, lift.b_start, forward, T) * abs(n)
        out.append(reduce_arc(Arc(a.start, sides, a.end), T))
    return out


# ---------------------------------------------------------------- twist profiles
# Cells are indexed by the integers and profiles are symmetric: cell i and cell -i
# are twisted the same number of times.

class TwistProfile:
    kind = ""
    slope = 0           # eventual growth per cell
    settle = 0          # from this index on, value - slope * n is periodic
    period = 1

    def value(self, i: int) -> int:
        return self._at(abs(i))

    def _at(self, n: int) -> int:
        raise NotImplementedError

    @property
    def bounded(self) -> bool:
        return self.slope == 0

    def support_is_finite(self) -> bool:
        return False

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((type(self).__name__, repr(self)))


def _check_nonneg(*vals):
    for v in vals:
        if v < 0:
            raise ValueError("twist counts must be non-negative")


class Constant(TwistProfile):
    kind = "constant"

    def __init__(self, c: int):
        _check_nonneg(c)
        self.c = int(c)

    def _at(self, n):
        return self.c

    def support_is_finite(self):
        return self.c == 0

    def __repr__(self):
        return f"Constant({self.c})"


class Affine(TwistProfile):
    """``a * |i| + b`` twists in cell ``i``."""
    kind = "affine"

    def __init__(self, a: int, b: int):
        _check_nonneg(a, b)
        self.a, self.b = int(a), int(b)
        self.slope = self.a

    def _at(self, n):
        return self.a * n + self.b

    def support_is_finite(self):
        return self.a == 0 and self.b == 0

    def __repr__(self):
        return f"Affine({self.a}, {self.b})"


class EventuallyPeriodic(TwistProfile):
    kind = "periodic"

    def __init__(self, prefix: Sequence[int], period: Sequence[int]):
        if not period:
            raise ValueError("the repeating part cannot be empty")
        _check_nonneg(*prefix, *period)
        self.prefix, self.repeat = tuple(map(int, prefix)), tuple(map(int, period))
        self.settle, self.period = len(self.prefix), len(self.repeat)

    def _at(self, n):
        if n < len(self.prefix):
            return self.prefix[n]
        return self.repeat[(n - len(self.prefix)) % len(self.repeat)]

    def support_is_finite(self):
        return not any(self.repeat)

    def __repr__(self):
        return f"EventuallyPeriodic({list(self.prefix)}, {list(self.repeat)})"


class Explicit(TwistProfile):
    """Listed values for cells ``0, ±1, ...``, then the tail profile."""
    kind = "explicit"

    def __init__(self, values: Sequence[int], tail: TwistProfile | None = None):
        _check_nonneg(*values)
        self.values = tuple(map(int, values))
        self.tail = tail if tail is not None else Constant(0)
        self.slope = self.tail.slope
        self.settle = max(len(self.values), self.tail.settle)
        self.period = self.tail.period

    def _at(self, n):
        return self.values[n] if n < len(self.values) else self.tail._at(n)

    def support_is_finite(self):
        return self.tail.support_is_finite()

    def __repr__(self):
        return f"Explicit({list(self.values)}, {self.tail!r})"


def difference_values(p: TwistProfile, q: TwistProfile) -> set[int] | None:
    """Every value of ``p_i - q_i``; ``None`` when the difference is unbounded."""
    if p.slope != q.slope:
        return None
    span = max(p.settle, q.settle) + math.lcm(p.period, q.period)
    return {p._at(n) - q._at(n) for n in range(span)}


# ---------------------------------------------------------------- twisted families

@lru_cache(maxsize=None)
def _cell_frame(P: PeriodicTriangulation) -> Triangulation:
    return P.window(0, 0)


@lru_cache(maxsize=256)
def _cell_arcs(P: PeriodicTriangulation, m: int) -> tuple[Arc, ...]:
    """Edges of the single-cell window after ``m`` twists of the cell."""
    W = _cell_frame(P)
    delta = P.core_curve(W, 0)
    return tuple(dehn_twist_arcs(W, delta, m, [edge_arc(W, e) for e in W.edges]))


@lru_cache(maxsize=256)
def cell_bound(P: PeriodicTriangulation, D: int) -> int:
    """Mutual intersection bound inside one cell between twists differing by ``D``."""
    W = _cell_frame(P)
    A, B = _cell_arcs(P, D), _cell_arcs(P, 0)
    one = max(sum(intersection_of_arcs(a, b, W) for b in B) for a in A)
    two = max(sum(intersection_of_arcs(b, a, W) for a in A) for b in B)
    return max(one, two)


@dataclass(frozen=True)
class TwistedFamily:
    """The image of a periodic triangulation under independent twists of every cell."""
    base: PeriodicTriangulation
    profile: TwistProfile

    def twists(self, i: int) -> int:
        return self.profile.value(i)

    def window_arcs(self, lo: int, hi: int | None = None,
                    frame: Triangulation | None = None) -> tuple[Triangulation, list[Arc]]:
        """The base window and this family's edges there, as arcs relative to it."""
        if hi is None:
            lo, hi = -lo, lo
        W = frame if frame is not None else self.base.window(lo, hi)
        arcs = [edge_arc(W, e) for e in W.edges]
        for i in range(lo, hi + 1):
            m = self.twists(i)
            if m:
                arcs = dehn_twist_arcs(W, self.base.core_curve(W, i), m, arcs)
        return W, arcs

    def window(self, lo: int, hi: int | None = None, frame: Triangulation | None = None) -> Triangulation:
        """
        Materialize cells ``lo..hi`` by flipping the base window (or ``frame``,
        a base window built earlier, so that several families stay related).
        """
        W, arcs = self.window_arcs(lo, hi, frame)
        X, _, _, _ = realize(W, [a for a in arcs if a.sides])
        return X

    def cell_twisted_arcs(self, i: int) -> tuple[Arc, ...]:
        return _cell_arcs(self.base, self.twists(i))

    def test_arc(self, i: int) -> Arc:
        """The test arc of cell ``i`` after twisting, relative to the single-cell base window."""
        W = _cell_frame(self.base)
        delta = self.base.core_curve(W, 0)
        (a,) = dehn_twist_arcs(W, delta, self.twists(i), [self.base.test_arc(W, 0)])
        return a

    def cell_intersection(self, other: "TwistedFamily", i: int) -> int:
        """``i(test arc of self in cell i, other)``, computed inside the cell."""
        W = _cell_frame(self.base)
        a = self.test_arc(i)
        return sum(intersection_of_arcs(a, b, W) for b in other.cell_twisted_arcs(i))


def twisted_family(T: PeriodicTriangulation, profile: TwistProfile) -> TwistedFamily:
    if not T.core or T.test_label is None:
        raise UnsupportedDescriptor("twisting needs a pattern with a core curve and a test arc")
    return TwistedFamily(T, profile)


def _as_family(X) -> TwistedFamily:
    if isinstance(X, TwistedFamily):
        return X
    if isinstance(X, PeriodicTriangulation):
        return twisted_family(X, Constant(0))
    raise UnsupportedDescriptor(f"unsupported descriptor {type(X).__name__}")


@dataclass(frozen=True)
class ProfilePath:
    """A path between two twisted families, materialized one window at a time."""
    source: TwistedFamily
    target: TwistedFamily
    K: int
    length_bound: int
    finite_support: bool

    def window_certificate(self, lo: int, hi: int | None = None) -> PathCertificate:
        from .connectivity import construct_path
        W = self.source.base.window(lo, hi)
        return construct_path(self.target.window(lo, hi, W), self.source.window(lo, hi, W))


def mutual_intersection_bound(S, T):
    from .connectivity import UnboundedWitness
    F, G = _as_family(S), _as_family(T)
    if F.base != G.base:
        raise UnsupportedDescriptor("families are built on different patterns")
    diffs = difference_values(F.profile, G.profile)
    if diffs is None:
        return UnboundedWitness(f"test arcs of {F.profile!r} against {G.profile!r}",
                                lambda k: _witness(F, G, k))
    return max(cell_bound(F.base, D) for D in diffs)


def _witness(F: TwistedFamily, G: TwistedFamily, k: int) -> tuple[object, int]:
    n = 0
    while True:
        if abs(F.twists(n) - G.twists(n)) > k:
            value = F.cell_intersection(G, n)
            if value >= k:
                return (n, F.test_arc(n)), value
        n += 1


def decide_component_profiles(T: PeriodicTriangulation, p: TwistProfile, q: TwistProfile):
    """Same component iff the two twist profiles differ by a bounded amount."""
    return decide_same_component(twisted_family(T, p), twisted_family(T, q))


def decide_same_component(S, T):
    from .connectivity import ComponentDecision, flip_distance_bounds
    F, G = _as_family(S), _as_family(T)
    K = mutual_intersection_bound(F, G)
    if not isinstance(K, int):
        return ComponentDecision("Different", K, None)
    finite = _finite_difference(F.profile, G.profile)
    return ComponentDecision("Same", ProfilePath(G, F, K, flip_distance_bounds(K)[1], finite), K)


def _finite_difference(p: TwistProfile, q: TwistProfile) -> bool:
    span = max(p.settle, q.settle) + math.lcm(p.period, q.period)
    return all(p._at(n) == q._at(n) for n in range(max(p.settle, q.settle), span))
