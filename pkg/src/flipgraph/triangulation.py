"""
Triangulations of surfaces as gluings of oriented triangles.

Sides and corners are addressed by flat integers: side ``k`` of triangle ``t``
is ``3*t + k`` and runs counterclockwise from corner ``k`` to corner ``k+1``;
corner ``c`` of triangle ``t`` is likewise ``3*t + c``.  Glued sides are always
identified with reversed direction, so every triangulation built here is
oriented.  A side glued to nothing is a boundary side.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (Disconnected, InfiniteInput, LabelUsedMoreThanTwice,
                     NonOrientableGluing, NTooSmall, UnknownEdge, FlipGraphError)

BOUNDARY = -1


def next_side(s: int) -> int:
    return s - s % 3 + (s % 3 + 1) % 3


def prev_side(s: int) -> int:
    return s - s % 3 + (s % 3 + 2) % 3


@dataclass(frozen=True, eq=False)
class Triangulation:
    r"""
    A finite triangulation given by its side gluing.

    ``gluing[s]`` is the side glued to ``s`` (or ``BOUNDARY``), ``edge_of[s]``
    the edge id carried by side ``s`` and ``corner_labels[c]`` the name of the
    ideal vertex at corner ``c``.  ``parent``/``move`` record the flip that
    produced this triangulation, which is how triangulations of one surface
    are related to each other.

    EXAMPLES::

        >>> from flipgraph.triangulation import punctured_torus
        >>> T = punctured_torus()
        >>> T.num_triangles, T.num_edges, T.num_vertices
        (2, 3, 1)
    """
    gluing: tuple[int, ...]
    edge_of: tuple[int, ...]
    corner_labels: tuple[str, ...]
    triangle_names: tuple[str, ...] = ()
    edge_names: tuple[str, ...] = ()
    parent: "Triangulation | None" = field(default=None, repr=False)
    move: "object" = field(default=None, repr=False)

    def __post_init__(self):
        n = len(self.gluing)
        if n == 0 or n % 3:
            raise FlipGraphError("a triangulation needs a positive multiple of 3 sides")
        if len(self.edge_of) != n or len(self.corner_labels) != n:
            raise FlipGraphError("side/corner data length mismatch")
        if not self.triangle_names:
            object.__setattr__(self, "triangle_names", tuple(f"t{i}" for i in range(n // 3)))
        for s, p in enumerate(self.gluing):
            if p == BOUNDARY:
                continue
            if not 0 <= p < n or p == s or self.gluing[p] != s:
                raise FlipGraphError(f"gluing is not a fixed-point-free involution at side {s}")
            if self.edge_of[p] != self.edge_of[s]:
                raise FlipGraphError(f"glued sides {s}, {p} carry different edge ids")
        ids = sorted(set(self.edge_of))
        if ids != list(range(len(ids))):
            raise FlipGraphError("edge ids must be 0..E-1")
        for e in ids:
            if len(self.edge_sides(e)) not in (1, 2):
                raise FlipGraphError(f"edge {e} is carried by too many sides")
        if not self.edge_names:
            object.__setattr__(self, "edge_names", tuple(f"e{i}" for i in ids))
        self._check_connected()
        for orbit in self.vertices:
            labels = {self.corner_labels[c] for c in orbit}
            if len(labels) != 1:
                raise FlipGraphError(f"inconsistent corner labels on one vertex: {sorted(labels)}")

    def _check_connected(self):
        F = self.num_triangles
        seen = {0}
        todo = [0]
        while todo:
            t = todo.pop()
            for k in range(3):
                p = self.gluing[3 * t + k]
                if p != BOUNDARY and p // 3 not in seen:
                    seen.add(p // 3)
                    todo.append(p // 3)
        if len(seen) != F:
            raise Disconnected(f"triangle adjacency graph has {F - len(seen)} unreachable triangles")

    # -- equality ignores history and display names
    def _key(self):
        return (self.gluing, self.edge_of, self.corner_labels)

    def __eq__(self, other):
        if not isinstance(other, Triangulation):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    # -- counts
    @property
    def num_triangles(self) -> int:
        return len(self.gluing) // 3

    @property
    def num_edges(self) -> int:
        return len(self.edge_names)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> range:
        return range(self.num_edges)

    @cached_property
    def _edge_sides(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(len(set(self.edge_of)))]
        for s, e in enumerate(self.edge_of):
            out[e].append(s)
        return tuple(tuple(x) for x in out)

    def edge_sides(self, e: int) -> tuple[int, ...]:
        try:
            return self._edge_sides[e]
        except (IndexError, TypeError):
            raise UnknownEdge(f"unknown edge {e!r}") from None

    def is_boundary_edge(self, e: int) -> bool:
        return len(self.edge_sides(e)) == 1

    @property
    def boundary_sides(self) -> tuple[int, ...]:
        return tuple(s for s, p in enumerate(self.gluing) if p == BOUNDARY)

    @property
    def interior_edges(self) -> list[int]:
        return [e for e in self.edges if not self.is_boundary_edge(e)]

    # -- vertices
    def rotate_corner(self, c: int) -> int:
        """Next corner around the same vertex, crossing the side starting at ``c``."""
        p = self.gluing[c]
        if p == BOUNDARY:
            return BOUNDARY
        return next_side(p)

    def rotate_corner_back(self, c: int) -> int:
        p = self.gluing[prev_side(c)]
        if p == BOUNDARY:
            return BOUNDARY
        return p

    @cached_property
    def vertices(self) -> tuple[tuple[int, ...], ...]:
        n = len(self.gluing)
        owner = [-1] * n
        orbits = []
        for c0 in range(n):
            if owner[c0] >= 0:
                continue
            orbit = [c0]
            c = self.rotate_corner(c0)
            steps = 0
            while c != BOUNDARY and c != c0:
                orbit.append(c)
                c = self.rotate_corner(c)
                steps += 1
                if steps > n:  # pragma: no cover - involution makes this unreachable
                    raise FlipGraphError("corner walk failed to close")
            if c == BOUNDARY:
                c = self.rotate_corner_back(c0)
                while c != BOUNDARY:
                    orbit.insert(0, c)
                    c = self.rotate_corner_back(c)
            for x in orbit:
                owner[x] = len(orbits)
            orbits.append(tuple(orbit))
        return tuple(orbits)

    @cached_property
    def vertex_of(self) -> tuple[int, ...]:
        out = [0] * len(self.gluing)
        for v, orbit in enumerate(self.vertices):
            for c in orbit:
                out[c] = v
        return tuple(out)

    def vertex_label(self, v: int) -> str:
        return self.corner_labels[self.vertices[v][0]]

    def is_boundary_vertex(self, v: int) -> bool:
        return self.gluing[self.vertices[v][0]] == BOUNDARY or \
            self.gluing[prev_side(self.vertices[v][0])] == BOUNDARY

    def valence(self, v: int) -> int:
        """Number of edge-ends at vertex ``v``."""
        k = len(self.vertices[v])
        return k + 1 if self.is_boundary_vertex(v) else k

    def edge_endpoints(self, e: int) -> tuple[str, str]:
        s = self.edge_sides(e)[0]
        return self.corner_labels[s], self.corner_labels[next_side(s)]

    def edge_label_pair(self, e: int) -> frozenset:
        return frozenset(self.edge_endpoints(e))

    def edge_by_name(self, name: str) -> int:
        try:
            return self.edge_names.index(name)
        except ValueError:
            raise UnknownEdge(f"unknown edge {name!r}") from None

    def is_labeled_disk(self) -> bool:
        """True for a polygon whose ideal vertices carry pairwise distinct labels."""
        chi, _ = euler_characteristics(self)
        labels = [self.vertex_label(v) for v in range(self.num_vertices)]
        if chi != 1 or len(set(labels)) != len(labels):
            return False
        return all(self.is_boundary_vertex(v) for v in range(self.num_vertices))

    def diagonals(self) -> set[frozenset]:
        """Interior edges as unordered pairs of vertex labels."""
        return {self.edge_label_pair(e) for e in self.interior_edges}

    # -- history
    @property
    def root(self) -> "Triangulation":
        T = self
        while T.parent is not None:
            T = T.parent
        return T

    def lineage(self) -> list["Triangulation"]:
        """``[root, ..., self]``."""
        out = [self]
        while out[-1].parent is not None:
            out.append(out[-1].parent)
        return out[::-1]

    def detached(self) -> "Triangulation":
        """Copy with the flip history dropped (this triangulation becomes a root)."""
        return Triangulation(self.gluing, self.edge_of, self.corner_labels,
                             self.triangle_names, self.edge_names)

    def __repr__(self):
        return (f"Triangulation(F={self.num_triangles}, E={self.num_edges}, "
                f"V={self.num_vertices}, boundary={len(self.boundary_sides)})")


def build_from_gluing(triangles: Sequence[tuple[str, Sequence[str]]],
                      corner_labels: Mapping[str, Sequence[str]] | None = None) -> Triangulation:
    """
    Build a triangulation from triangles listing their side labels counterclockwise.

    A label used twice glues the two sides with opposite orientation; a label
    used once is a boundary side.  A leading ``~`` reverses a side's direction,
    so ``a``/``~a`` describes an orientation-reversing pasting, which is rejected.
    ``corner_labels`` optionally names the three corners of each triangle.
    """
    if not triangles:
        raise FlipGraphError("no triangles")
    uses: dict[str, list[tuple[int, bool]]] = {}
    order: list[str] = []
    for t, (_, labels) in enumerate(triangles):
        if len(labels) != 3:
            raise FlipGraphError(f"triangle {t} has {len(labels)} sides")
        for k, raw in enumerate(labels):
            flipped = raw.startswith("~")
            lab = raw[1:] if flipped else raw
            if lab not in uses:
                uses[lab] = []
                order.append(lab)
            uses[lab].append((3 * t + k, flipped))
            if len(uses[lab]) > 2:
                raise LabelUsedMoreThanTwice(f"side label {lab!r} used more than twice")
    n = 3 * len(triangles)
    gluing = [BOUNDARY] * n
    edge_of = [0] * n
    for e, lab in enumerate(order):
        u = uses[lab]
        for s, _ in u:
            edge_of[s] = e
        if len(u) == 2:
            (s1, f1), (s2, f2) = u
            if f1 != f2:
                raise NonOrientableGluing(f"sides labelled {lab!r} would be traversed in the same direction")
            gluing[s1], gluing[s2] = s2, s1
    names = tuple(name for name, _ in triangles)
    if len(set(names)) != len(names):
        raise FlipGraphError("duplicate triangle identifiers")
    skeleton = Triangulation(tuple(gluing), tuple(edge_of), tuple([""] * n), names, tuple(order))
    if corner_labels is None:
        labels = [""] * n
        for v, orbit in enumerate(skeleton.vertices):
            for c in orbit:
                labels[c] = f"v{v}"
    else:
        labels = []
        for name, _ in triangles:
            if name not in corner_labels or len(corner_labels[name]) != 3:
                raise FlipGraphError(f"missing corner labels for triangle {name!r}")
            labels.extend(str(x) for x in corner_labels[name])
    return Triangulation(tuple(gluing), tuple(edge_of), tuple(labels), names, tuple(order))


def euler_characteristics(T: Triangulation) -> tuple[int, int]:
    """``(V - E + F, V - E + F - V)`` with ideal vertices counted in the first."""
    if not isinstance(T, Triangulation):
        raise InfiniteInput("Euler characteristic needs a finite triangulation")
    V, E, F = T.num_vertices, T.num_edges, T.num_triangles
    chi = V - E + F
    return chi, chi - V


def generator_polygon(n: int, shape: str = "fan") -> Triangulation:
    """Triangulated ideal ``n``-gon with vertices labelled ``1..n`` counterclockwise."""
    if n < 3:
        raise NTooSmall(f"a polygon needs at least 3 vertices, got {n}")
    if shape == "fan":
        tris = [(1, i, i + 1) for i in range(2, n)]
    elif shape == "zigzag":
        tris = [(1, 2, n)]
        lo, hi = 2, n
        turn = 0
        while hi - lo > 1:
            if turn == 0:
                tris.append((lo, hi - 1, hi))
                hi -= 1
            else:
                tris.append((lo, lo + 1, hi))
                lo += 1
            turn ^= 1
    else:
        raise ValueError(f"unknown polygon shape {shape!r}")
    return polygon_from_triangles(tris)


def polygon_from_triangles(tris: Iterable[Sequence[int]]) -> Triangulation:
    """Triangulation of a convex polygon from vertex triples (any order within a triple)."""
    rows = []
    corners = {}
    for i, tri in enumerate(tris):
        a, b, c = sorted(tri)
        name = f"t{i}"
        rows.append((name, [f"{a}-{b}", f"{b}-{c}", f"{a}-{c}"]))
        corners[name] = (str(a), str(b), str(c))
    return build_from_gluing(rows, corners)


def generator_punctured_torus() -> Triangulation:
    """The two-triangle, one-vertex triangulation of the once-punctured torus."""
    return build_from_gluing([("t0", ["a", "b", "c"]), ("t1", ["a", "b", "c"])])


punctured_torus = generator_punctured_torus


def canonical_form(T: Triangulation, with_labels: bool = True) -> tuple:
    """
    Relabelling-invariant encoding: minimum over all starting sides of the
    breadth-first renumbering of triangles.  Two triangulations have equal
    canonical forms iff they are isomorphic as oriented gluings (with matching
    corner labels when ``with_labels``).
    """
    best = None
    F = T.num_triangles
    for s0 in range(3 * F):
        new_id = {s0 // 3: 0}
        base = {s0 // 3: s0 % 3}
        order = [s0 // 3]
        queue = deque(order)
        while queue:
            t = queue.popleft()
            for i in range(3):
                p = T.gluing[3 * t + (base[t] + i) % 3]
                if p != BOUNDARY and p // 3 not in new_id:
                    new_id[p // 3] = len(order)
                    base[p // 3] = p % 3
                    order.append(p // 3)
                    queue.append(p // 3)
        code = []
        for t in order:
            for i in range(3):
                s = 3 * t + (base[t] + i) % 3
                p = T.gluing[s]
                code.append(-1 if p == BOUNDARY else 3 * new_id[p // 3] + (p % 3 - base[p // 3]) % 3)
                if with_labels:
                    code.append(T.corner_labels[s])
        code = tuple(code)
        if best is None or code < best:
            best = code
    return best
