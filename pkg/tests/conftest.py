import functools
import itertools
import random
import sys

import pytest

from flipgraph.flips import bfs_ball, polygon_arc
from flipgraph.quads import FlipMove, apply_simultaneous_flip
from flipgraph.triangulation import generator_polygon, punctured_torus


def chords_cross(p, q) -> int:
    """Independent oracle: two chords of a convex polygon cross iff their endpoints interleave."""
    a, b = sorted(int(x) for x in p)
    c, d = sorted(int(x) for x in q)
    if {a, b} & {c, d}:
        return 0
    return int((a < c < b) != (a < d < b))


def chord_vs_set(p, chords) -> int:
    return sum(chords_cross(p, q) for q in chords)


def all_chords(n):
    return [frozenset({str(i), str(j)}) for i, j in itertools.combinations(range(1, n + 1), 2)
            if (j - i) % n not in (1, n - 1)]


@functools.lru_cache(maxsize=None)
def polygon_states(n: int, shape: str = "fan"):
    """Every triangulation of the n-gon, each descending from the same root."""
    _, reps = bfs_ball(generator_polygon(n, shape))
    return tuple(reps.values())


@functools.lru_cache(maxsize=None)
def torus_ball(radius: int):
    return bfs_ball(punctured_torus(), radius=radius)


def arc_between(T, chord, reverse=False):
    u, v = sorted(chord, key=int)
    if reverse:
        u, v = v, u
    return polygon_arc(T, u, v)


def random_walk(T, steps, rng, avoid_repeat=True):
    last = None
    for _ in range(steps):
        choices = [e for e in T.interior_edges if e != last and len(T.edge_sides(e)) == 2
                   and T.edge_sides(e)[0] // 3 != T.edge_sides(e)[1] // 3]
        e = rng.choice(choices)
        T = apply_simultaneous_flip(T, FlipMove([e]))
        last = e if avoid_repeat else None
    return T


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
