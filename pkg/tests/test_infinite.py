import math
import random
from fractions import Fraction

import pytest

from conftest import random_walk
from flipgraph.arcs import edge_arc, intersection_of_arcs
from flipgraph.connectivity import (UnboundedWitness, decide_same_component, different_threshold,
                                    mutual_intersection_bound)
from flipgraph.errors import InterfaceMismatch, NotReduced, UnsupportedDescriptor, WindowTooSmall
from flipgraph.flips import intersection_via_make_edge, same_triangulation, verify_certificate
from flipgraph.infinite import (Affine, ClosedCurve, Constant, EventuallyPeriodic, Explicit, build_flute,
                                cell_bound, decide_component_profiles, dehn_twist_arcs, difference_values,
                                farey_window, periodic_flip, twisted_family)
from flipgraph.triangulation import canonical_form, euler_characteristics

FLUTE = build_flute()


# ---------------------------------------------------------------- windows

@pytest.mark.parametrize("w", [0, 1, 2, 3])
def test_flute_window_counts(w):
    n = 2 * w + 1
    W = FLUTE.window(w)
    assert W.num_triangles == 2 * n
    assert W.num_edges == 3 * n + 1
    assert W.num_vertices == n + 1
    assert len(W.boundary_sides) == 2
    assert euler_characteristics(W) == (0, -(n + 1))


def test_single_cell_window_is_the_cell():
    W = FLUTE.window(0)
    assert sorted(W.triangle_names) == ["A[0]", "B[0]"]
    assert sorted(W.edge_names) == ["c[0]", "d[0]", "l[0]", "l[1]"]


def test_windows_agree_on_overlaps():
    small, big = FLUTE.window(-1, 1), FLUTE.window(-3, 3)
    for t, name in enumerate(small.triangle_names):
        tb = big.triangle_names.index(name)
        for k in range(3):
            assert small.edge_names[small.edge_of[3 * t + k]] == big.edge_names[big.edge_of[3 * tb + k]]
            assert small.corner_labels[3 * t + k] == big.corner_labels[3 * tb + k]


def test_empty_window_is_rejected():
    with pytest.raises(WindowTooSmall):
        FLUTE.window(2, 1)


def test_unmatched_interfaces_are_rejected():
    with pytest.raises(InterfaceMismatch):
        build_flute([("A", ["x@+1", "y", "z"])])
    with pytest.raises(InterfaceMismatch):
        build_flute([("A", ["x", "x", "y"]), ("B", ["x", "y", "z"])])


def test_periodic_flip_twice_restores_the_pattern():
    Q = periodic_flip(FLUTE, ["c"])
    assert len(Q.cell) == 2
    R = periodic_flip(Q, ["c"])
    for w in (0, 1, 2):
        assert canonical_form(R.window(w)) == canonical_form(FLUTE.window(w))


# ---------------------------------------------------------------- Farey windows

@pytest.mark.parametrize("depth", [0, 1, 2, 3, 4])
def test_farey_edges_are_unimodular(depth):
    W = farey_window(depth)
    assert W.num_triangles == 2 ** (depth + 1) - 1
    for e in W.edges:
        (p, q), (r, s) = (tuple(int(x) for x in v.split("/")) for v in W.edge_endpoints(e))
        assert abs(p * s - q * r) == 1


def test_farey_triangles_use_mediants():
    W = farey_window(2)
    labels = {W.vertex_label(v) for v in range(W.num_vertices)}
    finite = sorted(Fraction(x) for x in labels if not x.endswith("/0"))
    assert finite == [Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1),
                      Fraction(3, 2), Fraction(2), Fraction(3)]


# ---------------------------------------------------------------- closed curves and twists

def test_core_curve_meets_the_cell_edges():
    W = FLUTE.window(0)
    delta = FLUTE.core_curve(W, 0)
    hits = {W.edge_names[e]: delta.intersection(edge_arc(W, e), W) for e in W.edges}
    assert hits == {"c[0]": 1, "d[0]": 1, "l[0]": 0, "l[1]": 0}


def test_closed_curve_validation():
    W = FLUTE.window(0)
    with pytest.raises(NotReduced):
        ClosedCurve([], W)
    s = FLUTE.core_curve(W, 0).sides[0]
    with pytest.raises(NotReduced):
        ClosedCurve([s, W.gluing[s]], W)


def twist_setup():
    W = FLUTE.window(-1, 1)
    return W, FLUTE.core_curve(W, 0), FLUTE.test_arc(W, 0)


def test_zero_twist_is_the_identity():
    W, delta, c = twist_setup()
    assert dehn_twist_arcs(W, delta, 0, [c]) == [c]


def test_opposite_twists_cancel():
    W, delta, c = twist_setup()
    for n in (1, 2, 5):
        (a,) = dehn_twist_arcs(W, delta, n, [c])
        assert dehn_twist_arcs(W, delta, -n, [a]) == [c]


def test_arcs_missing_the_curve_are_fixed():
    W, delta, _ = twist_setup()
    for name in ("l[0]", "l[1]", "c[1]", "d[-1]"):
        a = edge_arc(W, W.edge_by_name(name))
        assert dehn_twist_arcs(W, delta, 3, [a]) == [a]


def test_twisted_test_arc_intersections():
    # the test arc meets the core once, so twisting n times gives max(|n| - 1, 0)
    W, delta, c = twist_setup()
    values = []
    for n in range(-6, 11):
        (a,) = dehn_twist_arcs(W, delta, n, [c])
        values.append(intersection_of_arcs(a, c, W))
        assert values[-1] == max(abs(n) - 1, 0)
    assert values[6:] == sorted(values[6:])


def test_twist_intersections_agree_with_make_edge_oracle():
    W, delta, c = twist_setup()
    for n in (-2, 1, 3):
        (a,) = dehn_twist_arcs(W, delta, n, [c])
        for e in W.edges:
            b = edge_arc(W, e)
            assert intersection_of_arcs(a, b, W) == intersection_via_make_edge(a, b, W)


# ---------------------------------------------------------------- profiles

def test_profile_values_are_symmetric():
    assert [Affine(1, 0).value(i) for i in (-3, 0, 3)] == [3, 0, 3]
    assert [EventuallyPeriodic([5], [1, 2]).value(i) for i in range(6)] == [5, 1, 2, 1, 2, 1]
    assert Explicit([3, 1]).value(-1) == 1
    assert Explicit([3], Affine(1, 0)).value(4) == 4
    assert Constant(2).value(-100) == 2


def test_negative_twist_counts_are_rejected():
    with pytest.raises(ValueError):
        Constant(-1)
    with pytest.raises(ValueError):
        Explicit([1, -2])


def test_difference_sets():
    assert difference_values(Explicit([3]), Constant(0)) == {0, 3}
    assert difference_values(Affine(1, 0), Constant(0)) is None
    assert difference_values(Affine(2, 1), Explicit([0, 0, 7], Affine(2, 3))) == {1, 3, -2}


def test_cell_bound_by_difference():
    assert [cell_bound(FLUTE, D) for D in range(-3, 6)] == [5, 3, 1, 0, 1, 3, 5, 7, 9]
    for D in range(1, 12):
        assert cell_bound(FLUTE, D) == cell_bound(FLUTE, -D) == 2 * D - 1


def test_constant_zero_family_is_the_base():
    F = twisted_family(FLUTE, Constant(0))
    W = FLUTE.window(2)
    assert same_triangulation(F.window(2, frame=W), W)


def test_single_cell_twist_only_moves_that_cell():
    F = twisted_family(FLUTE, Explicit([3]))
    W, arcs = F.window_arcs(2)
    for e, a in enumerate(arcs):
        cell = int(W.edge_names[e].split("[")[1].rstrip("]"))
        moved = bool(a.sides)
        assert moved == (W.edge_names[e] in ("c[0]", "d[0]"))
        if moved:
            assert cell == 0


def test_affine_profile_intersections_grow():
    F, G = twisted_family(FLUTE, Affine(1, 0)), twisted_family(FLUTE, Constant(0))
    W = FLUTE.window(0)
    values = [F.cell_intersection(G, i) for i in range(8)]
    oracle = [sum(intersection_via_make_edge(F.test_arc(i), edge_arc(W, e), W) for e in W.edges)
              for i in range(8)]
    assert values == oracle == [0, 0, 1, 3, 5, 7, 9, 11]


def test_descriptors_need_core_and_test_arc():
    P = periodic_flip(FLUTE, ["c"])
    with pytest.raises(UnsupportedDescriptor):
        twisted_family(P, Constant(1))


# ---------------------------------------------------------------- component decisions

def test_finitely_supported_difference_is_same_component():
    dec = decide_component_profiles(FLUTE, Explicit([3]), Constant(0))
    assert dec.verdict == "Same" and dec.bound == 5
    path = dec.evidence
    assert path.finite_support
    cert = path.window_certificate(-2, 2)
    assert verify_certificate(cert)
    assert len(cert) <= path.length_bound


def test_bounded_periodic_difference_is_same_component():
    dec = decide_component_profiles(FLUTE, Affine(2, 1), Explicit([0, 0, 7], Affine(2, 3)))
    assert dec.same
    assert dec.bound == max(cell_bound(FLUTE, D) for D in (1, 3, -2))
    assert not dec.evidence.finite_support


def test_linear_difference_is_different_component():
    dec = decide_component_profiles(FLUTE, Constant(0), Affine(1, 0))
    assert dec.verdict == "Different"
    assert isinstance(dec.evidence, UnboundedWitness)
    thresholds = [different_threshold(N) for N in range(1, 6)]
    assert thresholds == [5, 21, 85, 341, 1365]
    for k, (cell, _), value in dec.evidence.witnesses(thresholds):
        assert value >= k
        assert abs(Constant(0).value(cell) - Affine(1, 0).value(cell)) > k


def test_base_pattern_against_itself():
    dec = decide_same_component(FLUTE, FLUTE)
    assert dec.same and dec.bound == 0


def test_flute_window_with_finite_flips_is_same_component():
    rng = random.Random(4)
    W = FLUTE.window(2)
    for _ in range(5):
        X = random_walk(W, rng.randint(1, 4), rng)
        dec = decide_same_component(W, X)
        assert dec.same
        assert verify_certificate(dec.evidence)
        assert math.isfinite(dec.bound)


def test_window_arcs_meet_finitely_many_cell_curves():
    W = FLUTE.window(-3, 3)
    curves = {i: FLUTE.core_curve(W, i) for i in range(-3, 4)}
    for e in W.edges:
        a = edge_arc(W, e)
        met = [i for i, delta in curves.items() if delta.intersection(a, W)]
        assert len(met) <= 1


def test_same_verdict_bounds_every_window():
    for p, q in ((Explicit([3]), Constant(0)), (Affine(2, 1), Explicit([0, 0, 7], Affine(2, 3)))):
        dec = decide_component_profiles(FLUTE, p, q)
        F, G = twisted_family(FLUTE, p), twisted_family(FLUTE, q)
        for w in (0, 1, 2):
            frame = FLUTE.window(w)
            assert mutual_intersection_bound(F.window(w, frame=frame), G.window(w, frame=frame)) <= dec.bound
