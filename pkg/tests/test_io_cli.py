import json
import random

import pytest

from conftest import random_walk
from flipgraph.cli import EXIT_DIFFERENT, EXIT_ERROR, EXIT_OK, main
from flipgraph.errors import LabelUsedMoreThanTwice, NonOrientableGluing, NotDisjoint, TriSyntaxError, UnknownEdge
from flipgraph.flips import polygon_arc, same_triangulation
from flipgraph.infinite import Affine, Constant, EventuallyPeriodic, Explicit, PeriodicTriangulation, build_flute
from flipgraph.io import (certificate_to_json, emit_report, parse_arcs, parse_moves, parse_named_arcs,
                          parse_profile, parse_tri, serialize_arcs, serialize_profile, serialize_tri,
                          verify_certificate_json)
from flipgraph.connectivity import construct_path
from flipgraph.triangulation import canonical_form, generator_polygon, punctured_torus

TORUS = "triangle t0 a b c\ntriangle t1 a b c\n"
FLUTE_TEXT = "periodic\ntriangle A c l@+1 d\ntriangle B d c l\ncore A:0 B:0\ntest c\n"


# ---------------------------------------------------------------- TRI

def test_torus_text_parses():
    T = parse_tri(TORUS)
    assert (T.num_triangles, T.num_edges, T.num_vertices) == (2, 3, 1)


@pytest.mark.parametrize("T", [punctured_torus(), generator_polygon(7, "zigzag"),
                               random_walk(generator_polygon(8), 5, random.Random(1))])
def test_serialize_then_parse_is_identity(T):
    text = serialize_tri(T)
    back = parse_tri(text)
    assert canonical_form(back) == canonical_form(T)
    assert serialize_tri(back) == text


def test_periodic_round_trip():
    P = parse_tri(FLUTE_TEXT)
    assert isinstance(P, PeriodicTriangulation)
    assert P == build_flute()
    assert parse_tri(serialize_tri(P)) == P


def test_comments_and_blank_lines_are_ignored():
    T = parse_tri("# torus\n\ntriangle t0 a b c   # first\ntriangle t1 a b c\n")
    assert T.num_edges == 3


@pytest.mark.parametrize("text,line,column", [
    ("triangle t0 a b\n", 1, 15),
    ("triangle t0 a b c\nsquare q\n", 2, 1),
    ("triangle t0 a b c\ntriangle t0 a b c\n", 2, 10),
    ("triangle t0 a@+1 b c\n", 1, 13),
])
def test_syntax_errors_carry_positions(text, line, column):
    with pytest.raises(TriSyntaxError) as info:
        parse_tri(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_empty_input_is_a_syntax_error():
    with pytest.raises(TriSyntaxError):
        parse_tri("# nothing here\n")


def test_gluing_errors_name_the_offending_token():
    with pytest.raises(LabelUsedMoreThanTwice, match="line 3, column 13"):
        parse_tri("triangle t0 a b c\ntriangle t1 a b c\ntriangle t2 a x y\n")
    with pytest.raises(NonOrientableGluing, match="line 2, column 13"):
        parse_tri("triangle t0 a b c\ntriangle t1 ~a b c\n")


# ---------------------------------------------------------------- ARC and PROFILE

def test_arc_round_trip():
    T = generator_polygon(7)
    arcs = [polygon_arc(T, "2", "6"), polygon_arc(T, "3", "5")]
    text = serialize_arcs(arcs, T, ["x", "y"])
    assert "arc x from 2 to 6 crossing 1-3 1-4 1-5" in text
    named = parse_named_arcs(text, T)
    assert [n for n, _ in named] == ["x", "y"]
    assert [a for _, a in named] == arcs
    assert list(parse_arcs(text, T)) == arcs


def test_unreduced_arcs_are_reduced_with_a_warning(caplog):
    T = generator_polygon(6)
    (_, a), = parse_named_arcs("arc z from 2 to 3 crossing 1-3 1-3\n", T)
    assert a.sides == ()
    assert "not reduced" in caplog.text


def test_arc_errors():
    T = generator_polygon(6)
    with pytest.raises(UnknownEdge):
        parse_named_arcs("arc z from 2 to 5 crossing 9-9\n", T)
    with pytest.raises(TriSyntaxError):
        parse_named_arcs("arc z between 2 and 5\n", T)
    with pytest.raises(NotDisjoint):
        parse_arcs("arc x from 1 to 4\narc y from 2 to 5 crossing 1-3 1-4\n", T)


@pytest.mark.parametrize("p", [Constant(3), Affine(2, 1), EventuallyPeriodic([4, 0], [1, 2, 3]),
                               Explicit([3, 0, 1]), Explicit([0, 0, 7], Affine(2, 3))])
def test_profile_round_trip(p):
    assert parse_profile(serialize_profile(p)) == p


def test_profile_grammar():
    assert parse_profile("profile explicit 3 tail constant 0\n") == Explicit([3])
    with pytest.raises(TriSyntaxError):
        parse_profile("profile wobbly 3\n")
    with pytest.raises(TriSyntaxError):
        parse_profile("profile constant 1\nprofile constant 2\n")


def test_move_lists():
    T = generator_polygon(6)
    moves = parse_moves("1-3 1-5; 1-4", T)
    assert [sorted(m) for m in moves] == [sorted([T.edge_by_name("1-3"), T.edge_by_name("1-5")]),
                                          [T.edge_by_name("1-4")]]


# ---------------------------------------------------------------- certificates and reports

def test_certificate_json_verifies_and_detects_tampering():
    T = random_walk(generator_polygon(7), 4, random.Random(9))
    cert = construct_path(T.root, T)
    obj = json.loads(json.dumps(certificate_to_json(cert)))
    assert verify_certificate_json(obj)
    assert same_triangulation(parse_tri(obj["end"]), T.root) or T.root.is_labeled_disk()
    if obj["moves"]:
        bad = dict(obj, moves=obj["moves"][:-1])
        assert not verify_certificate_json(bad)
    assert not verify_certificate_json({"start": obj["start"], "moves": [["nope"]], "end": obj["end"]})


def test_report_keys_are_ordered_with_timings_last():
    text = emit_report({"timings": {"seconds": 1}, "command": "x", "value": 2})
    assert list(json.loads(text)) == ["command", "value", "timings"]


# ---------------------------------------------------------------- CLI

def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def files(tmp_path):
    hexagon = generator_polygon(6)
    flipped = parse_tri(serialize_tri(random_walk(hexagon, 3, random.Random(2))))
    paths = {
        "torus": tmp_path / "torus.tri",
        "hex": tmp_path / "hex.tri",
        "hex2": tmp_path / "hex2.tri",
        "flute": tmp_path / "flute.tri",
        "zero": tmp_path / "zero.profile",
        "bump": tmp_path / "bump.profile",
        "line": tmp_path / "line.profile",
        "arcs": tmp_path / "mu.arc",
        "bad": tmp_path / "bad.tri",
    }
    paths["torus"].write_text(TORUS)
    paths["hex"].write_text(serialize_tri(hexagon))
    paths["hex2"].write_text(serialize_tri(flipped))
    paths["flute"].write_text(FLUTE_TEXT)
    paths["zero"].write_text("profile constant 0\n")
    paths["bump"].write_text("profile explicit 3 tail constant 0\n")
    paths["line"].write_text("profile affine 1 0\n")
    paths["arcs"].write_text("arc m from 2 to 5 crossing 1-3 1-4\n")
    paths["bad"].write_text("triangle t0 a b c\ntriangle t1 a b\n")
    return paths


def test_validate(capsys, files):
    code, rep = report(capsys, "validate", files["torus"])
    assert code == EXIT_OK
    assert rep["valid"] and rep["edges"] == 3 and rep["euler_characteristic"] == 0
    code, rep = report(capsys, "validate", files["flute"])
    assert rep["kind"] == "periodic" and rep["has_core_curve"]


def test_bounds(capsys):
    code, rep = report(capsys, "bounds", "--k", 1)
    assert code == EXIT_OK
    assert (rep["lower"], rep["upper"], rep["lower_log_form"]) == (1, 5, "log4(6)")


def test_distance_to_itself(capsys, files):
    code, rep = report(capsys, "distance", files["torus"], files["torus"])
    assert code == EXIT_OK
    assert rep["distance"] == 0 and rep["certificate"] == []


def test_distance_modes(capsys, files):
    _, rep = report(capsys, "distance", files["hex"], files["hex2"])
    d = rep["distance"]
    assert len(rep["certificate"]) == d
    _, rep = report(capsys, "distance", files["hex"], files["hex2"], "--bounds")
    assert rep["lower"] <= d <= rep["upper"]
    _, rep = report(capsys, "distance", files["torus"], "--flips", "c; a")
    assert rep["distance"] == 2


def test_path_certificate_verifies(capsys, files, tmp_path):
    code, out, _ = run(capsys, "path", files["hex"], files["hex2"])
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["length"] <= rep["upper"]
    saved = tmp_path / "path.json"
    saved.write_text(out)
    code, rep = report(capsys, "verify", saved)
    assert code == EXIT_OK and rep["verdict"] == "valid"


def test_verify_rejects_a_broken_certificate(capsys, files, tmp_path):
    _, out, _ = run(capsys, "path", files["hex"], files["hex2"])
    obj = json.loads(out)
    obj["certificate"]["moves"].append(["1-2"])
    saved = tmp_path / "broken.json"
    saved.write_text(json.dumps(obj))
    code, rep = report(capsys, "verify", saved)
    assert code == EXIT_ERROR and rep["verdict"] == "invalid"


def test_comb(capsys, files):
    code, rep = report(capsys, "comb", files["hex"], "--along", files["arcs"])
    assert code == EXIT_OK
    back = parse_tri(rep["projected"])
    assert back.diagonals() == {frozenset(p) for p in (("1", "5"), ("2", "5"), ("3", "5"))}
    _, rev = report(capsys, "comb", files["hex"], "--along", files["arcs"], "--orient", "reverse")
    assert parse_tri(rev["projected"]).diagonals() == {frozenset(p) for p in (("1", "5"), ("2", "4"), ("2", "5"))}


def test_color(capsys, files):
    _, rep = report(capsys, "distance", files["hex"], files["hex2"], "--bounds")
    K = rep["K"]
    code, rep = report(capsys, "color", files["hex"], files["hex2"], "--k", K)
    assert code == EXIT_OK and rep["colors_used"] <= rep["bound"]
    code, _, err = run(capsys, "color", files["hex"], files["hex2"], "--k", K - 1)
    assert code == EXIT_ERROR and "error:" in err


def test_component_exit_codes(capsys, files):
    code, rep = report(capsys, "component", files["zero"], files["bump"])
    assert code == EXIT_OK and rep["verdict"] == "Same" and rep["K"] == 5
    code, rep = report(capsys, "component", files["zero"], files["line"], "--witness-max", 3)
    assert code == EXIT_DIFFERENT and rep["verdict"] == "Different"
    assert [w["threshold"] for w in rep["witnesses"]] == [5, 21, 85]
    assert all(w["intersection"] >= w["threshold"] for w in rep["witnesses"])
    code, rep = report(capsys, "component", files["hex"], files["hex2"])
    assert code == EXIT_OK and rep["verdict"] == "Same"


def test_enumerate(capsys):
    code, rep = report(capsys, "enumerate", "--polygon", 6)
    assert code == EXIT_OK and rep["states"] == 14
    code, out, _ = run(capsys, "enumerate", "--polygon", 5, "--dot")
    assert out.startswith("graph flips {") and out.count(" -- ") == 5
    _, rep = report(capsys, "enumerate", "--punctured-torus", "--radius", 2, "--single")
    assert rep["states"] == 10 and rep["is_tree"]


def test_demo(capsys):
    code, rep = report(capsys, "demo", "twist-family", "--n-max", 2)
    assert code == EXIT_OK
    assert [d["verdict"] for d in rep["decisions"]] == ["Same", "Different", "Different", "Different"]


def test_errors_exit_with_one(capsys, files, tmp_path):
    code, _, err = run(capsys, "validate", tmp_path / "missing.tri")
    assert code == EXIT_ERROR and err.startswith("error:")
    code, _, err = run(capsys, "validate", files["bad"])
    assert code == EXIT_ERROR and "line 2" in err


def test_reports_are_deterministic_apart_from_timings(capsys, files):
    outs = []
    for _ in range(2):
        _, rep = report(capsys, "path", files["hex"], files["hex2"])
        rep.pop("timings")
        outs.append(rep)
    assert outs[0] == outs[1]
