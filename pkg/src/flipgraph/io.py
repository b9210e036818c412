"""
Text formats and JSON reports.

TRI (one statement per line, ``#`` starts a comment)::

    periodic                          # optional; enables label@+k offsets
    triangle <id> <l0> <l1> <l2> [corners <v0> <v1> <v2>]
    core <triangle>:<k> ...           # periodic only: sides crossed by the cell's core curve
    test <label>                      # periodic only: the cell's test arc

ARC::

    arc <id> from <v> to <v> crossing <e1> <e2> ...

PROFILE::

    profile constant <c>
    profile affine <a> <b>
    profile periodic <m0> ... repeat <p0> ...
    profile explicit <m0> <m1> ... tail <profile body>
"""
from __future__ import annotations

import hashlib
import json
import logging
import re
from typing import Any, Iterable, Sequence

from .arcs import Arc, Multiarc, arc_from_crossings, check_disjoint, reduce_arc
from .errors import (FlipGraphError, LabelUsedMoreThanTwice, NonOrientableGluing, TriSyntaxError,
                     UnknownEdge)
from .flips import PathCertificate
from .infinite import (Affine, Constant, EventuallyPeriodic, Explicit, PeriodicTriangulation,
                       TwistProfile, build_flute, split_offset)
from .quads import FlipMove, apply_simultaneous_flip
from .triangulation import BOUNDARY, Triangulation, build_from_gluing

log = logging.getLogger(__name__)

__all__ = ["parse_tri", "serialize_tri", "parse_arcs", "parse_named_arcs", "serialize_arcs",
           "parse_profile", "serialize_profile", "emit_report", "digest", "certificate_to_json",
           "certificate_from_json", "verify_certificate_json", "parse_moves"]


def _tokens(line: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line.split("#", 1)[0])]


def _located(exc: FlipGraphError, line: int | None, column: int | None) -> FlipGraphError:
    if line is None:
        return exc
    where = f"line {line}" + (f", column {column}" if column else "") + ": "
    new = type(exc)(where + str(exc))
    new.line, new.column = line, column
    return new


# ---------------------------------------------------------------- TRI

def parse_tri(text: str) -> Triangulation | PeriodicTriangulation:
    periodic = False
    triangles: list[tuple[str, list[str]]] = []
    corners: dict[str, tuple[str, ...]] = {}
    where: dict[str, tuple[int, int]] = {}
    label_pos: dict[str, list[tuple[int, int, bool]]] = {}
    core: list[tuple[str, int]] = []
    test = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        head, col = toks[0]
        if head == "periodic":
            if triangles or len(toks) > 1:
                raise TriSyntaxError("'periodic' must be the first statement and stand alone", ln, col)
            periodic = True
        elif head == "triangle":
            if len(toks) not in (5, 9) or (len(toks) == 9 and toks[5][0] != "corners"):
                raise TriSyntaxError("expected 'triangle <id> <l0> <l1> <l2> [corners <v0> <v1> <v2>]'",
                                     ln, toks[min(len(toks) - 1, 5)][1])
            name = toks[1][0]
            if name in where:
                raise TriSyntaxError(f"triangle {name!r} defined twice", ln, toks[1][1])
            where[name] = (ln, col)
            labels = [t for t, _ in toks[2:5]]
            for lab, c in toks[2:5]:
                if not periodic and "@" in lab:
                    raise TriSyntaxError("offset labels need the 'periodic' header", ln, c)
                flipped = lab.startswith("~")
                base = lab[1:] if flipped else lab
                if periodic:
                    base = split_offset(base)[0]
                if not base:
                    raise TriSyntaxError("empty label", ln, c)
                uses = label_pos.setdefault(base, [])
                if len(uses) == 2:
                    raise LabelUsedMoreThanTwice(
                        f"line {ln}, column {c}: side label {base!r} used more than twice")
                if uses and uses[0][2] != flipped:
                    raise NonOrientableGluing(
                        f"line {ln}, column {c}: sides labelled {base!r} would be traversed in the same direction")
                uses.append((ln, c, flipped))
            triangles.append((name, labels))
            if len(toks) == 9:
                corners[name] = tuple(t for t, _ in toks[6:9])
        elif head == "core":
            if not periodic:
                raise TriSyntaxError("'core' is only meaningful for periodic triangulations", ln, col)
            for tok, c in toks[1:]:
                m = re.fullmatch(r"(.+):([012])", tok)
                if not m:
                    raise TriSyntaxError("expected <triangle>:<side 0-2>", ln, c)
                core.append((m.group(1), int(m.group(2))))
        elif head == "test":
            if not periodic or len(toks) != 2:
                raise TriSyntaxError("expected 'test <label>' in a periodic file", ln, col)
            test = toks[1][0]
        else:
            raise TriSyntaxError(f"unknown statement {head!r}", ln, col)
    if not triangles:
        raise TriSyntaxError("no triangles", 1, 1)
    if periodic:
        for name, _ in core:
            if name not in where:
                raise TriSyntaxError(f"core refers to unknown triangle {name!r}")
        if corners:
            raise TriSyntaxError("corner labels are generated for periodic triangulations",
                                 *where[next(iter(corners))])
        try:
            return build_flute(triangles, core, test)
        except FlipGraphError as exc:
            raise _located(exc, *where[triangles[0][0]]) from None
    if corners and len(corners) != len(triangles):
        missing = next(n for n, _ in triangles if n not in corners)
        raise TriSyntaxError("either every triangle lists corners or none does", *where[missing])
    try:
        return build_from_gluing(triangles, corners or None)
    except FlipGraphError as exc:
        raise _located(exc, *where[triangles[0][0]]) from None


def serialize_tri(T: Triangulation | PeriodicTriangulation) -> str:
    lines = []
    if isinstance(T, PeriodicTriangulation):
        lines.append("periodic")
        for name, labels in T.cell:
            labs = [lab if off == 0 else f"{lab}@{off:+d}" for lab, off in labels]
            lines.append(f"triangle {name} {' '.join(labs)}")
        if T.core:
            lines.append("core " + " ".join(f"{n}:{k}" for n, k in T.core))
        if T.test_label:
            lines.append(f"test {T.test_label}")
        return "\n".join(lines) + "\n"
    for t, name in enumerate(T.triangle_names):
        labs = [T.edge_names[T.edge_of[3 * t + k]] for k in range(3)]
        cs = [T.corner_labels[3 * t + k] for k in range(3)]
        lines.append(f"triangle {name} {' '.join(labs)} corners {' '.join(cs)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- ARC

def parse_named_arcs(text: str, T: Triangulation) -> list[tuple[str, Arc]]:
    out = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        words = [t for t, _ in toks]
        if len(words) < 6 or words[0] != "arc" or words[2] != "from" or words[4] != "to" \
                or (len(words) > 6 and words[6] != "crossing"):
            raise TriSyntaxError("expected 'arc <id> from <v> to <v> crossing <e1> ...'", ln, toks[0][1])
        edges = []
        for name, c in toks[7:]:
            try:
                edges.append(T.edge_by_name(name))
            except KeyError:
                raise UnknownEdge(f"line {ln}, column {c}: unknown edge {name!r}") from None
        labels = {T.corner_labels[c] for c in range(len(T.gluing))}
        for v, c in (toks[3], toks[5]):
            if v not in labels:
                raise TriSyntaxError(f"unknown vertex {v!r}", ln, c)
        try:
            a = arc_from_crossings(T, words[3], words[5], edges)
        except FlipGraphError as exc:
            raise _located(exc, ln, toks[0][1]) from None
        r = reduce_arc(a, T)
        if len(r.sides) != len(a.sides):
            log.warning("line %d: arc %s was not reduced; using its reduced form (%d crossings)",
                        ln, words[1], len(r.sides))
        out.append((words[1], r))
    return out


def parse_arcs(text: str, T: Triangulation) -> Multiarc:
    arcs = [a for _, a in parse_named_arcs(text, T)]
    check_disjoint(arcs, T)
    return Multiarc(arcs)


def serialize_arcs(arcs: Iterable[Arc], T: Triangulation, names: Sequence[str] | None = None) -> str:
    lines = []
    for i, a in enumerate(arcs):
        name = names[i] if names else f"a{i + 1}"
        u, v = a.endpoints(T)
        crossed = " ".join(T.edge_names[e] for e in a.crossings(T))
        lines.append(f"arc {name} from {u} to {v}" + (f" crossing {crossed}" if crossed else ""))
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------- PROFILE

def _ints(toks, ln) -> list[int]:
    out = []
    for t, c in toks:
        try:
            v = int(t)
        except ValueError:
            raise TriSyntaxError(f"expected an integer, got {t!r}", ln, c) from None
        if v < 0:
            raise TriSyntaxError("twist counts must be non-negative", ln, c)
        out.append(v)
    return out


def _profile_body(toks, ln) -> TwistProfile:
    if not toks:
        raise TriSyntaxError("missing profile kind", ln)
    kind, col = toks[0]
    rest = toks[1:]
    if kind == "constant" and len(rest) == 1:
        return Constant(*_ints(rest, ln))
    if kind == "affine" and len(rest) == 2:
        return Affine(*_ints(rest, ln))
    if kind == "periodic":
        words = [t for t, _ in rest]
        if "repeat" not in words:
            raise TriSyntaxError("expected 'periodic <m0> ... repeat <p0> ...'", ln, col)
        i = words.index("repeat")
        if i == len(rest) - 1:
            raise TriSyntaxError("the repeating part cannot be empty", ln, rest[i][1])
        return EventuallyPeriodic(_ints(rest[:i], ln), _ints(rest[i + 1:], ln))
    if kind == "explicit":
        words = [t for t, _ in rest]
        if "tail" not in words:
            raise TriSyntaxError("expected 'explicit <m0> ... tail <kind> ...'", ln, col)
        i = words.index("tail")
        return Explicit(_ints(rest[:i], ln), _profile_body(rest[i + 1:], ln))
    raise TriSyntaxError(f"malformed profile {kind!r}", ln, col)


def parse_profile(text: str) -> TwistProfile:
    found = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        if toks[0][0] != "profile":
            raise TriSyntaxError("expected 'profile ...'", ln, toks[0][1])
        if found is not None:
            raise TriSyntaxError("only one profile per file", ln, toks[0][1])
        found = _profile_body(toks[1:], ln)
    if found is None:
        raise TriSyntaxError("no profile", 1, 1)
    return found


def _profile_words(p: TwistProfile) -> str:
    if isinstance(p, Constant):
        return f"constant {p.c}"
    if isinstance(p, Affine):
        return f"affine {p.a} {p.b}"
    if isinstance(p, EventuallyPeriodic):
        return " ".join(["periodic", *map(str, p.prefix), "repeat", *map(str, p.repeat)])
    if isinstance(p, Explicit):
        return " ".join(["explicit", *map(str, p.values), "tail", _profile_words(p.tail)])
    raise FlipGraphError(f"cannot serialize {p!r}")


def serialize_profile(p: TwistProfile) -> str:
    return f"profile {_profile_words(p)}\n"


# ---------------------------------------------------------------- moves and certificates

def parse_moves(text: str, T: Triangulation) -> list[FlipMove]:
    """``"a b; c"``: moves separated by ``;``, edges named within a move."""
    moves = []
    for group in text.split(";"):
        names = group.replace(",", " ").split()
        if not names:
            continue
        moves.append(FlipMove(T.edge_by_name(n) for n in names))
    return moves


def _move_names(T: Triangulation, m: FlipMove) -> list[str]:
    return [T.edge_names[e] for e in m]


def certificate_to_json(cert: PathCertificate) -> dict:
    """Start, moves by edge name, and the endpoint reached by replaying them."""
    T = cert.start
    moves = []
    for m in cert.moves:
        moves.append(_move_names(T, m))
        T = apply_simultaneous_flip(T, m)
    return {"start": serialize_tri(cert.start), "moves": moves, "end": serialize_tri(T)}


def certificate_from_json(obj: dict) -> tuple[Triangulation, list[list[str]], Triangulation]:
    return parse_tri(obj["start"]), [list(m) for m in obj["moves"]], parse_tri(obj["end"])


def verify_certificate_json(obj: dict) -> bool:
    """Replay the moves on the start and compare with the stated end, gluing by gluing."""
    try:
        start, moves, end = certificate_from_json(obj)
        X = start
        for names in moves:
            X = apply_simultaneous_flip(X, FlipMove(X.edge_by_name(n) for n in names))
    except (FlipGraphError, KeyError, TypeError):
        return False
    return _gluing_table(X) == _gluing_table(end)


def _gluing_table(T: Triangulation) -> tuple:
    """Triangle names with their side names and corner labels, independent of internal ids."""
    rows = []
    for t, name in enumerate(T.triangle_names):
        sides = []
        for k in range(3):
            s = 3 * t + k
            p = T.gluing[s]
            other = None if p == BOUNDARY else (T.triangle_names[p // 3], p % 3)
            sides.append((T.edge_names[T.edge_of[s]], other, T.corner_labels[s]))
        rows.append((name, tuple(sides)))
    return tuple(sorted(rows))


# ---------------------------------------------------------------- reports

def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def emit_report(result: dict[str, Any]) -> str:
    """JSON with keys in insertion order; a ``timings`` entry is always placed last."""
    body = {k: v for k, v in result.items() if k != "timings"}
    if "timings" in result:
        body["timings"] = result["timings"]
    return json.dumps(body, indent=2, ensure_ascii=False) + "\n"
