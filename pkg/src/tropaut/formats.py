"""Line-based text formats for graphs, divisors, group specs and functions.

Graph::

    vertex x
    edge e x y 1/2

Divisor::

    chip v:x 1
    chip e:e@1/2 2

Group spec (one generator per line, or ``auto``)::

    auto
    rotate 2
    reflect v:x v:xp
    map vA->B vB->A ; eE->E-

``map`` lines may be preceded by ``cut <point> ...`` lines, which subdivide the
model first; vertex and edge ids then refer to the subdivided model.
A ``#`` at the start of a word begins a comment.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .automorphism import (
    Automorphism,
    FiniteGroup,
    GroupError,
    compute_aut,
    finite_subgroup_of_circle,
    subgroup_generated,
)
from .divisor import Divisor
from .graph import Edge, Model, ModelError, Point, Refinement
from .rational import RationalFunction


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<input>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


_FRAC = re.compile(r"^-?\d+(/\d+)?$")
_COMMENT = re.compile(r"(^|\s)#.*$")


def parse_fraction(tok: str) -> Fraction:
    if not _FRAC.match(tok):
        raise ValueError(f"not an exact rational p/q: {tok!r}")
    num, _, den = tok.partition("/")
    if den and int(den) == 0:
        raise ValueError(f"zero denominator in {tok!r}")
    return Fraction(int(num), int(den) if den else 1)


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        # fine edge ids contain '#', so only a '#' that starts a word opens a comment
        line = _COMMENT.sub("", raw).strip()
        if line:
            yield no, line


# -- points -------------------------------------------------------------------


def parse_point(m: Model, tok: str) -> Point:
    if tok.startswith("v:"):
        return m.vertex(tok[2:])
    if tok.startswith("e:") and "@" in tok:
        eid, _, off = tok[2:].rpartition("@")
        return m.point(eid, parse_fraction(off))
    raise ValueError(f"bad point {tok!r}; use v:<id> or e:<id>@<p>/<q>")


def format_point(p: Point) -> str:
    return str(p)


# -- graphs -------------------------------------------------------------------


def parse_model(text: str, source: str = "<graph>") -> Model:
    vertices: list[str] = []
    edges: list[Edge] = []
    for no, line in _lines(text):
        tok = line.split()
        try:
            if tok[0] == "vertex" and len(tok) == 2:
                vertices.append(tok[1])
            elif tok[0] == "edge" and len(tok) == 5:
                edges.append(Edge(tok[1], tok[2], tok[3], parse_fraction(tok[4])))
            else:
                raise ValueError(f"expected 'vertex <id>' or 'edge <id> <u> <v> <p>/<q>', got {line!r}")
        except ValueError as exc:
            raise ParseError(str(exc), no, source) from None
    seen = set(vertices)
    for e in edges:
        for v in (e.u, e.v):
            if v not in seen:
                seen.add(v)
                vertices.append(v)
    try:
        return Model(tuple(vertices), tuple(edges))
    except ModelError as exc:
        raise ParseError(str(exc), None, source) from None


def serialize_model(m: Model) -> str:
    out = [f"vertex {v}" for v in m.vertices]
    out += [f"edge {e.id} {e.u} {e.v} {e.length}" for e in m.edges]
    return "\n".join(out) + "\n"


# -- divisors -----------------------------------------------------------------


def parse_divisor(m: Model, text: str, source: str = "<divisor>") -> Divisor:
    terms = []
    for no, line in _lines(text):
        tok = line.split()
        try:
            if tok[0] != "chip" or len(tok) != 3:
                raise ValueError(f"expected 'chip <point> <integer>', got {line!r}")
            terms.append((parse_point(m, tok[1]), int(tok[2])))
        except ValueError as exc:
            raise ParseError(str(exc), no, source) from None
    return Divisor.from_mapping(m, terms)


def serialize_divisor(d: Divisor) -> str:
    return "".join(f"chip {p} {c}\n" for p, c in d.items())


# -- group specs --------------------------------------------------------------


def _parse_map(line: str, ref: Refinement):
    body = line[len("map") :]
    vpart, _, epart = body.partition(";")
    fine = ref.fine
    vmap, emap = {}, {}
    for tok in vpart.split():
        if not tok.startswith("v") or "->" not in tok:
            raise ValueError(f"bad vertex assignment {tok!r}; use v<a>-><b>")
        a, _, b = tok[1:].lstrip(":").partition("->")
        if a not in fine.vertices or b not in fine.vertices:
            raise ValueError(f"unknown vertex in {tok!r}")
        vmap[a] = b
    for tok in epart.split():
        if not tok.startswith("e") or "->" not in tok:
            raise ValueError(f"bad edge assignment {tok!r}; use e<a>-><b>[+|-]")
        a, _, b = tok[1:].lstrip(":").partition("->")
        flip = b.endswith("-")
        b = b.rstrip("+-")
        fids = {e.id for e in fine.edges}
        if a not in fids or b not in fids:
            raise ValueError(f"unknown edge in {tok!r}")
        emap[a] = (b, flip)
    return vmap, emap


def parse_group(m: Model, text: str, source: str = "<group>") -> FiniteGroup:
    """Build the group described by a spec file on ``m``."""
    auto = False
    rotations, reflections = [], []
    gens: list[Automorphism] = []
    cuts: list[Point] = []
    for no, line in _lines(text):
        tok = line.split()
        try:
            if tok[0] == "auto" and len(tok) == 1:
                auto = True
            elif tok[0] == "rotate" and len(tok) == 2:
                rotations.append(parse_fraction(tok[1]))
            elif tok[0] == "reflect" and len(tok) == 3:
                reflections.append((parse_point(m, tok[1]), parse_point(m, tok[2])))
            elif tok[0] == "cut":
                cuts += [parse_point(m, t) for t in tok[1:]]
            elif tok[0] == "map":
                ref = Refinement.from_points(m, cuts)
                vmap, emap = _parse_map(line, ref)
                g = Automorphism.from_maps(ref.fine, vmap, emap)
                gens.append(_lift(ref, g, f"s{len(gens) + 1}"))
            else:
                raise ValueError(f"unrecognized group spec line {line!r}")
        except (ValueError, GroupError, ModelError) as exc:
            raise ParseError(str(exc), no, source) from None
    kinds = sum(map(bool, (auto, rotations or reflections, gens)))
    if kinds > 1:
        raise ParseError("mix of 'auto', circle generators and 'map' lines", None, source)
    try:
        if auto:
            return compute_aut(m)
        if rotations or reflections:
            return finite_subgroup_of_circle(m, rotations, reflections)
        return subgroup_generated(gens, model=m)
    except (GroupError, ModelError) as exc:
        raise ParseError(str(exc), None, source) from None


def _lift(ref: Refinement, g: Automorphism, name: str) -> Automorphism:
    """Re-express an automorphism of ``ref.fine`` on ``ref`` (same simplicial data)."""
    return Automorphism(ref, g.vmap, g.emap, name=name)


def serialize_group(group: FiniteGroup) -> str:
    """All elements as ``map`` lines on the group's refinement."""
    ref = group.refinement
    out = []
    cut_pts = [Point(edge=eid, offset=t) for eid, offs in ref.cuts for t in offs]
    if cut_pts:
        out.append("cut " + " ".join(str(p) for p in cut_pts))
    for g in group:
        if g.is_identity:
            continue
        vs = " ".join(f"v{a}->{b}" for a, b in g.vmap)
        es = " ".join(f"e{a}->{b}{'-' if f else '+'}" for a, b, f in g.emap)
        out.append(f"map {vs} ; {es}")
    return "\n".join(out) + "\n"


# -- functions ----------------------------------------------------------------


def parse_function(m: Model, text: str) -> RationalFunction:
    """Inverse of :meth:`RationalFunction.serialize`."""
    text = text.strip()
    if text == "-inf":
        return RationalFunction.bottom(m)
    pieces = {}
    for part in text.split("|"):
        eid, _, body = part.partition(":")
        pairs = []
        for pair in body.split(","):
            t, v = pair.split()
            pairs.append((parse_fraction(t), parse_fraction(v)))
        pieces[eid.strip()] = pairs
    return RationalFunction.from_pieces(m, pieces)
