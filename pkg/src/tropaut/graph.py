"""Metric graphs with exact rational edge lengths.

A :class:`Model` is a connected multigraph (loops allowed) with positive
``Fraction`` lengths.  Each edge is oriented from ``u`` (offset 0) to ``v``
(offset ``length``); points are either vertices or ``(edge, offset)`` pairs
with the offset strictly inside the edge.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Point:
    """A point of a metric graph: a vertex id or an interior edge position."""

    vertex: str | None = None
    edge: str | None = None
    offset: Fraction | None = None

    @classmethod
    def at(cls, vertex: str) -> "Point":
        return cls(vertex=vertex)

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def sort_key(self) -> tuple:
        if self.vertex is not None:
            return (0, self.vertex, Fraction(0))
        return (1, self.edge, self.offset)

    def __lt__(self, other: "Point") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        if self.vertex is not None:
            return f"v:{self.vertex}"
        return f"e:{self.edge}@{self.offset}"

    __repr__ = __str__


# (edge id, offset, direction): direction +1 points toward increasing offset.
Germ = tuple[str, Fraction, int]


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    length: Fraction

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


def frac_gcd(values: Iterable[Fraction]) -> Fraction:
    """Largest rational ``h`` such that every value is an integer multiple of ``h``."""
    out = Fraction(0)
    for x in values:
        x = abs(Fraction(x))
        if x == 0:
            continue
        if out == 0:
            out = x
            continue
        den = out.denominator * x.denominator // math.gcd(out.denominator, x.denominator)
        out = Fraction(math.gcd(int(out * den), int(x * den)), den)
    return out


@dataclass(frozen=True)
class Model:
    """Combinatorial model of a compact connected metric graph."""

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ModelError("duplicate vertex id")
        if not self.edges:
            raise ModelError("a metric graph needs at least one edge")
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise ModelError("duplicate edge id")
        vs = set(self.vertices)
        for e in self.edges:
            if e.u not in vs or e.v not in vs:
                raise ModelError(f"edge {e.id} has an unknown endpoint")
            if not isinstance(e.length, Fraction) or e.length <= 0:
                raise ModelError(f"edge {e.id} must have a positive rational length")
        if not self.is_connected():
            raise ModelError("model is disconnected")

    @classmethod
    def build(cls, edges: Sequence[tuple], vertices: Sequence[str] | None = None) -> "Model":
        """Convenience constructor from ``(id, u, v, length)`` tuples."""
        es = tuple(Edge(str(i), str(u), str(v), Fraction(length)) for i, u, v, length in edges)
        if vertices is None:
            seen: dict[str, None] = {}
            for e in es:
                seen.setdefault(e.u)
                seen.setdefault(e.v)
            vertices = list(seen)
        return cls(tuple(str(v) for v in vertices), es)

    # -- lookups ----------------------------------------------------------
    @cached_property
    def _edge_index(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def _ends(self) -> dict[str, list[tuple[Edge, int]]]:
        out: dict[str, list[tuple[Edge, int]]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.u].append((e, 0))
            out[e.v].append((e, 1))
        return out

    def edge(self, eid: str) -> Edge:
        try:
            return self.edges[self._edge_index[eid]]
        except KeyError:
            raise ModelError(f"unknown edge {eid!r}") from None

    def edge_index(self, eid: str) -> int:
        return self._edge_index[eid]

    def ends(self, v: str) -> list[tuple[Edge, int]]:
        """Incident edge-ends at ``v``; a loop contributes both of its ends."""
        return self._ends[v]

    def is_connected(self) -> bool:
        adj = defaultdict(set)
        for e in self.edges:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)
        start = self.vertices[0]
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.vertices)

    # -- points -----------------------------------------------------------
    def point(self, edge: str, offset) -> Point:
        """Normalized point at ``offset`` along ``edge``; endpoints become vertices."""
        e = self.edge(edge)
        t = Fraction(offset)
        if t < 0 or t > e.length:
            raise ModelError(f"offset {t} outside edge {edge} of length {e.length}")
        if t == 0:
            return Point(vertex=e.u)
        if t == e.length:
            return Point(vertex=e.v)
        return Point(edge=edge, offset=t)

    def vertex(self, v: str) -> Point:
        if v not in self._ends:
            raise ModelError(f"unknown vertex {v!r}")
        return Point(vertex=v)

    def check_point(self, p: Point) -> Point:
        if p.vertex is not None:
            if p.vertex not in self._ends:
                raise ModelError(f"point {p} is not on the model")
            return p
        if p.edge not in self._edge_index:
            raise ModelError(f"point {p} is not on the model")
        if not (0 < p.offset < self.edge(p.edge).length):
            raise ModelError(f"point {p} is not normalized")
        return p

    def germs(self, p: Point) -> list[Germ]:
        """Tangent directions at ``p``."""
        self.check_point(p)
        if p.vertex is not None:
            return [(e.id, Fraction(0), 1) if end == 0 else (e.id, e.length, -1) for e, end in self.ends(p.vertex)]
        return [(p.edge, p.offset, 1), (p.edge, p.offset, -1)]

    def valency(self, p: Point) -> int:
        return len(self.germs(p))

    @property
    def genus(self) -> int:
        return genus(self)

    @cached_property
    def total_length(self) -> Fraction:
        return sum((e.length for e in self.edges), Fraction(0))

    def is_circle(self) -> bool:
        """Homeomorphic to a circle: every vertex has valence two."""
        return all(len(self.ends(v)) == 2 for v in self.vertices)

    def full(self) -> "Subgraph":
        return Subgraph(self, tuple((e.id, Fraction(0), e.length) for e in self.edges), frozenset())


def genus(m: Model) -> int:
    """First Betti number ``#E - #V + 1``."""
    if not m.is_connected():
        raise ModelError("genus is only defined for connected models")
    return len(m.edges) - len(m.vertices) + 1


def valency(m: Model, p: Point) -> int:
    return m.valency(p)


# ---------------------------------------------------------------------------
# refinements


@dataclass(frozen=True)
class Refinement:
    """A model obtained by inserting vertices at interior points of ``base`` edges.

    Fine vertices at cut points are named ``<edge>@<offset>`` and the pieces of a
    cut edge ``<edge>#<i>``.  Pieces keep the orientation of their parent edge.
    """

    base: Model
    cuts: tuple[tuple[str, tuple[Fraction, ...]], ...] = ()

    @classmethod
    def from_points(cls, base: Model, points: Iterable[Point]) -> "Refinement":
        cuts: dict[str, set[Fraction]] = defaultdict(set)
        for p in points:
            base.check_point(p)
            if p.vertex is None:
                cuts[p.edge].add(p.offset)
        return cls(base, tuple((e.id, tuple(sorted(cuts[e.id]))) for e in base.edges if cuts.get(e.id)))

    @cached_property
    def _cuts(self) -> dict[str, tuple[Fraction, ...]]:
        return dict(self.cuts)

    @cached_property
    def pieces(self) -> dict[str, list[tuple[str, Fraction, Fraction]]]:
        """Base edge id -> ordered list of ``(fine edge id, start, end)``."""
        out = {}
        for e in self.base.edges:
            offs = self._cuts.get(e.id, ())
            if not offs:
                out[e.id] = [(e.id, Fraction(0), e.length)]
                continue
            bounds = [Fraction(0), *offs, e.length]
            out[e.id] = [(f"{e.id}#{i}", a, b) for i, (a, b) in enumerate(zip(bounds, bounds[1:]))]
        return out

    @cached_property
    def parent(self) -> dict[str, tuple[str, Fraction, Fraction]]:
        return {fid: (eid, a, b) for eid, ps in self.pieces.items() for fid, a, b in ps}

    def _cut_vertex(self, eid: str, t: Fraction) -> str:
        e = self.base.edge(eid)
        if t == 0:
            return e.u
        if t == e.length:
            return e.v
        return f"{eid}@{t}"

    @cached_property
    def fine(self) -> Model:
        verts = list(self.base.vertices)
        edges = []
        for e in self.base.edges:
            for t in self._cuts.get(e.id, ()):
                verts.append(self._cut_vertex(e.id, t))
            for fid, a, b in self.pieces[e.id]:
                edges.append(Edge(fid, self._cut_vertex(e.id, a), self._cut_vertex(e.id, b), b - a))
        return Model(tuple(verts), tuple(edges))

    @cached_property
    def _vertex_to_base(self) -> dict[str, Point]:
        out = {v: Point(vertex=v) for v in self.base.vertices}
        for eid, offs in self.cuts:
            for t in offs:
                out[self._cut_vertex(eid, t)] = Point(edge=eid, offset=t)
        return out

    def to_fine(self, p: Point) -> Point:
        self.base.check_point(p)
        if p.vertex is not None:
            return p
        for fid, a, b in self.pieces[p.edge]:
            if a <= p.offset <= b:
                if p.offset == a or p.offset == b:
                    return Point(vertex=self._cut_vertex(p.edge, p.offset))
                return Point(edge=fid, offset=p.offset - a)
        raise AssertionError("unreachable")

    def to_base(self, p: Point) -> Point:
        if p.vertex is not None:
            return self._vertex_to_base[p.vertex]
        eid, a, _ = self.parent[p.edge]
        return Point(edge=eid, offset=a + p.offset)

    def base_points(self) -> list[Point]:
        """All fine vertices, as base points."""
        return [self._vertex_to_base[v] for v in self.fine.vertices]


def subdivide(m: Model, h) -> Refinement:
    """Split every edge into segments of length exactly ``h``."""
    h = Fraction(h)
    if h <= 0:
        raise ModelError("granularity must be positive")
    cuts = []
    for e in m.edges:
        k = e.length / h
        if k.denominator != 1:
            raise ModelError(f"granularity {h} does not divide the length {e.length} of edge {e.id}")
        if k > 1:
            cuts.append((e.id, tuple(h * i for i in range(1, int(k)))))
    return Refinement(m, tuple(cuts))


# ---------------------------------------------------------------------------
# subgraphs


@dataclass(frozen=True)
class Subgraph:
    """Compact subset: closed intervals on edges plus isolated points."""

    model: Model
    intervals: tuple[tuple[str, Fraction, Fraction], ...]
    points: frozenset[Point] = field(default_factory=frozenset)

    def __post_init__(self):
        for eid, a, b in self.intervals:
            length = self.model.edge(eid).length
            if not (0 <= a < b <= length):
                raise ModelError(f"bad interval [{a}, {b}] on edge {eid}")

    @property
    def is_empty(self) -> bool:
        return not self.intervals and not self.points

    def is_full(self) -> bool:
        cover: dict[str, list[tuple[Fraction, Fraction]]] = defaultdict(list)
        for eid, a, b in self.intervals:
            cover[eid].append((a, b))
        for e in self.model.edges:
            reach = Fraction(0)
            for a, b in sorted(cover[e.id]):
                if a > reach:
                    return False
                reach = max(reach, b)
            if reach < e.length:
                return False
        return True

    def is_proper(self) -> bool:
        return not self.is_empty and not self.is_full()

    def contains_germ(self, g: Germ) -> bool:
        eid, t, d = g
        for fid, a, b in self.intervals:
            if fid == eid and ((d > 0 and a <= t < b) or (d < 0 and a < t <= b)):
                return True
        return False

    def contains(self, p: Point) -> bool:
        if p in self.points:
            return True
        # every point of a closed interval of positive length has a germ inside it
        return any(self.contains_germ(g) for g in self.model.germs(p))

    def candidate_boundary(self) -> set[Point]:
        out = set(self.points)
        m = self.model
        for eid, a, b in self.intervals:
            out.add(m.point(eid, a))
            out.add(m.point(eid, b))
        return out

    def boundary_points(self) -> list[Point]:
        return sorted(p for p in self.candidate_boundary() if boundary_outdegree(self, p, strict=False) > 0)


def boundary_outdegree(s: Subgraph, p: Point, strict: bool = True) -> int:
    """Number of directions at ``p`` that leave ``s``."""
    if not s.contains(p):
        if strict:
            raise ModelError(f"{p} is not a point of the subgraph")
        return 0
    out = sum(1 for g in s.model.germs(p) if not s.contains_germ(g))
    if strict and out == 0:
        raise ModelError(f"{p} is not a boundary point of the subgraph")
    return out


def components(s: Subgraph) -> list[Subgraph]:
    """Connected components, ordered by their first interval or point."""
    m = s.model
    items: list[tuple] = [("i", iv) for iv in s.intervals] + [("p", p) for p in sorted(s.points)]
    parent = list(range(len(items)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def pts(item) -> set[Point]:
        kind, x = item
        if kind == "p":
            return {x}
        eid, a, b = x
        return {m.point(eid, a), m.point(eid, b)}

    def overlap(x, y) -> bool:
        if x[0] == "i" and y[0] == "i" and x[1][0] == y[1][0]:
            (_, a1, b1), (_, a2, b2) = x[1], y[1]
            return a1 <= b2 and a2 <= b1
        if x[0] == "p" and y[0] == "i":
            x, y = y, x
        if x[0] == "i" and y[0] == "p":
            eid, a, b = x[1]
            p = y[1]
            if p.vertex is None:
                return p.edge == eid and a <= p.offset <= b
        return bool(pts(x) & pts(y))

    for i in range(len(items)):
        for j in range(i):
            if overlap(items[i], items[j]):
                parent[find(i)] = find(j)
    groups: dict[int, list] = defaultdict(list)
    for i, it in enumerate(items):
        groups[find(i)].append(it)
    out = []
    for _, its in sorted(groups.items()):
        out.append(
            Subgraph(
                m,
                tuple(x for k, x in its if k == "i"),
                frozenset(x for k, x in its if k == "p"),
            )
        )
    return out


class CellDecomposition:
    """Closures of the connected components of ``Γ \\ S`` for a finite point set ``S``.

    Every subgraph whose boundary lies in ``S`` is a union of cells plus
    optional isolated points of ``S``.  ``germ_cell`` records which cell each
    direction at a point of ``S`` enters.
    """

    def __init__(self, m: Model, points: Iterable[Point]):
        self.model = m
        self.points = sorted(set(m.check_point(p) for p in points))
        ref = Refinement.from_points(m, self.points)
        fine = ref.fine
        cut = {ref.to_fine(p).vertex for p in self.points}
        fids = [e.id for e in fine.edges]
        parent = {f: f for f in fids}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for v in fine.vertices:
            if v in cut:
                continue
            ends = [e.id for e, _ in fine.ends(v)]
            for other in ends[1:]:
                ra, rb = find(ends[0]), find(other)
                if ra != rb:
                    parent[rb] = ra
        order: dict[str, int] = {}
        self.cells: list[list[str]] = []
        for f in fids:
            r = find(f)
            if r not in order:
                order[r] = len(self.cells)
                self.cells.append([])
            self.cells[order[r]].append(f)
        self.edge_cell = {f: order[find(f)] for f in fids}
        self.refinement = ref
        self.germ_cell: dict[Point, list[int]] = {}
        for p in self.points:
            self.germ_cell[p] = [self._cell_of_germ(g) for g in m.germs(p)]

    def _cell_of_germ(self, g: Germ) -> int:
        eid, t, d = g
        for fid, a, b in self.refinement.pieces[eid]:
            if (d > 0 and a <= t < b) or (d < 0 and a < t <= b):
                return self.edge_cell[fid]
        raise AssertionError("germ outside its edge")

    def __len__(self) -> int:
        return len(self.cells)

    def subgraph(self, cells: Iterable[int], points: Iterable[Point] = ()) -> Subgraph:
        ivs = []
        for c in cells:
            for fid in self.cells[c]:
                ivs.append(self.refinement.parent[fid])
        return Subgraph(self.model, tuple(sorted(ivs)), frozenset(points))

    def subgraphs(self) -> list[Subgraph]:
        return [self.subgraph([i]) for i in range(len(self.cells))]


def complement_closure_subgraphs(m: Model, boundary_set: Iterable[Point]) -> list[Subgraph]:
    return CellDecomposition(m, boundary_set).subgraphs()


def edge_lengths_gcd(m: Model, extra: Iterable[Fraction] = ()) -> Fraction:
    return frac_gcd([e.length for e in m.edges] + list(extra))


def point_offsets(points: Iterable[Point]) -> list[Fraction]:
    return [p.offset for p in points if p.vertex is None]

