"""Isometric automorphisms of metric graphs and finite groups of them.

An :class:`Automorphism` is stored as a simplicial map (vertex permutation
plus edge bijection with orientation flags) on a :class:`Refinement` of the
user's model; its action on points of the user's model goes through that
refinement.  All elements of a :class:`FiniteGroup` share one refinement,
which is invariant under the whole group.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .graph import Edge, Model, ModelError, Point, Refinement


class InfiniteGroupError(ValueError):
    """The automorphism group of a circle is infinite."""


class GroupError(ValueError):
    pass


PointMap = Callable[[Point], Point]


@dataclass(frozen=True, eq=False)
class Automorphism:
    refinement: Refinement
    vmap: tuple[tuple[str, str], ...]
    emap: tuple[tuple[str, str, bool], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        fine = self.refinement.fine
        v = self._v
        e = self._e
        if set(v) != set(fine.vertices) or sorted(v.values()) != sorted(fine.vertices):
            raise GroupError("vertex map is not a permutation")
        if set(e) != {x.id for x in fine.edges} or len({t for t, _ in e.values()}) != len(e):
            raise GroupError("edge map is not a bijection")
        for x in fine.edges:
            tid, flipped = e[x.id]
            y = fine.edge(tid)
            if y.length != x.length:
                raise GroupError(f"edge {x.id} maps to edge {tid} of different length")
            ends = (y.v, y.u) if flipped else (y.u, y.v)
            if (v[x.u], v[x.v]) != ends:
                raise GroupError(f"edge {x.id} -> {tid} does not respect incidence")

    @cached_property
    def _v(self) -> dict[str, str]:
        return dict(self.vmap)

    @cached_property
    def _e(self) -> dict[str, tuple[str, bool]]:
        return {a: (b, f) for a, b, f in self.emap}

    @property
    def model(self) -> Model:
        return self.refinement.base

    @property
    def key(self):
        return (self.refinement, self.vmap, self.emap)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Automorphism):
            return NotImplemented
        if other.refinement != self.refinement:
            other = other.on(self.refinement)
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Automorphism({self.name or self.describe()})"

    # -- action -----------------------------------------------------------
    def edge_image(self, fine_edge: str) -> tuple[str, bool]:
        return self._e[fine_edge]

    def act_fine(self, p: Point) -> Point:
        if p.vertex is not None:
            return Point(vertex=self._v[p.vertex])
        tid, flipped = self._e[p.edge]
        length = self.refinement.fine.edge(tid).length
        return Point(edge=tid, offset=length - p.offset if flipped else p.offset)

    def __call__(self, p: Point) -> Point:
        ref = self.refinement
        return ref.to_base(self.act_fine(ref.to_fine(p)))

    def __mul__(self, other: "Automorphism") -> "Automorphism":
        """Composition ``self ∘ other``: apply ``other`` first."""
        if other.refinement != self.refinement:
            raise GroupError("compose automorphisms on a common refinement (use subgroup_generated)")
        v = tuple((a, self._v[b]) for a, b in other.vmap)
        e = []
        for a, b, f in other.emap:
            c, g = self._e[b]
            e.append((a, c, f != g))
        return Automorphism(self.refinement, v, tuple(e))

    def inverse(self) -> "Automorphism":
        v = tuple(sorted((b, a) for a, b in self.vmap))
        e = tuple(sorted((b, a, f) for a, b, f in self.emap))
        return Automorphism(self.refinement, v, e)

    @property
    def is_identity(self) -> bool:
        return all(a == b for a, b in self.vmap) and all(a == b and not f for a, b, f in self.emap)

    def on(self, refinement: Refinement) -> "Automorphism":
        """Re-express on a finer refinement that is invariant under this map."""
        if refinement == self.refinement:
            return self
        return Automorphism.from_point_map(refinement, self, name=self.name)

    def describe(self) -> str:
        m = self.model
        parts = [f"{Point(vertex=v)}->{self(Point(vertex=v))}" for v in m.vertices]
        return " ".join(parts)

    # -- constructors -----------------------------------------------------
    @classmethod
    def identity(cls, refinement: Refinement) -> "Automorphism":
        fine = refinement.fine
        return cls(
            refinement,
            tuple((v, v) for v in fine.vertices),
            tuple((e.id, e.id, False) for e in fine.edges),
            name="id",
        )

    @classmethod
    def from_point_map(cls, refinement: Refinement, fn: PointMap, name: str = "") -> "Automorphism":
        """Read off simplicial data from an isometric point map of the base model."""
        fine = refinement.fine
        vmap = []
        for v in fine.vertices:
            img = refinement.to_fine(fn(refinement.to_base(Point(vertex=v))))
            if img.vertex is None:
                raise GroupError(f"vertex {v} maps to a non-vertex; refinement is not invariant")
            vmap.append((v, img.vertex))
        emap = []
        for e in fine.edges:
            mid = refinement.to_fine(fn(refinement.to_base(Point(edge=e.id, offset=e.length / 2))))
            if mid.vertex is not None:
                raise GroupError(f"midpoint of edge {e.id} maps to a vertex")
            target = fine.edge(mid.edge)
            if target.length != e.length or mid.offset != e.length / 2:
                raise GroupError(f"edge {e.id} is not mapped isometrically onto a refinement edge")
            quarter = refinement.to_fine(fn(refinement.to_base(Point(edge=e.id, offset=e.length / 4))))
            emap.append((e.id, target.id, quarter.offset != e.length / 4))
        return cls(refinement, tuple(vmap), tuple(emap), name=name)

    @classmethod
    def from_maps(
        cls,
        model: Model,
        vertex_map: Mapping[str, str],
        edge_map: Mapping[str, tuple[str, bool]] | None = None,
        name: str = "",
    ) -> "Automorphism":
        """Simplicial automorphism of ``model`` itself; unambiguous edge images may be omitted."""
        ref = Refinement(model)
        vmap = {v: vertex_map.get(v, v) for v in model.vertices}
        emap = dict(edge_map or {})
        used = {t for t, _ in emap.values()}
        for e in model.edges:
            if e.id in emap:
                continue
            cands = [
                y
                for y in model.edges
                if y.id not in used
                and y.length == e.length
                and {y.u, y.v} == {vmap[e.u], vmap[e.v]}
            ]
            if len(cands) != 1 or e.is_loop:
                raise GroupError(f"image of edge {e.id} is ambiguous; give it explicitly")
            y = cands[0]
            emap[e.id] = (y.id, (vmap[e.u], vmap[e.v]) != (y.u, y.v))
            used.add(y.id)
        return cls(
            ref,
            tuple(sorted(vmap.items())),
            tuple(sorted((a, b, f) for a, (b, f) in emap.items())),
            name=name,
        )


def act_on_point(sigma: Automorphism, p: Point) -> Point:
    return sigma(p)


# ---------------------------------------------------------------------------
# finite groups


class FiniteGroup:
    """A finite group of automorphisms with its composition table.

    ``table[i, j]`` is the index of ``elements[i] ∘ elements[j]``; element 0
    is the identity.
    """

    def __init__(self, elements: Sequence[Automorphism]):
        elements = list(elements)
        if not elements:
            raise GroupError("a group has at least the identity")
        ref = elements[0].refinement
        if any(g.refinement != ref for g in elements):
            raise GroupError("group elements must share a refinement")
        ident = [i for i, g in enumerate(elements) if g.is_identity]
        if not ident:
            raise GroupError("identity missing")
        i0 = ident[0]
        elements.insert(0, elements.pop(i0))
        if not elements[0].name:
            elements[0] = Automorphism(ref, elements[0].vmap, elements[0].emap, name="id")
        self.elements: tuple[Automorphism, ...] = tuple(elements)
        self.refinement = ref
        self._index = {g.key: i for i, g in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise GroupError("duplicate group elements")
        n = len(self.elements)
        table = np.empty((n, n), dtype=np.int64)
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                k = self._index.get((a * b).key)
                if k is None:
                    raise GroupError("element set is not closed under composition")
                table[i, j] = k
        self.table = table
        inv = []
        for i in range(n):
            row = np.nonzero(table[i] == 0)[0]
            if len(row) != 1 or table[row[0], i] != 0:
                raise GroupError("inverse missing")
            inv.append(int(row[0]))
        self.inverses = tuple(inv)
        if not all((table[0] == np.arange(n)).tolist()) or not all((table[:, 0] == np.arange(n)).tolist()):
            raise GroupError("identity law fails")

    @property
    def model(self) -> Model:
        return self.refinement.base

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> Automorphism:
        return self.elements[i]

    def index(self, g: Automorphism) -> int:
        if g.refinement != self.refinement:
            g = g.on(self.refinement)
        return self._index[g.key]

    def is_associative(self) -> bool:
        t = self.table
        n = range(len(t))
        return all(t[t[a, b], c] == t[a, t[b, c]] for a in n for b in n for c in n)

    def on(self, refinement: Refinement) -> "FiniteGroup":
        return FiniteGroup([g.on(refinement) for g in self.elements])

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"


def invariant_refinement(
    model: Model, maps: Sequence[PointMap], seeds: Iterable[Point] = (), budget: int = 100_000
) -> Refinement:
    """Smallest refinement containing ``seeds`` and all vertices, closed under ``maps``."""
    pts = {Point(vertex=v) for v in model.vertices} | set(seeds)
    frontier = list(pts)
    while frontier:
        nxt = []
        for p in frontier:
            for fn in maps:
                q = fn(p)
                if q not in pts:
                    pts.add(q)
                    nxt.append(q)
        if len(pts) > budget:
            raise GroupError("orbit of the vertex set is too large; is the group finite?")
        frontier = nxt
    return Refinement.from_points(model, pts)


def subgroup_generated(gens: Sequence[Automorphism], model: Model | None = None, budget: int = 10_000) -> FiniteGroup:
    """Closure of ``gens`` under composition."""
    gens = list(gens)
    if not gens:
        if model is None:
            raise GroupError("the trivial group needs a model")
        return FiniteGroup([Automorphism.identity(Refinement(model))])
    refs = {g.refinement for g in gens}
    if len(refs) > 1:
        seeds = [p for r in refs for p in r.base_points()]
        ref = invariant_refinement(gens[0].model, gens, seeds)
        gens = [g.on(ref) for g in gens]
    ref = gens[0].refinement
    gens = [g if g.name else Automorphism(ref, g.vmap, g.emap, name=f"s{i + 1}") for i, g in enumerate(gens)]
    ident = Automorphism.identity(ref)
    seen = {ident.key: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = g * a
                if b.key not in seen:
                    # shortest word in the generators, written as a composition
                    word = g.name if a.is_identity else f"{g.name}∘{a.name}"
                    seen[b.key] = Automorphism(ref, b.vmap, b.emap, name=word)
                    nxt.append(seen[b.key])
        if len(seen) > budget:
            raise GroupError(f"group closure exceeded {budget} elements")
        frontier = nxt
    return FiniteGroup(list(seen.values()))


# ---------------------------------------------------------------------------
# canonical models


@dataclass(frozen=True)
class _Chain:
    id: str
    u: str
    w: str
    length: Fraction
    steps: tuple[tuple[str, bool, Fraction], ...]  # (edge, forward, start position)


class CanonicalModel:
    """The model with all valence-2 vertices suppressed.

    Each canonical edge is a chain of original edges.  A circle becomes a
    single loop at its first vertex and is flagged.
    """

    def __init__(self, m: Model):
        self.base = m
        self.is_circle = m.is_circle()
        if self.is_circle:
            essential = [m.vertices[0]]
        else:
            essential = [v for v in m.vertices if len(m.ends(v)) != 2]
        ess = set(essential)
        used: set[tuple[str, int]] = set()
        chains: list[_Chain] = []
        for v in essential:
            for e, end in m.ends(v):
                if (e.id, end) in used:
                    continue
                steps = []
                pos = Fraction(0)
                cur_e, cur_end = e, end
                while True:
                    forward = cur_end == 0
                    used.add((cur_e.id, cur_end))
                    used.add((cur_e.id, 1 - cur_end))
                    steps.append((cur_e.id, forward, pos))
                    pos += cur_e.length
                    nxt = cur_e.v if forward else cur_e.u
                    if nxt in ess:
                        break
                    arrival = (cur_e.id, 1 if forward else 0)
                    (a, b) = m.ends(nxt)
                    cur_e, cur_end = b if (a[0].id, a[1]) == arrival else a
                chains.append(_Chain(f"c{len(chains)}", v, nxt, pos, tuple(steps)))
        self.chains = chains
        self.model = Model(tuple(essential), tuple(Edge(c.id, c.u, c.w, c.length) for c in chains))
        self._chain = {c.id: c for c in chains}
        self._edge_loc = {}
        self._vertex_loc = {}
        for c in chains:
            for eid, forward, start in c.steps:
                self._edge_loc[eid] = (c, forward, start)
                length = m.edge(eid).length
                e = m.edge(eid)
                tail, head = (e.u, e.v) if forward else (e.v, e.u)
                if tail not in ess:
                    self._vertex_loc[tail] = (c.id, start)
                if head not in ess:
                    self._vertex_loc[head] = (c.id, start + length)

    def to_canon(self, p: Point) -> Point:
        if p.vertex is not None:
            if p.vertex in self._vertex_loc:
                cid, s = self._vertex_loc[p.vertex]
                return Point(edge=cid, offset=s)
            return p
        c, forward, start = self._edge_loc[p.edge]
        length = self.base.edge(p.edge).length
        return Point(edge=c.id, offset=start + (p.offset if forward else length - p.offset))

    def from_canon(self, p: Point) -> Point:
        if p.vertex is not None:
            return p
        c = self._chain[p.edge]
        s = p.offset
        for eid, forward, start in c.steps:
            length = self.base.edge(eid).length
            if start <= s <= start + length:
                t = s - start if forward else start + length - s
                return self.base.point(eid, t)
        raise ModelError(f"position {s} outside chain {c.id}")


def canonical_model(m: Model) -> CanonicalModel:
    return CanonicalModel(m)


def _canonical_automorphisms(c: Model):
    """All automorphisms of a model without valence-2 vertices, as (vmap, emap) dicts."""
    verts = list(c.vertices)

    def signature(v):
        return sorted((e.length, e.is_loop) for e, _ in c.ends(v))

    sig = {v: signature(v) for v in verts}
    between: dict[frozenset, list[Edge]] = defaultdict(list)
    for e in c.edges:
        between[frozenset((e.u, e.v))].append(e)

    def lengths(a, b):
        return sorted(e.length for e in between.get(frozenset((a, b)), []))

    results = []

    def extend(assign: dict[str, str], used: set[str]):
        if len(assign) == len(verts):
            results.extend(_edge_assignments(c, assign, between))
            return
        v = verts[len(assign)]
        for w in verts:
            if w in used or sig[w] != sig[v]:
                continue
            if lengths(v, v) != lengths(w, w):
                continue
            if any(lengths(v, a) != lengths(w, b) for a, b in assign.items()):
                continue
            assign[v] = w
            used.add(w)
            extend(assign, used)
            del assign[v]
            used.discard(w)

    extend({}, set())
    return results


def _edge_assignments(c: Model, vmap: dict[str, str], between):
    choices = []
    for key, es in sorted(between.items(), key=lambda kv: sorted(kv[0])):
        ends = sorted(key)
        a = ends[0]
        b = ends[-1]
        targets = between[frozenset((vmap[a], vmap[b]))]
        by_len: dict[Fraction, list[Edge]] = defaultdict(list)
        for t in targets:
            by_len[t.length].append(t)
        groups = defaultdict(list)
        for e in es:
            groups[e.length].append(e)
        for length, src in groups.items():
            dst = by_len[length]
            options = []
            for perm in itertools.permutations(dst):
                if a == b:
                    for flips in itertools.product((False, True), repeat=len(src)):
                        options.append([(s.id, d.id, f) for s, d, f in zip(src, perm, flips)])
                else:
                    options.append([(s.id, d.id, vmap[s.u] != d.u) for s, d in zip(src, perm)])
            choices.append(options)
    for combo in itertools.product(*choices):
        emap = {}
        for part in combo:
            for s, d, f in part:
                emap[s] = (d, f)
        yield dict(vmap), emap


def _canonical_point_map(cm: CanonicalModel, vmap, emap) -> PointMap:
    c = cm.model

    def fn(p: Point) -> Point:
        q = cm.to_canon(p)
        if q.vertex is not None:
            return cm.from_canon(Point(vertex=vmap[q.vertex]))
        tid, flipped = emap[q.edge]
        length = c.edge(q.edge).length
        s = length - q.offset if flipped else q.offset
        return cm.from_canon(c.point(tid, s))

    return fn


def compute_aut(m: Model) -> FiniteGroup:
    """Full (finite) automorphism group of a metric graph not homeomorphic to a circle."""
    cm = CanonicalModel(m)
    if cm.is_circle:
        raise InfiniteGroupError(
            "a circle has infinitely many automorphisms; use finite_subgroup_of_circle with explicit rotations/reflections"
        )
    maps = [_canonical_point_map(cm, v, e) for v, e in _canonical_automorphisms(cm.model)]
    ref = invariant_refinement(m, maps)
    elems = [Automorphism.from_point_map(ref, fn) for fn in maps]
    ident = [g for g in elems if g.is_identity]
    rest = [g for g in elems if not g.is_identity]
    named = [Automorphism(g.refinement, g.vmap, g.emap, name=f"g{i + 1}") for i, g in enumerate(rest)]
    return FiniteGroup(ident + named)


def finite_subgroup_of_circle(
    m: Model,
    rotations: Sequence = (),
    reflections: Sequence[tuple[Point, Point]] = (),
) -> FiniteGroup:
    """Group generated by rotations (arc lengths) and reflections (axis point pairs) of a circle."""
    cm = CanonicalModel(m)
    if not cm.is_circle:
        raise GroupError("model is not a circle")
    chain = cm.chains[0]
    total = chain.length

    def pos(p: Point) -> Fraction:
        q = cm.to_canon(p)
        return Fraction(0) if q.vertex is not None else q.offset

    def at(s: Fraction) -> Point:
        s %= total
        if s == 0:
            return cm.from_canon(Point(vertex=chain.u))
        return cm.from_canon(Point(edge=chain.id, offset=s))

    maps: list[tuple[str, PointMap]] = []
    for r in rotations:
        if isinstance(r, float):
            raise GroupError("rotation amounts must be exact rationals")
        r = Fraction(r)
        maps.append((f"rot({r})", lambda p, r=r: at(pos(p) + r)))
    for a, b in reflections:
        sa, sb = pos(m.check_point(a)), pos(m.check_point(b))
        if (sb - sa) % total != total / 2:
            raise GroupError(f"reflection axis points {a} and {b} are not antipodal")
        maps.append((f"refl({a},{b})", lambda p, sa=sa: at(2 * sa - pos(p))))
    ref = invariant_refinement(m, [fn for _, fn in maps])
    gens = [Automorphism.from_point_map(ref, fn, name=name) for name, fn in maps]
    return subgroup_generated(gens, model=m)
