"""Piecewise Z-affine functions on metric graphs.

A function is stored per edge as its breakpoints ``(offset, value)``, always
including both edge ends, with collinear interior breakpoints pruned.  Two
functions are equal exactly when their stored forms are equal.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .divisor import Divisor
from .graph import Germ, Model, ModelError, Point
from .tropical import NEG_INF, Scalar

Break = tuple[Fraction, Fraction]


class BottomFunctionError(ValueError):
    """Raised for operations undefined on the constant ``-inf`` function."""


def _slope(p: Break, q: Break) -> Fraction:
    return (q[1] - p[1]) / (q[0] - p[0])


def _prune(br: Sequence[Break]) -> tuple[Break, ...]:
    out = [br[0]]
    for i in range(1, len(br) - 1):
        if _slope(out[-1], br[i]) != _slope(br[i], br[i + 1]):
            out.append(br[i])
    out.append(br[-1])
    return tuple(out)


def _interp(br: Sequence[Break], t: Fraction) -> Fraction:
    offs = [b[0] for b in br]
    i = bisect_right(offs, t)
    if i == 0:
        return br[0][1]
    if i == len(br):
        return br[-1][1]
    (t0, v0), (t1, v1) = br[i - 1], br[i]
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0)


def _restrict(br: Sequence[Break], a: Fraction, b: Fraction) -> list[Break]:
    """Breakpoints on ``[a, b]`` re-based to start at 0."""
    out = [(Fraction(0), _interp(br, a))]
    out += [(t - a, v) for t, v in br if a < t < b]
    out.append((b - a, _interp(br, b)))
    return out


@dataclass(frozen=True)
class RationalFunction:
    model: Model
    pieces: tuple[tuple[Break, ...], ...] | None

    @classmethod
    def from_pieces(cls, model: Model, pieces: Mapping[str, Sequence[tuple]]) -> "RationalFunction":
        """Validate continuity and integer slopes, then canonicalize."""
        out = []
        vertex_value: dict[str, Fraction] = {}
        for e in model.edges:
            raw = sorted((Fraction(t), Fraction(v)) for t, v in pieces[e.id])
            br: list[Break] = []
            for t, v in raw:
                if br and br[-1][0] == t:
                    if br[-1][1] != v:
                        raise ValueError(f"two values at offset {t} on edge {e.id}")
                    continue
                br.append((t, v))
            if len(br) < 2 or br[0][0] != 0 or br[-1][0] != e.length:
                raise ValueError(f"breakpoints on edge {e.id} must span [0, {e.length}]")
            for p, q in zip(br, br[1:]):
                if _slope(p, q).denominator != 1:
                    raise ValueError(f"non-integer slope {_slope(p, q)} on edge {e.id}")
            for vid, val in ((e.u, br[0][1]), (e.v, br[-1][1])):
                if vertex_value.setdefault(vid, val) != val:
                    raise ValueError(f"discontinuous at vertex {vid}")
            out.append(_prune(br))
        return cls(model, tuple(out))

    @classmethod
    def bottom(cls, model: Model) -> "RationalFunction":
        return cls(model, None)

    @classmethod
    def constant(cls, model: Model, c=0) -> "RationalFunction":
        c = Fraction(c)
        return cls(model, tuple(((Fraction(0), c), (e.length, c)) for e in model.edges))

    @property
    def is_bottom(self) -> bool:
        return self.pieces is None

    def _need_finite(self):
        if self.pieces is None:
            raise BottomFunctionError("operation undefined for the constant -inf function")

    def edge_breaks(self, eid: str) -> tuple[Break, ...]:
        self._need_finite()
        return self.pieces[self.model.edge_index(eid)]

    def evaluate(self, p: Point) -> Scalar:
        self.model.check_point(p)
        if self.pieces is None:
            return NEG_INF
        if p.vertex is not None:
            e, end = self.model.ends(p.vertex)[0]
            br = self.edge_breaks(e.id)
            return br[0][1] if end == 0 else br[-1][1]
        return _interp(self.edge_breaks(p.edge), p.offset)

    __call__ = evaluate

    def outgoing_slope(self, g: Germ) -> Fraction:
        eid, t, d = g
        br = self.edge_breaks(eid)
        offs = [b[0] for b in br]
        if d > 0:
            i = bisect_right(offs, t)
            return _slope(br[i - 1], br[i])
        i = bisect_right(offs, t) - 1
        if br[i][0] == t:
            i -= 1
        return -_slope(br[i], br[i + 1])

    def ord_at(self, p: Point) -> int:
        """Sum of outgoing slopes at ``p``."""
        self._need_finite()
        return int(sum(self.outgoing_slope(g) for g in self.model.germs(p)))

    def breakpoints(self) -> list[Point]:
        """Vertices and interior breakpoints: the only places ``ord`` can be nonzero."""
        self._need_finite()
        pts = [Point(vertex=v) for v in self.model.vertices]
        for e, br in zip(self.model.edges, self.pieces):
            pts += [Point(edge=e.id, offset=t) for t, _ in br[1:-1]]
        return pts

    def div(self) -> Divisor:
        return Divisor.from_mapping(self.model, {p: self.ord_at(p) for p in self.breakpoints()})

    def max_value(self) -> Fraction:
        self._need_finite()
        return max(v for br in self.pieces for _, v in br)

    def min_value(self) -> Fraction:
        self._need_finite()
        return min(v for br in self.pieces for _, v in br)

    def shift(self, a: Scalar) -> "RationalFunction":
        """Tropical scalar multiple ``a ⊙ f``."""
        if a is NEG_INF or self.pieces is None:
            return RationalFunction.bottom(self.model)
        a = Fraction(a)
        return RationalFunction(self.model, tuple(tuple((t, v + a) for t, v in br) for br in self.pieces))

    def normalized(self) -> "RationalFunction":
        """Shift so that the maximum value is 0."""
        return self.shift(-self.max_value())

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return _pointwise(self, other, lambda x, y: x - y)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return _pointwise(self, other, lambda x, y: x + y)

    def serialize(self) -> str:
        if self.pieces is None:
            return "-inf"
        return " | ".join(
            f"{e.id}: " + ", ".join(f"{t} {v}" for t, v in br) for e, br in zip(self.model.edges, self.pieces)
        )

    def to_json(self):
        if self.pieces is None:
            return "-inf"
        return {e.id: [[str(t), str(v)] for t, v in br] for e, br in zip(self.model.edges, self.pieces)}

    @classmethod
    def from_json(cls, model: Model, data) -> "RationalFunction":
        if data == "-inf":
            return cls.bottom(model)
        return cls.from_pieces(model, {eid: [(Fraction(t), Fraction(v)) for t, v in br] for eid, br in data.items()})

    def __str__(self) -> str:
        return self.serialize()


def _check_same(f: RationalFunction, g: RationalFunction):
    if f.model != g.model:
        raise ModelError("functions live on different models")


def _pointwise(f: RationalFunction, g: RationalFunction, op) -> RationalFunction:
    """Apply an affine-preserving binary operation breakpoint-wise (sum, difference)."""
    _check_same(f, g)
    f._need_finite()
    g._need_finite()
    out = {}
    for e, bf, bg in zip(f.model.edges, f.pieces, g.pieces):
        offs = sorted({t for t, _ in bf} | {t for t, _ in bg})
        out[e.id] = [(t, op(_interp(bf, t), _interp(bg, t))) for t in offs]
    return RationalFunction.from_pieces(f.model, out)


def trop_sum(f: RationalFunction, g: RationalFunction) -> RationalFunction:
    """Pointwise maximum, inserting breakpoints where the two graphs cross."""
    _check_same(f, g)
    if f.is_bottom:
        return g
    if g.is_bottom:
        return f
    out = {}
    for e, bf, bg in zip(f.model.edges, f.pieces, g.pieces):
        offs = sorted({t for t, _ in bf} | {t for t, _ in bg})
        br: list[Break] = []
        for i, t in enumerate(offs):
            fv, gv = _interp(bf, t), _interp(bg, t)
            if i:
                t0 = offs[i - 1]
                f0, g0 = _interp(bf, t0), _interp(bg, t0)
                if (f0 - g0) * (fv - gv) < 0:
                    sf = (fv - f0) / (t - t0)
                    sg = (gv - g0) / (t - t0)
                    tc = t0 + (g0 - f0) / (sf - sg)
                    br.append((tc, f0 + sf * (tc - t0)))
            br.append((t, max(fv, gv)))
        out[e.id] = br
    return RationalFunction.from_pieces(f.model, out)


def scalar_shift(a: Scalar, f: RationalFunction) -> RationalFunction:
    return f.shift(a)


def evaluate(f: RationalFunction, p: Point) -> Scalar:
    return f.evaluate(p)


def div(f: RationalFunction) -> Divisor:
    return f.div()


def compose(f: RationalFunction, sigma) -> RationalFunction:
    """``f ∘ sigma``, computed on the refinement where ``sigma`` is simplicial."""
    if sigma.model != f.model:
        raise ModelError("automorphism and function live on different models")
    if f.is_bottom:
        return f
    ref = sigma.refinement
    fine: dict[str, list[Break]] = {}
    for eid, ps in ref.pieces.items():
        br = f.edge_breaks(eid)
        for fid, a, b in ps:
            fine[fid] = _restrict(br, a, b)
    out: dict[str, list[Break]] = {}
    for eid, ps in ref.pieces.items():
        acc: list[Break] = []
        for fid, a, b in ps:
            target, flipped = sigma.edge_image(fid)
            br = fine[target]
            if flipped:
                length = b - a
                br = [(length - t, v) for t, v in reversed(br)]
            acc.extend((a + t, v) for t, v in br)
        out[eid] = acc
    return RationalFunction.from_pieces(f.model, out)
