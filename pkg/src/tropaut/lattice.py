"""Uniform lattice models used for exact chip-firing computations."""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import _kernels
from .graph import Model, ModelError, Point, subdivide


class Lattice:
    """The subdivision of ``model`` into segments of length ``h``.

    Lattice points are ordered by :meth:`Point.sort_key`, so index 0 (the
    reduction basepoint) is the lowest-id vertex of the model.  A rational
    function that is affine with integer slope on each segment is ``h`` times
    an integer potential plus a constant; ``div(h * s) = -L @ s``.
    """

    def __init__(self, model: Model, h):
        self.model = model
        self.h = Fraction(h)
        self.refinement = subdivide(model, self.h)
        self.points: list[Point] = sorted(self.refinement.base_points(), key=Point.sort_key)
        self.index: dict[Point, int] = {p: i for i, p in enumerate(self.points)}
        fine = self.refinement.fine
        segs = []
        for fe in fine.edges:
            eid, a, b = self.refinement.parent[fe.id]
            i = self.index[model.point(eid, a)]
            j = self.index[model.point(eid, b)]
            segs.append((eid, a, b, i, j))
        self.segments: list[tuple[str, Fraction, Fraction, int, int]] = segs
        self.arrays = _kernels.graph_arrays(len(self.points), [(i, j) for *_, i, j in segs], q=0)

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"Lattice(h={self.h}, points={len(self.points)})"

    @property
    def basepoint(self) -> Point:
        return self.points[0]

    def contains(self, p: Point) -> bool:
        return p in self.index

    def vector(self, divisor) -> np.ndarray:
        """Dense chip vector of a lattice-supported divisor."""
        vec = np.zeros(len(self.points), dtype=np.int64)
        for p, c in divisor.items():
            try:
                vec[self.index[p]] = c
            except KeyError:
                raise ModelError(f"{p} is not a lattice point at granularity {self.h}") from None
        return vec

    def divisor(self, vec: Sequence[int]):
        from .divisor import Divisor

        return Divisor.from_mapping(self.model, {p: int(c) for p, c in zip(self.points, vec) if c})

    def function(self, values: Sequence[Fraction]):
        """Rational function with the given values at lattice points, affine on segments."""
        from .rational import RationalFunction

        pieces: dict[str, list[tuple[Fraction, Fraction]]] = {e.id: [] for e in self.model.edges}
        for eid, a, b, i, j in self.segments:
            br = pieces[eid]
            if not br:
                br.append((a, Fraction(values[i])))
            br.append((b, Fraction(values[j])))
        return RationalFunction.from_pieces(self.model, pieces)

    def potential_function(self, potential: Sequence[int]):
        """``h * potential`` as a rational function."""
        return self.function([self.h * int(s) for s in potential])

    def values(self, f) -> list:
        return [f.evaluate(p) for p in self.points]

    @cached_property
    def laplacian(self) -> np.ndarray:
        return self.arrays.laplacian

    def reduce(self, chips: np.ndarray, backend: str | None = None):
        return _kernels.reduce_divisor(chips, self.arrays, backend)

    def reduce_batch(self, batch: np.ndarray, backend: str | None = None):
        return _kernels.reduce_batch(batch, self.arrays, backend)

    def effective(self, degree: int) -> np.ndarray:
        return _kernels.effective_divisors(len(self.points), degree)
