"""Divisors on metric graphs."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .graph import Model, ModelError, Point


@dataclass(frozen=True)
class Divisor:
    """Finite integer combination of points, stored without zero terms."""

    model: Model
    terms: tuple[tuple[Point, int], ...] = ()

    @classmethod
    def from_mapping(cls, model: Model, mapping: Mapping[Point, int] | Iterable[tuple[Point, int]]) -> "Divisor":
        acc: dict[Point, int] = defaultdict(int)
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        for p, c in items:
            acc[model.check_point(p)] += int(c)
        return cls(model, tuple(sorted(((p, c) for p, c in acc.items() if c), key=lambda t: t[0].sort_key())))

    @classmethod
    def zero(cls, model: Model) -> "Divisor":
        return cls(model, ())

    @classmethod
    def point(cls, model: Model, p: Point, c: int = 1) -> "Divisor":
        return cls.from_mapping(model, {p: c})

    def items(self) -> Iterator[tuple[Point, int]]:
        return iter(self.terms)

    def __getitem__(self, p: Point) -> int:
        for q, c in self.terms:
            if q == p:
                return c
        return 0

    def as_dict(self) -> dict[Point, int]:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return sum(c for _, c in self.terms)

    @property
    def support(self) -> list[Point]:
        return [p for p, _ in self.terms]

    def is_effective(self) -> bool:
        return all(c >= 0 for _, c in self.terms)

    def _check(self, other: "Divisor"):
        if other.model != self.model:
            raise ModelError("divisors live on different models")

    def __add__(self, other: "Divisor") -> "Divisor":
        self._check(other)
        return Divisor.from_mapping(self.model, list(self.terms) + list(other.terms))

    def __neg__(self) -> "Divisor":
        return Divisor(self.model, tuple((p, -c) for p, c in self.terms))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __mul__(self, k: int) -> "Divisor":
        return Divisor.from_mapping(self.model, [(p, k * c) for p, c in self.terms])

    __rmul__ = __mul__

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for p, c in self.terms:
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            parts.append(f"{sign} {mag}{p}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def degree(d: Divisor) -> int:
    return d.degree


def is_effective(d: Divisor) -> bool:
    return d.is_effective()


def canonical_divisor(m: Model) -> Divisor:
    """Valency minus two at every point; only vertices can contribute."""
    return Divisor.from_mapping(m, {Point(vertex=v): len(m.ends(v)) - 2 for v in m.vertices})


def apply_automorphism(d: Divisor, sigma) -> Divisor:
    """Push ``d`` forward: the coefficient of ``sigma(x)`` is the old coefficient of ``x``."""
    if sigma.model != d.model:
        raise ModelError("automorphism and divisor live on different models")
    return Divisor.from_mapping(d.model, [(sigma(p), c) for p, c in d.terms])


def is_invariant(d: Divisor, group) -> bool:
    return all(apply_automorphism(d, s) == d for s in group)
