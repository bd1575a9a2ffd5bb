"""Exact max-plus arithmetic.

Scalars are :class:`fractions.Fraction` values or the bottom element
:data:`NEG_INF`.  ``⊕`` is ``max`` and ``⊙`` is ordinary addition.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union


class _NegInf:
    """The tropical zero.  Absorbing for ``⊙``, neutral for ``⊕``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "-inf"

    __str__ = __repr__

    def __reduce__(self):
        return (_NegInf, ())

    def __hash__(self) -> int:
        return hash("tropaut.NEG_INF")

    def __eq__(self, other) -> bool:
        return other is self

    def __lt__(self, other) -> bool:
        return other is not self

    def __le__(self, other) -> bool:
        return True

    def __gt__(self, other) -> bool:
        return False

    def __ge__(self, other) -> bool:
        return other is self

    def __add__(self, other):
        return self

    __radd__ = __add__


NEG_INF = _NegInf()

Scalar = Union[Fraction, _NegInf]


def scalar(x) -> Scalar:
    """Coerce ``x`` to an exact tropical scalar."""
    if x is NEG_INF:
        return x
    if isinstance(x, str) and x.strip() in ("-inf", "-∞"):
        return NEG_INF
    if isinstance(x, float):
        raise TypeError("floating point scalars are not accepted; use Fraction or a p/q string")
    return Fraction(x)


def is_finite(a: Scalar) -> bool:
    return a is not NEG_INF


def trop_add(a: Scalar, b: Scalar) -> Scalar:
    """``a ⊕ b = max(a, b)``."""
    if a is NEG_INF:
        return b
    if b is NEG_INF:
        return a
    return a if a >= b else b


def trop_mul(a: Scalar, b: Scalar) -> Scalar:
    """``a ⊙ b = a + b`` with ``NEG_INF`` absorbing."""
    if a is NEG_INF or b is NEG_INF:
        return NEG_INF
    return a + b


def trop_sum(values: Iterable[Scalar]) -> Scalar:
    out: Scalar = NEG_INF
    for v in values:
        out = trop_add(out, v)
    return out


def format_scalar(a: Scalar) -> str:
    return "-inf" if a is NEG_INF else str(a)


@dataclass(frozen=True)
class TropMatrix:
    """Dense max-plus matrix with exact entries."""

    entries: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        if not self.entries or not self.entries[0]:
            raise ValueError("matrix must have at least one row and one column")
        width = len(self.entries[0])
        if any(len(row) != width for row in self.entries):
            raise ValueError("ragged matrix rows")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "TropMatrix":
        return cls(tuple(tuple(scalar(x) for x in row) for row in rows))

    @classmethod
    def identity(cls, n: int) -> "TropMatrix":
        return cls(tuple(tuple(Fraction(0) if i == j else NEG_INF for j in range(n)) for i in range(n)))

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "TropMatrix":
        """Matrix ``P`` with ``P[k, perm[k]] = 0`` (0-based), so ``(P ⊙ v)_k = v_perm[k]``."""
        n = len(perm)
        if sorted(perm) != list(range(n)):
            raise ValueError(f"not a permutation: {perm}")
        return cls(tuple(tuple(Fraction(0) if perm[k] == j else NEG_INF for j in range(n)) for k in range(n)))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx: tuple[int, int]) -> Scalar:
        i, j = idx
        return self.entries[i][j]

    def __matmul__(self, other: "TropMatrix") -> "TropMatrix":
        return mat_mul(self, other)

    def shift(self, c: Scalar) -> "TropMatrix":
        """Tropical scalar multiple ``c ⊙ A``."""
        return TropMatrix(tuple(tuple(trop_mul(c, a) for a in row) for row in self.entries))

    def apply(self, v: Sequence[Scalar]) -> tuple[Scalar, ...]:
        """Matrix-vector product ``A ⊙ v``."""
        if len(v) != self.cols:
            raise ValueError(f"dimension mismatch: {self.cols} columns vs vector of length {len(v)}")
        return tuple(trop_sum(trop_mul(a, x) for a, x in zip(row, v)) for row in self.entries)

    def to_rows(self) -> list[list[str]]:
        return [[format_scalar(a) for a in row] for row in self.entries]

    def __str__(self) -> str:
        cells = self.to_rows()
        width = max(len(c) for row in cells for c in row)
        return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)


def mat_mul(a: TropMatrix, b: TropMatrix) -> TropMatrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.rows}x{a.cols} ⊙ {b.rows}x{b.cols}")
    cols = list(zip(*b.entries))
    return TropMatrix(
        tuple(tuple(trop_sum(trop_mul(x, y) for x, y in zip(row, col)) for col in cols) for row in a.entries)
    )


def _finite_positions(a: TropMatrix) -> list[list[int]]:
    return [[j for j, x in enumerate(row) if x is not NEG_INF] for row in a.entries]


def is_generalized_permutation(a: TropMatrix) -> bool:
    if not a.is_square:
        return False
    rows = _finite_positions(a)
    if any(len(r) != 1 for r in rows):
        return False
    return sorted(r[0] for r in rows) == list(range(a.cols))


def is_permutation_matrix(a: TropMatrix) -> bool:
    return is_generalized_permutation(a) and all(
        x == 0 for row in a.entries for x in row if x is not NEG_INF
    )


def is_regular(a: TropMatrix) -> bool:
    """Tropical invertibility; only generalized permutation matrices qualify."""
    if not a.is_square:
        raise ValueError("regularity is defined for square matrices only")
    return is_generalized_permutation(a)


def invert(a: TropMatrix) -> TropMatrix:
    if not is_regular(a):
        raise ValueError("matrix is not tropically regular")
    n = a.rows
    out: list[list[Scalar]] = [[NEG_INF] * n for _ in range(n)]
    for k, row in enumerate(a.entries):
        for j, x in enumerate(row):
            if x is not NEG_INF:
                out[j][k] = -x
    return TropMatrix(tuple(tuple(r) for r in out))


def pgl_equal(a: TropMatrix, b: TropMatrix) -> bool:
    """True iff ``b = c ⊙ a`` for a finite constant ``c``."""
    if not (is_regular(a) and is_regular(b)):
        raise ValueError("pgl_equal needs regular matrices")
    if a.rows != b.rows:
        return False
    diffs = set()
    for ra, rb in zip(a.entries, b.entries):
        for x, y in zip(ra, rb):
            if (x is NEG_INF) != (y is NEG_INF):
                return False
            if x is not NEG_INF:
                diffs.add(y - x)
    return len(diffs) == 1


def pgl_representative(a: TropMatrix) -> TropMatrix:
    """Canonical member of the class of ``a`` modulo scalar shifts: first finite entry is 0."""
    first = next(x for row in a.entries for x in row if x is not NEG_INF)
    return a.shift(-first)


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of tropical projective space, stored by a coordinate vector."""

    coords: tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.coords) < 1:
            raise ValueError("empty coordinate vector")
        if all(c is NEG_INF for c in self.coords):
            raise ValueError("the all -inf vector is not a projective point")

    @classmethod
    def of(cls, *coords) -> "ProjPoint":
        return cls(tuple(scalar(c) for c in coords))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def normalized(self) -> tuple[Scalar, ...]:
        """Representative whose last finite coordinate is 0."""
        ref = next(c for c in reversed(self.coords) if c is not NEG_INF)
        return tuple(NEG_INF if c is NEG_INF else c - ref for c in self.coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return proj_equal(self, other)

    def __hash__(self) -> int:
        return hash(self.normalized())

    def __str__(self) -> str:
        return "(" + " : ".join(format_scalar(c) for c in self.coords) + ")"


def proj_equal(p: ProjPoint, q: ProjPoint) -> bool:
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: TP^{p.dim} vs TP^{q.dim}")
    diffs = set()
    for x, y in zip(p.coords, q.coords):
        if (x is NEG_INF) != (y is NEG_INF):
            return False
        if x is not NEG_INF:
            diffs.add(y - x)
    return len(diffs) == 1
