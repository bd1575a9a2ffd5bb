"""Matrix realizations of finite automorphism groups.

A generating set ``f_1, ..., f_{n+1}`` of ``R(D)`` for a ``G``-invariant
divisor ``D`` is permuted by every ``σ ∈ G``: ``f_k ∘ σ = f_{π_σ(k)}``.  The
rational map ``φ = (f_1 : ... : f_{n+1})`` then intertwines ``σ`` with

* the tropical permutation matrix ``P_σ`` (``P[k, π(k)] = 0``),
* the integer matrix ``A_σ`` acting on dehomogenized coordinates
  ``(X_1 - X_{n+1}, ..., X_n - X_{n+1})``,
* the classical 0/1 permutation matrix on ``R^{n+1}``.

With ``(σ∘τ)(x) = σ(τ(x))`` all three assignments are homomorphisms; every
claim is checked exactly rather than assumed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .automorphism import Automorphism, FiniteGroup, compute_aut
from .divisor import Divisor, canonical_divisor
from .graph import Model, Point
from .linear_system import (
    GeneratingSet,
    GranularityWarning,
    HyperellipticError,
    LinearSystem,
    NotInvariantError,
    is_hyperelliptic,
)
from .rational import RationalFunction, compose
from .tropical import NEG_INF, ProjPoint, TropMatrix, is_permutation_matrix, mat_mul, pgl_representative

MODES = ("projective", "affine", "euclidean")


class RealizationError(ValueError):
    pass


class NonInjectiveError(RealizationError):
    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# rational maps


@dataclass(frozen=True)
class RationalMap:
    functions: tuple[RationalFunction, ...]
    mode: str = "projective"

    def __post_init__(self):
        if not self.functions:
            raise ValueError("a rational map needs at least one coordinate function")
        if any(f.is_bottom for f in self.functions):
            raise ValueError("coordinate functions must not be the constant -inf")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if len({f.model for f in self.functions}) != 1:
            raise ValueError("coordinate functions live on different models")

    @property
    def model(self) -> Model:
        return self.functions[0].model

    @property
    def n(self) -> int:
        return len(self.functions) - 1

    def coordinates(self, p: Point) -> tuple[Fraction, ...]:
        return tuple(f(p) for f in self.functions)

    def __call__(self, p: Point):
        return evaluate_map(self, p)


def evaluate_map(phi: RationalMap, p: Point):
    """A :class:`ProjPoint` in projective mode, else the coordinate vector."""
    coords = phi.coordinates(p)
    if all(c is NEG_INF for c in coords):
        raise ValueError(f"all coordinates are -inf at {p}")
    if phi.mode == "projective":
        return ProjPoint(coords)
    return coords


def dehomogenize(q) -> tuple[Fraction, ...]:
    """``(X_1 - X_{n+1}, ..., X_n - X_{n+1})``."""
    coords = q.coords if isinstance(q, ProjPoint) else tuple(q)
    if any(c is NEG_INF for c in coords):
        raise ValueError("cannot dehomogenize a point with a -inf coordinate")
    last = coords[-1]
    return tuple(c - last for c in coords[:-1])


def section(v: Sequence[Fraction]) -> ProjPoint:
    """``(X_1, ..., X_n) -> (X_1 : ... : X_n : 0)``; :func:`dehomogenize` inverts it."""
    return ProjPoint(tuple(Fraction(x) for x in v) + (Fraction(0),))


def _image_coords(phi: RationalMap, p: Point) -> tuple[Fraction, ...]:
    c = phi.coordinates(p)
    return dehomogenize(c) if phi.mode == "projective" else c


# ---------------------------------------------------------------------------
# injectivity


@dataclass(frozen=True)
class InjectivityReport:
    injective: bool
    witness: tuple[Point, Point] | None = None

    def __bool__(self) -> bool:
        return self.injective


def _pieces(phi: RationalMap):
    """Maximal edge intervals on which every coordinate is affine."""
    m = phi.model
    out = []
    for e in m.edges:
        offs = sorted({t for f in phi.functions for t, _ in f.edge_breaks(e.id)})
        for a, b in zip(offs, offs[1:]):
            pa, pb = m.point(e.id, a), m.point(e.id, b)
            out.append((e.id, a, b, _image_coords(phi, pa), _image_coords(phi, pb)))
    return out


def _sub(u, v):
    return tuple(x - y for x, y in zip(u, v))


def _parallel(u, v) -> bool:
    n = len(u)
    return all(u[i] * v[j] == u[j] * v[i] for i in range(n) for j in range(i + 1, n))


def _intersect(P, Q, R, T):
    """Parameters ``(t, u)`` in ``[0,1]^2`` with ``P + t(Q-P) = R + u(T-R)``, or ``None``.

    For overlapping collinear segments the midpoint of the overlap is returned.
    """
    d1, d2, w = _sub(Q, P), _sub(T, R), _sub(R, P)
    n = len(d1)
    if not _parallel(d1, d2):
        for i in range(n):
            for j in range(i + 1, n):
                det = d1[i] * (-d2[j]) - d1[j] * (-d2[i])
                if det:
                    t = (w[i] * (-d2[j]) - w[j] * (-d2[i])) / det
                    u = (d1[i] * w[j] - d1[j] * w[i]) / det
                    if all(P[k] + t * d1[k] == R[k] + u * d2[k] for k in range(n)) and 0 <= t <= 1 and 0 <= u <= 1:
                        return t, u
                    return None
        return None  # pragma: no cover - non-parallel implies some nonzero minor
    if not _parallel(d1, w):
        return None
    k = next(i for i in range(n) if d1[i])
    # positions of R and T along the first segment's parameter
    r, s = w[k] / d1[k], (T[k] - P[k]) / d1[k]
    lo, hi = max(Fraction(0), min(r, s)), min(Fraction(1), max(r, s))
    if lo > hi:
        return None
    t = (lo + hi) / 2
    u = (t - r) / (s - r)
    return t, u


def is_injective(phi: RationalMap) -> InjectivityReport:
    """Exact decision on the pieces where ``φ`` is affine.

    Projective mode compares dehomogenized images, which requires every
    coordinate to be finite.
    """
    m = phi.model
    pieces = _pieces(phi)
    for eid, a, b, P, Q in pieces:
        if P == Q:
            return InjectivityReport(False, (m.point(eid, a), m.point(eid, b)))
    for i, (e1, a1, b1, P, Q) in enumerate(pieces):
        for e2, a2, b2, R, T in pieces[i + 1 :]:
            hit = _intersect(P, Q, R, T)
            if hit is None:
                continue
            t, u = hit
            p1 = m.point(e1, a1 + t * (b1 - a1))
            p2 = m.point(e2, a2 + u * (b2 - a2))
            if p1 != p2:
                return InjectivityReport(False, (p1, p2))
    return InjectivityReport(True)


# ---------------------------------------------------------------------------
# matrices


def index_permutation(functions: Sequence[RationalFunction], sigma: Automorphism) -> tuple[int, ...]:
    """0-based ``π`` with ``f_k ∘ σ = f_{π(k)}``."""
    pos = {f: i for i, f in enumerate(functions)}
    out = []
    for k, f in enumerate(functions):
        g = compose(f, sigma)
        if g not in pos:
            raise NotInvariantError(
                f"f_{k + 1} ∘ {sigma.name or 'σ'} is not in the generating set; the set is not invariant"
            )
        out.append(pos[g])
    if len(set(out)) != len(out):
        raise NotInvariantError("composition with σ is not a permutation of the generating set")
    return tuple(out)


def build_A_sigma(perm: Sequence[int]) -> np.ndarray:
    """Integer ``n x n`` matrix acting on dehomogenized coordinates (``perm`` is 0-based)."""
    n = len(perm) - 1
    A = np.zeros((n, n), dtype=np.int64)
    last = perm[n]
    for k in range(n):
        if perm[k] < n:
            A[k, perm[k]] += 1
        if last < n:
            A[k, last] -= 1
    return A


def build_perm_matrix(perm: Sequence[int]) -> TropMatrix:
    """Tropical permutation matrix with ``P[k, π(k)] = 0``, so ``(P ⊙ v)_k = v_{π(k)}``."""
    return TropMatrix.permutation(tuple(perm))


def build_classical_perm(perm: Sequence[int]) -> np.ndarray:
    n = len(perm)
    Q = np.zeros((n, n), dtype=np.int64)
    Q[np.arange(n), list(perm)] = 1
    return Q


def _int_det(A: np.ndarray) -> int:
    """Exact determinant by fraction-free elimination."""
    M = [[Fraction(int(x)) for x in row] for row in A]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            fac = M[r][c] / M[c][c]
            for j in range(c, n):
                M[r][j] -= fac * M[c][j]
    return int(det)


@dataclass(frozen=True)
class CommutationReport:
    ok: bool
    failure: Point | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_commutation(phi: RationalMap, sigma: Automorphism, M, points: Sequence[Point], kind: str = "P") -> CommutationReport:
    """Check ``φ(σ(x)) = M · φ(x)`` at every point of ``points``.

    ``kind`` is ``"A"`` (integer matrix on dehomogenized coordinates),
    ``"P"`` (tropical matrix; projective or coordinate equality by the map's
    mode) or ``"Q"`` (classical permutation matrix on ``R^{n+1}``).
    """
    for x in points:
        before = phi.coordinates(x)
        after = phi.coordinates(sigma(x))
        if kind == "A":
            lhs = dehomogenize(after)
            v = dehomogenize(before)
            rhs = tuple(sum((int(M[k, l]) * v[l] for l in range(len(v))), Fraction(0)) for k in range(len(v)))
            ok = lhs == rhs
        elif kind == "P":
            img = M.apply(before)
            ok = ProjPoint(after) == ProjPoint(img) if phi.mode == "projective" else tuple(after) == tuple(img)
        elif kind == "Q":
            rhs = tuple(sum((int(M[k, l]) * before[l] for l in range(len(before))), Fraction(0)) for k in range(len(before)))
            ok = tuple(after) == rhs
        else:
            raise ValueError(f"unknown matrix kind {kind!r}")
        if not ok:
            return CommutationReport(False, x)
    return CommutationReport(True)


# ---------------------------------------------------------------------------
# realizations


@dataclass
class ElementImage:
    name: str
    perm: tuple[int, ...]
    A: np.ndarray
    P: TropMatrix
    pgl: TropMatrix
    Q: np.ndarray
    det: int
    commutes: dict[str, CommutationReport] = field(default_factory=dict)


@dataclass
class Realization:
    group: FiniteGroup
    context: LinearSystem
    divisor: Divisor  # the invariant representative actually used
    shift: RationalFunction  # f0 with D + div(f0) = divisor
    generators: GeneratingSet
    phi: RationalMap
    images: list[ElementImage]
    injectivity: InjectivityReport
    homomorphism_failures: list[tuple[int, int, str]]
    collisions: list[tuple[int, int]]

    @property
    def n(self) -> int:
        return len(self.generators) - 1

    @property
    def psi_injective(self) -> bool:
        return not self.collisions

    @property
    def commutation_ok(self) -> bool:
        return all(all(r.ok for r in im.commutes.values()) for im in self.images)

    @property
    def det_ok(self) -> bool:
        return all(abs(im.det) == 1 for im in self.images)

    @property
    def verified(self) -> bool:
        """Every algebraic check passed (injectivity is reported separately)."""
        return (
            self.commutation_ok
            and self.det_ok
            and not self.homomorphism_failures
            and all(is_permutation_matrix(im.P) for im in self.images)
        )

    def generators_of_R_D(self) -> list[RationalFunction]:
        """``f_k = g_k + f0``: generators for the original divisor."""
        return [g + self.shift for g in self.generators]


def realize(
    ctx: LinearSystem,
    group: FiniteGroup,
    require_injective: bool = True,
    mode: str = "projective",
) -> Realization:
    """Realize ``group`` through an invariant representative of ``|D|``."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if ctx.group is not group:
        ctx = LinearSystem(ctx.model, ctx.D, ctx.granularity, ctx.refine, group=group)
    Dp = ctx.invariant_representative(group)
    if Dp is None:
        raise RealizationError(
            f"no G-invariant divisor in |D| at granularity {ctx.h}; try a finer lattice (--refine)"
        )
    f0 = ctx.solve_equivalence(Dp)
    ctx2 = ctx if Dp == ctx.D else LinearSystem(ctx.model, Dp, ctx.h, group=group)
    gens = ctx2.invariant_generating_set(group)
    phi = RationalMap(gens.functions, mode if mode != "euclidean" else "affine")
    inj = is_injective(phi)
    if require_injective and not inj:
        p, q = inj.witness
        raise NonInjectiveError(f"φ is not injective: {p} and {q} have the same image", inj.witness)
    points = ctx2.lattice.points
    images = []
    for sigma in group:
        perm = index_permutation(gens.functions, sigma)
        A = build_A_sigma(perm)
        P = build_perm_matrix(perm)
        Q = build_classical_perm(perm)
        im = ElementImage(sigma.name, perm, A, P, pgl_representative(P), Q, _int_det(A) if len(A) else 1)
        im.commutes["A"] = verify_commutation(phi, sigma, A, points, "A")
        im.commutes["P"] = verify_commutation(phi, sigma, P, points, "P")
        im.commutes["Q"] = verify_commutation(phi, sigma, Q, points, "Q")
        images.append(im)
    failures = []
    t = group.table
    for i, a in enumerate(images):
        for j, b in enumerate(images):
            c = images[t[i, j]]
            if not np.array_equal(a.A @ b.A, c.A):
                failures.append((i, j, "A"))
            if mat_mul(a.P, b.P) != c.P:
                failures.append((i, j, "P"))
    collisions = [
        (i, j) for i in range(len(images)) for j in range(i + 1, len(images)) if images[i].perm == images[j].perm
    ]
    return Realization(group, ctx2, Dp, f0, gens, phi, images, inj, failures, collisions)


def realize_canonical(model: Model, refine: int = 1, mode: str = "projective") -> Realization:
    """Realize the full automorphism group through the canonical linear system."""
    if model.genus < 2:
        raise RealizationError(f"the canonical realization needs genus >= 2 (got {model.genus})")
    if is_hyperelliptic(model):
        raise HyperellipticError(
            "the graph is hyperelliptic (a degree-2 lattice divisor has rank 1); the canonical map is not injective"
        )
    group = compute_aut(model)
    ctx = LinearSystem(model, canonical_divisor(model), refine=refine, group=group)
    real = realize(ctx, group, require_injective=False, mode=mode)
    if not real.injectivity:
        p, q = real.injectivity.witness
        warnings.warn(
            f"canonical map not injective on the lattice ({p}, {q}); refine the lattice",
            GranularityWarning,
            stacklevel=2,
        )
    return real
