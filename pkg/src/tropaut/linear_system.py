"""Complete linear systems ``|D|`` and the semimodule ``R(D)``.

Linear equivalence is decided exactly on a uniform lattice model by
chip-firing reduction.  Extremality of a member ``f`` is decided on the
metric graph itself from the firing subgraphs of ``E = D + div(f)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator

import numpy as np

from .automorphism import Automorphism, FiniteGroup
from .divisor import Divisor, apply_automorphism, canonical_divisor
from .graph import (
    CellDecomposition,
    Model,
    ModelError,
    Point,
    Subgraph,
    boundary_outdegree,
    frac_gcd,
)
from .lattice import Lattice
from .rational import RationalFunction, compose, trop_sum


class EmptyLinearSystemError(ValueError):
    """``|D|`` has no effective member."""


class GranularityWarning(UserWarning):
    """The lattice may be too coarse to see every extremal."""


class NotInvariantError(ValueError):
    pass


class HyperellipticError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratingSet:
    """Normalized extremals of ``R(D)`` in output order, with ``D + div(f_k)``."""

    functions: tuple[RationalFunction, ...]
    divisors: tuple[Divisor, ...]
    granularity: Fraction
    members_checked: int = 0
    check_failures: int = 0

    @property
    def check_passed(self) -> bool:
        return self.check_failures == 0

    def __len__(self) -> int:
        return len(self.functions)

    def __iter__(self) -> Iterator[RationalFunction]:
        return iter(self.functions)

    def __getitem__(self, i: int) -> RationalFunction:
        return self.functions[i]


def tropical_combination(f: RationalFunction, gens) -> RationalFunction:
    """``⊕_k (c_k ⊙ f_k)`` with the largest ``c_k`` keeping each term below ``f``.

    Every member of ``R(D)`` generated by ``gens`` equals this combination.
    """
    diffs = [f - g for g in gens]
    acc = RationalFunction.bottom(f.model)
    for g, d in zip(gens, diffs):
        acc = trop_sum(acc, g.shift(d.min_value()))
    return acc


def default_granularity(model: Model, divisor: Divisor | None = None, group: FiniteGroup | None = None) -> Fraction:
    """gcd of edge lengths, support offsets and (for a group) its refinement cuts."""
    vals = [e.length for e in model.edges]
    if divisor is not None:
        vals += [p.offset for p in divisor.support if p.vertex is None]
    if group is not None:
        for cuts in group.refinement.cuts:
            vals += list(cuts[1])
    return frac_gcd(vals)


def _reverses_a_segment(lattice: Lattice, group: FiniteGroup) -> bool:
    h = lattice.h
    m = lattice.model
    for sigma in group:
        if sigma.is_identity:
            continue
        for eid, a, _, _, _ in lattice.segments:
            if sigma(m.point(eid, a + h / 4)) == m.point(eid, a + 3 * h / 4):
                return True
    return False


class LinearSystem:
    """``R(D)`` on a fixed lattice of granularity ``h``.

    Without an explicit ``granularity`` the lattice step is the gcd of edge
    lengths and support offsets of ``D`` divided by ``refine``.  With a
    ``group`` the step also divides the group's refinement and is halved if
    some element reverses a lattice segment, so that every element maps
    lattice points to lattice points.
    """

    def __init__(self, model: Model, D: Divisor, granularity=None, refine: int = 1, group: FiniteGroup | None = None):
        if D.model != model:
            raise ModelError("divisor lives on a different model")
        if group is not None and group.model != model:
            raise ModelError("group acts on a different model")
        if int(refine) != refine or refine < 1:
            raise ValueError("refine must be a positive integer")
        self.model = model
        self.D = D
        self.group = group
        self.granularity = granularity
        self.refine = int(refine)
        base = default_granularity(model, D, group)
        if granularity is None:
            h = base / int(refine)
            if group is not None and _reverses_a_segment(Lattice(model, h), group):
                h /= 2
        else:
            h = Fraction(granularity)
            if (base / h).denominator != 1:
                raise ModelError(f"granularity {h} does not divide edge lengths, support offsets and group cuts (gcd {base})")
            if group is not None and _reverses_a_segment(Lattice(model, h), group):
                raise ModelError(f"granularity {h}: a group element reverses a lattice segment; use {h / 2}")
        self.h = h
        self.lattice = Lattice(model, h)
        self.lattice.vector(D)

    def __repr__(self) -> str:
        return f"LinearSystem(D={self.D}, h={self.h})"

    # -- membership and firing -------------------------------------------
    def belongs(self, f: RationalFunction) -> bool:
        if f.is_bottom:
            return True
        return (self.D + f.div()).is_effective()

    def effective_of(self, f: RationalFunction) -> Divisor:
        E = self.D + f.div()
        if not E.is_effective():
            raise ValueError("function is not a member of R(D)")
        return E

    @staticmethod
    def can_fire(s: Subgraph, E: Divisor) -> bool:
        return all(boundary_outdegree(s, p) <= E[p] for p in s.boundary_points())

    def is_extremal(self, f: RationalFunction) -> bool:
        if f.is_bottom:
            raise ValueError("the bottom function is not an extremal")
        return extremal_divisor(self.effective_of(f))

    def is_extremal_naive(self, f: RationalFunction, extra_points=None) -> bool:
        """All-pairs search over unions of cells cut out by ``supp(E)`` and ``extra_points``.

        ``extra_points`` defaults to every lattice point, so candidate
        subgraphs may have boundary points outside the support.
        """
        E = self.effective_of(f)
        extra = self.lattice.points if extra_points is None else list(extra_points)
        return naive_extremal(E, extra)

    # -- reduction ----------------------------------------------------------
    def reduced_divisor(self, E: Divisor) -> tuple[Divisor, np.ndarray]:
        """Basepoint-reduced form on the lattice and the firing script."""
        c, script = self.lattice.reduce(self.lattice.vector(E))
        return self.lattice.divisor(c), script

    def equivalent(self, E1: Divisor, E2: Divisor) -> bool:
        if E1.degree != E2.degree:
            return False
        return self.reduced_divisor(E1)[0] == self.reduced_divisor(E2)[0]

    @cached_property
    def _reduced_D(self):
        return self.lattice.reduce(self.lattice.vector(self.D))

    def solve_equivalence(self, E: Divisor) -> RationalFunction | None:
        """``f`` with ``D + div(f) = E`` (maximum 0), or ``None`` if ``E`` is not equivalent to ``D``."""
        if E.degree != self.D.degree:
            return None
        cD, sD = self._reduced_D
        cE, sE = self.lattice.reduce(self.lattice.vector(E))
        if not np.array_equal(cD, cE):
            return None
        return self.lattice.potential_function(sD - sE).normalized()

    def is_empty(self) -> bool:
        if self.D.degree < 0:
            return True
        return self._reduced_D[0][self.lattice.arrays.q] < 0

    def members(self) -> list[tuple[Divisor, RationalFunction]]:
        """Every lattice-supported ``E`` in ``|D|`` with its normalized ``f``."""
        if self.is_empty():
            return []
        lat = self.lattice
        cands = lat.effective(self.D.degree)
        red, scripts = lat.reduce_batch(cands)
        cD, sD = self._reduced_D
        keep = np.nonzero((red == cD).all(axis=1))[0]
        out = []
        for i in keep:
            pot = sD - scripts[i]
            f = lat.potential_function(pot).normalized()
            out.append((lat.divisor(cands[i]), f))
        return out

    # -- generating sets ----------------------------------------------------
    def _order_key(self, f: RationalFunction):
        if self.group is None:
            return (0, f.serialize())
        stab = sum(1 for s in self.group if compose(f, s) == f)
        return (stab, f.serialize())

    def enumerate_extremals(self, check: bool = True) -> GeneratingSet:
        """All lattice-representable extremals, normalized and sorted.

        With a group, generators with larger stabilizers come last (ties by
        serialization), so fixed generators take the final coordinates.
        """
        if self.D.degree < 0:
            raise EmptyLinearSystemError(f"|D| is empty: deg D = {self.D.degree} < 0")
        members = self.members()
        if not members:
            raise EmptyLinearSystemError(
                f"|D| has no effective member at granularity {self.h}; D is not equivalent to an effective divisor"
            )
        ext = []
        for E, f in members:
            if extremal_divisor(E):
                ext.append((self._order_key(f), f, E))
        ext.sort(key=lambda t: t[0])
        gens = tuple(f for _, f, _ in ext)
        divs = tuple(E for _, _, E in ext)
        failures = 0
        if check:
            failures = sum(1 for _, f in members if tropical_combination(f, gens) != f)
            if failures:
                warnings.warn(
                    f"{failures} of {len(members)} lattice members of |D| are not generated by the "
                    f"{len(gens)} extremals found at granularity {self.h}; refine the lattice",
                    GranularityWarning,
                    stacklevel=2,
                )
        return GeneratingSet(gens, divs, self.h, len(members) if check else 0, failures)

    def generation_check(self, gens: GeneratingSet) -> list[Divisor]:
        """Lattice members of ``|D|`` that ``gens`` fails to generate."""
        return [E for E, f in self.members() if tropical_combination(f, gens.functions) != f]

    # -- group invariance -----------------------------------------------------
    def _need_group(self, group):
        group = group if group is not None else self.group
        if group is None:
            raise ValueError("a group is required")
        return group

    def invariant_representative(self, group: FiniteGroup | None = None) -> Divisor | None:
        group = self._need_group(group)
        if self.D.is_effective() and _invariant(self.D, group):
            return self.D
        for E, _ in self.members():
            if _invariant(E, group):
                return E
        return None

    def invariant_generating_set(self, group: FiniteGroup | None = None) -> GeneratingSet:
        group = self._need_group(group)
        if not _invariant(self.D, group):
            raise NotInvariantError(f"D = {self.D} is not invariant under the group")
        ctx = self if self.group is group else LinearSystem(self.model, self.D, self.h, group=group)
        gens = ctx.enumerate_extremals()
        keys = {f for f in gens.functions}
        for sigma in group:
            for k, f in enumerate(gens.functions):
                if compose(f, sigma) not in keys:
                    raise NotInvariantError(
                        f"generator {k + 1} is not mapped into the set by {sigma.name or sigma}; refine the lattice"
                    )
        return gens

    # -- rank -----------------------------------------------------------------
    def rank(self) -> int:
        """Lattice rank: test divisors ``E`` range over lattice points only."""
        return lattice_rank(self.lattice, self.lattice.vector(self.D))


def _invariant(D: Divisor, group: FiniteGroup) -> bool:
    return all(apply_automorphism(D, s) == D for s in group)


def extremal_divisor(E: Divisor) -> bool:
    """No two proper subgraphs with boundary in ``supp(E)`` cover the graph and both fire.

    Candidates are unions of cells of ``Γ \\ supp(E)``; isolated points can be
    dropped from a firing pair without breaking the cover, so they are skipped.
    """
    m = E.model
    cd = CellDecomposition(m, E.support)
    k = len(cd)
    if k == 1:
        return True
    full = (1 << k) - 1
    masks = np.arange(1 << k, dtype=np.int64)
    fire = np.ones(1 << k, dtype=bool)
    for p in cd.points:
        cells = np.asarray(cd.germ_cell[p], dtype=np.int64)
        inside = ((masks[:, None] >> cells[None, :]) & 1).sum(axis=1)
        outside = len(cells) - inside
        fire &= (inside == 0) | (outside <= E[p])
    fire[0] = fire[full] = False
    # up[m]: some firing mask contains m
    up = fire.copy()
    for b in range(k):
        bit = 1 << b
        lo = masks[(masks & bit) == 0]
        up[lo] |= up[lo | bit]
    firing = masks[fire]
    return not bool(up[full ^ firing].any())


def naive_extremal(E: Divisor, extra_points=()) -> bool:
    """Reference test: every pair of proper subgraphs built from cells and isolated points."""
    m = E.model
    boundary = sorted(set(E.support) | set(extra_points))
    cd = CellDecomposition(m, boundary)
    k = len(cd)
    firing: list[Subgraph] = []
    for mask in range(1, 1 << k):
        cells = [i for i in range(k) if mask >> i & 1]
        base = cd.subgraph(cells)
        loose = [p for p in E.support if not base.contains(p)]
        for pm in range(1 << len(loose)):
            pts = [p for i, p in enumerate(loose) if pm >> i & 1]
            s = cd.subgraph(cells, pts)
            if s.is_proper() and LinearSystem.can_fire(s, E):
                firing.append(s)
    for i, a in enumerate(firing):
        for b in firing[i:]:
            union = Subgraph(m, a.intervals + b.intervals, a.points | b.points)
            if union.is_full():
                return False
    return True


def lattice_rank(lattice: Lattice, chips: np.ndarray) -> int:
    q = lattice.arrays.q
    deg = int(chips.sum())
    if deg < 0:
        return -1
    c, _ = lattice.reduce(chips)
    if c[q] < 0:
        return -1
    r = 0
    while r < deg:
        tests = lattice.effective(r + 1)
        red, _ = lattice.reduce_batch(chips[None, :] - tests)
        if (red[:, q] < 0).any():
            return r
        r += 1
    return deg


def is_hyperelliptic(model: Model, granularity=None, refine: int = 1) -> bool:
    """Some lattice-supported effective degree-2 divisor has lattice rank at least 1."""
    if model.genus < 2:
        raise ValueError(f"hyperellipticity needs genus >= 2 (got {model.genus})")
    h = Fraction(granularity) if granularity is not None else frac_gcd(e.length for e in model.edges) / refine
    lat = Lattice(model, h)
    q = lat.arrays.q
    n = len(lat)
    pts = np.eye(n, dtype=np.int64)
    for D in lat.effective(2):
        red, _ = lat.reduce_batch(D[None, :] - pts)
        if (red[:, q] >= 0).all():
            return True
    return False


def canonical_system(model: Model, granularity=None, refine: int = 1, group: FiniteGroup | None = None) -> LinearSystem:
    return LinearSystem(model, canonical_divisor(model), granularity, refine, group)
