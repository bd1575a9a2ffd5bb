"""Independent reference computations used by the tests.

Nothing here calls the chip-firing kernels, the canonical-model search or
the cell-bitmask extremality test; each oracle recomputes its answer from
definitions.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np

from tropaut.graph import Model, Point
from tropaut.rational import RationalFunction
from tropaut.tropical import NEG_INF, TropMatrix, mat_mul


# -- tropical inverses ----------------------------------------------------------


def brute_has_inverse(A: TropMatrix, values=(NEG_INF, -2, -1, 0, 1, 2)) -> bool:
    """Search all square matrices with entries in ``values`` for a two-sided inverse."""
    n = A.rows
    ident = TropMatrix.identity(n)
    for flat in itertools.product(values, repeat=n * n):
        B = TropMatrix.from_rows([flat[i * n : (i + 1) * n] for i in range(n)])
        if mat_mul(A, B) == ident and mat_mul(B, A) == ident:
            return True
    return False


def brute_has_genperm_inverse(A: TropMatrix, values=(-1, 0, 1)) -> bool:
    """Search generalized permutation matrices with finite entries in ``values``."""
    n = A.rows
    ident = TropMatrix.identity(n)
    for perm in itertools.permutations(range(n)):
        for ws in itertools.product(values, repeat=n):
            rows = [[NEG_INF] * n for _ in range(n)]
            for k in range(n):
                rows[k][perm[k]] = ws[k]
            B = TropMatrix.from_rows(rows)
            if mat_mul(A, B) == ident and mat_mul(B, A) == ident:
                return True
    return False


# -- automorphism counts ----------------------------------------------------------


def brute_aut_order(m: Model) -> int:
    """Count (vertex permutation, edge bijection with flips) pairs preserving incidence and length.

    Only meaningful when no vertex has valence 2, where metric automorphisms
    are exactly these combinatorial ones.
    """
    verts = list(m.vertices)
    edges = list(m.edges)
    count = 0
    for img in itertools.permutations(verts):
        vm = dict(zip(verts, img))

        def options(e):
            out = []
            for f in edges:
                if f.length != e.length:
                    continue
                if (vm[e.u], vm[e.v]) == (f.u, f.v):
                    out.append((f.id, False))
                if (vm[e.u], vm[e.v]) == (f.v, f.u):
                    out.append((f.id, True))
            return out

        opts = [options(e) for e in edges]

        def rec(i, used):
            if i == len(edges):
                return 1
            total = 0
            for fid, _ in opts[i]:
                if fid not in used:
                    total += rec(i + 1, used | {fid})
            return total

        count += rec(0, frozenset())
    return count


def combinatorial_aut_count(m: Model) -> int:
    """Vertex permutations preserving the adjacency multiset (edge data ignored)."""
    verts = list(m.vertices)
    adj = {}
    for e in m.edges:
        key = frozenset((e.u, e.v))
        adj[key] = adj.get(key, 0) + 1
    n = 0
    for img in itertools.permutations(verts):
        vm = dict(zip(verts, img))
        if all(adj.get(frozenset(vm[x] for x in k), 0) == c for k, c in adj.items()):
            n += 1
    return n


# -- distances ----------------------------------------------------------------------


def lattice_distances(points, segments, h) -> dict:
    """All-pairs shortest paths on the lattice graph (Floyd-Warshall over Fractions)."""
    n = len(points)
    INF = None
    d = [[INF] * n for _ in range(n)]
    for i in range(n):
        d[i][i] = Fraction(0)
    for *_, i, j in segments:
        if i != j and (d[i][j] is None or d[i][j] > h):
            d[i][j] = d[j][i] = Fraction(h)
    for k in range(n):
        for i in range(n):
            if d[i][k] is None:
                continue
            for j in range(n):
                if d[k][j] is None:
                    continue
                c = d[i][k] + d[k][j]
                if d[i][j] is None or c < d[i][j]:
                    d[i][j] = c
    return {(points[i], points[j]): d[i][j] for i in range(n) for j in range(n)}


# -- linear equivalence -------------------------------------------------------------


def integral_solution(L: np.ndarray, rhs: np.ndarray, q: int) -> bool:
    """Is ``rhs`` (degree 0) in ``L · Z^n``?  Exact elimination on the reduced Laplacian."""
    n = L.shape[0]
    keep = [i for i in range(n) if i != q]
    M = [[Fraction(int(L[i, j])) for j in keep] + [Fraction(int(rhs[i]))] for i in keep]
    k = len(keep)
    for c in range(k):
        piv = next(r for r in range(c, k) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        for r in range(k):
            if r != c and M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return all((M[i][k] / M[i][i]).denominator == 1 for i in range(k))


def brute_equivalent(L: np.ndarray, a: np.ndarray, b: np.ndarray, bound: int, q: int = 0) -> bool:
    """Search firing scripts with entries in ``[-bound, bound]`` (``s[q] = 0``) for ``a - L s = b``."""
    n = L.shape[0]
    if a.sum() != b.sum():
        return False
    others = [i for i in range(n) if i != q]
    diff = a - b
    for vals in itertools.product(range(-bound, bound + 1), repeat=len(others)):
        s = np.zeros(n, dtype=np.int64)
        s[others] = vals
        if np.array_equal(L @ s, diff):
            return True
    return False


def is_q_reduced(L: np.ndarray, c: np.ndarray, q: int) -> bool:
    """Nonnegative off ``q`` and no nonempty set avoiding ``q`` can fire legally."""
    n = L.shape[0]
    if any(c[i] < 0 for i in range(n) if i != q):
        return False
    A = -L.copy()
    np.fill_diagonal(A, 0)
    others = [i for i in range(n) if i != q]
    for r in range(1, len(others) + 1):
        for sub in itertools.combinations(others, r):
            inside = np.zeros(n, dtype=bool)
            inside[list(sub)] = True
            out = A[np.ix_(inside, ~inside)].sum(axis=1)
            if (c[inside] >= out).all():
                return False
    return True


# -- random functions ---------------------------------------------------------------


def random_model(rng: random.Random, max_vertices: int = 4, max_extra: int = 3) -> Model:
    """Connected multigraph (loops allowed) with random rational lengths."""
    n = rng.randint(1, max_vertices)
    edges = []
    for i in range(1, n):
        edges.append((f"t{i}", f"v{rng.randrange(i)}", f"v{i}"))
    for k in range(rng.randint(0 if n > 1 else 1, max_extra)):
        edges.append((f"x{k}", f"v{rng.randrange(n)}", f"v{rng.randrange(n)}"))
    return Model.build([(i, u, v, Fraction(rng.randint(1, 6), rng.randint(1, 4))) for i, u, v in edges])


def _random_piece(rng: random.Random, length: Fraction, rise: Fraction):
    """Breakpoints on ``[0, length]`` with integer slopes and total rise ``rise``."""
    pts = [(Fraction(0), Fraction(0))]
    t, v = Fraction(0), Fraction(0)
    for _ in range(rng.randint(0, 3)):
        step = (length - t) * Fraction(rng.randint(1, 3), 8)
        if step <= 0:
            break
        t += step
        v += rng.randint(-3, 3) * step
        pts.append((t, v))
    # close with two integer slopes s1 > s2 around the average slope still needed
    rest, need = length - t, rise - v
    avg = need / rest
    s2 = (avg.numerator // avg.denominator) - rng.randint(0, 2)
    s1 = -((-avg.numerator) // avg.denominator) + rng.randint(0, 2)
    if s1 == s2:
        s1 += 1
    x = (need - s2 * rest) / (s1 - s2)
    if 0 < x < rest:
        pts.append((t + x, v + s1 * x))
    pts.append((length, rise))
    return pts


def random_function(rng: random.Random, m: Model) -> RationalFunction:
    vals = {v: Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for v in m.vertices}
    pieces = {}
    for e in m.edges:
        base = vals[e.u]
        rise = vals[e.v] - base
        pieces[e.id] = [(t, base + y) for t, y in _random_piece(rng, e.length, rise)]
    return RationalFunction.from_pieces(m, pieces)


def random_point(rng: random.Random, m: Model) -> Point:
    e = rng.choice(m.edges)
    return m.point(e.id, e.length * Fraction(rng.randint(0, 12), 12))
