"""Exact rational linear algebra, LP feasibility and generic ray casting.

Everything in this module is decided exactly over Fractions: convex-hull
membership, crossing signs and ranks carry no tolerance.  Floating point
never enters here; callers that need floats convert at their own layer.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

RVec = tuple[Fraction, ...]

#: Sentinel returned by ray_crossing_sign when the ray meets the simplex
#: boundary, is parallel-incident, or the simplex itself is degenerate.
DEGENERATE = "degenerate"


class DimensionMismatchError(ValueError):
    """Inputs do not share a common ambient dimension."""


def rvec(*coords) -> RVec:
    return tuple(Fraction(c) for c in coords)


def as_rvec(coords) -> RVec:
    return tuple(Fraction(c) for c in coords)


def vadd(a: RVec, b: RVec) -> RVec:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: RVec, b: RVec) -> RVec:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a: RVec) -> RVec:
    c = Fraction(c)
    return tuple(c * x for x in a)


def vdot(a: RVec, b: RVec) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def sqnorm(a: RVec) -> Fraction:
    return vdot(a, a)


def vmean(points: Sequence[RVec]) -> RVec:
    m = len(points)
    acc = points[0]
    for p in points[1:]:
        acc = vadd(acc, p)
    return tuple(x / m for x in acc)


# ---------------------------------------------------------------------------
# dense exact linear algebra


def det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by fraction Gaussian elimination."""
    n = len(rows)
    a = [[Fraction(x) for x in row] for row in rows]
    sign = 1
    result = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        result *= a[col][col]
        inv = a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] / inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return sign * result


def matrix_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    a = [[Fraction(x) for x in row] for row in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    rank = 0
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = a[row][col]
        for r in range(m):
            if r != row and a[r][col] != 0:
                f = a[r][col] / inv
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        rank += 1
        row += 1
        if row == m:
            break
    return rank


def solve_square(rows, rhs) -> Optional[list[Fraction]]:
    """Solve a square system exactly; None if the matrix is singular."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [x / inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def solve_linear_system(rows, rhs) -> Optional[list[Fraction]]:
    """One exact solution of a (possibly non-square) system, or None.

    Free variables are set to zero.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(rows)]
    pivots = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = a[row][col]
        a[row] = [x / inv for x in a[row]]
        for r in range(m):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if a[r][n] != 0:
            return None
    x = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        x[col] = a[r][n]
    return x


# ---------------------------------------------------------------------------
# LP feasibility (phase-I simplex, Bland's rule, exact)


def lp_feasible(A, b) -> Optional[list[Fraction]]:
    """Find x >= 0 with A x = b exactly, or None if infeasible.

    Phase-I simplex with artificial variables; Bland's rule guarantees
    termination.  Desk scale only.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    rows = [[Fraction(x) for x in row] for row in A]
    rhs = [Fraction(x) for x in b]
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]
    total = n + m
    tab = [rows[i] + [Fraction(1) if j == i else Fraction(0) for j in range(m)] + [rhs[i]]
           for i in range(m)]
    basis = [n + i for i in range(m)]
    cost = [Fraction(0)] * n + [Fraction(1)] * m

    while True:
        enter = -1
        for j in range(total):
            reduced = cost[j] - sum(cost[basis[i]] * tab[i][j] for i in range(m))
            if reduced < 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return None
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[leave])]
        basis[leave] = enter

    objective = sum(cost[basis[i]] * tab[i][-1] for i in range(m))
    if objective != 0:
        return None
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i][-1]
    return x


def convex_combination(points: Sequence[RVec], target: RVec) -> Optional[list[Fraction]]:
    """Exact coefficients putting target in conv(points), or None.

    Returns lambdas with lambda_i >= 0, sum 1, sum lambda_i p_i == target.
    """
    if not points:
        return None
    d = len(target)
    for p in points:
        if len(p) != d:
            raise DimensionMismatchError(
                f"point of dim {len(p)} vs target dim {d}")
    A = [[p[i] for p in points] for i in range(d)]
    A.append([Fraction(1)] * len(points))
    b = list(target) + [Fraction(1)]
    return lp_feasible(A, b)


# ---------------------------------------------------------------------------
# ray casting


def ray_crossing_sign(simplex: Sequence[RVec], origin: RVec, direction: RVec):
    """Signed crossing of the open ray origin + t*direction (t > 0) with the
    relative interior of an (n-1)-simplex given by n vertices in R^n.

    Returns +1/-1 (sign of det[v_1-origin, ..., v_n-origin]), 0 for a clean
    miss, or DEGENERATE when the ray meets the simplex boundary, is
    parallel-incident, or the simplex is affinely degenerate.
    """
    n = len(origin)
    if len(simplex) != n or any(len(v) != n for v in simplex) or len(direction) != n:
        raise DimensionMismatchError("ray_crossing_sign wants n points in R^n")
    # unknowns: barycentric a_1..a_n and ray parameter t
    rows = [[simplex[j][i] for j in range(n)] + [-direction[i]] for i in range(n)]
    rows.append([Fraction(1)] * n + [Fraction(0)])
    sol = solve_square(rows, list(origin) + [Fraction(1)])
    if sol is None:
        return DEGENERATE
    bary, t = sol[:n], sol[n]
    if t < 0 or any(a < 0 for a in bary):
        return 0
    if t == 0 or any(a == 0 for a in bary):
        return DEGENERATE
    d = det([[simplex[j][i] - origin[i] for j in range(n)] for i in range(n)])
    return 1 if d > 0 else -1


# ---------------------------------------------------------------------------
# point configurations and affine hulls


@dataclass(frozen=True)
class PointConfig:
    """A finite point set with its exact center of mass.

    Names index the points; labelings refer to points by name.
    """

    points: tuple[RVec, ...]
    names: tuple
    center: RVec

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def point(self, name) -> RVec:
        return self.points[self.names.index(name)]

    def to_json(self) -> dict:
        return {
            "points": [[[c.numerator, c.denominator] for c in p] for p in self.points],
            "names": [str(n) for n in self.names],
        }


def point_config(points, names=None) -> PointConfig:
    pts = tuple(as_rvec(p) for p in points)
    if any(len(p) != len(pts[0]) for p in pts):
        raise DimensionMismatchError("points of mixed dimension")
    if names is None:
        names = tuple(range(1, len(pts) + 1))
    else:
        names = tuple(names)
    return PointConfig(pts, names, vmean(pts))


def affine_basis(points: Sequence[RVec]) -> tuple[RVec, list[RVec]]:
    """Origin plus a maximal independent set of difference vectors, exact.

    Differences are scanned in index order, so the basis is deterministic.
    """
    origin = points[0]
    basis: list[RVec] = []
    for p in points[1:]:
        d = vsub(p, origin)
        if matrix_rank([list(v) for v in basis + [d]]) > len(basis):
            basis.append(d)
    return origin, basis


def coords_in_basis(origin: RVec, basis: list[RVec], x: RVec) -> RVec:
    """Exact coordinates of x - origin in the (not necessarily orthogonal)
    basis; raises if x is outside the affine hull."""
    gram = [[vdot(bi, bj) for bj in basis] for bi in basis]
    rhs = [vdot(bi, vsub(x, origin)) for bi in basis]
    sol = solve_square(gram, rhs)
    if sol is None:
        raise ValueError("degenerate basis")
    # verify x really lies in the hull
    recon = origin
    for c, bvec in zip(sol, basis):
        recon = vadd(recon, vscale(c, bvec))
    if recon != tuple(x):
        raise ValueError("point outside affine hull")
    return tuple(sol)


def seeded_rng(*material) -> random.Random:
    """Deterministic RNG keyed by a hash of the given material."""
    h = hashlib.sha256(repr(material).encode()).hexdigest()
    return random.Random(int(h[:16], 16))


def random_direction(rng: random.Random, dim: int) -> RVec:
    while True:
        d = tuple(Fraction(rng.randint(-10**6, 10**6), 10**6) for _ in range(dim))
        if any(c != 0 for c in d):
            return d
