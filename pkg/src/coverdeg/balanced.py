"""Balanced subsets of a point configuration, with exact certificates,
plus the standard configurations (simplex vertices, KKMS face centers,
signed basis vectors).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .geometry import (PointConfig, RVec, convex_combination, point_config,
                       rvec, vadd, vmean)


@dataclass(frozen=True)
class BalancedCertificate:
    subset: tuple
    coefficients: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"subset": [str(s) for s in self.subset],
                "coefficients": [[c.numerator, c.denominator] for c in self.coefficients]}


def is_balanced(B, V: PointConfig) -> BalancedCertificate | None:
    """Certificate iff c_V lies in conv{v_i : i in B}, decided exactly."""
    names = sorted(set(B), key=lambda n: V.names.index(n))
    if not names:
        raise ValueError("empty subset")
    pts = [V.point(n) for n in names]
    lam = convex_combination(pts, V.center)
    if lam is None:
        return None
    return BalancedCertificate(tuple(names), tuple(lam))


def enumerate_balanced(V: PointConfig, max_size: int | None = None) -> list[BalancedCertificate]:
    """All balanced subsets of size <= max_size, exhaustively (m <= 24)."""
    m = len(V.points)
    if m > 24:
        raise ValueError("configuration too large for exhaustive enumeration")
    if max_size is None:
        max_size = m
    out = []
    for size in range(1, max_size + 1):
        for subset in combinations(V.names, size):
            cert = is_balanced(subset, V)
            if cert is not None:
                out.append(cert)
    return out


def minimal_balanced(V: PointConfig) -> list[tuple]:
    """Inclusion-minimal balanced subsets (exhaustive then filtered)."""
    certs = enumerate_balanced(V)
    subsets = [set(c.subset) for c in certs]
    minimal = []
    for s in subsets:
        if not any(other < s for other in subsets):
            minimal.append(tuple(sorted(s, key=lambda n: V.names.index(n))))
    return minimal


def simplex_config(n: int) -> PointConfig:
    """Vertices of the standard (n-1)-simplex in R^n, names 1..n."""
    pts = [tuple(Fraction(1) if j == i else Fraction(0) for j in range(n))
           for i in range(n)]
    return point_config(pts, range(1, n + 1))


def kkms_config(k: int) -> PointConfig:
    """Centers of mass of all faces of the regular k-simplex conv{e_1..e_{k+1}},
    named by their vertex subsets ("1", "12", ...)."""
    if k < 1:
        raise ValueError("k >= 1")
    n = k + 1
    verts = [tuple(Fraction(1) if j == i else Fraction(0) for j in range(n))
             for i in range(n)]
    pts = []
    names = []
    for size in range(1, n + 1):
        for sigma in combinations(range(n), size):
            pts.append(vmean([verts[i] for i in sigma]))
            names.append("".join(str(i + 1) for i in sigma))
    return point_config(pts, names)


def tucker_config(n: int) -> PointConfig:
    """Signed basis vectors +-e_1..+-e_n, named +1,-1,...,+n,-n; center 0."""
    if n < 1:
        raise ValueError("n >= 1")
    pts = []
    names = []
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        pts.append(tuple(e))
        names.append(i + 1)
        pts.append(tuple(-c for c in e))
        names.append(-(i + 1))
    return point_config(pts, names)
