"""Covers of a triangulated domain: membership, exact and float distances,
partitions of unity, the induced labeling, the cover degree invariant, KKM
validation and branch-and-bound common-point search.

Membership and pruning bounds are exact over rationals; partition-of-unity
values are floats (the only place floating point is allowed to enter the
degree pipeline, via sampled labelings).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np

from .complexes import Labeling, Triangulation
from .degrees import DegreeReport, degree_labeling, degree_labeling_V
from .geometry import (PointConfig, RVec, as_rvec, solve_linear_system,
                       solve_square, sqnorm, vadd, vdot, vscale, vsub)


class CoverViolationError(ValueError):
    """A required point of the domain is covered by no set."""

    def __init__(self, point, message="uncovered point"):
        self.point = point
        super().__init__(f"{message}: {point}")


class NullHomotopyUndefinedError(ValueError):
    """All sets share a point on the boundary domain; mu is undefined."""

    def __init__(self, point):
        self.point = point
        super().__init__(f"all sets meet at {point}")


@dataclass(frozen=True)
class Halfspace:
    """The region normal . x <= offset."""
    normal: RVec
    offset: Fraction


def halfspace(normal, offset) -> Halfspace:
    return Halfspace(as_rvec(normal), Fraction(offset))


Polytope = tuple[Halfspace, ...]


def _polytope_contains(poly: Polytope, x: RVec) -> bool:
    return all(vdot(h.normal, x) <= h.offset for h in poly)


def _polytope_sqdist_exact(poly: Polytope, x: RVec) -> Fraction:
    """Exact squared distance to a convex polytope via active-set search."""
    if _polytope_contains(poly, x):
        return Fraction(0)
    d = len(x)
    best: Optional[Fraction] = None
    m = len(poly)
    for size in range(1, min(m, d) + 1):
        for subset in combinations(range(m), size):
            normals = [poly[j].normal for j in subset]
            gram = [[vdot(a, b) for b in normals] for a in normals]
            rhs = [vdot(poly[j].normal, x) - poly[j].offset for j in subset]
            mult = solve_square(gram, rhs)
            if mult is None:
                continue
            y = x
            for c, nrm in zip(mult, normals):
                y = vsub(y, vscale(c, nrm))
            if _polytope_contains(poly, y):
                sq = sqnorm(vsub(x, y))
                if best is None or sq < best:
                    best = sq
    if best is None:
        # empty polytope: infinitely far
        return Fraction(10 ** 12)
    return best


class _FloatPolytope:
    """Cached float projection machinery for one polytope."""

    def __init__(self, poly: Polytope):
        self.N = np.array([[float(c) for c in h.normal] for h in poly])
        self.b = np.array([float(h.offset) for h in poly])
        self.m, self.d = self.N.shape
        self._subsets = None

    def _build_subsets(self):
        subsets = []
        for size in range(1, min(self.m, self.d) + 1):
            for subset in combinations(range(self.m), size):
                NA = self.N[list(subset)]
                G = NA @ NA.T
                if abs(np.linalg.det(G)) < 1e-12:
                    continue
                P = NA.T @ np.linalg.inv(G)
                subsets.append((list(subset), NA, P))
        self._subsets = subsets

    def dist(self, x: np.ndarray) -> float:
        viol = self.N @ x - self.b
        if np.all(viol <= 1e-12):
            return 0.0
        if self._subsets is None:
            self._build_subsets()
        best = math.inf
        for idx, NA, P in self._subsets:
            y = x - P @ (NA @ x - self.b[idx])
            if np.all(self.N @ y - self.b <= 1e-9):
                best = min(best, float(np.linalg.norm(x - y)))
        return best

    def depth(self, x: np.ndarray) -> float:
        """Distance to the complement (0 outside)."""
        slack = self.b - self.N @ x
        if np.any(slack < 0):
            return 0.0
        norms = np.linalg.norm(self.N, axis=1)
        return float(np.min(slack / norms))


@dataclass
class CoverSet:
    """One named set of a cover: a union of rational convex polytopes, or a
    membership/distance callback pair."""

    name: str
    kind: str = "closed"  # "closed" | "open"
    polytopes: tuple[Polytope, ...] = ()
    membership: Optional[Callable[[RVec], bool]] = None
    dist_fn: Optional[Callable[[RVec], float]] = None
    _float: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.kind not in ("open", "closed"):
            raise ValueError("kind must be open or closed")
        self._float = [_FloatPolytope(p) for p in self.polytopes]

    def contains(self, x: RVec) -> bool:
        if self.membership is not None:
            return self.membership(x)
        if self.kind == "closed":
            return any(_polytope_contains(p, x) for p in self.polytopes)
        return any(all(vdot(h.normal, x) < h.offset for h in p)
                   for p in self.polytopes)

    def sqdist_exact(self, x: RVec) -> Fraction:
        if not self.polytopes:
            raise ValueError(f"set {self.name} has no polytope description")
        return min(_polytope_sqdist_exact(p, x) for p in self.polytopes)

    def dist(self, x) -> float:
        if self.dist_fn is not None:
            return self.dist_fn(x)
        xf = np.array([float(c) for c in x])
        return min(fp.dist(xf) for fp in self._float)

    def depth(self, x) -> float:
        """Inner distance to the set complement; used for open sets."""
        xf = np.array([float(c) for c in x])
        if not self._float:
            raise ValueError(f"set {self.name} has no polytope description")
        return max(fp.depth(xf) for fp in self._float)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "polytopes": [[{"normal": [[c.numerator, c.denominator] for c in h.normal],
                            "offset": [h.offset.numerator, h.offset.denominator]}
                           for h in poly] for poly in self.polytopes],
        }


@dataclass
class Cover:
    sets: list[CoverSet]
    domain: Triangulation
    kind: str = "closed"
    #: optional exact partition-of-unity override (star covers)
    weight_fn: Optional[Callable[[RVec], list]] = None

    def __len__(self) -> int:
        return len(self.sets)

    def to_json(self) -> dict:
        return {"domain": self.domain.to_json(), "kind": self.kind,
                "sets": [s.to_json() for s in self.sets]}

    @classmethod
    def from_json(cls, data: dict) -> "Cover":
        domain = Triangulation.from_json(data["domain"])
        kind = data.get("kind", "closed")
        sets = []
        for s in data["sets"]:
            polys = tuple(tuple(Halfspace(tuple(Fraction(n, d) for n, d in h["normal"]),
                                          Fraction(*h["offset"]))
                                for h in poly) for poly in s["polytopes"])
            sets.append(CoverSet(s["name"], kind, polys))
        return cls(sets, domain, kind)


@dataclass
class PartitionOfUnity:
    cover: Cover
    eps_pou: float

    def weights(self, x) -> list[float]:
        if self.cover.weight_fn is not None:
            return [float(w) for w in self.cover.weight_fn(x)]
        gs = []
        for s in self.cover.sets:
            if s.kind == "open" and s.dist_fn is None and s.polytopes:
                gs.append(s.depth(x))
            else:
                gs.append(max(0.0, self.eps_pou - s.dist(x)))
        total = sum(gs)
        if total <= 0:
            raise CoverViolationError(x, "zero partition-of-unity denominator")
        return [g / total for g in gs]


def partition_of_unity(cover: Cover, eps_pou: float) -> PartitionOfUnity:
    if eps_pou <= 0:
        raise ValueError("eps_pou must be positive")
    return PartitionOfUnity(cover, eps_pou)


# ---------------------------------------------------------------------------
# star covers of a labeling (exact PL partition of unity)


def locate_barycentric(T: Triangulation, x: RVec):
    """(cell index, exact barycentric coords) of x, or None if outside."""
    for ci, cell in enumerate(T.cells):
        pts = T.cell_points(ci)
        rows = [[p[i] for p in pts] for i in range(len(x))]
        rows.append([Fraction(1)] * len(pts))
        sol = solve_linear_system(rows, list(x) + [Fraction(1)])
        if sol is not None and all(a >= 0 for a in sol):
            return ci, sol
    return None


def star_cover(T: Triangulation, L: Labeling) -> Cover:
    """The open-star cover of a labeling, with its canonical exact PL
    partition of unity (hat-function sums per label)."""
    universe = sorted(L.universe)

    def weights(x):
        loc = locate_barycentric(T, as_rvec(x))
        if loc is None:
            raise CoverViolationError(x, "point outside the complex")
        ci, lam = loc
        out = {l: Fraction(0) for l in universe}
        for v, a in zip(T.cells[ci], lam):
            out[L[v]] += a
        return [out[l] for l in universe]

    sets = []
    for idx, l in enumerate(universe):
        def member(x, idx=idx):
            return weights(x)[idx] > 0
        sets.append(CoverSet(name=str(l), kind="open", membership=member,
                             dist_fn=lambda x, idx=idx: 0.0 if float(weights(x)[idx]) > 0 else 1.0))
    return Cover(sets, T, kind="open", weight_fn=weights)


# ---------------------------------------------------------------------------
# induced labeling and the cover invariant


def induced_labeling(cover: Cover, T: Triangulation,
                     eps_pou: float = 0.25) -> Labeling:
    """Label every vertex of T by the argmax partition-of-unity weight
    (lowest index wins ties)."""
    pou = partition_of_unity(cover, eps_pou)
    labels = {}
    used = sorted({v for cell in T.cells for v in cell})
    for vi in used:
        v = T.vertices[vi]
        w = pou.weights(v)
        best = max(range(len(w)), key=lambda i: (w[i], -i))
        if w[best] <= 0:
            raise CoverViolationError(v)
        labels[vi] = best + 1
    return Labeling(labels, tuple(range(1, len(cover.sets) + 1)))


@dataclass
class MuReport:
    degrees: list
    stable: bool
    value: Optional[int]
    eps_pou: float

    def to_json(self) -> dict:
        return {"degrees": self.degrees, "stable": self.stable,
                "value": self.value, "eps_pou": self.eps_pou,
                "certificate": "refinement-stability heuristic"}


def mu_cover(cover: Cover, V: Optional[PointConfig] = None,
             refinement_levels: int = 2, eps_pou: float = 0.25) -> MuReport:
    """Degree of the induced labeling of a cover of a closed oriented
    triangulation, at successive edgewise refinements.

    The reported value is the stable tail; instability is flagged, never
    silently resolved.
    """
    T = cover.domain
    if not T.is_closed():
        raise ValueError("mu_cover wants a closed domain triangulation")
    degrees = []
    for level in range(refinement_levels + 1):
        used = {vtx for cell in T.cells for vtx in cell}
        for vi in sorted(used):
            v = T.vertices[vi]
            if all(s.contains(v) for s in cover.sets):
                raise NullHomotopyUndefinedError(v)
        L = induced_labeling(cover, T, eps_pou)
        if V is None:
            deg = degree_labeling(T, L).degree
        else:
            named = Labeling({v: V.names[l - 1] for v, l in L.labels.items()},
                             tuple(V.names))
            deg = degree_labeling_V(T, named, V).degree
        degrees.append(deg)
        if level < refinement_levels:
            T = T.subdivide()
    stable = len(degrees) >= 2 and degrees[-1] == degrees[-2]
    return MuReport(degrees, stable, degrees[-1] if stable else None, eps_pou)


# ---------------------------------------------------------------------------
# KKM validation


def simplex_lattice(m: int, k: int) -> list[RVec]:
    """All points of the 1/k lattice on the standard (m-1)-simplex."""
    points = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            points.append(tuple(Fraction(c, k) for c in prefix + [remaining]))
            return
        for c in range(remaining + 1):
            rec(prefix + [c], remaining - c, slots - 1)

    rec([], k, m)
    return points


def validate_kkm(cover: Cover, k: int) -> tuple[bool, list[dict]]:
    """Check the KKM condition on all faces at lattice resolution k.

    A lattice point with support J must lie in some S_i with i in J;
    this is the minimal-face instance, which implies all J' containing J.
    """
    m = len(cover.sets)
    violations = []
    for x in simplex_lattice(m, k):
        support = [i for i in range(m) if x[i] > 0]
        if not any(cover.sets[i].contains(x) for i in support):
            violations.append({"point": [str(c) for c in x],
                               "face": [i + 1 for i in support]})
    return (not violations, violations)


# ---------------------------------------------------------------------------
# common-point search (branch and bound)


@dataclass
class CommonPointResult:
    found: bool
    point: Optional[RVec]
    gaps: list[float]
    status: str
    nodes: int

    def to_json(self) -> dict:
        return {"found": self.found,
                "point": None if self.point is None else [str(c) for c in self.point],
                "gaps": self.gaps, "status": self.status, "nodes": self.nodes}


def _simplex_radius(pts: Sequence[RVec], centroid: RVec) -> float:
    return max(math.sqrt(float(sqnorm(vsub(p, centroid)))) for p in pts)


def _split_longest_edge(pts: list[RVec]) -> tuple[list[RVec], list[RVec]]:
    best = None
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            l = sqnorm(vsub(pts[i], pts[j]))
            if best is None or l > best[0]:
                best = (l, i, j)
    _, i, j = best
    mid = tuple((a + b) / 2 for a, b in zip(pts[i], pts[j]))
    left = list(pts)
    left[i] = mid
    right = list(pts)
    right[j] = mid
    return left, right


def _set_gap(s: CoverSet, x: RVec) -> float:
    if s.polytopes:
        return math.sqrt(float(s.sqdist_exact(x))) * (1 + 1e-12)
    if s.dist_fn is not None:
        return s.dist_fn(x)
    return 0.0 if s.contains(x) else math.inf


def common_point_search(cover: Cover, B: Sequence, eps: float,
                        max_nodes: int = 20000) -> CommonPointResult:
    """Branch-and-bound search for a point within eps of every S_i, i in B.

    Sound pruning (exact distances rounded outward); a miss is reported as
    NOT_FOUND_AT_RESOLUTION, never as a disproof.
    """
    names = {s.name: i for i, s in enumerate(cover.sets)}
    idx = [b - 1 if isinstance(b, int) else names[str(b)] for b in B]
    sets = [cover.sets[i] for i in idx]
    T = cover.domain
    stack = [[tuple(p) for p in T.cell_points(ci)] for ci in range(len(T.cells))]
    stack.reverse()
    nodes = 0
    best = None
    while stack and nodes < max_nodes:
        pts = stack.pop()
        nodes += 1
        centroid = tuple(sum(p[i] for p in pts) / len(pts) for i in range(len(pts[0])))
        radius = _simplex_radius(pts, centroid)
        gaps = [_set_gap(s, centroid) for s in sets]
        worst = max(gaps) if gaps else 0.0
        if worst <= eps:
            return CommonPointResult(True, centroid, gaps, "FOUND", nodes)
        if best is None or worst < best[0]:
            best = (worst, centroid, gaps)
        if any(g - radius * (1 + 1e-9) > eps for g in gaps):
            continue  # provably no eps-witness in this cell
        left, right = _split_longest_edge(pts)
        stack.append(right)
        stack.append(left)
    gaps = best[2] if best else []
    return CommonPointResult(False, best[1] if best else None, gaps,
                             "NOT_FOUND_AT_RESOLUTION", nodes)


# ---------------------------------------------------------------------------
# stock covers


def voronoi_kkm_cover(n: int, domain: Optional[Triangulation] = None,
                      sites: Optional[Sequence[RVec]] = None) -> Cover:
    """Closed Voronoi-cell cover of the standard (n-1)-simplex by its
    vertices (or perturbed sites), a canonical KKM cover."""
    from .complexes import kuhn_triangulation
    if domain is None:
        domain = kuhn_triangulation(n, 1)
    if sites is None:
        sites = [tuple(Fraction(1 if j == i else 0) for j in range(n))
                 for i in range(n)]
    sites = [as_rvec(s) for s in sites]
    sets = []
    for i in range(n):
        halves = []
        for j in range(n):
            if j == i:
                continue
            normal = vsub(sites[j], sites[i])
            offset = (sqnorm(sites[j]) - sqnorm(sites[i])) / 2
            # |x - s_i|^2 <= |x - s_j|^2  <=>  (s_j - s_i).x <= (|s_j|^2-|s_i|^2)/2
            halves.append(Halfspace(normal, offset))
        sets.append(CoverSet(name=str(i + 1), kind="closed",
                             polytopes=(tuple(halves),)))
    return Cover(sets, domain, kind="closed")
