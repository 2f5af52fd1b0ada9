"""Averaged partition-of-unity maps of several covers, degree-guided search
for a barycenter preimage, and permutation extraction from the resulting
near-doubly-stochastic matrix.

The search keeps all candidate points rational (cell vertices, edge
midpoints, centroids); only the partition-of-unity values are floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .complexes import Labeling, Triangulation
from .covers import Cover, PartitionOfUnity, _set_gap, partition_of_unity
from .degrees import degree_labeling
from .geometry import RVec, as_rvec, sqnorm, vsub


class DegreeVanishedError(RuntimeError):
    """Every subcell reported zero boundary degree before the residual
    target was met."""

    def __init__(self, best_residual, best_point, depth):
        self.best_residual = best_residual
        self.best_point = best_point
        self.depth = depth
        super().__init__(
            f"no subcell with nonzero boundary degree at depth {depth}; "
            f"best residual {best_residual:.3g} at {best_point}")


class NoPerfectMatchingError(ValueError):
    def __init__(self, tau):
        self.tau = tau
        super().__init__(f"no perfect matching above threshold {tau}")


class GaleVerificationError(RuntimeError):
    def __init__(self, gaps, eps):
        self.gaps = gaps
        self.eps = eps
        super().__init__(f"membership gaps {gaps} exceed {eps}")


@dataclass
class GaleInstance:
    covers: list[Cover]
    domain: Triangulation

    def __post_init__(self):
        n = len(self.covers)
        for c in self.covers:
            if len(c.sets) != n:
                raise ValueError("each cover must have exactly n sets")

    @property
    def n(self) -> int:
        return len(self.covers)


def _pous(G: GaleInstance, eps_pou: float) -> list[PartitionOfUnity]:
    return [partition_of_unity(c, eps_pou) for c in G.covers]


def averaged_map(G: GaleInstance, x, eps_pou: float = 0.25) -> tuple[float, ...]:
    """Phi(x): the mean of the covers' partition-of-unity maps at x."""
    n = G.n
    rows = [pou.weights(x) for pou in _pous(G, eps_pou)]
    return tuple(sum(r[j] for r in rows) / n for j in range(n))


def _centroid(pts: Sequence[RVec]) -> RVec:
    k = len(pts)
    return tuple(sum(p[i] for p in pts) / k for i in range(len(pts[0])))


def _split_cell(pts: list[RVec]) -> list[list[RVec]]:
    """Edgewise children of a segment or triangle, middle child last."""
    mid = lambda a, b: tuple((u + v) / 2 for u, v in zip(a, b))
    if len(pts) == 2:
        a, b = pts
        m = mid(a, b)
        return [[a, m], [m, b]]
    if len(pts) == 3:
        a, b, c = pts
        mab, mbc, mac = mid(a, b), mid(b, c), mid(a, c)
        return [[a, mab, mac], [mab, b, mbc], [mac, mbc, c], [mab, mbc, mac]]
    raise NotImplementedError("cells of dimension > 2")


def _cycle_degree(labels: list[int], n: int) -> int:
    m = len(labels)
    verts = tuple((Fraction(i), Fraction(0)) for i in range(m))
    cells = tuple((i, (i + 1) % m) for i in range(m))
    T = Triangulation(verts, cells, (1,) * m, 1)
    L = Labeling(dict(enumerate(labels)), tuple(range(1, n + 1)))
    return degree_labeling(T, L).degree


class _Residual:
    """Cached residual/label evaluation of n*Phi - 1 over rational points."""

    def __init__(self, pous, n, probe=None):
        self.pous = pous
        self.n = n
        self.probe = probe
        self.cache: dict = {}

    def phi(self, x: RVec) -> list[float]:
        if x not in self.cache:
            if self.probe is not None:
                self.probe(x)
            rows = [pou.weights(x) for pou in self.pous]
            self.cache[x] = [sum(r[j] for r in rows) / self.n
                             for j in range(self.n)]
        return self.cache[x]

    def residual(self, x: RVec) -> float:
        return max(abs(self.n * f - 1.0) for f in self.phi(x))

    def label(self, x: RVec) -> int:
        phi = self.phi(x)
        c = 1.0 / self.n
        return max(range(self.n), key=lambda j: (phi[j] - c, -j)) + 1


def _boundary_degree(res: _Residual, pts: Sequence[RVec], samples: int) -> int:
    n = res.n
    if n == 1:
        return 1
    if len(pts) == 2:
        return 1 if res.label(pts[0]) != res.label(pts[1]) else 0
    labels = []
    k = len(pts)
    for e in range(k):
        a, b = pts[e], pts[(e + 1) % k]
        for i in range(samples):
            t = Fraction(i, samples)
            x = tuple(u + t * (v - u) for u, v in zip(a, b))
            labels.append(res.label(x))
    return _cycle_degree(labels, n)


def _local_refine(res: _Residual, x0: RVec, h: Fraction, eps: float,
                  rounds: int = 14, K: int = 5):
    """Deterministic shrinking-grid descent of the residual around x0.

    Used when subdivision has localized a zero near a cell boundary that
    sampled degrees cannot cross; all grid points stay rational and inside
    the simplex chart (last coordinate balances the sum).
    """
    from itertools import product
    free = len(x0) - 1
    total = sum(x0)
    c = list(x0[:free])
    best = (res.residual(x0), x0)
    for _ in range(rounds):
        step = Fraction(h, K)
        for offs in product(range(-K, K + 1), repeat=free):
            coords = [c[j] + offs[j] * step for j in range(free)]
            last = total - sum(coords)
            if last < 0 or any(v < 0 for v in coords):
                continue
            x = tuple(coords) + (last,)
            r = res.residual(x)
            if r < best[0]:
                best = (r, x)
        if best[0] <= eps:
            return best[1]
        c = list(best[1][:free])
        h = step
    return None


def find_barycenter_preimage(G: GaleInstance, eps: float,
                             eps_pou: float = 0.25, samples: int = 12,
                             max_depth: int = 64, max_nodes: int = 250,
                             probe: Optional[Callable] = None) -> RVec:
    """A rational point p with ||n*Phi(p) - (1,...,1)||_inf <= eps.

    Degree-guided subdivision: residuals are checked at cell vertices and
    centroids first (exact hits on plateaus and symmetric instances), then
    a depth-first search recurses into child cells whose sampled boundary
    labeling of Phi - c has nonzero degree, backtracking when a branch
    dead-ends (zeros near subdivision edges fool single-path descent).
    `probe` is called once per candidate point before evaluation
    (interactive oracles hook it).
    """
    n = G.n
    res = _Residual(_pous(G, eps_pou), n, probe)
    best = (float("inf"), None)

    def check(x):
        nonlocal best
        r = res.residual(x)
        if r < best[0]:
            best = (r, x)
        return r <= eps

    cells = [[tuple(p) for p in G.domain.cell_points(ci)]
             for ci in range(len(G.domain.cells))]
    for pts in cells:
        for x in list(pts) + [_centroid(pts)]:
            if check(x):
                return x
    live = [pts for pts in cells if _boundary_degree(res, pts, samples) != 0]
    if not live:
        raise DegreeVanishedError(best[0], best[1], 0)
    stack = [(1, pts) for pts in reversed(live)]
    nodes = 0
    deepest = 0
    while stack and nodes < max_nodes:
        depth, pts = stack.pop()
        nodes += 1
        deepest = max(deepest, depth)
        if depth > max_depth:
            continue
        children = _split_cell(pts)
        for ch in children:
            for x in list(ch) + [_centroid(ch)]:
                if check(x):
                    return x
        nz = [ch for ch in children if _boundary_degree(res, ch, samples) != 0]
        if nz:
            stack.extend((depth + 1, ch) for ch in reversed(nz))
        else:
            # sampling missed the zero (plateau boundary or a zero next to
            # a subdivision edge); follow the two best centroids
            ranked = sorted(children, key=lambda ch: res.residual(_centroid(ch)))
            stack.extend((depth + 1, ch) for ch in reversed(ranked[:2]))
    if best[0] <= eps:
        return best[1]
    # subdivision stalled with the zero pinned near a cell boundary that
    # sampled degrees cannot attribute; polish the best point locally
    refined = _local_refine(res, best[1], Fraction(1, 50), eps)
    if refined is not None:
        return refined
    raise DegreeVanishedError(best[0], best[1], deepest)


def extract_permutation(M: Sequence[Sequence[float]], tau: float) -> tuple[int, ...]:
    """Lexicographically smallest permutation pi with M[i][pi(i)] > tau
    (1-based), via backtracking with an augmenting-path feasibility check."""
    n = len(M)
    adj = [[j for j in range(n) if M[i][j] > tau] for i in range(n)]

    def feasible(start: int, used: set) -> bool:
        match: dict = {}

        def augment(i, seen):
            for j in adj[i]:
                if j in used or j in seen:
                    continue
                seen.add(j)
                if j not in match or augment(match[j], seen):
                    match[j] = i
                    return True
            return False

        return all(augment(i, set()) for i in range(start, n))

    used: set = set()
    pi: list[int] = []
    for i in range(n):
        for j in adj[i]:
            if j in used:
                continue
            used.add(j)
            pi.append(j)
            if feasible(i + 1, used):
                break
            used.discard(j)
            pi.pop()
        else:
            raise NoPerfectMatchingError(tau)
    return tuple(j + 1 for j in pi)


@dataclass
class GaleSolution:
    point: RVec
    matrix: list[list[float]]
    permutation: tuple[int, ...]
    membership_gaps: list[float]

    def to_json(self) -> dict:
        return {"p": [float(c) for c in self.point],
                "p_exact": [str(Fraction(c)) for c in self.point],
                "matrix": self.matrix,
                "permutation": list(self.permutation),
                "gaps": self.membership_gaps}

    @classmethod
    def from_json(cls, data: dict) -> "GaleSolution":
        if "p_exact" in data:
            p = tuple(Fraction(s) for s in data["p_exact"])
        else:
            p = tuple(Fraction(v).limit_denominator(10 ** 12) for v in data["p"])
        return cls(p, data["matrix"], tuple(data["permutation"]), data["gaps"])


def _matrix_at(G: GaleInstance, p, eps_pou: float) -> list[list[float]]:
    return [pou.weights(p) for pou in _pous(G, eps_pou)]


def membership_gaps(G: GaleInstance, p, permutation: Sequence[int]) -> list[float]:
    return [_set_gap(G.covers[i].sets[permutation[i] - 1], as_rvec(p))
            for i in range(G.n)]


def gale_solve(G: GaleInstance, eps: float, eps_pou: float = 0.25,
               samples: int = 12, probe: Optional[Callable] = None) -> GaleSolution:
    """Find p with n*Phi(p) near-doubly-stochastic, extract a permutation
    through its positive entries, and verify the claimed memberships.

    The partition-of-unity width shrinks geometrically until the
    membership gaps meet eps; persistent failure is reported, never
    silently accepted.
    """
    n = G.n
    last_gaps: list[float] = []
    resid_eps = eps
    for _ in range(6):
        p = find_barycenter_preimage(G, resid_eps, eps_pou, samples, probe=probe)
        M = _matrix_at(G, p, eps_pou)
        tau = 1.0 / (2 * n * n)
        while True:
            try:
                pi = extract_permutation(M, tau)
                break
            except NoPerfectMatchingError:
                tau /= 2
                if tau < 1e-12:
                    raise
        gaps = membership_gaps(G, p, pi)
        last_gaps = gaps
        if max(gaps, default=0.0) <= eps:
            return GaleSolution(tuple(p), M, pi, gaps)
        resid_eps /= 10
        eps_pou /= 4
    raise GaleVerificationError(last_gaps, eps)


def verify_solution(G: GaleInstance, sol: GaleSolution, eps: float,
                    eps_pou: float = 0.25) -> tuple[bool, dict]:
    """Re-verify a serialized certificate with no solver state: permutation
    bijective, matrix rows/columns near-stochastic, memberships within eps."""
    n = G.n
    report: dict = {}
    ok = sorted(sol.permutation) == list(range(1, n + 1))
    report["bijective"] = ok
    M = _matrix_at(G, sol.point, eps_pou)
    row = max(abs(sum(r) - 1.0) for r in M)
    col = max(abs(sum(M[i][j] for i in range(n)) - 1.0) for j in range(n))
    report["row_defect"] = row
    report["col_defect"] = col
    gaps = membership_gaps(G, sol.point, sol.permutation)
    report["gaps"] = gaps
    ok = ok and max(gaps, default=0.0) <= eps and row <= 1e-9
    report["verified"] = ok
    return ok, report
