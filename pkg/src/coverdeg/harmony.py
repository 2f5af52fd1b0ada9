"""Rental harmony: preference oracles over rent divisions, acceptability and
free-room condition checks, division solving through the averaged-cover
engine, and resumable interactive sessions with append-only JSONL logs.

Prices are exact rationals summing to 1 throughout; floats appear only in
preference scores and partition-of-unity weights.
"""

from __future__ import annotations

import json
import os
import uuid
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .complexes import Triangulation, kuhn_triangulation
from .covers import Cover, CoverSet, simplex_lattice
from .degrees import degree_labeling
from .gale import (GaleInstance, _cycle_degree, gale_solve)
from .geometry import RVec, as_rvec, sqnorm, vsub

DELTA_FREE = 1e-9  # a room is "free" below this price
SMOOTH_DELTA = 1e-3  # width of the free-room blending band
SCORE_MARGIN = 1e-3  # partition-of-unity margin around the argmax


class NeedAnswer(Exception):
    """Interactive solve suspended: agent must answer at these prices."""

    def __init__(self, agent: int, prices: RVec):
        self.agent = agent
        self.prices = tuple(prices)
        super().__init__(f"agent {agent} must answer at {prices}")


class EmptyDomainError(ValueError):
    pass


class A2DegreeZeroError(RuntimeError):
    """The combined cover's boundary degree vanished on the constrained
    domain; the existence hypothesis fails and no certificate is claimed."""


@dataclass
class SimulatedOracle:
    """Utility-matrix oracle: u[i][j] is agent i's value for room j."""

    utilities: list[list[float]]

    @property
    def n(self) -> int:
        return len(self.utilities)

    def scores(self, agent: int, x) -> list[float]:
        u = self.utilities[agent - 1]
        return [u[j] - float(x[j]) for j in range(self.n)]

    def smooth_scores(self, agent: int, x) -> list[float]:
        u = self.utilities[agent - 1]
        flat = [v for row in self.utilities for v in row]
        big = (max(flat) - min(flat)) + 1.0
        out = []
        for j in range(self.n):
            xj = float(x[j])
            out.append(u[j] - xj + big * max(0.0, (SMOOTH_DELTA - xj) / SMOOTH_DELTA))
        return out

    def answer(self, agent: int, x) -> list[int]:
        """Acceptable rooms at prices x (1-based), full tied set."""
        u = self.utilities[agent - 1]
        free = [j for j in range(self.n) if float(x[j]) <= DELTA_FREE]
        if free:
            top = max(u[j] for j in free)
            return [j + 1 for j in free if u[j] >= top - 1e-12]
        s = self.scores(agent, x)
        top = max(s)
        return [j + 1 for j in range(self.n) if s[j] >= top - 1e-12]


@dataclass
class InteractiveOracle:
    """Answer cache keyed by exact rational prices; unanswered queries
    suspend the solver via NeedAnswer.  Between answered points the cover
    is interpolated by the nearest answered query."""

    n: int
    answers: dict = field(default_factory=dict)

    def record(self, agent: int, prices, rooms: Sequence[int]):
        self.answers[(agent, tuple(prices))] = tuple(sorted(rooms))

    def answered(self, agent: int, prices) -> bool:
        return (agent, tuple(prices)) in self.answers

    def answer(self, agent: int, x) -> tuple[int, ...]:
        key = (agent, tuple(x))
        if key not in self.answers:
            raise NeedAnswer(agent, x)
        return self.answers[key]

    def nearest_answer(self, agent: int, x) -> tuple[int, ...]:
        key = (agent, tuple(x))
        if key in self.answers:
            return self.answers[key]
        cands = [(sqnorm(vsub(as_rvec(p), as_rvec(x))), p, rooms)
                 for (a, p), rooms in sorted(self.answers.items())
                 if a == agent]
        if not cands:
            raise NeedAnswer(agent, x)
        return min(cands, key=lambda t: (t[0], t[1]))[2]


def _simulated_cover(oracle: SimulatedOracle, agent: int,
                     domain: Triangulation) -> Cover:
    n = oracle.n

    def weights(x):
        s = oracle.smooth_scores(agent, x)
        top = max(s)
        g = [max(0.0, SCORE_MARGIN - (top - v)) for v in s]
        total = sum(g)
        return [v / total for v in g]

    sets = []
    for j in range(1, n + 1):
        sets.append(CoverSet(
            name=str(j), kind="closed",
            membership=lambda x, a=agent, jj=j: jj in oracle.answer(a, x),
            dist_fn=lambda x, a=agent, jj=j: max(
                0.0, max(oracle.smooth_scores(a, x))
                - oracle.smooth_scores(a, x)[jj - 1])))
    return Cover(sets, domain, kind="closed", weight_fn=weights)


def _interactive_cover(oracle: InteractiveOracle, agent: int,
                       domain: Triangulation) -> Cover:
    n = oracle.n

    def weights(x):
        rooms = oracle.nearest_answer(agent, tuple(x))
        return [(1.0 / len(rooms) if j + 1 in rooms else 0.0) for j in range(n)]

    sets = []
    for j in range(1, n + 1):
        sets.append(CoverSet(
            name=str(j), kind="closed",
            membership=lambda x, a=agent, jj=j: jj in oracle.nearest_answer(a, tuple(x)),
            dist_fn=lambda x, a=agent, jj=j:
                0.0 if jj in oracle.nearest_answer(a, tuple(x)) else 1.0))
    return Cover(sets, domain, kind="closed", weight_fn=weights)


def validate_conditions(oracle, k: int = 8) -> dict:
    """Sample the price simplex at resolution k: C1 (some acceptable room
    everywhere) and C2 (a free room is acceptable on every boundary face)."""
    n = oracle.n
    violations = []
    for x in simplex_lattice(n, k):
        for agent in range(1, n + 1):
            rooms = oracle.answer(agent, x)
            if not rooms:
                violations.append({"condition": "C1", "agent": agent,
                                   "prices": [str(c) for c in x]})
                continue
            free = [j + 1 for j in range(n) if x[j] == 0]
            if free and not set(rooms) & set(free):
                violations.append({"condition": "C2", "agent": agent,
                                   "prices": [str(c) for c in x],
                                   "answer": list(rooms)})
    return {"c1": not any(v["condition"] == "C1" for v in violations),
            "c2": not any(v["condition"] == "C2" for v in violations),
            "resolution": k, "violations": violations}


@dataclass
class DivisionCertificate:
    prices: tuple  # exact rationals, sum 1
    assignment: tuple[int, ...]  # room of agent i at position i-1, 1-based
    envy_gaps: list[float]
    queries: int = 0

    def to_json(self) -> dict:
        return {"prices": [str(c) for c in self.prices],
                "prices_decimal": [f"{float(c):.6f}" for c in self.prices],
                "assignment": list(self.assignment),
                "envy_gaps": self.envy_gaps,
                "queries": self.queries}

    @classmethod
    def from_json(cls, data: dict) -> "DivisionCertificate":
        return cls(tuple(Fraction(s) for s in data["prices"]),
                   tuple(data["assignment"]), data["envy_gaps"],
                   data.get("queries", 0))


def _certificate(oracle, p, permutation, queries=0) -> DivisionCertificate:
    n = len(permutation)
    gaps = []
    for agent in range(1, n + 1):
        room = permutation[agent - 1]
        if isinstance(oracle, SimulatedOracle):
            s = oracle.scores(agent, p)
            gaps.append(max(0.0, max(s) - s[room - 1]))
        else:
            rooms = oracle.nearest_answer(agent, tuple(p))
            gaps.append(0.0 if room in rooms else 1.0)
    prices = tuple(Fraction(c) for c in p)
    assert sum(prices) == 1
    return DivisionCertificate(prices, tuple(permutation), gaps, queries)


def _covers_for(oracle, domain: Triangulation) -> list[Cover]:
    n = oracle.n
    if isinstance(oracle, SimulatedOracle):
        return [_simulated_cover(oracle, i, domain) for i in range(1, n + 1)]
    return [_interactive_cover(oracle, i, domain) for i in range(1, n + 1)]


def _probe_for(oracle):
    if isinstance(oracle, SimulatedOracle):
        return None

    def probe(x):
        for agent in range(1, oracle.n + 1):
            oracle.answer(agent, tuple(x))
    return probe


def solve_rental(oracle, eps: float = 1e-4,
                 domain: Optional[Triangulation] = None) -> DivisionCertificate:
    """Envy-free prices and room assignment at tolerance eps."""
    n = oracle.n
    if domain is None:
        domain = kuhn_triangulation(n, 1)
    G = GaleInstance(_covers_for(oracle, domain), domain)
    sol = gale_solve(G, eps, probe=_probe_for(oracle))
    queries = len(getattr(oracle, "answers", ()))
    cert = _certificate(oracle, sol.point, sol.permutation, queries)
    if max(cert.envy_gaps, default=0.0) > eps:
        from .gale import GaleVerificationError
        raise GaleVerificationError(cert.envy_gaps, eps)
    return cert


# ---------------------------------------------------------------------------
# constrained domains


def _clip_segment(constraints) -> tuple[Fraction, Fraction]:
    lo, hi = Fraction(0), Fraction(1)
    for coeffs, offset in constraints:
        a = Fraction(coeffs[0]) - Fraction(coeffs[1])
        b = Fraction(offset) - Fraction(coeffs[1])
        # a * x1 <= b on the line (x1, 1 - x1)
        if a > 0:
            hi = min(hi, b / a)
        elif a < 0:
            lo = max(lo, b / a)
        elif b < 0:
            return Fraction(1), Fraction(0)
    return lo, hi


def _clip_polygon(poly, coeffs, offset):
    """Sutherland-Hodgman step: keep {x : coeffs . x <= offset}, exact."""
    out = []
    m = len(poly)
    val = lambda p: sum(Fraction(c) * q for c, q in zip(coeffs, p)) - Fraction(offset)
    for i in range(m):
        a, b = poly[i], poly[(i + 1) % m]
        va, vb = val(a), val(b)
        if va <= 0:
            out.append(a)
        if (va < 0 < vb) or (vb < 0 < va):
            t = va / (va - vb)
            out.append(tuple(pa + t * (pb - pa) for pa, pb in zip(a, b)))
    # drop exact duplicates
    dedup = []
    for p in out:
        if not dedup or p != dedup[-1]:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def constrained_domain(n: int, constraints) -> Triangulation:
    """Triangulate {x in simplex : coeffs . x <= offset for each constraint}."""
    if n == 2:
        lo, hi = _clip_segment(constraints)
        if lo >= hi:
            raise EmptyDomainError("constraints leave no full-dimensional domain")
        verts = ((lo, 1 - lo), (hi, 1 - hi))
        return Triangulation(verts, ((0, 1),), (1,), 1)
    if n != 3:
        raise NotImplementedError("constrained domains for n > 3")
    poly = [(Fraction(1), Fraction(0), Fraction(0)),
            (Fraction(0), Fraction(1), Fraction(0)),
            (Fraction(0), Fraction(0), Fraction(1))]
    for coeffs, offset in constraints:
        poly = _clip_polygon(poly, coeffs, offset)
        if len(poly) < 3:
            raise EmptyDomainError("constraints leave no full-dimensional domain")
    verts = tuple(poly)
    cells = tuple((0, i, i + 1) for i in range(1, len(poly) - 1))
    # fan cells inherit the polygon's winding; orient all positively
    return Triangulation(verts, cells, (1,) * len(cells), 2)


def _combined_boundary_degree(oracle, domain: Triangulation,
                              samples: int = 16) -> tuple[int, float]:
    """(degree, min residual) of the column-sum labeling of the combined
    cover on the domain boundary (the boundary-degree hypothesis check).
    A residual hitting zero means a solution sits on the boundary itself,
    where the degree is allowed to vanish."""
    n = oracle.n
    covers = _covers_for(oracle, domain)
    min_resid = float("inf")

    def label(x):
        nonlocal min_resid
        cols = [0.0] * n
        for c in covers:
            w = c.weight_fn(x)
            for j in range(n):
                cols[j] += w[j]
        min_resid = min(min_resid, max(abs(v - 1.0) for v in cols))
        return max(range(n), key=lambda j: (cols[j], -j)) + 1

    B = domain.boundary()
    if domain.dim == 1:
        a, b = (domain.vertices[c[0]] for c in B.cells)
        return (1 if label(a) != label(b) else 0), min_resid
    # walk the boundary cycle and sample each edge
    succ = {}
    for cell, sign in zip(B.cells, B.orientation):
        u, v = cell if sign == 1 else (cell[1], cell[0])
        succ[u] = v
    start = B.cells[0][0]
    cycle = [start]
    while True:
        nxt = succ[cycle[-1]]
        if nxt == start:
            break
        cycle.append(nxt)
    labels = []
    for i, vi in enumerate(cycle):
        a = domain.vertices[vi]
        b = domain.vertices[cycle[(i + 1) % len(cycle)]]
        for s in range(samples):
            t = Fraction(s, samples)
            labels.append(label(tuple(u + t * (v - u) for u, v in zip(a, b))))
    return _cycle_degree(labels, n), min_resid


def solve_rental_constrained(oracle, constraints, eps: float = 1e-4) -> DivisionCertificate:
    """solve_rental on the simplex clipped by linear constraints
    coeffs . x <= offset; the boundary-degree hypothesis is checked first."""
    if not constraints:
        return solve_rental(oracle, eps)
    domain = constrained_domain(oracle.n, constraints)
    if oracle.n > 1:
        deg, boundary_resid = _combined_boundary_degree(oracle, domain)
        if deg == 0 and boundary_resid > eps:
            raise A2DegreeZeroError(
                "combined cover has zero boundary degree on the constrained domain")
    return solve_rental(oracle, eps, domain=domain)


# ---------------------------------------------------------------------------
# sessions


def _prices_json(prices) -> dict:
    return {"rationals": [str(Fraction(c)) for c in prices],
            "decimals": [f"{float(c):.6f}" for c in prices]}


class Session:
    """One rental-harmony run: either fully simulated, or interactive with
    an awaiting-answer loop.  Deterministic: the state is a pure function
    of the creation parameters and the answer log."""

    def __init__(self, sid: str, n: int, room_names: list[str], mode: str,
                 utilities=None, eps: float = 1e-4, log_path: Optional[str] = None):
        if mode not in ("simulated", "interactive"):
            raise ValueError("mode must be simulated or interactive")
        if mode == "simulated" and (utilities is None or len(utilities) != n):
            raise ValueError("simulated mode needs an n x n utility matrix")
        self.id = sid
        self.n = n
        self.room_names = room_names or [f"room {j}" for j in range(1, n + 1)]
        self.mode = mode
        self.utilities = utilities
        self.eps = eps
        self.log_path = log_path
        self.state = "collecting"
        self.pending: Optional[tuple[int, tuple]] = None
        self.answers: list[dict] = []
        self.result: Optional[DivisionCertificate] = None
        self.error: Optional[str] = None
        self.last_answer: Optional[tuple] = None

    # -- persistence

    def _append_event(self, event: dict):
        if self.log_path:
            with open(self.log_path, "a") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")

    # -- solving

    def _oracle(self):
        if self.mode == "simulated":
            return SimulatedOracle(self.utilities)
        oracle = InteractiveOracle(self.n)
        for a in self.answers:
            oracle.record(a["agent"], tuple(Fraction(s) for s in a["prices"]),
                          a["rooms"])
        return oracle

    def advance(self):
        """Run the solver from scratch against the current answer log."""
        self.state = "solving"
        try:
            cert = solve_rental(self._oracle(), self.eps)
        except NeedAnswer as e:
            self.pending = (e.agent, e.prices)
            self.state = "awaiting-answer"
            return
        except (A2DegreeZeroError, Exception) as e:
            if isinstance(e, NeedAnswer):
                raise
            self.error = f"{type(e).__name__}: {e}"
            self.state = "done"
            return
        self.pending = None
        self.result = cert
        self.state = "done"

    def submit_answer(self, agent: int, room) -> str:
        """Returns 'ok', 'duplicate', or raises StaleAnswerError."""
        rooms = sorted(room) if isinstance(room, (list, tuple)) else [room]
        if any(not 1 <= r <= self.n for r in rooms):
            raise ValueError("room out of range")
        if self.last_answer == (agent, tuple(rooms)) and (
                self.pending is None or self.pending[0] != agent):
            return "duplicate"
        if self.state != "awaiting-answer" or self.pending is None:
            raise StaleAnswerError("no pending query")
        if self.pending[0] != agent:
            raise StaleAnswerError(f"query is for agent {self.pending[0]}")
        prices = self.pending[1]
        record = {"agent": agent, "prices": [str(Fraction(c)) for c in prices],
                  "rooms": rooms}
        self.answers.append(record)
        self._append_event({"event": "answer", **record})
        self.last_answer = (agent, tuple(rooms))
        self.advance()
        return "ok"

    def to_json(self) -> dict:
        out = {"id": self.id, "n": self.n, "room_names": self.room_names,
               "mode": self.mode, "state": self.state,
               "answers": self.answers,
               "pending_query": None, "result": None, "error": self.error}
        if self.pending is not None:
            out["pending_query"] = {"agent": self.pending[0],
                                    "prices": _prices_json(self.pending[1])}
        if self.result is not None:
            out["result"] = self.result.to_json()
        return out


class StaleAnswerError(ValueError):
    pass


class SessionStore:
    """Sessions persisted as append-only JSONL event logs; recovery is
    replay of the log through the deterministic solver."""

    def __init__(self, data_dir: Optional[str] = None):
        self.data_dir = data_dir
        self.sessions: dict[str, Session] = {}
        if data_dir:
            os.makedirs(data_dir, exist_ok=True)
            for name in sorted(os.listdir(data_dir)):
                if name.endswith(".jsonl"):
                    s = self._load(os.path.join(data_dir, name))
                    if s is not None:
                        self.sessions[s.id] = s

    def _path(self, sid: str) -> Optional[str]:
        if not self.data_dir:
            return None
        return os.path.join(self.data_dir, f"{sid}.jsonl")

    def _load(self, path: str) -> Optional[Session]:
        with open(path) as fh:
            lines = [json.loads(l) for l in fh if l.strip()]
        if not lines or lines[0].get("event") != "created":
            return None
        head = lines[0]
        s = Session(head["id"], head["n"], head.get("room_names"),
                    head["mode"], head.get("utilities"),
                    head.get("eps", 1e-4), log_path=path)
        for ev in lines[1:]:
            if ev.get("event") == "answer":
                s.answers.append({"agent": ev["agent"], "prices": ev["prices"],
                                  "rooms": ev["rooms"]})
        s.advance()
        return s

    def create(self, n: int, room_names=None, mode: str = "interactive",
               utilities=None, eps: float = 1e-4, sid: Optional[str] = None) -> Session:
        sid = sid or uuid.uuid4().hex[:12]
        s = Session(sid, n, room_names, mode, utilities, eps,
                    log_path=self._path(sid))
        s._append_event({"event": "created", "id": sid, "n": n,
                         "room_names": s.room_names, "mode": mode,
                         "utilities": utilities, "eps": eps})
        s.advance()
        self.sessions[sid] = s
        return s

    def get(self, sid: str) -> Optional[Session]:
        return self.sessions.get(sid)
