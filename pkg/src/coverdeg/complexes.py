"""Oriented simplicial complexes: construction, boundaries, subdivision.

Orientation convention: a cell's sign is relative to its listed vertex
order; induced boundary orientation of the facet omitting position i is
cell_sign * (-1)^i.  Triangulations are immutable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable

from .geometry import RVec, as_rvec, vadd, vscale, vsub


class NonManifoldError(ValueError):
    """A facet is shared by three or more cells."""


class IncoherentOrientationError(ValueError):
    """An interior facet receives equal induced orientations."""


def perm_sign(seq) -> int:
    """Parity of the permutation sorting seq ascending (entries distinct)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class Triangulation:
    vertices: tuple[RVec, ...]
    cells: tuple[tuple[int, ...], ...]
    orientation: tuple[int, ...]
    dim: int

    def __post_init__(self):
        for cell in self.cells:
            if len(cell) != self.dim + 1 or len(set(cell)) != self.dim + 1:
                raise ValueError(f"cell {cell} is not a {self.dim}-simplex")
        if len(self.orientation) != len(self.cells):
            raise ValueError("orientation length mismatch")

    # -- structure -------------------------------------------------------

    def facet_incidence(self) -> dict[tuple[int, ...], list[tuple[int, int]]]:
        """sorted facet -> [(cell index, induced sign w.r.t. sorted order)]"""
        incidence: dict[tuple[int, ...], list[tuple[int, int]]] = {}
        for ci, cell in enumerate(self.cells):
            for i in range(len(cell)):
                facet = cell[:i] + cell[i + 1:]
                key = tuple(sorted(facet))
                sign = self.orientation[ci] * (-1) ** i * perm_sign(facet)
                incidence.setdefault(key, []).append((ci, sign))
        return incidence

    def boundary(self) -> "Triangulation":
        """Facets lying in exactly one cell, with induced orientation."""
        if self.dim < 1:
            raise ValueError("boundary needs dim >= 1")
        cells = []
        signs = []
        for ci, cell in enumerate(self.cells):
            for i in range(len(cell)):
                facet = cell[:i] + cell[i + 1:]
                cells.append((ci, i, facet))
        counts: dict[tuple[int, ...], int] = {}
        for _, _, facet in cells:
            key = tuple(sorted(facet))
            counts[key] = counts.get(key, 0) + 1
        if any(c > 2 for c in counts.values()):
            raise NonManifoldError("a facet lies in three or more cells")
        bcells = []
        bsigns = []
        for ci, i, facet in cells:
            if counts[tuple(sorted(facet))] == 1:
                bcells.append(facet)
                bsigns.append(self.orientation[ci] * (-1) ** i)
        return Triangulation(self.vertices, tuple(bcells), tuple(bsigns), self.dim - 1)

    def is_closed(self) -> bool:
        return all(len(v) == 2 for v in self.facet_incidence().values())

    def check_coherent(self) -> None:
        """Every interior facet must receive opposite induced orientations."""
        for facet, inc in self.facet_incidence().items():
            if len(inc) == 2 and inc[0][1] + inc[1][1] != 0:
                raise IncoherentOrientationError(f"facet {facet}")
            if len(inc) > 2:
                raise NonManifoldError(f"facet {facet}")

    def edges(self) -> list[tuple[int, int]]:
        seen = set()
        for cell in self.cells:
            for a, b in permutations(cell, 2):
                if a < b:
                    seen.add((a, b))
        return sorted(seen)

    def cell_points(self, ci: int) -> list[RVec]:
        return [self.vertices[v] for v in self.cells[ci]]

    def centroid(self, ci: int) -> RVec:
        pts = self.cell_points(ci)
        acc = pts[0]
        for p in pts[1:]:
            acc = vadd(acc, p)
        return tuple(c / len(pts) for c in acc)

    def oppose(self) -> "Triangulation":
        return Triangulation(self.vertices, self.cells,
                             tuple(-s for s in self.orientation), self.dim)

    # -- subdivision -----------------------------------------------------

    def subdivide(self) -> "Triangulation":
        """Edgewise subdivision at factor 2 (dims 1 and 2)."""
        if self.dim not in (1, 2):
            raise NotImplementedError("edgewise subdivision only for dim <= 2")
        verts = list(self.vertices)
        index = {v: i for i, v in enumerate(verts)}

        def midpoint(a: int, b: int) -> int:
            p = tuple((x + y) / 2 for x, y in zip(verts[a], verts[b]))
            if p not in index:
                index[p] = len(verts)
                verts.append(p)
            return index[p]

        cells = []
        signs = []
        for ci, cell in enumerate(self.cells):
            s = self.orientation[ci]
            if self.dim == 1:
                a, b = cell
                m = midpoint(a, b)
                cells += [(a, m), (m, b)]
                signs += [s, s]
            else:
                a, b, c = cell
                mab, mbc, mac = midpoint(a, b), midpoint(b, c), midpoint(a, c)
                cells += [(a, mab, mac), (mab, b, mbc), (mac, mbc, c), (mab, mbc, mac)]
                signs += [s, s, s, s]
        return Triangulation(tuple(verts), tuple(cells), tuple(signs), self.dim)

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "vertices": [[[c.numerator, c.denominator] for c in v] for v in self.vertices],
            "cells": [list(c) for c in self.cells],
            "orientation": list(self.orientation),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Triangulation":
        verts = tuple(tuple(Fraction(num, den) for num, den in v) for v in data["vertices"])
        return cls(verts, tuple(tuple(c) for c in data["cells"]),
                   tuple(data["orientation"]), data["dim"])


@dataclass(frozen=True)
class Labeling:
    """Vertex labels over a fixed universe (I_n, or signed +-1..+-n)."""

    labels: dict[int, int]
    universe: tuple[int, ...]

    def __getitem__(self, v: int) -> int:
        return self.labels[v]

    def cell_labels(self, T: Triangulation, ci: int) -> list[int]:
        return [self.labels[v] for v in T.cells[ci]]

    def to_json(self) -> dict:
        return {"labels": {str(v): l for v, l in self.labels.items()},
                "universe": list(self.universe)}

    @classmethod
    def from_json(cls, data: dict) -> "Labeling":
        labels = {int(v): int(l) for v, l in data["labels"].items()}
        universe = tuple(data.get("universe") or sorted(set(labels.values())))
        return cls(labels, universe)


# ---------------------------------------------------------------------------
# constructions


def kuhn_triangulation(n: int, k: int) -> Triangulation:
    """Edgewise (Freudenthal/Kuhn) triangulation of the standard simplex
    in R^n at resolution k: k^(n-1) equal-volume cells on the 1/k lattice.
    """
    if n < 2 or k < 1:
        raise ValueError("need n >= 2, k >= 1")
    d = n - 1

    def in_region(s: tuple[int, ...]) -> bool:
        return s[0] >= 0 and s[-1] <= k and all(s[i] <= s[i + 1] for i in range(d - 1))

    def to_x(s: tuple[int, ...]) -> RVec:
        coords = [Fraction(s[0], k)]
        for i in range(1, d):
            coords.append(Fraction(s[i] - s[i - 1], k))
        coords.append(Fraction(k - s[d - 1], k))
        return tuple(coords)

    verts: list[RVec] = []
    vindex: dict[tuple[int, ...], int] = {}

    def vid(s: tuple[int, ...]) -> int:
        if s not in vindex:
            vindex[s] = len(verts)
            verts.append(to_x(s))
        return vindex[s]

    cells = []
    signs = []
    for base in product(range(k), repeat=d):
        for sigma in permutations(range(d)):
            chain = [tuple(base)]
            for step in sigma:
                prev = chain[-1]
                chain.append(prev[:step] + (prev[step] + 1,) + prev[step + 1:])
            if all(in_region(s) for s in chain):
                cells.append(tuple(vid(s) for s in chain))
                signs.append(perm_sign(sigma))
    return Triangulation(tuple(verts), tuple(cells), tuple(signs), d)


def antipodal_ball_triangulation(n: int, k: int) -> Triangulation:
    """Triangulated n-ball whose boundary is centrally symmetric.

    n=1: the segment [-1, 1] in k pieces.  n=2: a fan over the square
    boundary with k edges per side (4k boundary edges).
    """
    if k < 1:
        raise ValueError("k >= 1")
    if n == 1:
        verts = tuple((Fraction(-1) + Fraction(2 * i, k),) for i in range(k + 1))
        cells = tuple((i, i + 1) for i in range(k))
        return Triangulation(verts, cells, (1,) * k, 1)
    if n == 2:
        corners = [(1, -1), (1, 1), (-1, 1), (-1, -1)]
        ring: list[RVec] = []
        for c in range(4):
            ax, ay = corners[c]
            bx, by = corners[(c + 1) % 4]
            for i in range(k):
                t = Fraction(i, k)
                ring.append((Fraction(ax) + t * (bx - ax), Fraction(ay) + t * (by - ay)))
        verts = [as_rvec((0, 0))] + ring
        m = len(ring)
        cells = tuple((0, 1 + j, 1 + (j + 1) % m) for j in range(m))
        return Triangulation(tuple(verts), cells, (1,) * m, 2)
    raise NotImplementedError("antipodal ball triangulations only for n <= 2")


def canonical_sperner_labeling(T: Triangulation) -> Labeling:
    """label = smallest coordinate index with positive value (1-based)."""
    n = len(T.vertices[0])
    labels = {}
    for vi, v in enumerate(T.vertices):
        labels[vi] = next(i + 1 for i in range(n) if v[i] > 0)
    return Labeling(labels, tuple(range(1, n + 1)))
