"""Degree of the piecewise-linear map induced by a labeling, and the
witness searches (fully labeled cells, balanced-labeled cells,
complementary edges) the degree guarantees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import balanced
from .complexes import Labeling, Triangulation, perm_sign
from .geometry import (DEGENERATE, PointConfig, affine_basis, coords_in_basis,
                       det, matrix_rank, random_direction, ray_crossing_sign,
                       seeded_rng, vsub)


class FullyLabeledOnDomainError(ValueError):
    """A domain cell carries the complete label set, so the induced map does
    not land in the boundary sphere and the degree is undefined."""


class BLOnDomainError(ValueError):
    """A domain cell is balanced-labeled w.r.t. V; the configuration center
    lies in the image, so the degree w.r.t. V is undefined."""


class PersistentDegeneracyError(RuntimeError):
    pass


@dataclass
class DegreeReport:
    degree: int
    regular_value: object
    preimage_cells: list[tuple[int, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"degree": self.degree,
                "cells": [{"index": i, "sign": s} for i, s in self.preimage_cells]}


def degree_labeling(T: Triangulation, L: Labeling, omit: int | None = None) -> DegreeReport:
    """Degree of f_L on a closed oriented triangulation of dimension n-2
    with labels in I_n.

    Counted at the regular value of the target facet omitting label
    ``omit`` (default: the largest label); signs are cell orientation times
    the parity of the label-sorting permutation, with the facet's induced
    orientation factored in so the result is independent of ``omit``.
    """
    universe = sorted(L.universe)
    n = len(universe)
    if omit is None:
        omit = universe[-1]
    target = [l for l in universe if l != omit]
    j = universe.index(omit) + 1  # 1-based position of the omitted label
    facet_sign = (-1) ** (n - j)

    full = set(universe)
    preimage = []
    total = 0
    for ci, cell in enumerate(T.cells):
        labels = L.cell_labels(T, ci)
        if set(labels) == full:
            raise FullyLabeledOnDomainError(f"cell {ci} carries all labels")
        if sorted(labels) == target:
            sign = T.orientation[ci] * perm_sign(labels) * facet_sign
            preimage.append((ci, sign))
            total += sign
    return DegreeReport(total, {"omitted_label": omit}, preimage)


def degree_labeling_V(T: Triangulation, L: Labeling, V: PointConfig,
                      seed=0, max_redraws: int = 64) -> DegreeReport:
    """Degree of the map x -> (rho(x) - c_V)/|rho(x) - c_V| for a labeling
    into the names of V, computed by exact ray casting from c_V.

    The sphere orientation is normalized so that for V = Vert(simplex) the
    result coincides with degree_labeling.
    """
    origin, basis = affine_basis(list(V.points))
    d = len(basis)
    center = coords_in_basis(origin, basis, V.center)
    pts = [coords_in_basis(origin, basis, p) for p in V.points]

    # reference orientation: first affinely independent (d+1)-subset of V,
    # in index order, is declared positive (times (-1)^d for the facet
    # convention of degree_labeling).
    ref = 0
    from itertools import combinations
    for subset in combinations(range(len(pts)), d + 1):
        mat = [[pts[subset[j + 1]][i] - pts[subset[0]][i] for j in range(d)]
               for i in range(d)]
        dval = det(mat)
        if dval != 0:
            ref = (-1) ** d * (1 if dval > 0 else -1)
            break
    if ref == 0:
        raise ValueError("V is affinely degenerate")

    name_index = {name: i for i, name in enumerate(V.names)}
    images = []
    for ci, cell in enumerate(T.cells):
        labels = L.cell_labels(T, ci)
        if balanced.is_balanced(labels, V) is not None:
            raise BLOnDomainError(f"cell {ci} is balanced-labeled")
        if len(cell) != d:
            raise ValueError(f"cell {ci} has {len(cell)} vertices, expected {d}")
        image = [pts[name_index[l]] for l in labels]
        rank = matrix_rank([[image[j][i] - image[0][i] for i in range(d)]
                            for j in range(1, d)])
        images.append((ci, image, rank == d - 1))

    rng = seeded_rng("degree_labeling_V", T.cells, tuple(sorted(L.labels.items())),
                     V.points, seed)
    for _ in range(max_redraws):
        direction = random_direction(rng, d)
        total = 0
        preimage = []
        ok = True
        for ci, image, nondegenerate in images:
            if not nondegenerate:
                continue  # measure-zero image: a generic ray misses it
            s = ray_crossing_sign(image, center, direction)
            if s == DEGENERATE:
                ok = False
                break
            if s != 0:
                sign = ref * T.orientation[ci] * s
                preimage.append((ci, sign))
                total += sign
        if ok:
            return DegreeReport(total, {"direction": [str(c) for c in direction]},
                                preimage)
    raise PersistentDegeneracyError("no generic direction found")


def check_sperner(T: Triangulation, L: Labeling) -> tuple[bool, list[dict]]:
    """Validate the two Sperner rules on a lattice triangulation of the
    standard simplex; violations name the vertex and its carrier face."""
    n = len(T.vertices[0])
    violations = []
    for vi, v in enumerate(T.vertices):
        carrier = [i + 1 for i in range(n) if v[i] > 0]
        label = L[vi]
        if len(carrier) == 1 and label != carrier[0]:
            violations.append({"vertex": vi, "face": carrier,
                               "label": label, "rule": "corner"})
        elif label not in carrier:
            violations.append({"vertex": vi, "face": carrier,
                               "label": label, "rule": "face"})
    return (not violations, violations)


def find_fully_labeled(T: Triangulation, L: Labeling) -> list[int]:
    full = set(L.universe)
    return [ci for ci in range(len(T.cells))
            if set(L.cell_labels(T, ci)) == full]


def find_bl_simplices(T: Triangulation, L: Labeling, V: PointConfig) -> list[int]:
    return [ci for ci in range(len(T.cells))
            if balanced.is_balanced(L.cell_labels(T, ci), V) is not None]


def find_complementary_edges(T: Triangulation, L: Labeling) -> list[tuple[int, int]]:
    return [(a, b) for a, b in T.edges() if L[a] == -L[b]]
