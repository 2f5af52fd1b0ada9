import random
import time
from fractions import Fraction
from itertools import permutations

import pytest

from coverdeg.complexes import kuhn_triangulation
from coverdeg.covers import Cover, CoverSet, Halfspace, voronoi_kkm_cover
from coverdeg.gale import (GaleInstance, GaleSolution, NoPerfectMatchingError,
                           averaged_map, extract_permutation,
                           find_barycenter_preimage, gale_solve,
                           verify_solution)
from coverdeg.geometry import rvec


def rwb_instance(n=3):
    """n identical vertex-Voronoi KKM covers of the simplex."""
    return GaleInstance([voronoi_kkm_cover(n) for _ in range(n)],
                        kuhn_triangulation(n, 1))


def perturbed_instance(seed, n=3, denom=20):
    rng = random.Random(seed)
    sites = []
    for i in range(n):
        base = [Fraction(1 if j == i else 0) for j in range(n)]
        for j in range(n):
            base[j] += Fraction(rng.randint(-2, 2), denom)
        sites.append(tuple(base))
    domain = kuhn_triangulation(n, 1)
    cover = voronoi_kkm_cover(n, domain=domain, sites=sites)
    return GaleInstance([cover for _ in range(n)], domain)


def test_averaged_map_identical_covers_is_single_map():
    G = rwb_instance()
    single = voronoi_kkm_cover(3)
    from coverdeg.covers import partition_of_unity
    pou = partition_of_unity(single, 0.25)
    rng = random.Random(1)
    for _ in range(50):
        a = Fraction(rng.randint(0, 10), 10)
        b = Fraction(rng.randint(0, 10), 10) * (1 - a)
        x = (a, b, 1 - a - b)
        assert averaged_map(G, x) == pytest.approx(pou.weights(x), abs=1e-15)


def test_averaged_map_sums_to_one():
    G = perturbed_instance(7)
    rng = random.Random(3)
    for _ in range(10000):
        a = Fraction(rng.randint(0, 1000), 1000)
        b = (1 - a) * Fraction(rng.randint(0, 1000), 1000)
        phi = averaged_map(G, (a, b, 1 - a - b))
        assert abs(sum(phi) - 1) < 1e-12
        assert all(v >= 0 for v in phi)


def test_symmetry_point_two_covers():
    domain = kuhn_triangulation(2, 2)
    left = CoverSet("L", "closed", ((Halfspace(rvec(-1, 0), Fraction(-1, 2)),),))
    right = CoverSet("R", "closed", ((Halfspace(rvec(1, 0), Fraction(1, 2)),),))
    C = Cover([left, right], domain)
    C2 = Cover([right, left], domain)
    mid = rvec(Fraction(1, 2), Fraction(1, 2))
    # complementary supports: the symmetry point averages to (1/2, 1/2)
    assert averaged_map(GaleInstance([C, C2], domain), mid) == pytest.approx([0.5, 0.5])
    # two identical covers: the midpoint is the unique preimage
    G = GaleInstance([C, C], domain)
    p = find_barycenter_preimage(G, 1e-6)
    assert abs(float(p[0]) - 0.5) < 1e-6


def test_preimage_voronoi_is_barycenter():
    G = rwb_instance()
    p = find_barycenter_preimage(G, 1e-6)
    assert p == (Fraction(1, 3),) * 3


def test_preimage_perturbed_residual():
    for seed in range(5):
        G = perturbed_instance(seed)
        p = find_barycenter_preimage(G, 1e-6)
        phi = averaged_map(G, p)
        assert max(abs(3 * v - 1) for v in phi) <= 1e-6


def test_extract_identity():
    assert extract_permutation([[1, 0], [0, 1]], 0.1) == (1, 2)


def test_extract_uniform_is_identity():
    n = 4
    M = [[1 / n] * n for _ in range(n)]
    assert extract_permutation(M, 1.0 / (2 * n * n)) == (1, 2, 3, 4)


def test_extract_lexicographic_vs_exhaustive():
    M = [[0.5, 0.5, 0], [0, 0.5, 0.5], [0.5, 0, 0.5]]
    tau = 1 / 18
    feasible = [pi for pi in permutations(range(3))
                if all(M[i][pi[i]] > tau for i in range(3))]
    assert len(feasible) == 2
    expected = tuple(j + 1 for j in min(feasible))
    assert extract_permutation(M, tau) == expected == (1, 2, 3)


def test_extract_no_matching_raises():
    with pytest.raises(NoPerfectMatchingError):
        extract_permutation([[1, 0], [1, 0]], 0.1)


def test_birkhoff_support_property():
    # every doubly stochastic mixture has a permutation above 1/(n*n!)
    rng = random.Random(11)
    for n in (2, 3, 4):
        import math
        tau = 1.0 / (n * math.factorial(n)) - 1e-12
        for _ in range(50):
            perms = list(permutations(range(n)))
            w = [rng.random() for _ in perms]
            s = sum(w)
            M = [[0.0] * n for _ in range(n)]
            for weight, pi in zip(w, perms):
                for i in range(n):
                    M[i][pi[i]] += weight / s
            pi = extract_permutation(M, tau)
            assert sorted(pi) == list(range(1, n + 1))


def test_gale_solve_red_white_blue():
    G = rwb_instance()
    t0 = time.time()
    sol = gale_solve(G, 1e-6)
    assert time.time() - t0 < 5.0
    assert sorted(sol.permutation) == [1, 2, 3]
    assert max(sol.membership_gaps) <= 1e-6
    for row in sol.matrix:
        assert abs(sum(row) - 1) < 1e-9


def test_gale_solve_n1():
    from coverdeg.complexes import Triangulation
    domain = Triangulation(((Fraction(1),),), ((0,),), (1,), 0)
    whole = CoverSet("1", "closed", ((Halfspace(rvec(0), Fraction(0)),),))
    G = GaleInstance([Cover([whole], domain)], domain)
    sol = gale_solve(G, 1e-9)
    assert sol.permutation == (1,)
    assert sol.membership_gaps == [0.0]


def test_gale_solve_perturbed_seeds_verify():
    for seed in range(20):
        G = perturbed_instance(seed)
        t0 = time.time()
        sol = gale_solve(G, 1e-6)
        assert time.time() - t0 < 5.0
        ok, report = verify_solution(G, sol, 1e-6)
        assert ok, report


def test_certificate_roundtrip_reverifies():
    G = rwb_instance()
    sol = gale_solve(G, 1e-6)
    back = GaleSolution.from_json(sol.to_json())
    assert back.point == sol.point
    ok, _ = verify_solution(G, back, 1e-6)
    assert ok


def test_doubly_stochastic_at_solution():
    for seed in (2, 9):
        G = perturbed_instance(seed)
        sol = gale_solve(G, 1e-6)
        n = 3
        for j in range(n):
            assert abs(sum(sol.matrix[i][j] for i in range(n)) - 1) <= 1e-5
