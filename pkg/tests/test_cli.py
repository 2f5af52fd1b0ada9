import json
from fractions import Fraction

import pytest

from coverdeg.cli import main
from coverdeg.complexes import (Labeling, Triangulation,
                                canonical_sperner_labeling, kuhn_triangulation)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def cycle_file(tmp_path, labels, name="cycle.json"):
    m = len(labels)
    verts = tuple((Fraction(i), Fraction(0)) for i in range(m))
    cells = tuple((i, (i + 1) % m) for i in range(m))
    T = Triangulation(verts, cells, (1,) * m, 1)
    L = Labeling({i: l for i, l in enumerate(labels)}, (1, 2, 3))
    path = tmp_path / name
    path.write_text(json.dumps({"triangulation": T.to_json(),
                                "labeling": L.to_json()}))
    return str(path)


def sperner_file(tmp_path, n=3, k=3):
    T = kuhn_triangulation(n, k)
    L = canonical_sperner_labeling(T)
    path = tmp_path / "sperner.json"
    path.write_text(json.dumps({"triangulation": T.to_json(),
                                "labeling": L.to_json()}))
    return str(path)


def test_degree_example(tmp_path, capsys):
    path = cycle_file(tmp_path, [int(c) for c in "1221231232112231231"])
    code, out = run(capsys, "degree", "--labeling", path)
    assert code == 0
    assert out["degree"] == 3


def test_degree_constant_zero(tmp_path, capsys):
    path = cycle_file(tmp_path, [1] * 8)
    code, out = run(capsys, "degree", "--labeling", path)
    assert code == 0 and out["degree"] == 0


def test_degree_missing_file_exit_2(capsys):
    code, out = run(capsys, "degree", "--labeling", "/nonexistent.json")
    assert code == 2
    assert "error" in out


def test_sperner_check_and_fully_labeled(tmp_path, capsys):
    path = sperner_file(tmp_path)
    code, out = run(capsys, "sperner-check", "--labeling", path)
    assert code == 0 and out["ok"]
    code, out = run(capsys, "fully-labeled", "--labeling", path)
    assert code == 0 and out["count"] >= 1


def test_sperner_check_failure_exit_1(tmp_path, capsys):
    T = kuhn_triangulation(3, 2)
    L = canonical_sperner_labeling(T)
    bad = dict(L.labels)
    corner = next(vi for vi, v in enumerate(T.vertices) if v[0] == 1)
    bad[corner] = 2
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "triangulation": T.to_json(),
        "labeling": Labeling(bad, (1, 2, 3)).to_json()}))
    code, out = run(capsys, "sperner-check", "--labeling", str(path))
    assert code == 1 and not out["ok"]


def test_balanced_enumerate_tucker_pairs(capsys):
    code, out = run(capsys, "balanced", "enumerate", "--config", "tucker",
                    "--n", "2")
    assert code == 0
    for b in out["balanced"]:
        assert any(-x in b for x in b)


def test_balanced_is(capsys):
    code, out = run(capsys, "balanced", "is", "--config", "kkms", "--k", "2",
                    "--subset", "12,13,23")
    assert code == 0 and out["balanced"]
    assert out["coefficients"] == ["1/3", "1/3", "1/3"]
    code, out = run(capsys, "balanced", "is", "--config", "simplex", "--n", "3",
                    "--subset", "1,2")
    assert code == 1 and not out["balanced"]


def test_balanced_enumerate_minimal(capsys):
    code, out = run(capsys, "balanced", "enumerate", "--config", "kkms",
                    "--k", "2", "--minimal")
    assert code == 0
    assert len(out["minimal_balanced"]) == 6


def test_mu_cover_voronoi(capsys):
    code, out = run(capsys, "mu-cover", "--voronoi", "3")
    assert code == 0
    assert out["stable"] and out["value"] == 1


def test_kkm_check_voronoi(capsys):
    code, out = run(capsys, "kkm-check", "--voronoi", "3", "--resolution", "4")
    assert code == 0 and out["ok"]


def test_common_point_voronoi(capsys):
    code, out = run(capsys, "common-point", "--voronoi", "3",
                    "--sets", "1,2,3", "--eps", "1e-6")
    assert code == 0 and out["found"]
    assert max(out["gaps"]) <= 1e-6


def test_complementary_edges_cmd(tmp_path, capsys):
    from coverdeg.complexes import antipodal_ball_triangulation
    T = antipodal_ball_triangulation(1, 1)
    L = Labeling({0: 1, 1: -1}, (1, -1))
    path = tmp_path / "ce.json"
    path.write_text(json.dumps({"triangulation": T.to_json(),
                                "labeling": L.to_json()}))
    code, out = run(capsys, "complementary-edges", "--labeling", str(path))
    assert code == 0 and out["count"] == 1


def test_gale_solve_and_verify(tmp_path, capsys):
    code, out = run(capsys, "gale", "solve", "--voronoi", "3",
                    "--eps", "1e-6")
    assert code == 0
    assert sorted(out["permutation"]) == [1, 2, 3]
    sol = tmp_path / "sol.json"
    sol.write_text(json.dumps(out))
    code, out = run(capsys, "gale", "verify", "--voronoi", "3",
                    "--solution", str(sol), "--eps", "1e-6")
    assert code == 0 and out["verified"]


def test_gale_verify_tampered_exit_1(tmp_path, capsys):
    code, out = run(capsys, "gale", "solve", "--voronoi", "3", "--eps", "1e-6")
    tampered = dict(out)
    tampered["p"] = [0.9, 0.05, 0.05]
    tampered["p_exact"] = ["9/10", "1/20", "1/20"]
    sol = tmp_path / "tampered.json"
    sol.write_text(json.dumps(tampered))
    code, out = run(capsys, "gale", "verify", "--voronoi", "3",
                    "--solution", str(sol), "--eps", "1e-6")
    assert code == 1 and not out["verified"]


def utilities_file(tmp_path, utilities, constraints=None):
    path = tmp_path / "u.json"
    data = {"utilities": utilities}
    if constraints:
        data["constraints"] = constraints
    path.write_text(json.dumps(data))
    return str(path)


def test_rent_solve_diagonal(tmp_path, capsys):
    path = utilities_file(tmp_path, [[10, 1, 1], [1, 10, 1], [1, 1, 10]])
    code, out = run(capsys, "rent", "solve", "--utilities", path)
    assert code == 0
    assert out["assignment"] == [1, 2, 3]
    assert out["prices"] == ["1/3", "1/3", "1/3"]


def test_rent_solve_constrained(tmp_path, capsys):
    path = utilities_file(tmp_path, [[1, 0], [0, 1]],
                          constraints=[[[1, 0], "1/2"]])
    code, out = run(capsys, "rent", "solve", "--utilities", path)
    assert code == 0 and out["prices"] == ["1/2", "1/2"]


def test_rent_simulate(tmp_path, capsys):
    path = utilities_file(tmp_path, [[10, 1, 1], [1, 10, 1], [1, 1, 10]])
    code, out = run(capsys, "rent", "simulate", "--utilities", path)
    assert code == 0
    assert out["certificate"]["assignment"] == [1, 2, 3]
    assert len(out["answers"]) == out["certificate"]["queries"]


def test_byte_identical_outputs(tmp_path, capsys):
    path = cycle_file(tmp_path, [int(c) for c in "1221231232112231231"])
    main(["degree", "--labeling", path])
    first = capsys.readouterr().out
    main(["degree", "--labeling", path])
    assert capsys.readouterr().out == first
    main(["gale", "solve", "--voronoi", "3", "--eps", "1e-6"])
    g1 = capsys.readouterr().out
    main(["gale", "solve", "--voronoi", "3", "--eps", "1e-6"])
    assert capsys.readouterr().out == g1


def test_figure_svg(tmp_path, capsys):
    path = sperner_file(tmp_path)
    out_path = tmp_path / "fig.svg"
    code, out = run(capsys, "figure", "--labeling", path,
                    "--out", str(out_path))
    assert code == 0
    svg = out_path.read_text()
    assert svg.startswith("<svg") and "polygon" in svg and "#ffe08a" in svg
