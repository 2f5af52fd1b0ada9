"""Command-line entry point: degrees and witness searches, cover checks,
balanced-set queries, averaged-cover solving, rental harmony, and SVG
figures.  Machine-readable JSON on stdout, diagnostics on stderr; exit code
0 on success, 1 on a failed verification, 2 on bad input."""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .balanced import (enumerate_balanced, is_balanced, kkms_config,
                       minimal_balanced, simplex_config, tucker_config)
from .complexes import Labeling, Triangulation, kuhn_triangulation
from .covers import (Cover, common_point_search, mu_cover, validate_kkm,
                     voronoi_kkm_cover)
from .degrees import (check_sperner, degree_labeling, degree_labeling_V,
                      find_bl_simplices, find_complementary_edges,
                      find_fully_labeled)
from .gale import (GaleInstance, GaleSolution, gale_solve, verify_solution)
from .harmony import (SessionStore, SimulatedOracle, solve_rental,
                      solve_rental_constrained)


class InputError(ValueError):
    pass


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}")


def _load_labeling(path: str):
    data = _load_json(path)
    for key in ("triangulation", "labeling"):
        if key not in data:
            raise InputError(f"missing field '{key}' in {path}")
    return (Triangulation.from_json(data["triangulation"]),
            Labeling.from_json(data["labeling"]))


def _config(args):
    name = getattr(args, "config", None)
    if name is None:
        return None
    if name == "simplex":
        return simplex_config(args.n)
    if name == "tucker":
        return tucker_config(args.n)
    if name == "kkms":
        return kkms_config(args.k)
    raise InputError(f"unknown config '{name}' (simplex|tucker|kkms)")


def _cover(args) -> Cover:
    if getattr(args, "voronoi", None):
        return voronoi_kkm_cover(args.voronoi)
    if getattr(args, "cover", None):
        return Cover.from_json(_load_json(args.cover))
    raise InputError("need --cover FILE or --voronoi N")


def _parse_name(token: str):
    try:
        return int(token)
    except ValueError:
        return token


# -- subcommand handlers: return (exit_code, payload) ----------------------


def cmd_degree(args):
    T, L = _load_labeling(args.labeling)
    V = _config(args)
    if V is None:
        report = degree_labeling(T, L, omit=args.omit)
    else:
        report = degree_labeling_V(T, L, V, seed=args.seed)
    return 0, report.to_json()


def cmd_sperner_check(args):
    T, L = _load_labeling(args.labeling)
    ok, violations = check_sperner(T, L)
    return (0 if ok else 1), {"ok": ok, "violations": violations}


def cmd_fully_labeled(args):
    T, L = _load_labeling(args.labeling)
    cells = find_fully_labeled(T, L)
    return 0, {"cells": cells, "count": len(cells)}


def cmd_bl_simplices(args):
    T, L = _load_labeling(args.labeling)
    V = _config(args)
    if V is None:
        raise InputError("--config is required for bl-simplices")
    cells = find_bl_simplices(T, L, V)
    return 0, {"cells": cells, "count": len(cells)}


def cmd_complementary_edges(args):
    T, L = _load_labeling(args.labeling)
    edges = find_complementary_edges(T, L)
    return 0, {"edges": [list(e) for e in edges], "count": len(edges)}


def cmd_mu_cover(args):
    if getattr(args, "voronoi", None):
        # the invariant lives on a closed domain: use the boundary sphere
        n = args.voronoi
        cover = voronoi_kkm_cover(n, domain=kuhn_triangulation(n, 2).boundary())
    else:
        cover = _cover(args)
    report = mu_cover(cover, refinement_levels=args.levels,
                      eps_pou=args.eps_pou)
    return (0 if report.stable else 1), report.to_json()


def cmd_kkm_check(args):
    ok, violations = validate_kkm(_cover(args), args.resolution)
    return (0 if ok else 1), {"ok": ok, "violations": violations}


def cmd_common_point(args):
    B = [_parse_name(t) for t in args.sets.split(",")]
    res = common_point_search(_cover(args), B, args.eps)
    return (0 if res.found else 1), res.to_json()


def _subset_names(tokens, V):
    out = []
    for t in tokens:
        if t in V.names:
            out.append(t)
        elif _parse_name(t) in V.names:
            out.append(_parse_name(t))
        else:
            raise InputError(f"'{t}' is not a point name of this config")
    return out


def cmd_balanced_is(args):
    V = _config(args)
    if V is None:
        raise InputError("--config is required")
    subset = _subset_names(args.subset.split(","), V)
    cert = is_balanced(subset, V)
    if cert is None:
        return 1, {"balanced": False, "subset": subset}
    return 0, {"balanced": True, "subset": list(cert.subset),
               "coefficients": [str(c) for c in cert.coefficients]}


def cmd_balanced_enumerate(args):
    V = _config(args)
    if V is None:
        raise InputError("--config is required")
    if args.minimal:
        subsets = minimal_balanced(V)
        return 0, {"minimal_balanced": [list(b) for b in subsets]}
    certs = enumerate_balanced(V)
    return 0, {"balanced": [list(c.subset) for c in certs]}


def _gale_instance(args) -> GaleInstance:
    if getattr(args, "voronoi", None):
        n = args.voronoi
        return GaleInstance([voronoi_kkm_cover(n) for _ in range(n)],
                            kuhn_triangulation(n, 1))
    if getattr(args, "covers", None):
        data = _load_json(args.covers)
        covers = [Cover.from_json(c) for c in data["covers"]]
        return GaleInstance(covers, covers[0].domain)
    raise InputError("need --covers FILE or --voronoi N")


def cmd_gale_solve(args):
    sol = gale_solve(_gale_instance(args), args.eps)
    return 0, sol.to_json()


def cmd_gale_verify(args):
    sol = GaleSolution.from_json(_load_json(args.solution))
    ok, report = verify_solution(_gale_instance(args), sol, args.eps)
    return (0 if ok else 1), report


def _oracle(args) -> SimulatedOracle:
    data = _load_json(args.utilities)
    if "utilities" not in data:
        raise InputError(f"missing field 'utilities' in {args.utilities}")
    return SimulatedOracle(data["utilities"]), data.get("constraints", [])


def cmd_rent_solve(args):
    oracle, constraints = _oracle(args)
    constraints = [(c[0], Fraction(str(c[1]))) for c in constraints]
    cert = solve_rental_constrained(oracle, constraints, args.eps)
    return 0, cert.to_json()


def cmd_rent_simulate(args):
    oracle, _ = _oracle(args)
    store = SessionStore(args.data_dir)
    s = store.create(oracle.n, mode="interactive", eps=args.eps)
    steps = 0
    while s.state == "awaiting-answer":
        steps += 1
        if steps > 1000:
            return 1, {"error": "session did not converge"}
        agent, prices = s.pending
        s.submit_answer(agent, list(oracle.answer(agent, prices)))
    if s.result is None:
        return 1, {"error": s.error or "no result"}
    return 0, {"session": s.id, "certificate": s.result.to_json(),
               "answers": s.answers}


def cmd_rent_serve(args):
    import uvicorn
    from .service import create_app
    app = create_app(args.data_dir, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0, {}


def cmd_figure(args):
    T, L = _load_labeling(args.labeling)
    svg = render_svg(T, L)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(svg)
        return 0, {"written": args.out}
    sys.stdout.write(svg)
    return 0, None


# -- SVG rendering ----------------------------------------------------------

_PALETTE = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _project(p) -> tuple[float, float]:
    # barycentric-ish projection of the first three coordinates; lower
    # dimensions pass through
    if len(p) >= 3:
        x = float(p[1]) + 0.5 * float(p[2])
        y = math.sqrt(3) / 2 * float(p[2])
        return x, y
    if len(p) == 2:
        return float(p[0]), float(p[1])
    return float(p[0]), 0.0


def render_svg(T: Triangulation, L: Labeling, size: int = 420) -> str:
    pts = [_project(v) for v in T.vertices]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    pad = 30
    scale = (size - 2 * pad) / span

    def at(i):
        x = pad + (pts[i][0] - min(xs)) * scale
        y = size - pad - (pts[i][1] - min(ys)) * scale
        return x, y

    universe = sorted(L.universe, key=lambda l: (isinstance(l, str), l))
    color = {l: _PALETTE[i % len(_PALETTE)] for i, l in enumerate(universe)}
    witnesses = set(find_fully_labeled(T, L)) if T.dim >= 1 else set()
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
             f'height="{size}" viewBox="0 0 {size} {size}">']
    for ci, cell in enumerate(T.cells):
        coords = " ".join(f"{at(v)[0]:.2f},{at(v)[1]:.2f}" for v in cell)
        fill = "#ffe08a" if ci in witnesses else "none"
        parts.append(f'<polygon points="{coords}" fill="{fill}" '
                     f'stroke="#555" stroke-width="1"/>')
    for vi in sorted({v for cell in T.cells for v in cell}):
        x, y = at(vi)
        c = color.get(L[vi], "#000")
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="7" fill="{c}"/>')
        parts.append(f'<text x="{x:.2f}" y="{y + 3.5:.2f}" font-size="9" '
                     f'text-anchor="middle" fill="#fff">{L[vi]}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coverdeg")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, eps=False, resolution=False, seed=False, out=False):
        if eps:
            sp.add_argument("--eps", type=float, default=1e-6)
        if resolution:
            sp.add_argument("--resolution", type=int, default=4)
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        if out:
            sp.add_argument("--out")

    def config_flags(sp):
        sp.add_argument("--config", choices=["simplex", "tucker", "kkms"])
        sp.add_argument("--n", type=int, default=3)
        sp.add_argument("--k", type=int, default=2)

    sp = sub.add_parser("degree")
    sp.add_argument("--labeling", required=True)
    sp.add_argument("--omit", type=int)
    config_flags(sp)
    common(sp, seed=True)
    sp.set_defaults(fn=cmd_degree)

    for name, fn in [("sperner-check", cmd_sperner_check),
                     ("fully-labeled", cmd_fully_labeled),
                     ("complementary-edges", cmd_complementary_edges)]:
        sp = sub.add_parser(name)
        sp.add_argument("--labeling", required=True)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("bl-simplices")
    sp.add_argument("--labeling", required=True)
    config_flags(sp)
    sp.set_defaults(fn=cmd_bl_simplices)

    sp = sub.add_parser("mu-cover")
    sp.add_argument("--cover")
    sp.add_argument("--voronoi", type=int)
    sp.add_argument("--levels", type=int, default=2)
    sp.add_argument("--eps-pou", type=float, default=0.25)
    sp.set_defaults(fn=cmd_mu_cover)

    sp = sub.add_parser("kkm-check")
    sp.add_argument("--cover")
    sp.add_argument("--voronoi", type=int)
    common(sp, resolution=True)
    sp.set_defaults(fn=cmd_kkm_check)

    sp = sub.add_parser("common-point")
    sp.add_argument("--cover")
    sp.add_argument("--voronoi", type=int)
    sp.add_argument("--sets", required=True, help="comma-separated set names")
    common(sp, eps=True)
    sp.set_defaults(fn=cmd_common_point)

    sp = sub.add_parser("balanced")
    bsub = sp.add_subparsers(dest="subcommand", required=True)
    sp = bsub.add_parser("is")
    config_flags(sp)
    sp.add_argument("--subset", required=True, help="comma-separated names")
    sp.set_defaults(fn=cmd_balanced_is)
    sp = bsub.add_parser("enumerate")
    config_flags(sp)
    sp.add_argument("--minimal", action="store_true")
    sp.set_defaults(fn=cmd_balanced_enumerate)

    sp = sub.add_parser("gale")
    gsub = sp.add_subparsers(dest="subcommand", required=True)
    sp = gsub.add_parser("solve")
    sp.add_argument("--covers")
    sp.add_argument("--voronoi", type=int)
    common(sp, eps=True, seed=True)
    sp.set_defaults(fn=cmd_gale_solve)
    sp = gsub.add_parser("verify")
    sp.add_argument("--covers")
    sp.add_argument("--voronoi", type=int)
    sp.add_argument("--solution", required=True)
    common(sp, eps=True)
    sp.set_defaults(fn=cmd_gale_verify)

    sp = sub.add_parser("rent")
    rsub = sp.add_subparsers(dest="subcommand", required=True)
    sp = rsub.add_parser("solve")
    sp.add_argument("--utilities", required=True)
    sp.add_argument("--eps", type=float, default=1e-4)
    sp.set_defaults(fn=cmd_rent_solve)
    sp = rsub.add_parser("simulate")
    sp.add_argument("--utilities", required=True)
    sp.add_argument("--eps", type=float, default=1e-4)
    sp.add_argument("--data-dir")
    sp.set_defaults(fn=cmd_rent_simulate)
    sp = rsub.add_parser("serve")
    sp.add_argument("--port", type=int, default=8000)
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--data-dir")
    sp.add_argument("--static")
    sp.set_defaults(fn=cmd_rent_serve)

    sp = sub.add_parser("figure")
    sp.add_argument("--labeling", required=True)
    common(sp, out=True)
    sp.set_defaults(fn=cmd_figure)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        code, payload = args.fn(args)
    except InputError as e:
        print(json.dumps({"error": str(e)}, sort_keys=True))
        return 2
    except Exception as e:
        print(json.dumps({"error": f"{type(e).__name__}: {e}"}, sort_keys=True),
              file=sys.stderr)
        print(json.dumps({"error": type(e).__name__}, sort_keys=True))
        return 1
    if payload is not None:
        print(json.dumps(payload, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
