"""Command-line front end: mesh -> solve -> factors -> machine-readable report.

Subcommands
-----------
compute   refinement ladder, Richardson-extrapolated factor report (JSON)
converge  per-level convergence table with observed orders (CSV)
fuzz      seeded admissible-field campaign, corpus CSV, nonzero exit on any
          bound violation

All output is deterministic: fixed field order, 17-significant-digit decimal
formatting, no timestamps.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import factors, fuzz
from .fem import SolverError
from .flexure import solve_flexure
from .geometry import SectionSpec, analytic_props, load_section, normalize_section
from .mesh import TriMesh, mesh_props, refine, triangulate
from .torsion import equality_deviation, solve_torsion
from .vtkio import write_vtk

__all__ = ["main", "run_ladder", "report_dict", "format_json"]

DIRECTIONS = ("e2", "e1")
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


# ---------------------------------------------------------------------------
# deterministic JSON with fixed float formatting


def _fmt_number(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def format_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  "{k}": {format_json(v, indent + 1)}' for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {format_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return _fmt_number(obj)


# ---------------------------------------------------------------------------
# ladder pipeline


def richardson(values: list[float]) -> float:
    """Eliminate the leading O(h^2) error from the last two ladder values."""
    if len(values) == 1:
        return values[0]
    return (4.0 * values[-1] - values[-2]) / 3.0


def observed_order(values: list[float]) -> float | None:
    """Richardson triplet estimate of the convergence order from the last
    three ladder values; None when the differences are too small to trust."""
    if len(values) < 3:
        return None
    d1 = values[-3] - values[-2]
    d2 = values[-2] - values[-1]
    if d2 == 0.0 or d1 / d2 <= 0.0:
        return None
    return math.log2(abs(d1 / d2))


def run_ladder(
    spec: SectionSpec,
    h_target: float,
    refinements: int,
    nu_list: list[float],
    rtol: float = 1e-10,
    method: str = "auto",
    max_elements: int | None = None,
):
    """Mesh ladder with a full solve per level.

    Returns (levels, finest) where levels is a list of per-level dicts of raw
    values and finest holds the mesh and solution objects of the last level.
    """
    if refinements < 1:
        raise ValueError("refinements must be >= 1")
    spec = normalize_section(spec)
    meshes: list[TriMesh] = [triangulate(spec, h_target, max_elements=max_elements)]
    for _ in range(refinements - 1):
        meshes.append(refine(meshes[-1]))

    material = spec.material
    levels = []
    finest: dict = {"spec": spec}
    for lvl, mesh in enumerate(meshes):
        props = mesh_props(mesh)
        tor = solve_torsion(mesh, rtol=rtol, method=method)
        chi_t = factors.compute_factor("torsion", tor.stress, props)
        duality_gap = abs(tor.gradient_energy - tor.Jt) / abs(tor.Jt)
        entry = {
            "level": lvl,
            "h": mesh.h,
            "n_elements": mesh.n_elements,
            "A": props.A,
            "Jo": props.Jo,
            "Jt": tor.Jt,
            "chi_t": chi_t,
            "duality_gap": duality_gap,
            "equality_deviation": equality_deviation(tor.stress),
            "shear": [],
        }
        factor_values = [
            factors.factor_value("torsion", tor.stress, props),
        ]
        flex_solutions = {}
        if not mesh.hole_loops:
            for direction in DIRECTIONS:
                for nu in nu_list:
                    fx = solve_flexure(mesh, nu=nu, direction=direction, rtol=rtol, method=method)
                    chi_s = factors.compute_factor("shear", fx.stress, props)
                    entry["shear"].append(
                        {
                            "direction": direction,
                            "nu": nu,
                            "chi_s": chi_s,
                            "T1": fx.resultant[0],
                            "T2": fx.resultant[1],
                        }
                    )
                    factor_values.append(
                        factors.factor_value("shear", fx.stress, props, direction=direction, nu=nu)
                    )
                    flex_solutions[(direction, nu)] = fx
        # canonical axial fields: uniform and linear S33
        from .fields import AxialStressField

        ext = AxialStressField(mesh, np.ones(mesh.n_nodes), origin="canonical")
        bend = AxialStressField(mesh, mesh.nodes[:, 1].copy(), origin="canonical")
        chi_e = factors.compute_factor("extension", ext, props)
        chi_b = factors.compute_factor("bending", bend, props)
        entry["chi_e"] = chi_e
        entry["chi_b"] = chi_b
        factor_values.append(factors.factor_value("extension", ext, props))
        factor_values.append(factors.factor_value("bending", bend, props))

        # two-route stiffness identification; raises if the routes disagree
        factors.identify_stiffness(material, props, factor_values)
        levels.append(entry)
        finest.update(
            mesh=mesh,
            props=props,
            torsion=tor,
            flexure=flex_solutions,
            axial=(ext, bend),
        )
    return levels, finest


def report_dict(
    spec: SectionSpec,
    levels: list[dict],
    finest: dict,
    h_target: float,
    nu_list: list[float],
    rtol: float,
) -> dict:
    """Assemble the factor report with the fixed field order."""
    spec_n = finest["spec"]
    props = analytic_props(spec_n)
    material = spec_n.material
    G, E = material.G, material.E

    chi_t = richardson([lv["chi_t"] for lv in levels])
    Jt = richardson([lv["Jt"] for lv in levels])
    shear_entries = []
    if levels[-1]["shear"]:
        for direction in DIRECTIONS:
            for nu in nu_list:
                chain = [
                    s["chi_s"]
                    for lv in levels
                    for s in lv["shear"]
                    if s["direction"] == direction and s["nu"] == nu
                ]
                chi_s = richardson(chain)
                shear_entries.append(
                    {
                        "direction": direction,
                        "nu": nu,
                        "chi_s": chi_s,
                        "stiff_s": G * props.A / chi_s,
                    }
                )
    chi_e = levels[-1]["chi_e"]
    chi_b = levels[-1]["chi_b"]

    report = {
        "props": {"A": props.A, "I1": props.I1, "I2": props.I2, "Jo": props.Jo},
        "torsion": {"Jt": Jt, "chi_t": chi_t, "stiff_t": G * props.Jo / chi_t},
        "shear": shear_entries,
        "axial": {
            "chi_e": chi_e,
            "stiff_e": E * props.A / chi_e,
            "chi_b": chi_b,
            "stiff_b": E * props.I1 / chi_b,
        },
        "provenance": {
            "section": spec.name,
            "material": {"G": G, "nu": material.nu, "E": E},
            "h_target": h_target,
            "h_finest": levels[-1]["h"],
            "n_elements_finest": levels[-1]["n_elements"],
            "refinements": len(levels),
            "rtol": rtol,
            "nu_values": list(nu_list),
            "normalization": "torsion G*theta = 1; flexure unit resultant, zero superposed twist",
            "extrapolation": "Richardson, assumed order 2, finest two levels",
            "levels": levels,
        },
    }
    return report


def _check_report_bounds(levels: list[dict]) -> list[str]:
    """Solved-field bound health; returns human-readable violations."""
    problems = []
    for lv in levels:
        if lv["chi_t"] < 1.0 - fuzz.EPS_SOLVED:
            problems.append(f"level {lv['level']}: chi_t = {lv['chi_t']!r} < 1 - 1e-3")
        for s in lv["shear"]:
            if s["chi_s"] <= 1.0:
                problems.append(
                    f"level {lv['level']}: chi_s({s['direction']}, nu={s['nu']}) = "
                    f"{s['chi_s']!r} <= 1"
                )
        for key, lo in (("chi_e", 1.0 - fuzz.EPS_FUZZ), ("chi_b", 1.0 - fuzz.EPS_FUZZ)):
            if lv[key] < lo:
                problems.append(f"level {lv['level']}: {key} = {lv[key]!r} < 1")
    return problems


# ---------------------------------------------------------------------------
# subcommands


def _parse_nu_list(text: str) -> list[float]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok:
            out.append(float(tok))
    if not out:
        raise ValueError("empty nu list")
    for nu in out:
        if not (-1.0 < nu < 0.5):
            raise ValueError(f"nu must lie in (-1, 0.5), got {nu}")
    return out


def cmd_compute(args) -> int:
    spec = load_section(args.section)
    nu_list = _parse_nu_list(args.nu)
    levels, finest = run_ladder(
        spec,
        args.h,
        args.refinements,
        nu_list,
        rtol=args.rtol,
        max_elements=args.max_elements,
    )
    report = report_dict(spec, levels, finest, args.h, nu_list, args.rtol)
    problems = _check_report_bounds(levels)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_json(report) + "\n")
    if args.fields:
        mesh = finest["mesh"]
        cell_data = {"torsion_stress": finest["torsion"].stress.values}
        point_data = {"torsion_phi": finest["torsion"].phi}
        for (direction, nu), fx in finest["flexure"].items():
            name = f"shear_{direction}_nu{nu:g}".replace(".", "p").replace("-", "m")
            cell_data[name] = fx.stress.values
        write_vtk(mesh, args.fields, point_data=point_data, cell_data=cell_data)
    if problems:
        for p in problems:
            print(f"bound violated: {p}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_converge(args) -> int:
    spec = load_section(args.section)
    if args.refinements < 3:
        raise ValueError("converge needs refinements >= 3")
    nu_list = _parse_nu_list(args.nu)
    levels, _ = run_ladder(
        spec,
        args.h,
        args.refinements,
        nu_list,
        rtol=args.rtol,
        max_elements=args.max_elements,
    )
    shear_cols = [
        (s["direction"], s["nu"]) for s in levels[0]["shear"]
    ]
    header = ["level", "h", "n_elements", "A", "Jo", "Jt", "chi_t", "duality_gap"]
    header += [f"chi_s_{d}_nu{nu:g}" for d, nu in shear_cols]
    header += ["order_Jt", "order_chi_t"]
    lines = [",".join(header)]
    for i, lv in enumerate(levels):
        row = [
            str(lv["level"]),
            f"{lv['h']:.17g}",
            str(lv["n_elements"]),
            f"{lv['A']:.17g}",
            f"{lv['Jo']:.17g}",
            f"{lv['Jt']:.17g}",
            f"{lv['chi_t']:.17g}",
            f"{lv['duality_gap']:.17g}",
        ]
        for d, nu in shear_cols:
            val = next(
                s["chi_s"] for s in lv["shear"] if s["direction"] == d and s["nu"] == nu
            )
            row.append(f"{val:.17g}")
        for key in ("Jt", "chi_t"):
            seq = [l[key] for l in levels[: i + 1]]
            order = observed_order(seq)
            row.append("" if order is None else f"{order:.17g}")
        lines.append(",".join(row))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_fuzz(args) -> int:
    sections = []
    for path in args.section:
        spec = normalize_section(load_section(path))
        h = args.h if args.h is not None else spec.diameter / 15.0
        mesh = triangulate(spec, h, max_elements=args.max_elements)
        sections.append((spec.name, mesh))
    kinds = tuple(k.strip() for k in args.kinds.split(",") if k.strip())
    samples = fuzz.run_campaign(sections, args.samples, args.seed, kinds=kinds)
    violations = fuzz.write_corpus_csv(samples, args.out)
    if violations:
        print(f"{violations} bound violation(s) recorded in {args.out}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="svsection",
        description="Identify rod stiffness factors from Saint-Venant cross-section stress fields.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(q):
        q.add_argument("--section", required=True, help="section definition JSON file")
        q.add_argument("--h", type=float, required=True, help="target mesh size")
        q.add_argument("--refinements", type=int, default=3, help="ladder levels (default 3)")
        q.add_argument("--nu", default="0", help="comma-separated Poisson ratios (default 0)")
        q.add_argument("--rtol", type=float, default=1e-10, help="iterative solver tolerance")
        q.add_argument("--max-elements", type=int, default=None, help="element budget override")
        q.add_argument("--out", required=True, help="output file")

    pc = sub.add_parser("compute", help="factor report with Richardson extrapolation")
    common(pc)
    pc.add_argument("--fields", default=None, help="optional VTK output of the finest fields")
    pc.set_defaults(func=cmd_compute)

    pv = sub.add_parser("converge", help="convergence table across the ladder")
    common(pv)
    pv.set_defaults(func=cmd_converge)

    pf = sub.add_parser("fuzz", help="seeded admissible-field campaign")
    pf.add_argument(
        "--section", action="append", required=True, help="section JSON (repeatable)"
    )
    pf.add_argument("--samples", type=int, required=True, help="samples per kind/section")
    pf.add_argument("--seed", type=int, required=True, help="base seed")
    pf.add_argument("--h", type=float, default=None, help="mesh size (default diameter/15)")
    pf.add_argument(
        "--kinds",
        default=",".join(fuzz.KIND_ORDER),
        help="comma-separated kinds (default all)",
    )
    pf.add_argument("--max-elements", type=int, default=None, help="element budget override")
    pf.add_argument("--out", required=True, help="corpus CSV path")
    pf.set_defaults(func=cmd_fuzz)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
