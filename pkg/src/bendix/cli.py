"""Command-line interface.

Exit status: 0 on success, 1 on a domain error (a JSON error object is
written to stderr), 2 on a usage error.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bending import (
    ActionAngleObservables,
    FlowSpec,
    angle_values,
    bend,
    bracket_table,
    flow_trajectory,
    trajectory_csv,
)
from .combinatorics import count_lattice_points, multiplicity_report
from .duality import (
    gt_block_values,
    hamiltonian_rates,
    hitchin_invariance_report,
    polygon_to_matrix,
    random_closed_euclidean,
    triple_product,
)
from .errors import BendixError, ClosureViolation, InvalidInput, TriangleInequalityViolation
from .polygon import (
    CLOSURE_RTOL,
    Polygon,
    SideLengths,
    check_semistable,
    check_triangle_inequalities,
    closure_defect,
    enumerate_walls,
    in_cone,
    parse_lengths,
    strictly_admissible,
)
from .reconstruction import random_interior_pattern, reconstruct, sample_polygon
from .spectral import GTsPattern, action_index_set, action_values, mu_values
from .verify import run_all


class UsageError(Exception):
    pass


def _side_lengths(args):
    if args.r is None or args.m is None:
        raise UsageError("--m and --r are required")
    try:
        r = parse_lengths(args.r)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse --r: {exc}") from exc
    return SideLengths(args.m, r)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _read_polygon(args):
    if not args.polygon:
        raise UsageError("--polygon is required")
    try:
        return Polygon.from_json(_read_json(args.polygon))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed polygon file: {exc}") from exc


def _closed_polygon(args):
    p = _read_polygon(args)
    tol = args.tol if args.tol is not None else CLOSURE_RTOL
    defect = closure_defect(p)
    if defect > tol * p.Lambda:
        raise ClosureViolation(f"polygon is not closed: defect {defect:.3e}", defect=defect)
    return p, tol


def _emit(args, payload, text=None):
    out = text if text is not None else json.dumps(payload, indent=2) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _pairs(mapping):
    return [{"i": i, "j": j, "value": float(v)} for (i, j), v in sorted(mapping.items())]


# --- subcommands --------------------------------------------------------------


def cmd_check(args):
    s = _side_lengths(args)
    verdict = check_triangle_inequalities(s, args.tol)
    payload = verdict.to_json()
    payload["strictly_admissible"] = strictly_admissible(s)
    _emit(args, payload)
    if not verdict.satisfied:
        raise TriangleInequalityViolation(
            "strong triangle inequalities violated", violated=list(verdict.violated)
        )


def cmd_walls(args):
    s = _side_lengths(args)
    walls = enumerate_walls(s, args.tol)
    _emit(args, {"in_cone": in_cone(s), "on_wall": bool(walls), "walls": [w.to_json() for w in walls]})


def cmd_semistable(args):
    s = _side_lengths(args)
    data = _read_json(args.points)
    pts = np.array([[complex(re, im) for re, im in v] for v in data["points"]])
    _emit(args, check_semistable(pts, s).to_json())


def cmd_sample(args):
    s = _side_lengths(args)
    _emit(args, sample_polygon(s, args.seed).to_json())


def cmd_pattern(args):
    if args.polygon:
        p, tol = _closed_polygon(args)
        pattern = action_values(p, tol)
    else:
        pattern = random_interior_pattern(_side_lengths(args), args.seed)
    _emit(args, pattern.to_json())


def _read_phases(path):
    data = _read_json(path)
    try:
        return {(int(e["k"]), int(e["j"])): float(e["theta"]) for e in data["phases"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed phases file: {exc}") from exc


def cmd_reconstruct(args):
    data = _read_json(args.pattern)
    try:
        pattern = GTsPattern.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed pattern file: {exc}") from exc
    phases = _read_phases(args.phases) if args.phases else None
    _emit(args, reconstruct(pattern, phases).to_json())


def cmd_flow(args):
    p, _ = _closed_polygon(args)
    if args.trajectory:
        times = np.linspace(0.0, args.t, args.trajectory + 1)
        header, rows = flow_trajectory(p, args.i, args.j, times)
        _emit(args, None, trajectory_csv(header, rows))
    else:
        _emit(args, bend(p, FlowSpec(args.i, args.j, args.t)).to_json())


def cmd_actions(args):
    p, tol = _closed_polygon(args)
    pattern = action_values(p, tol)
    index = action_index_set(p.n, p.m)
    _emit(
        args,
        {
            "lambda": _pairs({k: pattern.entry(*k) for k in index}),
            "mu": _pairs(mu_values(pattern, index)),
        },
    )


def cmd_angles(args):
    p, _ = _closed_polygon(args)
    _emit(args, angle_values(p).to_json())


def cmd_brackets(args):
    p, _ = _closed_polygon(args)
    obs = ActionAngleObservables(p.n, p.m)
    T = bracket_table(obs, p, args.h)
    _emit(
        args,
        {
            "labels": [f"{kind}_{i}_{j}" for kind, i, j in obs.labels],
            "brackets": T.tolist(),
        },
    )


def cmd_count(args):
    s = _side_lengths(args)
    if args.all_methods:
        _emit(args, multiplicity_report(s.m, s.r).to_json())
        return
    res = count_lattice_points(s.m, s.r, keep=args.list)
    payload = {"m": s.m, "r": [int(x) for x in s.r], "integral": res.integral, "lattice_count": res.count}
    if args.list:
        payload["patterns"] = res.patterns
    _emit(args, payload)


def cmd_duality(args):
    p, tol = _closed_polygon(args)
    pattern = action_values(p, tol)
    gammas = gt_block_values(polygon_to_matrix(p))
    rows = pattern.as_array()
    blocks = []
    worst = 0.0
    for k, g in enumerate(gammas, start=1):
        lam = np.zeros(max(len(g), len(rows[k - 1])))
        lam[: len(rows[k - 1])] = rows[k - 1]
        gam = np.zeros(len(lam))
        gam[: len(g)] = g
        err = float(np.max(np.abs(gam - lam)))
        worst = max(worst, err)
        blocks.append({"k": k, "gamma": g.tolist(), "lambda": rows[k - 1].tolist(), "error": err})
    _emit(args, {"blocks": blocks, "max_error": worst})


def cmd_hitchin(args):
    try:
        alphas = [float(x) for x in args.alphas.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse --alphas: {exc}") from exc
    if len(alphas) != args.n:
        raise UsageError("--alphas needs exactly n values")
    rng = np.random.default_rng(args.seed)
    ep = random_closed_euclidean(args.n, rng, min_triple=1e-3 if args.n >= 5 else None)
    if args.n == 5:
        report = hitchin_invariance_report(ep, alphas)
    else:
        report = {
            "alphas": alphas,
            "rates": {
                f"diagonal_{d}": hamiltonian_rates(ep, alphas, d).tolist() for d in range(2, args.n - 1)
            },
        }
    report["vectors"] = ep.vectors.tolist()
    if args.format == "csv":
        lines = ["bend," + ",".join(f"dH{j + 1}" for j in range(args.n))]
        for label, rates in report["rates"].items():
            lines.append(label + "," + ",".join(format(x, ".17g") for x in rates))
        _emit(args, None, "\n".join(lines) + "\n")
    else:
        if args.n >= 5:
            report["triple_product"] = triple_product(ep)
        _emit(args, report)


def cmd_verify_all(args):
    numbers = None
    if args.only:
        try:
            numbers = [int(x) for x in args.only.split(",")]
        except ValueError as exc:
            raise UsageError(f"cannot parse --only: {exc}") from exc
    results = run_all(numbers)
    if args.json:
        _emit(args, {"results": [r.to_json() for r in results], "passed": all(r.passed for r in results)})
    else:
        _emit(args, None, "\n".join(r.line() for r in results) + "\n")
    if not all(r.passed for r in results):
        return 1
    return 0


# --- parser -------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="bendix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bendix {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, lengths=False, polygon=False, seed=False):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=fn)
        sp.add_argument("-o", "--o", "--output", dest="output", help="write output to this file")
        if lengths:
            sp.add_argument("--m", type=int, help="sides are (m+1) x (m+1) matrices")
            sp.add_argument("--r", help="comma separated side lengths, p/q allowed")
        if polygon:
            sp.add_argument("--polygon", help="polygon JSON file")
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=None, help="tolerance (closure or wall)")
        return sp

    add("check", cmd_check, "strong triangle inequalities", lengths=True)
    add("walls", cmd_walls, "walls containing r", lengths=True)
    sp = add("semistable", cmd_semistable, "weighted semistability of points", lengths=True)
    sp.add_argument("--points", required=True, help="JSON file {\"points\": [[[re, im], ...], ...]}")
    add("sample", cmd_sample, "random closed polygon", lengths=True, seed=True)
    add("pattern", cmd_pattern, "eigenvalue pattern of a polygon, or a random one", lengths=True, polygon=True, seed=True)
    sp = add("reconstruct", cmd_reconstruct, "polygon from a pattern")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--phases")
    sp = add("flow", cmd_flow, "apply a bending flow", polygon=True)
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--trajectory", type=int, default=0, metavar="STEPS", help="emit a CSV time series instead")
    add("actions", cmd_actions, "action values lambda and mu", polygon=True)
    add("angles", cmd_angles, "angle variables", polygon=True)
    sp = add("brackets", cmd_brackets, "finite-difference Poisson brackets", polygon=True)
    sp.add_argument("--h", type=float, default=None, help="finite-difference step")
    sp = add("count", cmd_count, "lattice points and multiplicities", lengths=True)
    sp.add_argument("--all-methods", action="store_true")
    sp.add_argument("--list", action="store_true", help="also list the integer patterns")
    add("duality", cmd_duality, "block eigenvalues against diagonal eigenvalues", polygon=True)
    sp = add("hitchin", cmd_hitchin, "Hitchin Hamiltonian rates along bending flows", seed=True)
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--alphas", required=True)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp = add("verify-all", cmd_verify_all, "run every acceptance check")
    sp.add_argument("--only", help="comma separated criterion numbers")
    sp.add_argument("--json", action="store_true")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        status = args.func(args)
    except UsageError as exc:
        sys.stderr.write(json.dumps({"error": "usage", "message": str(exc)}) + "\n")
        return 2
    except BendixError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return 1
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
