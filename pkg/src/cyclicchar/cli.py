"""Command line: ``cyclicchar {verify,ahat,transport,graphs,index}``.

Every report is a JSON object with ``schema_version``, the command, the seed
and the truncation (``Nhbar``, ``Nu``). Exit codes: 0 success, 1 a checked
property failed (including NotACycle and non-unimodular input), 2 bad
configuration or malformed input.

Input files
-----------
curvature (ahat, index)::

    {"size": 2, "entries": [["0", "x2"], ["-x2", "0"]]}

  entries are linear in symbols x1, x2, .. standing for commuting 2-forms.

bivector family (transport, index)::

    {"kind": "Torus", "dim": 2, "matrix": [["0", "h*3/2"], ["-h*3/2", "0"]]}

chain::

    {"tensors": [{"coeff": "1", "slots": ["1", "z1", "z2"]}]}

transport::

    {"family": <bivector>, "cycle": <chain>, "t": "1", "t_start": "0"}

index::

    {"family": <bivector>, "cycle": <chain>, "volume": {"dx1^dx2": "1"},
     "curvature": <curvature, optional>}

Literals are expressions in x1.. (PolyRd) or z1.. (Torus), t (tau), h, u and
s with ``^`` for powers, e.g. ``"3/4*t^1*h^2*u^-1 + 1"``.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .charmap import NotUnimodular, a_hat_det, a_hat_exp, tt_check
from .coefficients import PoleOverflow, Rat
from .gauss_manin import NotACycle, check_cycle, check_horizontal, transport
from .graphs import SizeLimit, enumerate_graphs, mc_weight
from .jetcalc import DiffForm, Unsupported
from .literals import (
    SCHEMA_VERSION,
    LiteralError,
    chain_to_json,
    parse_bivector,
    parse_chain,
    parse_curvature,
    parse_form,
)
from .star import NonConstantPi, StarFamily
from .suites import SUITES, VerifyConfig, brute_force_graphs, run_suites

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


class CheckFailed(Exception):
    pass


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc.msg} (line {exc.lineno})") from exc


def _header(args, nu) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": args.command,
        "seed": args.seed,
        "truncation": {"Nhbar": args.Nhbar, "Nu": nu},
    }


def _series_json(series) -> dict:
    return {str(k): str(v) for k, v in sorted(series.components.items())}


# ---------------------------------------------------------------------------
# commands


def cmd_verify(args) -> tuple:
    names = []
    for part in args.suite:
        names.extend(p.strip() for p in part.split(",") if p.strip())
    if not names:
        names = ["all"]
    if "all" in names:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)} or all")
    nu = args.Nu if args.Nu is not None else 3
    cfg = VerifyConfig(seed=args.seed, nh=args.Nhbar, nu=nu, samples=args.samples, scale=args.scale)
    checks = run_suites(names, cfg)
    failed = [c for c in checks if not c.ok]
    report = _header(args, nu)
    report.update({
        "suites": names,
        "samples": args.samples,
        "scale": args.scale,
        "ok": not failed,
        "summary": {
            "identities": len(checks),
            "passed": sum(c.status == "pass" for c in checks),
            "failed": len(failed),
            "sign_conflicts": sum(c.status == "conflict_confirmed" for c in checks),
            "reports": sum(c.status == "report" for c in checks),
        },
        "checks": [c.to_json() for c in checks],
    })
    return report, EXIT_FAIL if failed else EXIT_OK


def cmd_ahat(args) -> tuple:
    R = parse_curvature(_load(args.curvature))
    order = args.order
    e = a_hat_exp(R, order)
    d = a_hat_det(R, order)
    diff = e - d
    report = _header(args, args.Nu)
    report.update({
        "order": order,
        "size": R.size,
        "a_hat_exp": _series_json(e) or {"0": "1"},
        "a_hat_det": _series_json(d) or {"0": "1"},
        "difference": "0" if diff.is_zero() else _series_json(diff),
    })
    return report, EXIT_OK if diff.is_zero() else EXIT_FAIL


def _family(data, nh, nu) -> StarFamily:
    alg, pi = parse_bivector(data, nh, nu)
    try:
        return StarFamily(alg, pi)
    except (NonConstantPi, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _auto_nu(args, chain_data, family_data) -> int:
    if args.Nu is not None:
        return args.Nu
    from .gauss_manin import pole_order

    probe = _family(family_data, args.Nhbar, 64)
    c = parse_chain(chain_data, probe.alg)
    return max(pole_order(c) + args.Nhbar, 1)


def cmd_transport(args) -> tuple:
    data = _load(args.input)
    if not isinstance(data, dict) or "family" not in data or "cycle" not in data:
        raise ConfigError("transport input needs 'family' and 'cycle'")
    nu = _auto_nu(args, data["cycle"], data["family"])
    fam = _family(data["family"], args.Nhbar, nu)
    c0 = parse_chain(data["cycle"], fam.alg)
    t = str(data.get("t", "1"))
    t0 = str(data.get("t_start", "0"))
    try:
        Rat(t), Rat(t0)
    except ValueError as exc:
        raise ConfigError(f"t and t_start must be rationals: {exc}") from exc
    res = transport(fam, c0, t, t_start=t0)
    cyc = check_cycle(fam, None, res.path_expansion)
    hor = check_horizontal(fam, res.path_expansion)
    report = _header(args, nu)
    report.update({
        "family": {"kind": fam.alg.kind, "dim": fam.alg.dim, "pi": str(fam.pi)},
        "t_start": str(res.t_start),
        "t": str(res.t_target),
        "iterations": res.iterations,
        "c0": chain_to_json(c0),
        "expansion": chain_to_json(res.path_expansion),
        "expansion_variable": "s",
        "c_at_t": chain_to_json(res.c_at_target),
        "constant_path": res.path_expansion == c0,
        "residuals": {
            "cycle": chain_to_json(cyc),
            "horizontal": chain_to_json(hor),
        },
        "ok": cyc.is_zero() and hor.is_zero(),
    })
    return report, EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_graphs(args) -> tuple:
    if args.m < 0 or args.n < 0:
        raise ConfigError("m and n must be non-negative")
    if args.out_degrees is None:
        degs = [2] * args.m
    else:
        try:
            degs = [int(x) for x in args.out_degrees.split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError("out-degrees must be a comma separated list of integers") from exc
    if len(degs) != args.m or any(d < 0 for d in degs):
        raise ConfigError(f"need {args.m} non-negative out-degrees, got {degs}")
    try:
        graphs = enumerate_graphs(args.m, args.n, degs, args.center_degree, size_limit=args.size_limit)
    except SizeLimit as exc:
        raise ConfigError(str(exc)) from exc
    report = _header(args, args.Nu)
    report.update({
        "m": args.m,
        "n": args.n,
        "out_degrees": degs,
        "center_degree": args.center_degree,
        "count": len(graphs),
    })
    if args.m <= 2 and args.n <= 2 and args.center_degree == 0:
        report["oracle_count"] = brute_force_graphs(args.m, args.n, degs)
    entries = []
    for g in graphs:
        item = {"graph": g.to_json()}
        if args.weights:
            if g.out_degree(0):
                item["weight"] = None
                item["weight_note"] = "edges out of the center are outside the Monte-Carlo scope"
            else:
                w = mc_weight(g, args.samples, args.seed)
                item["weight"] = {"estimate": w.estimate, "stderr": w.stderr, "flag": w.flag,
                                  "rejected": w.rejected, "samples": w.samples}
        entries.append(item)
    if args.weights:
        report["samples"] = args.samples
    report["graphs"] = entries
    ok = report.get("oracle_count", len(graphs)) == len(graphs)
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_index(args) -> tuple:
    data = _load(args.input)
    if not isinstance(data, dict) or "family" not in data:
        raise ConfigError("index input needs 'family'")
    cycle = data.get("cycle", {"tensors": [{"coeff": "1", "slots": ["1"]}]})
    nu = _auto_nu(args, cycle, data["family"])
    fam = _family(data["family"], args.Nhbar, nu)
    alg = fam.alg
    c = parse_chain(cycle, alg)
    vol = data.get("volume")
    if vol is None:
        omega = DiffForm.basis(alg, tuple(range(1, alg.dim + 1)), alg.one())
    else:
        omega = parse_form(vol, alg)
    R = None
    if data.get("curvature") is not None:
        R = parse_curvature(data["curvature"])
        if not R.is_zero():
            raise ConfigError("only R = 0 is supported on the flat torus")
        R = None
    rep = tt_check(c, fam, omega, R)
    report = _header(args, nu)
    report.update({
        "family": {"kind": alg.kind, "dim": alg.dim, "pi": str(fam.pi)},
        "volume": str(omega),
        "cycle": chain_to_json(c),
        "lhs": str(rep["lhs"]),
        "rhs": str(rep["rhs"]),
        "difference": str(rep["difference"]),
        "ok": rep["ok"],
        "certificates": {"graph_vanishing": rep["certificate"]},
    })
    return report, EXIT_OK if rep["ok"] else EXIT_FAIL


COMMANDS = {
    "verify": cmd_verify,
    "ahat": cmd_ahat,
    "transport": cmd_transport,
    "graphs": cmd_graphs,
    "index": cmd_index,
}


# ---------------------------------------------------------------------------
# plumbing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    common.add_argument("--samples", type=int, default=100_000, help="Monte-Carlo samples")
    common.add_argument("--Nhbar", type=int, default=3, help="hbar truncation order")
    common.add_argument("--Nu", type=int, default=None, help="u-window bound (default depends on command)")
    common.add_argument("--out", choices=("json", "table"), default="json")

    p = argparse.ArgumentParser(prog="cyclicchar", description="Exact cyclic homology of deformation quantizations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run seeded identity suites")
    v.add_argument("--suite", action="append", default=[],
                   help=f"suite name or 'all' (repeatable or comma separated): {', '.join(SUITES)}")
    v.add_argument("--scale", type=float, default=1.0, help="multiply the number of random trials")

    a = sub.add_parser("ahat", parents=[common], help="A-roof series by both routes")
    a.add_argument("curvature", help="curvature JSON file")
    a.add_argument("--order", type=int, default=4, help="highest u-power")

    t = sub.add_parser("transport", parents=[common], help="Gauss-Manin transport of a cycle")
    t.add_argument("input", help="transport JSON file")

    g = sub.add_parser("graphs", parents=[common], help="enumerate Shoikhet graphs, optionally with weights")
    g.add_argument("--m", type=int, default=1)
    g.add_argument("--n", type=int, default=1)
    g.add_argument("--out-degrees", default=None, help="comma separated out-degrees of vertices 1..m")
    g.add_argument("--center-degree", type=int, default=0)
    g.add_argument("--weights", action="store_true", help="estimate weights by Monte-Carlo")
    g.add_argument("--size-limit", type=int, default=200_000)

    i = sub.add_parser("index", parents=[common], help="index on the flat torus")
    i.add_argument("input", help="index JSON file")
    return p


def _table(report: dict) -> str:
    lines = [f"{report['command']}  schema_version={report['schema_version']}  seed={report['seed']}  "
             f"Nhbar={report['truncation']['Nhbar']}  Nu={report['truncation']['Nu']}"]
    if report["command"] == "verify":
        for c in report["checks"]:
            lines.append(f"{c['status']:<18} {c['suite']:<13} {c['trials']:>5} {c['failures']:>5}  {c['identity']}")
        s = report["summary"]
        lines.append(f"passed {s['passed']}, failed {s['failed']}, sign conflicts {s['sign_conflicts']}, "
                     f"reports {s['reports']}")
        return "\n".join(lines)
    skip = {"schema_version", "tool_version", "command", "seed", "truncation"}
    for k, v in report.items():
        if k in skip:
            continue
        text = v if isinstance(v, str) else json.dumps(v, sort_keys=True)
        lines.append(f"{k}: {text}")
    return "\n".join(lines)


def render(report: dict, fmt: str) -> str:
    if fmt == "table":
        return _table(report)
    return json.dumps(report, indent=2, sort_keys=True)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.Nhbar < 0 or (args.Nu is not None and args.Nu < 0) or args.samples <= 0 or args.seed < 0:
        print("error: Nhbar, Nu, seed must be non-negative and samples positive", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed >= 1 << 64:
        print("error: seed must fit in 64 bits", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report, code = COMMANDS[args.command](args)
    except (ConfigError, LiteralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotACycle, NotUnimodular, PoleOverflow, Unsupported) as exc:
        report = _header(args, args.Nu)
        report.update({"ok": False, "error": type(exc).__name__, "message": str(exc)})
        print(render(report, args.out))
        return EXIT_FAIL
    print(render(report, args.out))
    return code


if __name__ == "__main__":
    sys.exit(main())
