"""Command-line entry point.

Subcommands: constants, quotient, bubble-sweep, dyadic-scan,
smoothing-check, maximize, report-all.  Every artifact embeds the schema
version, the resolved configuration, the RNG seed, and the tolerances in
play, so reports are self-describing and runs with identical inputs are
byte-identical.  Exit codes: 0 success, 2 domain error, 3 numerical
failure, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, bubbles, constants, dyadic, maximize, norms, smoothing
from .core import (
    DomainError,
    FreqGrid,
    NonFiniteObjective,
    SpaceTimeGrid,
    gaussian_profile,
    bump_profile,
    l2_mass,
    make_exponents,
    read_profile_csv,
    symmetric_grid,
)

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64

DEFAULT_SEED = 20250809


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 64, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _version_string() -> str:
    try:
        desc = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5, check=False,
            cwd=Path(__file__).resolve().parent,
        ).stdout.strip()
    except Exception:
        desc = ""
    return f"{__version__}+g{desc}" if desc else __version__


def _rng(seed: int) -> np.random.Generator:
    # Counter-based generator: one 64-bit seed reproduces every stream.
    return np.random.Generator(np.random.Philox(seed))


def _write_json(out_dir: Path, name: str, payload: dict, config: dict,
                seed: int, tolerances: dict) -> Path:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "version": _version_string(),
        "config": config,
        "seed": seed,
        "tolerances": tolerances,
    }
    doc.update(payload)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return path


def _merge_config(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults <- config file <- explicit flags (flags parsed as None when
    absent, so anything non-None was set on the command line)."""
    resolved = dict(defaults)
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        resolved.update(json.loads(Path(cfg_path).read_text()))
    for key in defaults:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            resolved[key] = val
    return resolved


def _st_grid(cfg: dict) -> SpaceTimeGrid:
    return SpaceTimeGrid(-cfg["t_half"], cfg["t_half"], int(cfg["nt"]),
                         -cfg["x_half"], cfg["x_half"], int(cfg["nx"]))


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_constants(args) -> int:
    defaults = {"p": 6.0, "nodes": 2048}
    cfg = _merge_config(args, defaults)
    exps = make_exponents(cfg["p"], 1.0 / cfg["p"])
    ap = constants.compute_ap(exps, nodes=int(cfg["nodes"]))
    payload = {
        "p": ap.p, "q": ap.q,
        "a_p_gamma": ap.gamma_form, "a_p_quad": ap.quad_form,
        "agreement": ap.agreement,
    }
    path = _write_json(Path(args.out_dir), "constants.json", payload, cfg,
                       args.seed, {"route_agreement_rel": 1e-8})
    print(path.read_text(), end="")
    return EXIT_OK


def _trial_profile(cfg: dict):
    grid = symmetric_grid(cfg["freq_half"], int(cfg["freq_n"]))
    if cfg["trial"] == "gaussian":
        return gaussian_profile(grid)
    if cfg["trial"] == "bump":
        return bump_profile(grid, 0.5, 2.0)
    raise DomainError(f"unknown trial profile {cfg['trial']!r}")


def _cmd_quotient(args) -> int:
    defaults = {"objective": "schrodinger", "p": 6.0, "gamma": None,
                "delta": 0.0, "trial": "gaussian", "freq_half": 8.0, "freq_n": 513,
                "t_half": 4.0, "nt": 257, "x_half": 24.0, "nx": 513}
    cfg = _merge_config(args, defaults)
    gamma = cfg["gamma"] if cfg["gamma"] is not None else 1.0 / cfg["p"]
    exps = make_exponents(cfg["p"], gamma)
    if args.profile:
        u = read_profile_csv(args.profile)
        cfg["profile"] = str(args.profile)
    else:
        u = _trial_profile(cfg)
    grid = _st_grid(cfg)
    if cfg["objective"] == "airy":
        value = norms.airy_quotient(u, exps, grid)
    elif cfg["objective"] == "schrodinger":
        value = norms.schrodinger_quotient(u, exps, grid)
    elif cfg["objective"] == "approx":
        value = norms.approx_quotient(u, exps, cfg["delta"], grid)
    else:
        raise DomainError(f"unknown objective {cfg['objective']!r}")
    payload = {
        "objective": cfg["objective"], "p": exps.p, "q": exps.q, "gamma": exps.gamma,
        "quotient_pth_power": value, "quotient_root": value ** (1.0 / exps.p),
        "profile_mass": l2_mass(u),
    }
    path = _write_json(Path(args.out_dir), "quotient.json", payload, cfg,
                       args.seed, {"quadrature": "grid-dependent"})
    print(path.read_text(), end="")
    return EXIT_OK


def _cmd_bubble_sweep(args) -> int:
    defaults = {"p": 6.0, "eps": [0.2, 0.1, 0.05], "chi_half": 4.0, "chi_n": 257,
                "t_half": 6.0, "nt": 241, "x_half": 180.0, "nx": 1201,
                "theta_nodes": 256}
    cfg = _merge_config(args, defaults)
    exps = make_exponents(cfg["p"], 1.0 / cfg["p"])
    chi = gaussian_profile(symmetric_grid(cfg["chi_half"], int(cfg["chi_n"])))
    grid = _st_grid(cfg)
    rows = bubbles.bubble_sweep(chi, exps, cfg["eps"], grid,
                                theta_nodes=int(cfg["theta_nodes"]))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "bubble_sweep.csv"
    bubbles.write_sweep_csv(csv_path, rows)
    payload = {"rows": [r.__dict__ for r in rows], "csv": csv_path.name}
    path = _write_json(out_dir, "bubble_sweep.json", payload, cfg, args.seed,
                       {"limit_path": "substituted"})
    print(path.read_text(), end="")
    return EXIT_OK


def _cmd_dyadic_scan(args) -> int:
    defaults = {"ell_min": -2, "ell_max": 2, "window": 64,
                "alpha_num": 1, "alpha_den": 100,
                "overlap_ell_min": 0, "overlap_ell_max": 2, "overlap_window": 32}
    cfg = _merge_config(args, defaults)
    pairs_checked = 0
    failures = 0
    for i, j in dyadic.iter_sim_pairs(range(int(cfg["ell_min"]), int(cfg["ell_max"]) + 1),
                                      int(cfg["window"])):
        pairs_checked += 1
        if not dyadic.lemma34_check(i, j, samples_per_interval=0).all_hold:
            failures += 1
    alpha = Fraction(int(cfg["alpha_num"]), int(cfg["alpha_den"]))
    family = list(dyadic.iter_sim_pairs(
        range(int(cfg["overlap_ell_min"]), int(cfg["overlap_ell_max"]) + 1),
        int(cfg["overlap_window"])))
    scan = dyadic.parallelogram_overlap(family, alpha)
    payload = {"pairs_checked": pairs_checked, "failures": failures,
               "max_overlap": scan.max_count,
               "overlap_pairs": scan.pair_count,
               "alpha": f"{alpha.numerator}/{alpha.denominator}"}
    path = _write_json(Path(args.out_dir), "dyadic_scan.json", payload, cfg,
                       args.seed, {"arithmetic": "exact-rational"})
    print(path.read_text(), end="")
    return EXIT_OK


def _cmd_smoothing_check(args) -> int:
    defaults = {"support_lo": 0.5, "support_hi": 2.0, "freq_n": 257,
                "t_half": 12.0, "x_half": 14.0, "nx": 257, "doublings": 3}
    cfg = _merge_config(args, defaults)
    grid = FreqGrid(cfg["support_lo"] - 0.1, cfg["support_hi"] + 0.1, int(cfg["freq_n"]))
    u = bump_profile(grid, cfg["support_lo"], cfg["support_hi"])
    checks = smoothing.local_smoothing_experiment(
        u, lambda x: np.exp(-0.5 * x ** 2), cfg["t_half"], cfg["x_half"],
        nx=int(cfg["nx"]), max_doublings=int(cfg["doublings"]))
    last = checks[-1]
    payload = {"lhs": last.lhs, "rhs": last.rhs, "ratio": last.ratio,
               "window": last.t_half,
               "history": [{"t_half": c.t_half, "ratio": c.ratio} for c in checks]}
    path = _write_json(Path(args.out_dir), "smoothing_check.json", payload, cfg,
                       args.seed, {"shell_tol": 0.005})
    print(path.read_text(), end="")
    return EXIT_OK


def _cmd_maximize(args) -> int:
    # Frequency step must keep the discrete field's x-period 2pi/h beyond
    # x_half + 6*t_half*freq_half, else window replicas inflate quotients.
    defaults = {"objective": "schrodinger", "p": 6.0, "gamma": None,
                "max_iters": 200, "restarts": 2, "real_constraint": False,
                "freq_half": 2.5, "freq_n": 161,
                "t_half": 4.0, "nt": 401, "x_half": 50.0, "nx": 501,
                "bubble_eps": 0.1}
    cfg = _merge_config(args, defaults)
    gamma = cfg["gamma"] if cfg["gamma"] is not None else 1.0 / cfg["p"]
    exps = make_exponents(cfg["p"], gamma)
    acfg = maximize.AscentConfig(max_iters=int(cfg["max_iters"]),
                                 restarts=int(cfg["restarts"]),
                                 real_constraint=bool(cfg["real_constraint"]),
                                 objective=cfg["objective"], seed=args.seed)
    freq_grid = symmetric_grid(cfg["freq_half"], int(cfg["freq_n"]))
    st_grid = _st_grid(cfg)
    report = maximize.threshold_report(exps, acfg, freq_grid, st_grid,
                                       bubble_eps=cfg["bubble_eps"])
    payload = {"report": report.to_dict()}
    path = _write_json(Path(args.out_dir), "threshold_report.json", payload, cfg,
                       args.seed, {"stall_tol": acfg.stall_tol})
    print(path.read_text(), end="")
    return EXIT_OK


def _cmd_report_all(args) -> int:
    out_dir = Path(args.out_dir)
    sub = argparse.Namespace(out_dir=str(out_dir), seed=args.seed, config=None,
                             profile=None)
    for name, default_overrides in (
        ("constants", {"p": None, "nodes": None}),
        ("quotient", {"objective": None, "p": None, "gamma": None, "delta": None,
                      "trial": None, "freq_half": None, "freq_n": 257,
                      "t_half": None, "nt": 129, "x_half": 16.0, "nx": 257}),
        ("bubble-sweep", {"p": None, "eps": [0.2, 0.1], "chi_half": 3.0,
                          "chi_n": 193, "t_half": 4.0, "nt": 121,
                          "x_half": 90.0, "nx": 601, "theta_nodes": 64}),
        ("dyadic-scan", {"ell_min": -1, "ell_max": 1, "window": 32,
                         "alpha_num": None, "alpha_den": None,
                         "overlap_ell_min": 0, "overlap_ell_max": 1,
                         "overlap_window": 16}),
        ("smoothing-check", {"support_lo": None, "support_hi": None,
                             "freq_n": 129, "t_half": 8.0, "x_half": None,
                             "nx": 129, "doublings": 2}),
        ("maximize", {"objective": None, "p": None, "gamma": None,
                      "max_iters": 60, "restarts": 1, "real_constraint": None,
                      "freq_half": 2.5, "freq_n": 81, "t_half": 2.5, "nt": 161,
                      "x_half": 12.0, "nx": 161, "bubble_eps": None}),
    ):
        ns = argparse.Namespace(**vars(sub))
        for key, val in default_overrides.items():
            setattr(ns, key.replace("-", "_"), val)
        _DISPATCH[name](ns)
    return EXIT_OK


_DISPATCH = {
    "constants": _cmd_constants,
    "quotient": _cmd_quotient,
    "bubble-sweep": _cmd_bubble_sweep,
    "dyadic-scan": _cmd_dyadic_scan,
    "smoothing-check": _cmd_smoothing_check,
    "maximize": _cmd_maximize,
    "report-all": _cmd_report_all,
}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="airylab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=_version_string())
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--out-dir", default="airylab_out")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--config", default=None, help="JSON config file; flags override")

    p = sub.add_parser("constants", help="threshold constant by both routes")
    common(p)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--nodes", type=int, default=None)

    p = sub.add_parser("quotient", help="variational quotient of one profile")
    common(p)
    p.add_argument("--objective", choices=["airy", "schrodinger", "approx"], default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--profile", default=None, help="profile CSV (xi,re,im)")
    p.add_argument("--trial", choices=["gaussian", "bump"], default=None)
    for flag, typ in (("freq-half", float), ("freq-n", int), ("t-half", float),
                      ("nt", int), ("x-half", float), ("nx", int)):
        p.add_argument(f"--{flag}", type=typ, default=None)

    p = sub.add_parser("bubble-sweep", help="concentration-family convergence table")
    common(p)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--eps", type=float, nargs="+", default=None)
    for flag, typ in (("chi-half", float), ("chi-n", int), ("t-half", float),
                      ("nt", int), ("x-half", float), ("nx", int),
                      ("theta-nodes", int)):
        p.add_argument(f"--{flag}", type=typ, default=None)

    p = sub.add_parser("dyadic-scan", help="exact interval checks and overlap count")
    common(p)
    for flag in ("ell-min", "ell-max", "window", "alpha-num", "alpha-den",
                 "overlap-ell-min", "overlap-ell-max", "overlap-window"):
        p.add_argument(f"--{flag}", type=int, default=None)

    p = sub.add_parser("smoothing-check", help="weighted space-time L2 identity")
    common(p)
    for flag, typ in (("support-lo", float), ("support-hi", float), ("freq-n", int),
                      ("t-half", float), ("x-half", float), ("nx", int),
                      ("doublings", int)):
        p.add_argument(f"--{flag}", type=typ, default=None)

    p = sub.add_parser("maximize", help="gradient ascent and threshold report")
    common(p)
    p.add_argument("--objective", choices=["airy", "schrodinger"], default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--real-constraint", action="store_const", const=True, default=None)
    for flag, typ in (("max-iters", int), ("restarts", int), ("freq-half", float),
                      ("freq-n", int), ("t-half", float), ("nt", int),
                      ("x-half", float), ("nx", int), ("bubble-eps", float)):
        p.add_argument(f"--{flag}", type=typ, default=None)

    p = sub.add_parser("report-all", help="small deterministic run of everything")
    common(p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _DISPATCH[args.command](args)
    except DomainError as exc:
        print(f"airylab: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (NonFiniteObjective, FloatingPointError) as exc:
        print(f"airylab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
