"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error.

Every option can also be given in an INI file passed with ``--config``; keys
are the long option names with dashes as underscores (``theta_min = 0.2``,
``L_bar = 12``; case-sensitive), either at top level or under a section named
after the subcommand.  Command-line flags win.
"""
from __future__ import annotations

import argparse
import configparser
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io
from .classifier import minimize_aux
from .core import (
    DEFAULT_TOL,
    LENGTH_FACTOR,
    DomainError,
    PhysicalParams,
    ReducedParams,
    curve_L01,
    curve_L02,
    curve_L12,
    curve_Ld,
    f_value,
    reduce,
    theta_star,
    unreduce,
)
from .profile import (
    build_profile,
    closed_form_energy,
    global_profiles,
    optimize_p_branch,
    profile_energy_quadrature,
    sample,
    smallest_blister,
    write_profile_csv,
)

log = logging.getLogger("blister")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- argument parsing -----------------------------------------------------------

def _positive(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}")
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be a finite positive number: {s!r}")
    return v


def _count(s: str) -> int:
    v = int(s)
    if v < 2:
        raise argparse.ArgumentTypeError("count must be >= 2")
    return v


def _add_params(sp: argparse.ArgumentParser) -> None:
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--reduced", action="store_true", help="parameters given as (theta, L)")
    g.add_argument("--physical", action="store_true", help="parameters given as (theta_bar, L_bar)")
    sp.add_argument("--alpha", type=_positive, required=False)
    sp.add_argument("--theta", type=_positive)
    sp.add_argument("--L", type=_positive)
    sp.add_argument("--theta-bar", type=_positive)
    sp.add_argument("--L-bar", type=_positive)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative tolerance for boundary curves")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blister", description="Thin-film blister phase diagram and profiles.")
    parser.add_argument("--config", help="INI file with option defaults")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="region, minimizers and energies at one parameter point")
    _add_params(p)

    p = sub.add_parser("sweep", help="classify a (theta, L) grid; write CSV (and optionally a figure)")
    p.add_argument("--alpha", type=_positive, default=1.0)
    p.add_argument("--theta-min", type=_positive, default=0.2)
    p.add_argument("--theta-max", type=_positive, default=4.0)
    p.add_argument("--theta-count", type=_count, default=200)
    p.add_argument("--L-min", type=_positive, default=0.1)
    p.add_argument("--L-max", type=_positive, default=20.0)
    p.add_argument("--L-count", type=_count, default=200)
    p.add_argument("--theta-scale", choices=("linear", "log"), default="linear")
    p.add_argument("--L-scale", choices=("linear", "log"), default="log")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="grid CSV path")
    p.add_argument("--curves", help="curves CSV path (default: <out>_curves.csv)")
    p.add_argument("--plot", action="store_true", help="also render <out>.png")

    p = sub.add_parser("profile", help="sample the closed-form minimizer(s) to CSV + JSON")
    _add_params(p)
    p.add_argument("--K", default="auto", help="'auto' (global minimizer) or a value in the admissible interval")
    p.add_argument("--samples", type=int, default=1024)
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--plot", action="store_true", help="also render <prefix>.png")

    p = sub.add_parser("verify", help="check the closed form by quadrature or by the direct oracle")
    _add_params(p)
    p.add_argument("--level", choices=("quadrature", "oracle"), default="quadrature")
    p.add_argument("--n", type=int, default=None, help="quadrature cells / oracle grid nodes")
    p.add_argument("--seed", type=int, default=None, help="PRNG seed for the oracle noise start")
    p.add_argument("--out", help="write the oracle field CSV + result JSON with this prefix")

    p = sub.add_parser("smallest", help="smallest blister constants and the triple point")
    p.add_argument("--alpha", type=_positive, required=True)

    p = sub.add_parser("local", help="p-blister local branch table")
    _add_params(p)
    p.add_argument("--p-max", type=int, default=5)
    p.add_argument("--out", help="CSV path (default: stdout)")
    return parser


def _load_config(path: str, command: str) -> dict[str, str]:
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep case: L, L_bar, L_min are distinct from l
    text = Path(path).read_text()
    if not text.lstrip().startswith("["):
        text = "[blister]\n" + text
    cp.read_string(text)
    out: dict[str, str] = {}
    for section in ("blister", command):
        if cp.has_section(section):
            out.update({k.replace("-", "_"): v for k, v in cp.items(section)})
    return out


def parse_args(argv: Optional[Sequence[str]]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = _load_config(args.config, args.command)
        except (OSError, configparser.Error) as exc:
            parser.error(f"cannot read config: {exc}")
        subparser = parser._subparsers._group_actions[0].choices[args.command]  # type: ignore[union-attr]
        known = {a.dest: a for a in subparser._actions}
        defaults = {}
        for k, v in cfg.items():
            if k not in known:
                parser.error(f"unknown config key {k!r} for {args.command}")
            act = known[k]
            if isinstance(act, argparse._StoreTrueAction):
                defaults[k] = v.strip().lower() in ("1", "true", "yes", "on")
            else:
                defaults[k] = v
        subparser.set_defaults(**defaults)
        args = parser.parse_args(argv)
        # store_true options given in the config but not as flags
        for k, v in defaults.items():
            if isinstance(v, bool) and not getattr(args, k):
                setattr(args, k, v)
    return args


def _params(args: argparse.Namespace) -> PhysicalParams:
    if args.alpha is None:
        raise UsageError("--alpha is required")
    if not (args.reduced or args.physical):
        raise UsageError("pass exactly one of --reduced / --physical")
    if args.reduced:
        if args.theta is None or args.L is None or args.theta_bar is not None or args.L_bar is not None:
            raise UsageError("--reduced needs --theta and --L (and not --theta-bar/--L-bar)")
        return unreduce(ReducedParams(args.alpha, args.theta, args.L))
    if args.theta_bar is None or args.L_bar is None or args.theta is not None or args.L is not None:
        raise UsageError("--physical needs --theta-bar and --L-bar (and not --theta/--L)")
    return PhysicalParams(args.alpha, args.theta_bar, args.L_bar)


def _check_tol(args) -> None:
    if not (args.tol >= 0 and math.isfinite(args.tol)):
        raise UsageError("--tol must be >= 0")


def _emit(obj) -> None:
    sys.stdout.write(io.dumps(obj) + "\n")


# --- commands -------------------------------------------------------------------

def classification_report(p: PhysicalParams, tol: float) -> dict:
    r = reduce(p)
    res, profiles = global_profiles(p, tol)
    blister = next((bp for bp in profiles if bp.K > 0), None)
    return {
        "region": res.region.value,
        "reduced": {"alpha": r.alpha, "theta": r.theta, "L": r.L, "theta_tilde": r.theta_tilde},
        "physical": {"alpha": p.alpha, "theta_bar": p.theta_bar, "L_bar": p.L_bar},
        "argmin": list(res.argmin),
        "f_values": [f_value(K, r) if not res.region.is_tie else 0.0 for K in res.argmin],
        "branch": res.branch,
        "x_bar": res.x_bar,
        "trivial": blister is None,
        "K": blister.K if blister else 0.0,
        "T": blister.T if blister else 0.0,
        "A": blister.A if blister else 0.0,
        "beta": blister.beta if blister else None,
        "E_closed_form": LENGTH_FACTOR * res.f_at_argmin,
        "minimizers": [bp.to_dict() for bp in profiles],
    }


def cmd_classify(args) -> int:
    _check_tol(args)
    _emit(classification_report(_params(args), args.tol))
    return EXIT_OK


def _axis(lo: float, hi: float, count: int, scale: str) -> np.ndarray:
    if not lo < hi:
        raise UsageError(f"range min {lo} must be below max {hi}")
    if scale == "log":
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def curve_rows(thetas: np.ndarray, alpha: float) -> list[list[float]]:
    ts = theta_star(alpha)
    rows = []
    for th in thetas:
        th = float(th)
        right = th >= ts
        rows.append([
            th,
            curve_Ld(th),
            curve_L01(th),
            curve_L02(th, alpha) if right else math.nan,
            curve_L12(th, alpha) if right else math.nan,
        ])
    return rows


def sweep_rows(alpha: float, thetas: np.ndarray, Ls: np.ndarray, tol: float, workers: int = 1) -> list[list]:
    """One row per grid point, ordered by (theta index, L index)."""

    def column(th: float) -> list[list]:
        out = []
        for L in Ls:
            r = ReducedParams(alpha, th, float(L))
            res = minimize_aux(r, tol)
            bp = build_profile(res.K, unreduce(r))
            out.append([th, float(L), res.region.value, res.K, bp.T, bp.A, LENGTH_FACTOR * res.f_at_argmin])
        return out

    thetas = [float(t) for t in thetas]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            cols = list(ex.map(column, thetas))
    else:
        cols = [column(t) for t in thetas]
    return [row for col in cols for row in col]


SWEEP_HEADER = ["theta", "L", "region", "K", "T", "A", "energy"]
CURVE_HEADER = ["theta", "L_d", "L01", "L02", "L12"]


def cmd_sweep(args) -> int:
    _check_tol(args)
    thetas = _axis(args.theta_min, args.theta_max, args.theta_count, args.theta_scale)
    Ls = _axis(args.L_min, args.L_max, args.L_count, args.L_scale)
    rows = sweep_rows(args.alpha, thetas, Ls, args.tol, max(1, args.workers))
    out = Path(args.out)
    curves_path = Path(args.curves) if args.curves else out.with_name(out.stem + "_curves.csv")
    crows = curve_rows(thetas, args.alpha)
    try:
        io.write_csv(out, SWEEP_HEADER, rows)
        io.write_csv(curves_path, CURVE_HEADER, crows)
    except OSError as exc:
        raise UsageError(f"cannot write output: {exc}")
    written = [str(out), str(curves_path)]
    if args.plot:
        from .plotting import phase_diagram

        regions = [[rows[i * len(Ls) + j][2] for j in range(len(Ls))] for i in range(len(thetas))]
        c = np.array(crows, dtype=float)
        curves = {"L_d": (c[:, 0], c[:, 1]), "L01": (c[:, 0], np.where(c[:, 0] <= theta_star(args.alpha), c[:, 2], np.nan)),
                  "L02": (c[:, 0], c[:, 3]), "L12": (c[:, 0], c[:, 4])}
        fig = phase_diagram(thetas, Ls, regions, curves, out.with_suffix(".png"),
                            log_L=args.L_scale == "log", title=rf"$\alpha={args.alpha:g}$")
        written.append(str(fig))
    counts = {}
    for row in rows:
        counts[row[2]] = counts.get(row[2], 0) + 1
    _emit({"points": len(rows), "regions": counts, "files": written})
    return EXIT_OK


def cmd_profile(args) -> int:
    _check_tol(args)
    p = _params(args)
    r = reduce(p)
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    if args.K == "auto":
        res, profiles = global_profiles(p, args.tol)
        if res.trivial_only:
            print(f"notice: region {res.region.value} admits no blister; writing the trivial profile",
                  file=sys.stderr)
        labels = ["trivial" if bp.K == 0 else "blister" for bp in profiles]
        region = res.region.value
    else:
        try:
            K = float(args.K)
        except ValueError:
            raise UsageError(f"--K must be 'auto' or a number, got {args.K!r}")
        profiles = [build_profile(K, p)]
        labels = ["blister" if K > 0 else "trivial"]
        region = minimize_aux(r, args.tol).region.value
    prefix = args.out
    written = []
    for bp, label in zip(profiles, labels):
        stem = prefix if len(profiles) == 1 else f"{prefix}_{label}"
        meta = bp.to_dict()
        meta.update(region=region, E_closed_form=closed_form_energy(bp.K, r), samples=args.samples)
        try:
            written.append(str(write_profile_csv(stem + ".csv", bp, args.samples)))
            written.append(str(io.write_json(stem + ".json", meta)))
        except OSError as exc:
            raise UsageError(f"cannot write output: {exc}")
        if args.plot:
            from .plotting import profile_figure

            x, z1, z2 = sample(bp, args.samples)
            written.append(str(profile_figure(x, z1, z2, stem + ".png", title=f"{region}, K={bp.K:.6g}")))
    _emit({"region": region, "files": written})
    return EXIT_OK


def _verify_quadrature(p: PhysicalParams, tol: float, n: int) -> tuple[bool, list[str]]:
    r = reduce(p)
    res, profiles = global_profiles(p, tol)
    ok, lines = True, [f"region {res.region.value}"]
    for bp in profiles:
        eq = profile_energy_quadrature(bp, n)
        ec = closed_form_energy(bp.K, r)
        err = abs(eq - ec) / max(abs(ec), 1e-300) if ec != 0 else abs(eq)
        passed = err <= 1e-6
        ok &= passed
        lines.append(f"K={bp.K:.12g} E_quad={eq:.12g} E_closed={ec:.12g} rel_err={err:.3e} "
                     f"{'PASS' if passed else 'FAIL'}")
    return ok, lines


def _verify_oracle(p: PhysicalParams, tol: float, n: int, seed: Optional[int], out: Optional[str]):
    from .oracle import DEFAULT_SEED, oracle_minimize

    r = reduce(p)
    res, profiles = global_profiles(p, tol)
    o = oracle_minimize(p, n, rng_seed=DEFAULT_SEED if seed is None else seed)
    h = o.field.h
    lines = [f"region {res.region.value}", f"oracle energy={o.energy:.12g} T_measured={o.T_measured:.12g} "
             f"seed={o.seed_label} converged={o.converged}"]
    if res.trivial_only:
        ok = o.energy >= -1e-6
        lines.append(f"trivial contract: oracle energy >= -1e-6 {'PASS' if ok else 'FAIL'}")
    else:
        bp = next(b for b in profiles if b.K > 0)
        ec = closed_form_energy(bp.K, r)
        if res.region.is_tie:
            # closed-form minimum is 0; measure against the blister's delamination length
            e_ok = abs(o.energy) <= 0.02 * bp.T
            lines.append(f"tie contract: |E_oracle| <= 0.02 T={bp.T:.6g} {'PASS' if e_ok else 'FAIL'}")
            ok = e_ok
        else:
            rel = abs(o.energy - ec) / abs(ec)
            e_ok = rel <= 0.02
            t_ok = abs(o.T_measured - bp.T) <= 2 * h
            lines.append(f"energy: closed={ec:.12g} rel_err={rel:.3e} {'PASS' if e_ok else 'FAIL'}")
            lines.append(f"support: T={bp.T:.12g} |dT|/h={abs(o.T_measured - bp.T) / h:.3f} "
                         f"{'PASS' if t_ok else 'FAIL'}")
            ok = e_ok and t_ok
    if out:
        io.write_csv(out + ".csv", ["x", "zeta1", "zeta2"],
                     zip(o.field.x.tolist(), o.field.zeta1.tolist(), o.field.zeta2.tolist()))
        io.write_json(out + ".json", o.to_dict())
    return ok, lines


def cmd_verify(args) -> int:
    _check_tol(args)
    p = _params(args)
    if args.level == "quadrature":
        n = args.n or (1 << 16)
        if n < 64:
            raise UsageError("--n must be >= 64 for quadrature")
        ok, lines = _verify_quadrature(p, args.tol, n)
    else:
        n = args.n or 4096
        if n < 128 or n & (n - 1):
            raise UsageError("--n must be a power of two >= 128 for the oracle")
        ok, lines = _verify_oracle(p, args.tol, n, args.seed, args.out)
    for ln in lines:
        print(ln)
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_smallest(args) -> int:
    a = args.alpha
    T_star, A_star = smallest_blister(a)
    ts = theta_star(a)
    L_star = curve_L01(ts)
    P = unreduce(ReducedParams(a, ts, L_star))
    _emit({
        "alpha": a,
        "T_star": T_star,
        "A_star": A_star,
        "theta_star": ts,
        "L_star": L_star,
        "triple_point": {"theta": ts, "L": L_star, "theta_bar": P.theta_bar, "L_bar": P.L_bar},
    })
    return EXIT_OK


def cmd_local(args) -> int:
    _check_tol(args)
    p = _params(args)
    if args.p_max < 1:
        raise UsageError("--p-max must be >= 1")
    rows = []
    for k in range(1, args.p_max + 1):
        found = optimize_p_branch(k, p, args.tol)
        if found is None:
            rows.append([k, "", "", "", "trivial"])
            continue
        K, E = found
        T = build_profile(K, PhysicalParams(p.alpha, p.theta_bar, p.L_bar / k)).T
        rows.append([k, K, E, T, "blister"])
    header = ["p", "K", "energy", "T", "branch"]
    if args.out:
        io.write_csv(args.out, header, rows)
    else:
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(io.fmt(v) for v in row) + "\n")
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "profile": cmd_profile,
    "verify": cmd_verify,
    "smallest": cmd_smallest,
    "local": cmd_local,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DomainError) as exc:
        print(f"blister {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
