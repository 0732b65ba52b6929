"""Command-line front end.

Every run first prints its resolved configuration, then the result in the
chosen format (plain ``key=value`` tokens, csv, or json). Tables and
profiles go to ``--out`` files as CSV with 12 significant digits.

Exit codes: 0 success, 2 usage or input errors, 3 numerical failures.
"""
import argparse
import json
import math
import sys

import numpy as np

from . import geometry, phasespace, profile, variation, volcomp
from .config import ComparisonConfig
from .errors import IsomassError, NumericalError, UsageError

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3


def _fmt12(x):
    return np.format_float_positional(float(x), precision=12, unique=False, fractional=False, trim="-")


def _plain(v):
    if isinstance(v, bool) or v is None:
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return str(v)
        if v == 0 or 1e-3 <= abs(v) < 1e6:
            return f"{v:.6f}"
        return f"{v:.6e}"
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt12(x) for x in row) + "\n")


def emit(args, result, out=None):
    out = out or sys.stdout
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    fmt = args.format
    if fmt == "json":
        doc = {"config": {k: _jsonable(v) for k, v in config.items()},
               "result": {k: _jsonable(v) for k, v in result.items()}}
        out.write(json.dumps(doc, indent=2) + "\n")
        return
    out.write("# config " + " ".join(f"{k}={v}" for k, v in config.items()) + "\n")
    if fmt == "csv":
        out.write(",".join(result) + "\n")
        out.write(",".join(_fmt12(v) if isinstance(v, (float, np.floating)) else _plain(v)
                           for v in result.values()) + "\n")
    else:
        out.write(" ".join(f"{k}={_plain(v)}" for k, v in result.items()) + "\n")


def _epsilon(text):
    try:
        e = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < e <= 1.0:
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1], got {e}")
    return e


def _positive(kind):
    def parse(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a {kind.__name__}: {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {v}")
        return v

    return parse


# -- subcommands ------------------------------------------------------------------

def cmd_alpha(args):
    res = volcomp.alpha(args.epsilon, grid=args.grid, n=args.panels)
    if args.out:
        write_table(args.out, ["z", "w"], zip(res.z, res.w))
    return {"alpha": res.alpha, "argmax_z": res.argmax_z}


def cmd_epsilon0(args):
    res = volcomp.epsilon0(tol=args.tol, grid=args.grid, n=args.panels)
    return {"epsilon0": res.value, "lower": res.lower, "upper": res.upper, "width": res.width,
            "reference": res.reference, "difference": res.value - res.reference}


def cmd_weps(args):
    if args.z is not None:
        return {"z": args.z, "w": volcomp.w_eps(args.epsilon, args.z, args.panels)}
    if not args.out:
        raise UsageError("--z-samples needs --out")
    z = np.linspace(0.0, 4.0 * math.pi, args.z_samples)
    w = volcomp.w_eps(args.epsilon, z, args.panels)
    write_table(args.out, ["z", "w"], zip(z, w))
    return {"samples": args.z_samples, "max_w": float(np.max(w)), "out": args.out}


def cmd_schwarzschild(args):
    g = geometry.SchwarzschildMetric(args.mass)
    r_min = args.r_min if args.r_min is not None else (g.horizon_radius if g.m > 0 else args.r_max / args.samples)
    if not 0 < r_min < args.r_max:
        raise UsageError(f"need 0 < r-min < r-max, got {r_min}, {args.r_max}")
    r = np.geomspace(r_min, args.r_max, args.samples)
    area = np.asarray(geometry.sphere_area(g, r))
    vol = np.asarray(geometry.enclosed_volume(g, r))
    H = np.asarray(geometry.mean_curvature(g, r))
    m = np.asarray(geometry.hawking_mass_sphere(g, r))
    if args.out:
        write_table(args.out, ["r", "area", "volume", "H", "hawking"], zip(r, area, vol, H, m))
    if args.profile_out:
        p = profile.schwarzschild_profile(args.mass, args.r_max, args.samples)
        profile.write_profile(p, args.profile_out)
    return {"horizon_area": float(area[0]) if g.m > 0 else 0.0, "max_mass_error": float(np.max(np.abs(m - g.m))),
            "samples": args.samples}


def cmd_profile_check(args):
    try:
        p = profile.read_profile(args.inp)
    except OSError as exc:
        raise UsageError(f"cannot read {args.inp}: {exc.strerror}") from None
    cfg = ComparisonConfig(eps=args.epsilon)
    series = profile.mass_series(p, cfg)
    if args.series_out:
        write_table(args.series_out, ["V", "m", "m_ric", "m_r"], series.rows())
    compact = p.end.kind == "compact"
    mono = profile.check_monotone(series, "m", tol=args.tol, half=compact)
    R = profile.scalar_curvature(p)
    n = len(p)
    cut = max(1, n // 100)
    inner = R[cut:n - cut]
    out = {"samples": n, "volume": p.total_volume, "horizon_area": p.horizon_area}
    if p.end.kind == "schwarzschild":
        verdict = profile.penrose_check(p, tol=args.tol)
        out["mass"] = verdict.total_mass
        out["bound"] = verdict.bound
        out["penrose"] = "equality" if verdict.equality else ("satisfied" if verdict.satisfied else "violated")
    else:
        out["mass"] = float(series.m[-1])
        out["penrose"] = "n/a"
    out["monotone"] = mono.monotone
    out["violations"] = len(mono.violations)
    out["checked_range"] = "half" if compact else "full"
    if compact:
        # tips are singular for the equality manifolds; skip the first 1% of samples
        body = series.window(max(1, n // 100))
        for col in ("m_ric", "m_r"):
            # these carry a 36 pi scale; use a relative tolerance
            scale = max(1.0, float(np.max(np.abs(body.column(col)))))
            out["monotone_" + col] = profile.check_monotone(body, col, tol=args.tol * scale).monotone
    out["min_scalar_curvature"] = float(np.nanmin(inner)) if np.any(np.isfinite(inner)) else math.nan
    return out


def cmd_bishop(args):
    half = phasespace.bishop_halfvolume(args.dim, args.ric0)
    return {"volume": 2.0 * half, "halfvolume": half,
            "sphere_volume": phasespace.round_sphere_volume(args.dim, args.ric0)}


def cmd_football(args):
    cfg = ComparisonConfig(eps=args.epsilon)
    fb = phasespace.football_profile(cfg, samples=args.samples)
    if args.out:
        profile.write_profile(fb.profile, args.out)
    return {"volume": fb.volume, "ratio": fb.volume / cfg.V0, "x_bar": fb.x_bar,
            "case": fb.path.case_kind, "boundary": fb.boundary}


def cmd_imcf(args):
    try:
        p = profile.read_profile(args.inp)
    except OSError as exc:
        raise UsageError(f"cannot read {args.inp}: {exc.strerror}") from None
    rec = profile.imcf_evolve(p, args.t_max, args.steps, V_start=args.v_start, tol=args.tol)
    if args.out:
        write_table(args.out, ["t", "V", "A", "m"], zip(rec.t, rec.V, rec.A, rec.m))
    return {"t_end": float(rec.t[-1]), "area_error": rec.area_error, "m_start": float(rec.m[0]),
            "m_end": float(rec.m[-1]), "mass_drops": len(rec.mass_drops), "reached_end": rec.reached_end}


def cmd_counterexample(args):
    p = profile.counterexample_profile(args.area, args.mass, r_max=args.r_max)
    if args.out:
        profile.write_profile(p, args.out)
    spheres = profile.minimal_spheres(p)
    inner = max(a for _, a in spheres)
    outer = spheres[-1][1]
    verdict = profile.penrose_check(p, area=inner)
    return {"inner_minimal_area": inner, "horizon_area": outer, "mass": p.end.m,
            "penrose_bound_inner": verdict.bound, "penrose": "violated" if not verdict.satisfied else "satisfied",
            "min_scalar_curvature": float(np.nanmin(profile.scalar_curvature(p)))}


def cmd_variation(args):
    g = geometry.SchwarzschildMetric(args.mass)
    probe = variation.FlowProbe(g, args.r)
    first = variation.first_variation_check(probe)
    second = variation.second_variation_check(probe)
    return {"dA_dt": first.measured[-1], "HA": first.predicted, "first_error": first.error,
            "first_order": "exact" if first.exact else first.order,
            "dH_dt": second.measured[-1], "predicted_dH_dt": second.predicted,
            "second_error": second.error, "second_order": "exact" if second.exact else second.order}


def build_parser():
    ap = argparse.ArgumentParser(prog="isomass", description=__doc__.splitlines()[0])
    ap.add_argument("--format", choices=("plain", "csv", "json"), default="plain")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("alpha", help="supremum of w_eps over its interval")
    p.add_argument("--epsilon", type=_epsilon, required=True)
    p.add_argument("--grid", type=_positive(int), default=512)
    p.add_argument("--panels", type=_positive(int), default=1000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("epsilon0", help="threshold where alpha(eps) reaches 1")
    p.add_argument("--tol", type=_positive(float), default=1e-6)
    p.add_argument("--grid", type=_positive(int), default=512)
    p.add_argument("--panels", type=_positive(int), default=1000)
    p.set_defaults(func=cmd_epsilon0)

    p = sub.add_parser("weps", help="w_eps(z) at a point or on a grid")
    p.add_argument("--epsilon", type=_epsilon, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--z", type=float)
    g.add_argument("--z-samples", type=_positive(int))
    p.add_argument("--panels", type=_positive(int), default=1000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_weps)

    p = sub.add_parser("schwarzschild", help="table of Schwarzschild sphere quantities")
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--r-min", type=float)
    p.add_argument("--r-max", type=_positive(float), default=100.0)
    p.add_argument("--samples", type=_positive(int), default=400)
    p.add_argument("--out")
    p.add_argument("--profile-out")
    p.set_defaults(func=cmd_schwarzschild)

    p = sub.add_parser("profile-check", help="masses, Penrose verdict and curvature of a profile file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--epsilon", type=_epsilon, default=1.0)
    # file profiles carry spline-level (~1e-6) errors in the masses
    p.add_argument("--tol", type=_positive(float), default=1e-5)
    p.add_argument("--series-out", help="write V,m,m_ric,m_r to this CSV file")
    p.set_defaults(func=cmd_profile_check)

    p = sub.add_parser("bishop", help="Bishop volume bound from the phase plane")
    p.add_argument("--dim", type=_positive(int), default=3)
    p.add_argument("--ric0", type=_positive(float), default=2.0)
    p.set_defaults(func=cmd_bishop)

    p = sub.add_parser("football", help="equality manifold for a given eps")
    p.add_argument("--epsilon", type=_epsilon, required=True)
    p.add_argument("--samples", type=_positive(int), default=400)
    p.add_argument("--out")
    p.set_defaults(func=cmd_football)

    p = sub.add_parser("imcf", help="inverse mean curvature flow on a profile file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--t-max", type=_positive(float), default=1.0)
    p.add_argument("--steps", type=_positive(int), default=100)
    p.add_argument("--v-start", type=float)
    p.add_argument("--tol", type=_positive(float), default=1e-5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_imcf)

    p = sub.add_parser("counterexample", help="large minimal sphere behind a small horizon")
    p.add_argument("--area", type=_positive(float), default=160.0 * math.pi)
    p.add_argument("--mass", type=_positive(float), default=1.0)
    p.add_argument("--r-max", type=_positive(float), default=100.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("variation", help="finite-difference checks of the variation formulas")
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--r", type=_positive(float), default=2.0)
    p.set_defaults(func=cmd_variation)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except UsageError as exc:
        print(f"isomass {args.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"isomass {args.subcommand}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except IsomassError as exc:  # pragma: no cover - every error is one of the two
        print(f"isomass {args.subcommand}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    emit(args, result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
