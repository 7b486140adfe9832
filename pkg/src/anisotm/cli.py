"""Command-line interface: reproducible runs from a single JSON config.

Subcommands: geometry (gauge constants and consistency residuals),
symmetrize (grid in, symmetrized grid + profile + inequality checks out),
maximize (subcritical or critical profile search), sweep (the sup-identity
scan over t), check (the quick invariant battery).

Every output embeds the artifact version and the SHA-256 of the resolved
config (after --seed/--threads overrides), and contains no timestamps, so
identical configs produce byte-identical files.  Exit codes: 0 success,
1 failed checks (the check subcommand only), 2 validation error,
3 numerical overflow or support overflow, 4 I/O error.
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .finsler import (FinslerNorm, GaugeError, wulff_volume, sharp_constant,
                      bipolar_residual, coarea_surface_check)
from .functional import (FunctionalParams, ParamError, FunctionalOverflowError,
                         phi, phi_direct, normalize_sphere,
                         lq_norm_radial, grad_norm_radial, validate_lambda,
                         EXP_POWER, PHI_SERIES)
from .profiles import RadialProfile, ProfileError
from .rearrange import (GridFunction, SupportOverflowError, SymmetryError,
                        convex_symmetrization, profile_of, polya_szego_check,
                        hardy_littlewood_check, equimeasurability_gaps,
                        rasterize_profile, disc_tolerance)
from .maximize import (SearchConfig, estimate_f, direct_critical_max,
                       identity_sweep, threshold_check, maximizer_diagnostics)


class ConfigError(ValueError):
    """Malformed or inadmissible run configuration."""


# -- config loading ----------------------------------------------------------

def _require(block, key, where):
    if key not in block:
        raise ConfigError(f"config field {where}.{key} is missing")
    return block[key]


def load_config(path, seed_override=None, threads_override=None):
    """Read, validate, and resolve the run config; returns (dict, sha256)."""
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if seed_override is not None:
        cfg.setdefault("search", {})["seed"] = int(seed_override)
    if threads_override is not None:
        cfg.setdefault("search", {})["threads"] = int(threads_override)
    # the thread count is an execution detail with no effect on results, so
    # it stays out of the hash; outputs are byte-identical across counts
    hash_cfg = json.loads(json.dumps(cfg))
    hash_cfg.get("search", {}).pop("threads", None)
    digest = hashlib.sha256(
        json.dumps(hash_cfg, sort_keys=True, separators=(",", ":")).encode()).hexdigest()
    return cfg, digest


def gauge_from_config(cfg):
    spec = _require(cfg, "gauge", "<root>")
    dim = 2
    if "params" in cfg and "n" in cfg["params"]:
        dim = int(cfg["params"]["n"])
    try:
        return FinslerNorm.from_config(spec, dim=dim)
    except GaugeError as err:
        raise ConfigError(f"config field gauge: {err}") from None


def params_from_config(cfg, F=None):
    block = _require(cfg, "params", "<root>")
    n = int(_require(block, "n", "params"))
    lam = block.get("lambda")
    if lam is None:
        rel = block.get("lambda_rel")
        if rel is None:
            raise ConfigError("config field params.lambda (or params.lambda_rel) "
                              "is missing")
        if F is None:
            raise ConfigError("params.lambda_rel needs a gauge to resolve against")
        lam = float(rel) * sharp_constant(F)
    variant = block.get("variant", PHI_SERIES)
    if variant not in (EXP_POWER, PHI_SERIES):
        raise ConfigError(f"config field params.variant must be {EXP_POWER!r} "
                          f"or {PHI_SERIES!r}, got {variant!r}")
    try:
        params = FunctionalParams(
            n=n, q=float(_require(block, "q", "params")),
            beta=float(block.get("beta", 0.0)), lam=float(lam),
            a=float(block.get("a", 1.0)), b=float(block.get("b", 1.0)),
            p=(float(block["p"]) if block.get("p") is not None else None),
            variant=variant)
        if F is not None:
            validate_lambda(params, F)
    except ParamError as err:
        raise ConfigError(f"config field params: {err}") from None
    return params


def search_from_config(cfg):
    block = cfg.get("search", {})
    return SearchConfig(
        knots=int(block.get("knots", 64)),
        radius=float(block.get("radius", 8.0)),
        restarts=int(block.get("restarts", 4)),
        budget=int(block.get("budget", 4000)),
        seed=int(block.get("seed", 0)),
        radius_critical=block.get("radius_critical"),
        threads=int(block.get("threads", 1)))


# -- output helpers ----------------------------------------------------------

def _write_json(path, payload, digest):
    payload = dict(payload)
    payload["version"] = __version__
    payload["config_sha256"] = digest
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path, header_cols, rows, digest):
    lines = [f"# anisotm {__version__} config_sha256={digest}",
             ",".join(header_cols)]
    for row in rows:
        lines.append(",".join(f"{v:.17g}" for v in row))
    path.write_text("\n".join(lines) + "\n")


def _load_grid(path):
    p = Path(path)
    if not p.exists():
        raise OSError(f"grid file not found: {path}")
    if p.suffix == ".json":
        return GridFunction.from_json(json.loads(p.read_text()))
    return GridFunction.from_file(path)


# -- subcommands -------------------------------------------------------------

def cmd_geometry(cfg, digest, out):
    F = gauge_from_config(cfg)
    kappa = wulff_volume(F)
    report = {
        "gauge": F.config(),
        "dim": F.dim,
        "kappa": kappa,
        "lambda_n": sharp_constant(F),
        "bipolar_residual": bipolar_residual(F, sample_count=cfg.get("samples", 200)),
        "coarea_residuals": {str(r): coarea_surface_check(F, r)
                             for r in (0.5, 1.0, 2.0)},
    }
    _write_json(out / "geometry.json", report, digest)
    print(f"kappa = {kappa:.12g}, lambda_n = {report['lambda_n']:.12g}")
    print(f"bipolar residual = {report['bipolar_residual']:.3e}")
    for r, res in report["coarea_residuals"].items():
        print(f"coarea residual (r={r}) = {res:.3e}")
    return 0


def cmd_symmetrize(cfg, digest, out, input_path, second_path=None):
    F = gauge_from_config(cfg)
    u = _load_grid(input_path)
    if u.dim != F.dim:
        raise ConfigError(f"grid dimension {u.dim} != gauge dimension {F.dim}")
    ustar = convex_symmetrization(u, F)
    prof = profile_of(ustar, F)
    ustar.save(out / "ustar.txt")
    prof.save(out / "profile.txt", u.dim)
    qs = [1.0, float(u.dim)]
    if "params" in cfg and "q" in cfg["params"]:
        qs.insert(1, float(cfg["params"]["q"]))
    ps = polya_szego_check(u, F)
    l1 = float(np.sum(np.abs(u.values)))
    fp_gap = float(np.sum(np.abs(u.values - ustar.values)) / max(l1, 1e-300))
    checks = {
        "equimeasurability_gaps": {str(q): g for q, g in
                                   equimeasurability_gaps(u, ustar, qs).items()},
        "polya_szego": {"energy_u": ps.energy_u, "energy_ustar": ps.energy_ustar,
                        "gap": ps.gap},
        "fixed_point": fp_gap <= disc_tolerance(u.h),
        "fixed_point_gap": fp_gap,
        "disc_tolerance": disc_tolerance(u.h),
    }
    if second_path is not None:
        gfun = _load_grid(second_path)
        hl = hardy_littlewood_check(u, gfun, F)
        checks["hardy_littlewood"] = {"lhs": hl.lhs, "rhs": hl.rhs, "gap": hl.gap,
                                      "g_symmetry_gap": hl.g_symmetry_gap}
    _write_json(out / "checks.json", checks, digest)
    print(f"wrote ustar.txt, profile.txt, checks.json to {out}")
    print(f"polya-szego gap = {ps.gap:.6g}, fixed_point = {checks['fixed_point']}")
    return 0


def cmd_maximize(cfg, digest, out):
    F = gauge_from_config(cfg)
    params = params_from_config(cfg, F)
    sconf = search_from_config(cfg)
    objective = cfg.get("search", {}).get("objective", "subcritical")
    if objective == "subcritical":
        est = estimate_f(params, F, sconf)
        report_obj = maximizer_diagnostics(est.profile, params, F,
                                           objective="subcritical")
        restart_values = est.restart_values
        spread = est.spread
    elif objective == "critical":
        rep = direct_critical_max(params, F, sconf)
        report_obj = maximizer_diagnostics(rep.profile, params, F,
                                           objective="critical")
        restart_values = ()
        spread = rep.spread
    else:
        raise ConfigError(f"config field search.objective must be 'subcritical' "
                          f"or 'critical', got {objective!r}")
    report = {
        "objective": objective,
        "value": report_obj.value,
        "grad_norm_residual": report_obj.grad_norm_residual,
        "q_norm_residual": report_obj.q_norm_residual,
        "constraint_residual": report_obj.constraint_residual,
        "symmetry_residual": report_obj.symmetry_residual,
        "local_optimality_margin": report_obj.local_optimality_margin,
        "spread": spread,
    }
    _write_json(out / "report.json", report, digest)
    report_obj.profile.save(out / "profile.txt", params.n)
    _write_csv(out / "restarts.csv", ["restart", "value"],
               [(float(i), v) for i, v in enumerate(restart_values)], digest)
    print(f"{objective} value = {report_obj.value:.12g} "
          f"(grad residual {report_obj.grad_norm_residual:.2e})")
    return 0


def cmd_sweep(cfg, digest, out):
    F = gauge_from_config(cfg)
    params = params_from_config(cfg, F)
    sconf = search_from_config(cfg)
    grid_size = int(cfg.get("sweep", {}).get("grid_size", 24))
    res = identity_sweep(params, F, grid_size=grid_size, config=sconf)
    thr = threshold_check(params)
    if thr.applicable:
        verdict = ("attainment guaranteed" if res.g_value > thr.threshold
                   else "inconclusive")
    else:
        verdict = "threshold not applicable"
    report = {
        "lambda": res.lam,
        "t_star": res.t_star,
        "g_value": res.g_value,
        "threshold": thr.threshold if thr.applicable else None,
        "threshold_applicable": thr.applicable,
        "verdict": verdict,
        "endpoint_diagnostics": res.endpoint_diagnostics,
    }
    _write_json(out / "sweep.json", report, digest)
    _write_csv(out / "sweep.csv", ["t", "bracket", "f", "product"],
               zip(res.ts, res.brackets, res.f_estimates, res.products), digest)
    print(f"g_value = {res.g_value:.12g} at t_star = {res.t_star:.12g}")
    print(f"verdict: {verdict}")
    return 0


def cmd_check(cfg, digest, out):
    """Quick invariant battery over the built-in anchor gauges."""
    del digest, out
    seed = int(cfg.get("search", {}).get("seed", 0)) if cfg else 0
    failures = 0

    def report(name, ok, detail=""):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}{'  ' + detail if detail else ''}")
        failures += 0 if ok else 1

    F_euc = FinslerNorm.euclidean(2)
    F_ell = FinslerNorm.ellipse([[4.0, 0.0], [0.0, 1.0]])
    F_p4 = FinslerNorm.pnorm(4.0, 2)
    report("kappa euclidean = pi",
           abs(wulff_volume(F_euc) - np.pi) < 1e-8,
           f"{wulff_volume(F_euc):.12g}")
    report("kappa ellipse diag(4,1) = 2 pi",
           abs(wulff_volume(F_ell) - 2 * np.pi) < 1e-8,
           f"{wulff_volume(F_ell):.12g}")
    report("sharp constant euclidean = 4 pi",
           abs(sharp_constant(F_euc) - 4 * np.pi) < 1e-8)
    for F, name in ((F_euc, "euclidean"), (F_ell, "ellipse"), (F_p4, "pnorm4")):
        report(f"bipolar residual {name} <= 1e-10",
               bipolar_residual(F, 100, seed=seed) < 1e-10)
        report(f"coarea residual {name} <= 1e-8",
               abs(coarea_surface_check(F, 1.0)) < 1e-8)
    params = FunctionalParams(n=2, q=2.0, beta=0.0, lam=1.0)
    t = np.geomspace(1e-6, 10.0, 25)
    gap = np.max(np.abs(phi(params, t) - phi_direct(params, t))
                 / np.maximum(phi(params, t), 1e-300))
    report("phi stable vs direct <= 1e-12", gap < 1e-12, f"{gap:.2e}")
    rng = np.random.default_rng(seed)
    knots = np.linspace(0.0, 3.0, 33)
    ok_norm = True
    for _ in range(10):
        vals = np.sort(rng.uniform(0.0, 2.0, 33))[::-1]
        vals[-1] = 0.0
        g = RadialProfile(knots, vals)
        gn = normalize_sphere(g, 2.0, F_euc)
        ok_norm &= abs(grad_norm_radial(gn, F_euc) - 1.0) < 1e-10
        ok_norm &= abs(lq_norm_radial(gn, 2.0, F_euc) - 1.0) < 1e-10
    report("normalize_sphere puts both norms at 1 within 1e-10", ok_norm)
    cone = RadialProfile(np.linspace(0.0, 1.0, 65), np.linspace(1.0, 0.0, 65))
    u = rasterize_profile(cone, F_euc, 1.5, 128)
    ps = polya_szego_check(u, F_euc)
    report("polya-szego gap on cone within allowance",
           ps.gap >= -disc_tolerance(u.h) * (1.0 + ps.energy_u),
           f"gap={ps.gap:.3e}")
    gaps = equimeasurability_gaps(u, convex_symmetrization(u, F_euc), [1.0, 2.0])
    report("equimeasurability on cone within allowance",
           max(gaps.values()) <= disc_tolerance(u.h))
    print(f"{'all checks passed' if failures == 0 else f'{failures} checks failed'}")
    return 0 if failures == 0 else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="anisotm",
        description="Anisotropic Trudinger-Moser toolbox: gauge geometry, "
                    "convex symmetrization, and extremal-profile search.")
    parser.add_argument("command",
                        choices=["geometry", "symmetrize", "maximize", "sweep",
                                 "check"])
    parser.add_argument("--config", help="path to the JSON run config")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override search.seed from the config")
    parser.add_argument("--threads", type=int, default=None,
                        help="override search.threads from the config")
    parser.add_argument("--input", help="grid file (symmetrize)")
    parser.add_argument("--second", help="second grid file for the product "
                                         "inequality (symmetrize)")
    args = parser.parse_args(argv)

    try:
        if args.config is None:
            if args.command != "check":
                raise ConfigError("--config is required for this command")
            cfg, digest = {}, hashlib.sha256(b"{}").hexdigest()
        else:
            cfg, digest = load_config(args.config, args.seed, args.threads)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "geometry":
            return cmd_geometry(cfg, digest, out)
        if args.command == "symmetrize":
            if args.input is None:
                raise ConfigError("symmetrize needs --input <grid file>")
            return cmd_symmetrize(cfg, digest, out, args.input, args.second)
        if args.command == "maximize":
            return cmd_maximize(cfg, digest, out)
        if args.command == "sweep":
            return cmd_sweep(cfg, digest, out)
        return cmd_check(cfg, digest, out)
    except (ConfigError, ParamError, GaugeError, ProfileError, SymmetryError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (FunctionalOverflowError, SupportOverflowError) as err:
        print(f"overflow: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
