"""Command-line surface: solve / curve / verify / occupation experiments.

Configuration is a strict JSON document (unknown keys are rejected so no
parameter is silently ignored). Reports are JSON, curves and sweep tables
are CSV; every artifact embeds the config echo, master seed, library
version and the tolerances in force, so reruns with the same config are
byte-identical apart from the timestamp field. ``--plot`` additionally
renders a matplotlib figure next to each data file.

Exit codes: 0 success, 2 invalid config or degenerate model, 3 I/O
failure, 4 simulation-quality failure (too many paths hit horizon_cap).
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from . import __version__, montecarlo, stopping
from .families import (
    BrownianDrift,
    CompoundPoissonDrift,
    DegenerateDriftError,
    JumpDiffusion,
    expected_theta,
    median,
)
from .montecarlo import PathConfig, SimulationQualityError
from .numerics import adaptive_simpson
from .scale import potential_atom, potential_density, scale_model
from .stopping import (
    CONTINUOUS_BAND,
    QUAD_TOL,
    ROOT_XTOL,
    SMOOTH_BAND,
    solve_threshold,
    value_function,
)

__all__ = ["ConfigError", "RunConfig", "parse_config", "main"]

KS_ALPHA = 0.01
SE_MULTIPLE = 3.0

_FAMILY_PARAMS = {
    "brownian_drift": ("sigma", "mu"),
    "jump_diffusion": ("sigma", "mu", "lambda", "eta"),
    "compound_poisson_drift": ("mu", "lambda", "eta"),
}


class ConfigError(ValueError):
    """Invalid configuration document."""


@dataclass(frozen=True)
class SimSettings:
    n: int = 100_000
    dt: float = 1e-3
    eps_tail: float = 1e-9
    horizon_cap: float = 10_000.0
    workers: int = 1


@dataclass(frozen=True)
class CurveSettings:
    points: int = 500
    y_max: float = None


@dataclass(frozen=True)
class VerifySettings:
    sweep_offsets: tuple = (-0.5, -0.25, 0.0, 0.25, 0.5)
    run_ks: bool = True
    ks_n: int = 10_000
    ks_dt: float = None  # default: dt/10 for grid families
    calibrate_bias: bool = True
    occupation: object = None


@dataclass(frozen=True)
class OccupationSettings:
    y: float = 0.0
    a: float = 1.0
    bins: int = 20


@dataclass(frozen=True)
class RunConfig:
    family: object
    seed: int
    simulation: SimSettings
    curve: CurveSettings
    verify: VerifySettings
    occupation: object
    echo: dict = field(repr=False, default_factory=dict)


def _check_keys(obj, allowed, path):
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key '{path}{unknown[0]}'")


def _number(obj, key, path, default=None, required=False, integer=False):
    if key not in obj:
        if required:
            raise ConfigError(f"missing key '{path}{key}'")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"key '{path}{key}' must be a number, got {v!r}")
    if integer:
        if not isinstance(v, int):
            raise ConfigError(f"key '{path}{key}' must be an integer, got {v!r}")
        return int(v)
    return float(v)


def _flag(obj, key, path, default):
    v = obj.get(key, default)
    if not isinstance(v, bool):
        raise ConfigError(f"key '{path}{key}' must be a boolean, got {v!r}")
    return v


def _parse_family(obj):
    if not isinstance(obj, dict):
        raise ConfigError("key 'family' must be an object")
    if "type" not in obj:
        raise ConfigError("missing key 'family.type'")
    ftype = obj["type"]
    if ftype not in _FAMILY_PARAMS:
        known = ", ".join(sorted(_FAMILY_PARAMS))
        raise ConfigError(f"unknown family type {ftype!r}; expected one of: {known}")
    params = _FAMILY_PARAMS[ftype]
    _check_keys(obj, ("type",) + params, "family.")
    kwargs = {}
    for key in params:
        attr = "lam" if key == "lambda" else key
        kwargs[attr] = _number(obj, key, "family.", required=True)
    try:
        if ftype == "brownian_drift":
            return BrownianDrift(**kwargs)
        if ftype == "jump_diffusion":
            return JumpDiffusion(**kwargs)
        return CompoundPoissonDrift(**kwargs)
    except DegenerateDriftError as exc:
        raise ConfigError(f"family: drift condition psi'(0+) < 0 violated ({exc})") from exc
    except ValueError as exc:
        raise ConfigError(f"family: {exc}") from exc


def _parse_occupation(obj, path):
    if not isinstance(obj, dict):
        raise ConfigError(f"key '{path[:-1]}' must be an object")
    _check_keys(obj, ("y", "a", "bins"), path)
    return OccupationSettings(
        y=_number(obj, "y", path, required=True),
        a=_number(obj, "a", path, required=True),
        bins=_number(obj, "bins", path, default=20, integer=True),
    )


def parse_config(text):
    """Parse and validate a JSON configuration document into a RunConfig."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    _check_keys(raw, ("family", "seed", "simulation", "curve", "verify", "occupation"), "")
    if "family" not in raw:
        raise ConfigError("missing key 'family'")
    family = _parse_family(raw["family"])
    seed = _number(raw, "seed", "", default=0, integer=True)
    if seed < 0:
        raise ConfigError(f"key 'seed' must be >= 0, got {seed}")

    sim_raw = raw.get("simulation", {})
    if not isinstance(sim_raw, dict):
        raise ConfigError("key 'simulation' must be an object")
    _check_keys(sim_raw, ("n", "dt", "eps_tail", "horizon_cap", "workers"), "simulation.")
    sim = SimSettings(
        n=_number(sim_raw, "n", "simulation.", default=SimSettings.n, integer=True),
        dt=_number(sim_raw, "dt", "simulation.", default=SimSettings.dt),
        eps_tail=_number(sim_raw, "eps_tail", "simulation.", default=SimSettings.eps_tail),
        horizon_cap=_number(sim_raw, "horizon_cap", "simulation.", default=SimSettings.horizon_cap),
        workers=_number(sim_raw, "workers", "simulation.", default=1, integer=True),
    )
    if sim.n < 100:
        raise ConfigError(f"key 'simulation.n' must be >= 100, got {sim.n}")
    if sim.workers < 1:
        raise ConfigError(f"key 'simulation.workers' must be >= 1, got {sim.workers}")

    curve_raw = raw.get("curve", {})
    if not isinstance(curve_raw, dict):
        raise ConfigError("key 'curve' must be an object")
    _check_keys(curve_raw, ("points", "y_max"), "curve.")
    curve = CurveSettings(
        points=_number(curve_raw, "points", "curve.", default=CurveSettings.points, integer=True),
        y_max=_number(curve_raw, "y_max", "curve.", default=None),
    )
    if curve.points < 2:
        raise ConfigError(f"key 'curve.points' must be >= 2, got {curve.points}")

    verify_raw = raw.get("verify", {})
    if not isinstance(verify_raw, dict):
        raise ConfigError("key 'verify' must be an object")
    _check_keys(
        verify_raw,
        ("sweep_offsets", "run_ks", "ks_n", "ks_dt", "calibrate_bias", "occupation"),
        "verify.",
    )
    offsets = verify_raw.get("sweep_offsets", list(VerifySettings.sweep_offsets))
    if not isinstance(offsets, list) or not offsets:
        raise ConfigError("key 'verify.sweep_offsets' must be a nonempty array")
    for v in offsets:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"key 'verify.sweep_offsets' must contain numbers, got {v!r}")
    if not any(float(v) == 0.0 for v in offsets):
        raise ConfigError("key 'verify.sweep_offsets' must include 0 (the y* column)")
    occ_in_verify = verify_raw.get("occupation")
    verify = VerifySettings(
        sweep_offsets=tuple(float(v) for v in offsets),
        run_ks=_flag(verify_raw, "run_ks", "verify.", True),
        ks_n=_number(verify_raw, "ks_n", "verify.", default=VerifySettings.ks_n, integer=True),
        ks_dt=_number(verify_raw, "ks_dt", "verify.", default=None),
        calibrate_bias=_flag(verify_raw, "calibrate_bias", "verify.", True),
        occupation=None if occ_in_verify is None else _parse_occupation(occ_in_verify, "verify.occupation."),
    )

    occupation = None
    if "occupation" in raw:
        occupation = _parse_occupation(raw["occupation"], "occupation.")

    return RunConfig(
        family=family,
        seed=seed,
        simulation=sim,
        curve=curve,
        verify=verify,
        occupation=occupation,
        echo=raw,
    )


def _path_config(sim, y_margin=0.0, dt=None, store=False):
    return PathConfig(
        dt=sim.dt if dt is None else dt,
        horizon_cap=sim.horizon_cap,
        drawdown_cutoff=sim.eps_tail,
        y_margin=y_margin,
        store_full_path=store,
    )


def _family_echo(family):
    if isinstance(family, BrownianDrift):
        return {"type": "brownian_drift", "sigma": family.sigma, "mu": family.mu}
    if isinstance(family, JumpDiffusion):
        return {
            "type": "jump_diffusion",
            "sigma": family.sigma,
            "mu": family.mu,
            "lambda": family.lam,
            "eta": family.eta,
        }
    return {
        "type": "compound_poisson_drift",
        "mu": family.mu,
        "lambda": family.lam,
        "eta": family.eta,
    }


def _report_skeleton(command, cfg, tolerances):
    return {
        "command": command,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "seed": cfg.seed,
        "config": cfg.echo,
        "family": _family_echo(cfg.family),
        "tolerances": tolerances,
    }


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    return value


def _dump_report(report):
    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


def _solve_tolerances():
    return {
        "root_xtol": ROOT_XTOL,
        "quad_tol_scale": QUAD_TOL,
        "pasting_smooth_band": SMOOTH_BAND,
        "pasting_continuous_band": CONTINUOUS_BAND,
    }


def cmd_solve(cfg):
    model = scale_model(cfg.family)
    solution = stopping.solve(model, curve_points=2)
    report = _report_skeleton("solve", cfg, _solve_tolerances())
    report["results"] = {
        "phi0": model.phi0,
        "median": solution.median,
        "y_star": solution.y_star,
        "value_at_zero": solution.value_at_zero,
        "expected_theta": solution.expected_theta,
        "objective": solution.objective,
        "pasting": solution.pasting,
    }
    return report


def _curve_grid(cfg, y_star):
    y_max = cfg.curve.y_max if cfg.curve.y_max is not None else 1.5 * y_star
    return np.linspace(0.0, y_max, cfg.curve.points)


def cmd_curve(cfg):
    """Value-curve samples as CSV rows plus a metadata report."""
    model = scale_model(cfg.family)
    y_star = solve_threshold(model)
    ys = _curve_grid(cfg, y_star)
    vs = [value_function(model, y_star, y) for y in ys]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["y", "V"])
    for y, v in zip(ys, vs):
        writer.writerow([repr(float(y)), repr(float(v))])
    report = _report_skeleton("curve", cfg, _solve_tolerances())
    report["results"] = {"y_star": y_star, "median": median(cfg.family), "points": len(ys)}
    return buf.getvalue(), report, (ys, np.asarray(vs), y_star)


def _verify_tolerances():
    return {
        **_solve_tolerances(),
        "se_multiple": SE_MULTIPLE,
        "ks_alpha": KS_ALPHA,
        "max_unclean_fraction": montecarlo.MAX_UNCLEAN_FRACTION,
    }


def _sweep_thresholds(offsets, y_star, med):
    ys = sorted({max(y_star + off, med) for off in offsets})
    return ys


def cmd_verify(cfg):
    """Monte Carlo check of the threshold rule against the analytic objective."""
    family = cfg.family
    model = scale_model(family)
    y_star = solve_threshold(model)
    med = median(family)
    objective_analytic = value_function(model, y_star, 0.0) + expected_theta(family)
    ys = _sweep_thresholds(cfg.verify.sweep_offsets, y_star, med)
    j_star = ys.index(y_star)
    sim = cfg.simulation
    exact = isinstance(family, CompoundPoissonDrift)
    pc = _path_config(sim, y_margin=max(ys))
    sweep = montecarlo.sweep_objective(family, ys, sim.n, pc, cfg.seed, workers=sim.workers)

    allowance = 0.0
    calibration = None
    if cfg.verify.calibrate_bias and not exact:
        fine = montecarlo.estimate_objective(
            family, y_star, sim.n, replace(pc, dt=pc.dt / 2.0), cfg.seed + 1, workers=sim.workers
        )
        coarse_mean = sweep.estimates[j_star].direct.mean
        bias_fine = montecarlo.sqrt_dt_allowance(coarse_mean, fine.direct.mean, ratio=2.0)
        # allowance for the coarse run itself: c*sqrt(dt) = bias_fine*sqrt(2)
        allowance = bias_fine * math.sqrt(2.0) + SE_MULTIPLE * fine.direct.stderr
        calibration = {
            "dt_fine": pc.dt / 2.0,
            "estimate_fine": fine.direct.mean,
            "stderr_fine": fine.direct.stderr,
            "allowance": allowance,
        }

    rows = []
    minimum_ok = True
    for j, est in enumerate(sweep.estimates):
        gap = sweep.paired_difference(j, j_star)
        if gap.mean < -SE_MULTIPLE * gap.stderr:
            minimum_ok = False
        rows.append(
            {
                "y": est.y,
                "direct_mean": est.direct.mean,
                "direct_stderr": est.direct.stderr,
                "repr_mean": est.representation.mean,
                "repr_stderr": est.representation.stderr,
                "gap_vs_ystar_mean": gap.mean,
                "gap_vs_ystar_stderr": gap.stderr,
            }
        )
    star = sweep.estimates[j_star].direct
    objective_ok = abs(star.mean - objective_analytic) <= SE_MULTIPLE * star.stderr + allowance

    ks_result = None
    ks_ok = None
    if cfg.verify.run_ks:
        ks_dt = cfg.verify.ks_dt
        if ks_dt is None:
            ks_dt = sim.dt if exact else sim.dt / 10.0
        fit = montecarlo.estimate_supremum_cdf(
            family, cfg.verify.ks_n, _path_config(sim, dt=ks_dt), cfg.seed + 2, workers=sim.workers
        )
        ks_ok = fit.ks_pvalue > KS_ALPHA
        ks_result = {
            "n": fit.n,
            "dt": ks_dt,
            "statistic": fit.ks_statistic,
            "pvalue": fit.ks_pvalue,
            "mass_at_zero": fit.mass_at_zero,
            "empirical_median": fit.empirical_median,
            "median_analytic": med,
            "pass": ks_ok,
        }

    occ_result = None
    occ_ok = None
    if cfg.verify.occupation is not None:
        occ_result = _occupation_comparison(cfg, cfg.verify.occupation, model, seed=cfg.seed + 3)
        occ_ok = occ_result["pass"]

    checks = {"minimum_at_y_star": minimum_ok, "objective_match": objective_ok}
    if ks_ok is not None:
        checks["ks"] = ks_ok
    if occ_ok is not None:
        checks["occupation"] = occ_ok
    report = _report_skeleton("verify", cfg, _verify_tolerances())
    report["results"] = {
        "y_star": y_star,
        "median": med,
        "objective_analytic": objective_analytic,
        "expected_theta": expected_theta(family),
        "bias_allowance": allowance,
        "calibration": calibration,
        "exact_simulation": exact,
        "n": sim.n,
        "n_discarded": sweep.n_discarded,
        "sweep": rows,
        "ks": ks_result,
        "occupation": occ_result,
        "checks": checks,
        "pass": all(checks.values()),
    }
    csv_text = _sweep_csv(rows)
    return report, csv_text, (ys, sweep, objective_analytic, y_star)


def _sweep_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [
        "y",
        "direct_mean",
        "direct_stderr",
        "repr_mean",
        "repr_stderr",
        "gap_vs_ystar_mean",
        "gap_vs_ystar_stderr",
    ]
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(row[k])) for k in header])
    return buf.getvalue()


def _occupation_comparison(cfg, occ, model, seed):
    family = cfg.family
    sim = cfg.simulation
    est = montecarlo.occupation_histogram(
        family,
        occ.y,
        occ.a,
        occ.bins,
        sim.n,
        _path_config(sim),
        seed,
        workers=sim.workers,
    )
    edges = est.bin_edges
    analytic = np.empty(occ.bins)
    # the density is evaluated strictly inside (0, a); it is continuous up to
    # both endpoints so the clip is harmless
    x_lo, x_hi = occ.a * 1e-13, occ.a * (1.0 - 1e-13)
    density = lambda x: potential_density(model, occ.y, min(max(x, x_lo), x_hi), occ.a)
    for i in range(occ.bins):
        analytic[i] = adaptive_simpson(density, edges[i], edges[i + 1], 1e-10)
    atom_analytic = potential_atom(model, occ.y, occ.a)
    exact = isinstance(family, CompoundPoissonDrift)
    allowance = np.zeros(occ.bins)
    if not exact:
        # grid occupation carries sqrt(dt) boundary-layer bias; calibrate a
        # per-bin allowance against a 4x coarser grid, where the bias doubles,
        # so the difference matches the residual bias of the finer run
        coarse = montecarlo.occupation_histogram(
            family,
            occ.y,
            occ.a,
            occ.bins,
            sim.n,
            _path_config(sim, dt=4.0 * sim.dt),
            seed + 1,
            workers=sim.workers,
        )
        allowance = np.abs(coarse.bin_means - est.bin_means) + SE_MULTIPLE * np.sqrt(
            coarse.bin_stderrs**2 + est.bin_stderrs**2
        )
    bins_ok = bool(
        np.all(
            np.abs(est.bin_means - analytic)
            <= SE_MULTIPLE * np.maximum(est.bin_stderrs, 1e-15) + allowance
        )
    )
    atom_ok = abs(est.atom.mean - atom_analytic) <= SE_MULTIPLE * max(est.atom.stderr, 1e-15)
    occupation_total = float(est.bin_means.sum() + est.atom.mean)
    return {
        "y": occ.y,
        "a": occ.a,
        "bins": occ.bins,
        "n": est.n,
        "n_discarded": est.n_discarded,
        "exact_simulation": exact,
        "bin_edges": edges,
        "mc_means": est.bin_means,
        "mc_stderrs": est.bin_stderrs,
        "analytic": analytic,
        "bin_allowance": allowance,
        "atom_mc_mean": est.atom.mean,
        "atom_mc_stderr": est.atom.stderr,
        "atom_analytic": atom_analytic,
        "mean_passage_time": est.passage_time.mean,
        "occupation_total": occupation_total,
        "bins_pass": bins_ok,
        "atom_pass": atom_ok,
        "pass": bins_ok and atom_ok,
    }


def _occupation_csv(result):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["bin_lo", "bin_hi", "mc_mean", "mc_stderr", "analytic"])
    edges = result["bin_edges"]
    for i in range(len(result["mc_means"])):
        writer.writerow(
            [
                repr(float(edges[i])),
                repr(float(edges[i + 1])),
                repr(float(result["mc_means"][i])),
                repr(float(result["mc_stderrs"][i])),
                repr(float(result["analytic"][i])),
            ]
        )
    return buf.getvalue()


def cmd_occupation(cfg):
    if cfg.occupation is None:
        raise ConfigError("missing key 'occupation' (required by the occupation command)")
    model = scale_model(cfg.family)
    result = _occupation_comparison(cfg, cfg.occupation, model, seed=cfg.seed)
    report = _report_skeleton("occupation", cfg, _verify_tolerances())
    report["results"] = result
    return report, _occupation_csv(result), result


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ultimum",
        description=(
            "Optimal L1 prediction of the time a spectrally negative Levy process "
            "attains its ultimate supremum: analytic threshold solver and Monte "
            "Carlo verification."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("solve", "threshold y*, value at 0, objective and pasting class (JSON)"),
        ("curve", "value-function samples (CSV)"),
        ("verify", "Monte Carlo verification report (JSON + CSV sweep table)"),
        ("occupation", "occupation-time histogram against the potential density"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON configuration")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--plot", action="store_true",
                       help="also render a figure next to the data file (needs --out)")
    return parser


def _run(args):
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        if args.seed < 0:
            print("error: --seed must be >= 0", file=sys.stderr)
            return 2
        echo = dict(cfg.echo)
        echo["seed"] = args.seed
        cfg = replace(cfg, seed=args.seed, echo=echo)

    try:
        if args.command == "solve":
            report = cmd_solve(cfg)
            payload = _dump_report(report)
            if args.out:
                _write_text(args.out, payload)
            else:
                sys.stdout.write(payload)
        elif args.command == "curve":
            csv_text, report, (ys, vs, y_star) = cmd_curve(cfg)
            if args.out:
                _write_text(args.out, csv_text)
                _write_text(_sidecar(args.out, ".meta.json"), _dump_report(report))
                if args.plot:
                    from .plots import render_curve

                    render_curve(ys, vs, y_star, report["results"]["median"],
                                 _sidecar(args.out, ".png"))
            else:
                sys.stdout.write(csv_text)
        elif args.command == "verify":
            report, csv_text, (ys, sweep, obj_analytic, y_star) = cmd_verify(cfg)
            payload = _dump_report(report)
            if args.out:
                _write_text(args.out, payload)
                _write_text(_sidecar(args.out, ".sweep.csv"), csv_text)
                if args.plot:
                    from .plots import render_sweep

                    render_sweep(
                        ys,
                        [e.direct.mean for e in sweep.estimates],
                        [e.direct.stderr for e in sweep.estimates],
                        obj_analytic,
                        y_star,
                        _sidecar(args.out, ".png"),
                    )
            else:
                sys.stdout.write(payload)
        elif args.command == "occupation":
            report, csv_text, result = cmd_occupation(cfg)
            payload = _dump_report(report)
            if args.out:
                _write_text(args.out, payload)
                _write_text(_sidecar(args.out, ".bins.csv"), csv_text)
                if args.plot:
                    from .plots import render_occupation

                    render_occupation(
                        np.asarray(result["bin_edges"]),
                        np.asarray(result["mc_means"]),
                        np.asarray(result["mc_stderrs"]),
                        np.asarray(result["analytic"]),
                        _sidecar(args.out, ".png"),
                    )
            else:
                sys.stdout.write(payload)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateDriftError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationQualityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return 3
    return 0


def _sidecar(out_path, suffix):
    stem = out_path
    for known in (".csv", ".json"):
        if stem.endswith(known):
            stem = stem[: -len(known)]
            break
    return stem + suffix


def main(argv=None):
    args = build_parser().parse_args(argv)
    return _run(args)


if __name__ == "__main__":
    sys.exit(main())
