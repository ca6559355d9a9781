"""Batch command-line front end.

Subcommands:

* ``gen-env``        generate an environment container from a config
* ``maps``           emit outage-capacity or localization-bound maps as CSV
* ``calibrate-eval`` calibrate a scheme to the confidence target and
                     evaluate meta-probability and throughput per point
* ``rayleigh``       closed-form 1-D scenario tables (no environment needed)
* ``analyze``        coherence radii, extrema, and correlation fits

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 corrupt
input, 5 infeasible calibration.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, analysis, container, rateselect, rayleigh
from .container import ContainerCorrupt
from .core import SystemConfig, std_normal_quantile
from .environment import (EnvConfig, TAG_META, TAG_THROUGHPUT, derive_rng,
                          generate_environment, outage_capacity_map,
                          point_capacity_samples)
from .localization import (LocalizationModel, constant_localization_model,
                           crlb_localization_model)
from .rateselect import EvaluationReport, InfeasibleCalibration
from .rayleigh import InfeasibleBackoff, LocStd1D, PathLossParams
from .schemes import Backoff, Interval

OUTPUT_ROOT_ENV = "LOCRATE_OUT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_CORRUPT = 4
EXIT_INFEASIBLE = 5


class ConfigError(ValueError):
    """Invalid or incomplete run configuration."""


_REQUIRED = object()

# full schema with defaults; _REQUIRED entries must be present in the config
_SCHEMA = {
    "seed": 1,
    "system": {
        "bandwidth_hz": 100e6,
        "subcarrier_count": 51,
        "tx_snr_db": 0.0,
        "carrier_frequency_hz": 3.6e9,
        "reliability_target": 1e-3,
        "confidence": 0.05,
    },
    "grid": {
        "cell": [0.0, 96.0, 0.0, 96.0],
        "spacing": _REQUIRED,
        "margin": 22.0,
    },
    "channel": {
        "bs_positions": [[48.0, 48.0, 10.0]],
        "ue_height": 1.5,
        "path_count": 10,
        "path_loss_exponent": 2.0,
        "path_gain_db": 0.0,
        "shadow_std_db": 3.0,
        "shadow_decorr_m": 20.0,
        "mean_excess_delay_s": 30e-9,
        "delay_decorr_m": 10.0,
        "pdp_decay_s": 40e-9,
    },
    "localization": {
        "mode": "constant",
        "sigma2": 12.5,
        "m_draws": 200,
    },
    "scheme": {
        "family": "interval",
        "delta": 0.05,
    },
    "evaluation": {
        "bs_index": 0,
        "capacity_samples": 10000,
        "meta_method": "cellsum",
        "meta_draws": 100000,
        "throughput_draws": 10000,
    },
    "rayleigh": {
        "gamma0_db": 30.0,
        "g0_db": 0.0,
        "exponent": 2.0,
        "eps": 1e-5,
        "cell": [20.0, 100.0],
        "sigma_intercept": 4.0,
        "sigma_slope": 0.0,
        "delta": 1e-3,
        "n_points": 81,
    },
    "analysis": {
        "coherence_t": 0.9,
        "coherence_stride": 1,
        "extrema_neighborhood_m": 5.0,
        "extrema_prominence_rel": 0.05,
    },
}

_PROFILES = {
    "desk": {
        "grid": {"cell": [0.0, 96.0, 0.0, 96.0], "spacing": 4.0, "margin": 22.0},
        "evaluation": {"capacity_samples": 10000},
    },
    "paper": {
        "grid": {"cell": [0.0, 100.0, 0.0, 100.0], "spacing": 1.0, "margin": 22.0},
        "evaluation": {"capacity_samples": 1000000},
    },
}


def _merge(schema: dict, given: dict, path: str = "") -> dict:
    out = {}
    for key, value in given.items():
        if key not in schema:
            raise ConfigError(f"unknown config key '{path}{key}'")
    for key, default in schema.items():
        dotted = f"{path}{key}"
        if isinstance(default, dict):
            sub = given.get(key, {})
            if not isinstance(sub, dict):
                raise ConfigError(f"config key '{dotted}' must be an object")
            out[key] = _merge(default, sub, dotted + ".")
        elif key in given:
            out[key] = given[key]
        elif default is _REQUIRED:
            raise ConfigError(f"missing required config key '{dotted}'")
        else:
            out[key] = copy.deepcopy(default)
    return out


def load_run_config(path: str | None, profile: str | None,
                    seed_override: int | None) -> dict:
    given: dict = {}
    if path is not None:
        try:
            raw = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            given = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(given, dict):
            raise ConfigError("config root must be a JSON object")
    if profile is not None:
        overlay = _PROFILES[profile]
        for section, values in overlay.items():
            given.setdefault(section, {})
            for key, value in values.items():
                given[section].setdefault(key, value)
    cfg = _merge(_SCHEMA, given)
    if seed_override is not None:
        cfg["seed"] = seed_override
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    if cfg["localization"]["mode"] not in ("constant", "crlb"):
        raise ConfigError("localization.mode must be 'constant' or 'crlb'")
    if cfg["scheme"]["family"] not in ("backoff", "interval", "distance"):
        raise ConfigError("scheme.family must be backoff, interval, or distance")
    if not 0.0 < cfg["scheme"]["delta"] < 1.0:
        raise ConfigError("scheme.delta must lie in (0, 1)")
    if cfg["evaluation"]["meta_method"] not in ("cellsum", "montecarlo"):
        raise ConfigError("evaluation.meta_method must be cellsum or montecarlo")
    if len(cfg["grid"]["cell"]) != 4:
        raise ConfigError("grid.cell must have 4 entries [x_lo, x_hi, y_lo, y_hi]")


def system_config(cfg: dict) -> SystemConfig:
    s = cfg["system"]
    return SystemConfig(
        bandwidth_hz=float(s["bandwidth_hz"]),
        subcarrier_count=int(s["subcarrier_count"]),
        tx_snr=10.0 ** (float(s["tx_snr_db"]) / 10.0),
        carrier_frequency_hz=float(s["carrier_frequency_hz"]),
        reliability_target=float(s["reliability_target"]),
        confidence=float(s["confidence"]),
    )


def env_config(cfg: dict) -> EnvConfig:
    g, c = cfg["grid"], cfg["channel"]
    return EnvConfig(
        cell=tuple(float(v) for v in g["cell"]),
        spacing_m=float(g["spacing"]),
        margin_m=float(g["margin"]),
        bs_positions=tuple(tuple(float(v) for v in bs) for bs in c["bs_positions"]),
        ue_height_m=float(c["ue_height"]),
        path_count=int(c["path_count"]),
        path_loss_exponent=float(c["path_loss_exponent"]),
        path_gain=10.0 ** (float(c["path_gain_db"]) / 10.0),
        shadow_std_db=float(c["shadow_std_db"]),
        shadow_decorr_m=float(c["shadow_decorr_m"]),
        mean_excess_delay_s=float(c["mean_excess_delay_s"]),
        delay_decorr_m=float(c["delay_decorr_m"]),
        pdp_decay_s=float(c["pdp_decay_s"]),
        seed=int(cfg["seed"]),
    )


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Manifest:
    """Per-run reproducibility record: config echo, runtimes, file digests."""

    def __init__(self, command: str, cfg: dict | None):
        self.data = {
            "command": command,
            "version": __version__,
            "config": _jsonable(cfg) if cfg is not None else None,
            "seed": cfg["seed"] if cfg else None,
            "stages": {},
            "outputs": {},
            "warnings": [],
        }
        self._t0 = time.perf_counter()

    def stage(self, name: str) -> "_Stage":
        return _Stage(self, name)

    def warn(self, message: str) -> None:
        self.data["warnings"].append(message)

    def add_output(self, path: Path) -> None:
        self.data["outputs"][path.name] = _sha256(path)

    def write(self, out_dir: Path) -> Path:
        self.data["total_runtime_s"] = time.perf_counter() - self._t0
        path = out_dir / "manifest.json"
        container.write_json(path, self.data)
        return path


class _Stage:
    def __init__(self, manifest: Manifest, name: str):
        self.manifest = manifest
        self.name = name

    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.manifest.data["stages"][self.name] = time.perf_counter() - self._t0
        return False


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _read_csv(path) -> np.ndarray:
    """Read one of our CSVs (one '#' comment line, then a header row)."""
    return np.genfromtxt(path, delimiter=",", names=True, skip_header=1)


def _out_dir(args) -> Path:
    root = args.out or os.environ.get(OUTPUT_ROOT_ENV) or "."
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _set_threads(n: int | None) -> None:
    if n is None:
        return
    if n < 1:
        raise ConfigError("--threads must be a positive integer")
    try:
        import numba

        # cap at the threads numba reserved at startup; results are
        # deterministic for any thread count, so clamping is safe
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    except ImportError:
        pass


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_gen_env(args) -> int:
    cfg = load_run_config(args.config, args.profile, args.seed)
    out = _out_dir(args)
    manifest = Manifest("gen-env", cfg)
    if cfg["grid"]["margin"] == 0 and cfg["localization"]["mode"] == "crlb":
        manifest.warn("margin 0 with crlb localization: padding sufficiency "
                      "is checked at evaluation time")
    with manifest.stage("generate"):
        env = generate_environment(env_config(cfg))
    env_path = out / "environment.bin"
    with manifest.stage("write"):
        container.save_environment(env_path, env)
    manifest.add_output(env_path)
    manifest.add_output(Path(str(env_path) + ".json"))
    manifest.write(out)
    print(f"environment written to {env_path}")
    return EXIT_OK


def cmd_maps(args) -> int:
    cfg = load_run_config(args.config, args.profile, args.seed)
    out = _out_dir(args)
    manifest = Manifest("maps", cfg)
    env = container.load_environment(args.env)
    sys_cfg = system_config(cfg)
    ev = cfg["evaluation"]
    outputs = []
    if args.which in ("capacity", "both"):
        with manifest.stage("capacity_map"):
            cmap = outage_capacity_map(env, int(ev["bs_index"]),
                                       sys_cfg.reliability_target,
                                       int(ev["capacity_samples"]), sys_cfg)
        bin_path = out / "capacity.bin"
        csv_path = out / "capacity.csv"
        container.save_capacity_map(bin_path, cmap, env.seed)
        container.write_capacity_csv(csv_path, cmap, env.seed)
        outputs += [bin_path, csv_path, Path(str(bin_path) + ".json")]
    if args.which in ("peb", "both"):
        loc = cfg["localization"]
        with manifest.stage("peb_map"):
            model = _localization_model(cfg, env, sys_cfg)
        csv_path = out / "peb.csv"
        container.write_peb_csv(csv_path, env.grid, model.cov, model.peb,
                                int(loc["m_draws"]), env.seed)
        outputs.append(csv_path)
    for path in outputs:
        manifest.add_output(path)
    manifest.write(out)
    print(f"maps written to {out}")
    return EXIT_OK


def _localization_model(cfg: dict, env, sys_cfg: SystemConfig) -> LocalizationModel:
    loc = cfg["localization"]
    if loc["mode"] == "constant":
        return constant_localization_model(env.grid, float(loc["sigma2"]))
    return crlb_localization_model(env, sys_cfg, int(loc["m_draws"]))


def cmd_calibrate_eval(args) -> int:
    cfg = load_run_config(args.config, args.profile, args.seed)
    out = _out_dir(args)
    manifest = Manifest("calibrate-eval", cfg)
    env = container.load_environment(args.env)
    sys_cfg = system_config(cfg)
    ev = cfg["evaluation"]
    bs_index = int(ev["bs_index"])

    cap_path = out / "capacity.bin"
    if cap_path.exists():
        cmap = container.load_capacity_map(cap_path)
    else:
        with manifest.stage("capacity_map"):
            cmap = outage_capacity_map(env, bs_index, sys_cfg.reliability_target,
                                       int(ev["capacity_samples"]), sys_cfg)
        container.save_capacity_map(cap_path, cmap, env.seed)
        manifest.add_output(cap_path)
        manifest.add_output(Path(str(cap_path) + ".json"))

    with manifest.stage("localization_model"):
        model = _localization_model(cfg, env, sys_cfg)

    family = cfg["scheme"]["family"]
    delta = float(cfg["scheme"]["delta"])
    with manifest.stage("calibrate"):
        result = rateselect.calibrate_scheme(
            family, delta, cmap, model, method=ev["meta_method"],
            mc_draws=int(ev["meta_draws"]), seed=int(cfg["seed"]))

    with manifest.stage("evaluate"):
        report = evaluate_scheme(env, bs_index, sys_cfg, cmap, result.scheme,
                                 model, delta,
                                 meta_method=ev["meta_method"],
                                 meta_draws=int(ev["meta_draws"]),
                                 throughput_draws=int(ev["throughput_draws"]),
                                 capacity_samples=int(ev["capacity_samples"]))

    report_path = out / "report.csv"
    summary_path = out / "summary.json"
    container.write_report_csv(
        report_path, report.points, report.meta, report.throughput,
        f"scheme={family} parameter={rateselect._scheme_parameter(result.scheme)!r} "
        f"delta={delta!r} seed={env.seed}")
    summary = report.summary()
    summary.update({
        "seed": env.seed,
        "eps": sys_cfg.reliability_target,
        "method": ev["meta_method"],
        "calibration_max_meta": result.max_meta,
        "calibration_argmax_location": list(result.argmax_location),
        "calibration_evaluations": result.evaluations,
    })
    container.write_json(summary_path, _jsonable(summary))
    manifest.add_output(report_path)
    manifest.add_output(summary_path)
    manifest.write(out)
    print(f"calibrated {family}: parameter="
          f"{rateselect._scheme_parameter(result.scheme):.6g}, "
          f"max meta={result.max_meta:.3g} (delta={delta})")
    return EXIT_OK


def evaluate_scheme(env, bs_index: int, sys_cfg: SystemConfig, cmap,
                    scheme, model, delta: float, meta_method: str = "cellsum",
                    meta_draws: int = 100000, throughput_draws: int = 10000,
                    capacity_samples: int = 10000) -> EvaluationReport:
    """Meta-probability and throughput ratio at every in-cell grid point."""
    grid = env.grid
    in_cell = grid.in_cell_mask().ravel()
    indices = np.flatnonzero(in_cell)
    pts = grid.points()[indices]
    meta = np.empty(len(indices))
    thr = np.empty(len(indices))
    rates = rateselect.rate_map(scheme, cmap, model)
    for row, idx in enumerate(indices):
        xy = pts[row]
        if meta_method == "cellsum":
            meta[row] = rateselect.meta_probability(xy, scheme, cmap, model,
                                                    method="cellsum", _rates=rates)
        else:
            meta[row] = rateselect.meta_probability(
                xy, scheme, cmap, model, method="montecarlo",
                mc_draws=meta_draws, rng=derive_rng(env.seed, TAG_META, int(idx)))
        samples = point_capacity_samples(env, bs_index, int(idx),
                                         capacity_samples, sys_cfg)
        thr[row] = rateselect.throughput_ratio(
            xy, scheme, cmap, samples, model, throughput_draws,
            derive_rng(env.seed, TAG_THROUGHPUT, int(idx)))
    return EvaluationReport(grid=grid, points=pts, meta=meta, throughput=thr,
                            scheme=scheme, delta=delta,
                            metadata={"meta_method": meta_method})


def cmd_rayleigh(args) -> int:
    cfg = load_run_config(args.config, args.profile, args.seed)
    out = _out_dir(args)
    manifest = Manifest("rayleigh", cfg)
    r = cfg["rayleigh"]
    p = PathLossParams(gain=10.0 ** (float(r["g0_db"]) / 10.0),
                       exponent=float(r["exponent"]),
                       tx_snr=10.0 ** (float(r["gamma0_db"]) / 10.0),
                       cell=(float(r["cell"][0]), float(r["cell"][1])))
    sigma = LocStd1D(float(r["sigma_intercept"]), float(r["sigma_slope"]))
    eps = float(r["eps"])
    delta = float(r["delta"])
    with manifest.stage("tables"):
        beta = rayleigh.calibrate_backoff_1d(delta, sigma, p)
        q = std_normal_quantile(1.0 - delta)
        xs = np.linspace(p.cell[0], p.cell[1], int(r["n_points"]))
        c_eps = rayleigh.outage_capacity_1d(xs, eps, p)
        meta_b = rayleigh.backoff_meta_1d(xs, beta, sigma(xs), p.exponent)
        meta_i = np.full_like(xs, rayleigh.interval_meta_1d(q))
        thr_b = np.array([rayleigh.throughput_ratio_1d(
            float(x), Backoff(beta), float(sigma(x)), eps, p) for x in xs])
        thr_i = np.array([rayleigh.throughput_ratio_1d(
            float(x), Interval(q), float(sigma(x)), eps, p) for x in xs])
    csv_path = out / "rayleigh.csv"
    container.write_csv(
        csv_path,
        f"eps={eps!r} delta={delta!r} beta={beta!r} q={q!r}",
        ["x", "c_eps", "meta_backoff", "meta_interval",
         "throughput_backoff", "throughput_interval"],
        [xs, np.asarray(c_eps), np.asarray(meta_b), meta_i, thr_b, thr_i])
    summary_path = out / "rayleigh.json"
    container.write_json(summary_path, {
        "beta": beta, "q": q, "delta": delta, "eps": eps,
        "cell": [p.cell[0], p.cell[1]],
        "max_meta_backoff": float(np.max(meta_b)),
        "meta_interval": float(meta_i[0]),
    })
    manifest.add_output(csv_path)
    manifest.add_output(summary_path)
    manifest.write(out)
    print(f"1-D tables written to {csv_path} (beta={beta:.6g}, q={q:.6g})")
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = load_run_config(args.config, args.profile, args.seed)
    out = _out_dir(args)
    manifest = Manifest("analyze", cfg)
    cmap = container.load_capacity_map(args.capacity)
    an = cfg["analysis"]
    outputs = []

    with manifest.stage("extrema"):
        extrema = analysis.detect_extrema(
            cmap, float(an["extrema_neighborhood_m"]),
            float(an["extrema_prominence_rel"]))
    ext_path = out / "extrema.csv"
    kinds = np.array([1.0] * len(extrema.peaks) + [-1.0] * len(extrema.valleys))
    locs = np.vstack([extrema.peaks.reshape(-1, 2),
                      extrema.valleys.reshape(-1, 2)])
    container.write_csv(
        ext_path,
        f"neighborhood_m={extrema.neighborhood_m!r} "
        f"prominence_rel={extrema.prominence_rel!r} (kind: 1 peak, -1 valley)",
        ["x", "y", "kind"],
        [locs[:, 0], locs[:, 1], kinds] if len(locs) else
        [np.empty(0), np.empty(0), np.empty(0)])
    outputs.append(ext_path)

    with manifest.stage("coherence"):
        grid = cmap.grid
        in_cell = grid.in_cell_mask().ravel()
        stride = max(1, int(an["coherence_stride"]))
        indices = np.flatnonzero(in_cell)[::stride]
        pts = grid.points()[indices]
        t = float(an["coherence_t"])
        radii = np.empty(len(indices))
        for row, xy in enumerate(pts):
            try:
                radii[row] = analysis.coherence_radius_2d(cmap, xy, t)
            except analysis.CoherenceExceedsMap:
                radii[row] = np.nan
    cr_path = out / "coherence.csv"
    container.write_csv(cr_path, f"t={t!r} stride={stride} (nan: exceeds map)",
                        ["x", "y", "cr"], [pts[:, 0], pts[:, 1], radii])
    outputs.append(cr_path)

    correlations = {}

    def add_corr(name, a, b):
        try:
            rho, slope, intercept = analysis.pearson_and_fit(a, b)
        except (analysis.UndefinedCorrelation, ValueError) as exc:
            manifest.warn(f"correlation {name} skipped: {exc}")
            return
        correlations[name] = {"rho": rho, "slope": slope,
                              "intercept": intercept}

    if args.peb:
        peb_tab = _read_csv(args.peb)
        finite = np.isfinite(radii)
        if finite.sum() >= 3:
            add_corr("cr_vs_peb", peb_tab["peb"][indices][finite],
                     radii[finite])
        add_corr("c_eps_vs_peb", peb_tab["peb"][indices],
                 cmap.values.ravel()[indices])
    if args.report:
        rep = _read_csv(args.report)
        if args.peb:
            peb_tab = _read_csv(args.peb)
            add_corr("throughput_vs_peb",
                     peb_tab["peb"][np.flatnonzero(in_cell)],
                     rep["throughput"])
    if correlations:
        corr_path = out / "correlations.json"
        container.write_json(corr_path, correlations)
        outputs.append(corr_path)

    for path in outputs:
        manifest.add_output(path)
    manifest.write(out)
    print(f"analysis written to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locrate",
        description="Rate selection under localization uncertainty: "
                    "environment generation, maps, calibration, evaluation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", default=None, help="JSON run config")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
        sp.add_argument("--out", default=None,
                        help=f"output directory (default ${OUTPUT_ROOT_ENV} or .)")
        sp.add_argument("--threads", type=int, default=None,
                        help="compute thread cap")
        sp.add_argument("--profile", choices=sorted(_PROFILES), default=None,
                        help="preset scale profile")

    sp = sub.add_parser("gen-env", help="generate an environment container")
    common(sp)
    sp.set_defaults(func=cmd_gen_env)

    sp = sub.add_parser("maps", help="emit capacity/PEB maps as CSV")
    common(sp)
    sp.add_argument("--env", required=True, help="environment container path")
    sp.add_argument("--which", choices=["capacity", "peb", "both"],
                    default="both")
    sp.set_defaults(func=cmd_maps)

    sp = sub.add_parser("calibrate-eval",
                        help="calibrate a scheme and evaluate it per point")
    common(sp)
    sp.add_argument("--env", required=True, help="environment container path")
    sp.set_defaults(func=cmd_calibrate_eval)

    sp = sub.add_parser("rayleigh", help="closed-form 1-D scenario tables")
    common(sp)
    sp.set_defaults(func=cmd_rayleigh)

    sp = sub.add_parser("analyze",
                        help="coherence radii, extrema, correlations")
    common(sp)
    sp.add_argument("--capacity", required=True,
                    help="capacity-map container path")
    sp.add_argument("--peb", default=None, help="PEB CSV path")
    sp.add_argument("--report", default=None, help="evaluation report CSV path")
    sp.set_defaults(func=cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _set_threads(args.threads)
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ContainerCorrupt as exc:
        print(f"corrupt input: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except (InfeasibleCalibration, InfeasibleBackoff) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
