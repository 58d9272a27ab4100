"""Command line front end: configs, sweeps, engine comparison, scene dumps.

Config files are JSON in the units of the model tables (per km^2, per km,
dB); conversion to SI happens once, in ``ModelConfig.to_params``.

    riscov analytic --config configs/defaults.json
    riscov compare --trials 200000 --set ris_per_km=8
    riscov sweep --config configs/ris_density_nr16.json --out out/nr16.csv
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import analytic, montecarlo
from .analytic import AnalyticOptions
from .geometry import sample_scenario, write_scene
from .montecarlo import SimConfig
from .params import (
    PARAM_FIELDS, PER_KM, PER_KM2, LinkBudget, NetworkParams, ParameterError,
    gamma_from_budget, to_linear, validate,
)
from .quadrature import QuadratureError
from .rng import Stream

log = logging.getLogger("riscov")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_COMPARE = 0, 2, 3, 4
FORMATS = ("csv", "jsonl")
VARIANT_CHOICES = ("paper", "consistent", "both")
MIN_COMPARE_TRIALS = 10_000


@dataclass(frozen=True)
class ModelConfig:
    """Model parameters in table units."""

    bs_per_km2: float = 40.0
    road_km_per_km2: float = 2.0
    ris_per_km: float = 4.0
    vehicle_per_km: float = 25.0
    handset_per_km2: float = 200.0
    alpha_road: float = 2.4
    alpha_urban: float = 3.7
    eta_road_m: float = 48.0
    eta_urban_m: float = 36.0
    tau_db: float = 0.0
    gamma_db: float | None = None
    link_budget: LinkBudget | None = None
    n_ris_elements: int = 64

    def gamma(self):
        if self.gamma_db is not None:
            return to_linear(self.gamma_db)
        if self.link_budget is not None:
            return gamma_from_budget(self.link_budget)
        return to_linear(97.0)

    def to_params(self) -> NetworkParams:
        return validate(NetworkParams(
            lambda_bs=self.bs_per_km2 * PER_KM2,
            lambda_l=self.road_km_per_km2 * PER_KM,
            mu=self.ris_per_km * PER_KM,
            nu=self.vehicle_per_km * PER_KM,
            lambda_2=self.handset_per_km2 * PER_KM2,
            alpha_1=self.alpha_road,
            alpha_2=self.alpha_urban,
            eta_1=self.eta_road_m,
            eta_2=self.eta_urban_m,
            tau=to_linear(self.tau_db),
            gamma=self.gamma(),
            n_r=self.n_ris_elements,
        ))


MODEL_KEYS = tuple(f.name for f in fields(ModelConfig))
BUDGET_KEYS = tuple(f.name for f in fields(LinkBudget))

# sweepable config keys -> (NetworkParams field, conversion to SI)
_SWEEP_KEYS = {
    "bs_per_km2": ("lambda_bs", lambda v: v * PER_KM2),
    "road_km_per_km2": ("lambda_l", lambda v: v * PER_KM),
    "ris_per_km": ("mu", lambda v: v * PER_KM),
    "vehicle_per_km": ("nu", lambda v: v * PER_KM),
    "handset_per_km2": ("lambda_2", lambda v: v * PER_KM2),
    "alpha_road": ("alpha_1", float),
    "alpha_urban": ("alpha_2", float),
    "eta_road_m": ("eta_1", float),
    "eta_urban_m": ("eta_2", float),
    "tau_db": ("tau", to_linear),
    "gamma_db": ("gamma", to_linear),
    "n_ris_elements": ("n_r", int),
}


@dataclass(frozen=True)
class Sweep:
    param: str
    values: tuple
    param2: str | None = None
    values2: tuple | None = None

    def grid(self):
        if self.param2 is None or not self.values2:
            return [(v, None) for v in self.values]
        return [(v, w) for v in self.values for w in self.values2]


@dataclass(frozen=True)
class Output:
    path: str | None = None
    format: str = "csv"


@dataclass(frozen=True)
class RunSpec:
    model: ModelConfig = field(default_factory=ModelConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    analytic: AnalyticOptions = field(default_factory=AnalyticOptions)
    variant: str = "both"
    sweep: Sweep | None = None
    output: Output = field(default_factory=Output)

    @property
    def params(self) -> NetworkParams:
        return self.model.to_params()

    def variants(self):
        return ("paper", "consistent") if self.variant == "both" else (self.variant,)

    def options(self, variant):
        return self.analytic.with_variant(variant)


# --- config parsing -----------------------------------------------------------


def _unknown(keys, allowed, where):
    bad = sorted(set(keys) - set(allowed))
    return [f"unknown key {where}{k!r}" for k in bad]


def _section(raw, name, cls):
    """Build a dataclass from a JSON object, collecting problems."""
    data = raw.get(name, {})
    if not isinstance(data, dict):
        return None, [f"{name} must be an object"]
    allowed = [f.name for f in fields(cls)]
    problems = _unknown(data, allowed, f"{name}.")
    if problems:
        return None, problems
    try:
        return cls(**data), []
    except (TypeError, ValueError) as exc:
        return None, [f"{name}: {exc}"]


def _number(value, name, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError([f"{name} must be a number"])
    if integer:
        if int(value) != value:
            raise ParameterError([f"{name} must be an integer"])
        return int(value)
    return float(value)


def _check_sweep_name(name):
    if name in _SWEEP_KEYS or name in PARAM_FIELDS:
        return []
    return [f"sweep parameter {name!r} is not a model parameter"]


def spec_from_dict(raw: dict) -> RunSpec:
    """RunSpec from a decoded config document (table units)."""
    if not isinstance(raw, dict):
        raise ParameterError(["config must be a JSON object"])
    top = set(MODEL_KEYS) | {"sim", "analytic", "sweep", "output"}
    problems = _unknown(raw, top, "")
    model_kw = {}
    for key in MODEL_KEYS:
        if key not in raw or key == "link_budget":
            continue
        try:
            model_kw[key] = _number(raw[key], key, integer=key == "n_ris_elements")
        except ParameterError as exc:
            problems += exc.problems
    if "link_budget" in raw:
        budget, extra = _section(raw, "link_budget", LinkBudget)
        problems += extra
        if budget is not None:
            model_kw["link_budget"] = budget
            if "gamma_db" in raw:
                log.warning("gamma_db and link_budget both given; using gamma_db")
    sim, extra = _section(raw, "sim", SimConfig)
    problems += extra

    ana = raw.get("analytic", {})
    variant = "both"
    if isinstance(ana, dict) and "variant" in ana:
        variant = ana["variant"]
        if variant not in VARIANT_CHOICES:
            problems.append(f"analytic.variant must be one of {VARIANT_CHOICES}")
        ana = {k: v for k, v in ana.items() if k != "variant"}
    opts, extra = _section({"analytic": ana}, "analytic", AnalyticOptions)
    problems += extra

    sweep = None
    if raw.get("sweep") is not None:
        s = raw["sweep"]
        if not isinstance(s, dict):
            problems.append("sweep must be an object")
        else:
            problems += _unknown(s, ("param", "values", "param2", "values2"), "sweep.")
            if "param" not in s or not s.get("values"):
                problems.append("sweep needs param and a non-empty values list")
            else:
                problems += _check_sweep_name(s["param"])
                if s.get("param2") is not None:
                    problems += _check_sweep_name(s["param2"])
                sweep = Sweep(
                    s["param"], tuple(s["values"]), s.get("param2"),
                    tuple(s["values2"]) if s.get("values2") is not None else None,
                )

    out, extra = _section(raw, "output", Output)
    problems += extra
    if out is not None and out.format not in FORMATS:
        problems.append(f"output.format must be one of {FORMATS}")

    if problems:
        raise ParameterError(problems)
    model = ModelConfig(**model_kw)
    model.to_params()
    spec = RunSpec(model, sim, opts, variant, sweep, out)
    if sweep is not None:
        sweep_points(spec)  # every grid point must be valid
    return spec


def load_config(path, overrides=()) -> RunSpec:
    """Read a JSON config; ``overrides`` are ``key=value`` strings (dotted keys)."""
    raw = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ParameterError([f"cannot read config: {exc}"]) from exc
        except json.JSONDecodeError as exc:
            raise ParameterError([f"config is not valid JSON: {exc}"]) from exc
    for item in overrides:
        apply_override(raw, item)
    return spec_from_dict(raw)


def apply_override(raw: dict, item: str):
    if "=" not in item:
        raise ParameterError([f"override {item!r} is not key=value"])
    key, text = item.split("=", 1)
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    node = raw
    parts = key.strip().split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ParameterError([f"override {key!r} descends into a non-object"])
    node[parts[-1]] = value


def spec_to_dict(spec: RunSpec) -> dict:
    out = {}
    for key in MODEL_KEYS:
        value = getattr(spec.model, key)
        if value is None:
            continue
        out[key] = asdict(value) if key == "link_budget" else value
    out["sim"] = asdict(spec.sim)
    ana = asdict(spec.analytic)
    ana["variant"] = spec.variant
    out["analytic"] = ana
    if spec.sweep is not None:
        s = {"param": spec.sweep.param, "values": list(spec.sweep.values)}
        if spec.sweep.param2 is not None:
            s["param2"] = spec.sweep.param2
            s["values2"] = list(spec.sweep.values2 or ())
        out["sweep"] = s
    out["output"] = asdict(spec.output)
    return out


def write_config(spec: RunSpec, path=None) -> str:
    text = json.dumps(spec_to_dict(spec), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


# --- evaluation ----------------------------------------------------------------


def _apply_point(params: NetworkParams, name, value):
    if name in _SWEEP_KEYS:
        attr, conv = _SWEEP_KEYS[name]
        return params.replace(**{attr: conv(value)})
    if name == "n_r":
        value = int(value)
    return params.replace(**{name: value})


def sweep_points(spec: RunSpec):
    """[(value, value2, params)] in grid order; validates every point."""
    base = spec.params
    points = []
    for v, w in spec.sweep.grid():
        try:
            p = _apply_point(base, spec.sweep.param, v)
            if w is not None:
                p = _apply_point(p, spec.sweep.param2, w)
            validate(p)
        except (ParameterError, TypeError, ValueError) as exc:
            raise ParameterError([f"sweep point {spec.sweep.param}={v!r}: {exc}"]) from exc
        points.append((v, w, p))
    return points


def analytic_rows(spec: RunSpec):
    params = spec.params
    rows = []
    for variant in spec.variants():
        row = {"variant": variant}
        row.update(analytic.evaluate(params, spec.options(variant)))
        rows.append(row)
    return rows


def _estimate_row(name, est, seed):
    return {
        "population": name,
        "p_hat": est.p_hat,
        "ci95": est.ci95_halfwidth,
        "trials": est.trials,
        "seed": seed,
        "estimator": est.estimator,
        "direct": est.breakdown["direct"],
        "on_line_ris": est.breakdown["on_line_ris"],
        "off_line_ris": est.breakdown["off_line_ris"],
    }


def simulate_rows(spec: RunSpec):
    if spec.sim.trials < 1:
        raise ParameterError(["simulate needs sim.trials >= 1"])
    params = spec.params
    parts = montecarlo.estimate_parts(params, spec.sim)
    rows = [_estimate_row(k, v, spec.sim.seed) for k, v in parts.items()]
    rows.append(_estimate_row("no_ris", montecarlo.estimate_no_ris(params, spec.sim), spec.sim.seed))
    return rows


def compare_report(spec: RunSpec) -> dict:
    if spec.sim.trials < MIN_COMPARE_TRIALS:
        raise ParameterError([f"compare needs sim.trials >= {MIN_COMPARE_TRIALS}"])
    params = spec.params
    mc = montecarlo.estimate_total(params, spec.sim)
    paper = analytic.cov_total(params, spec.options("paper"))
    consistent = analytic.cov_total(params, spec.options("consistent"))
    bound = max(3.0 * mc.ci95_halfwidth, 0.01)
    report = {
        "mc": mc.p_hat,
        "ci95": mc.ci95_halfwidth,
        "paper_variant": paper,
        "consistent_variant": consistent,
        "delta_paper": mc.p_hat - paper,
        "delta_consistent": mc.p_hat - consistent,
        "pass": abs(mc.p_hat - consistent) <= bound,
        "trials": mc.trials,
        "seed": spec.sim.seed,
    }
    notes = []
    if abs(mc.p_hat - paper) > bound:
        notes.append(f"paper variant differs from simulation by {mc.p_hat - paper:+.4f}")
    if not report["pass"]:
        notes.append(f"consistent variant differs from simulation by {mc.p_hat - consistent:+.4f}")
    report["note"] = "; ".join(notes)
    return report


def sweep_rows(spec: RunSpec):
    if spec.sweep is None:
        raise ParameterError(["sweep section missing"])
    rows = []
    for v, w, p in sweep_points(spec):
        row = {"param": spec.sweep.param, "value": v}
        if w is not None:
            row.update(param2=spec.sweep.param2, value2=w)
        res = {var: analytic.evaluate(p, spec.options(var)) for var in ("paper", "consistent")}
        for name in ("cov_total", "cov_vehicle", "cov_handset"):
            row[f"{name}_paper"] = res["paper"][name]
            row[f"{name}_consistent"] = res["consistent"][name]
        row["cov_no_ris"] = res["consistent"]["cov_no_ris"]
        row["gain_paper"] = res["paper"]["gain"]
        row["gain_consistent"] = res["consistent"]["gain"]
        if spec.sim.trials > 0:
            est = montecarlo.estimate_total(p, spec.sim)
            row.update(mc_total=est.p_hat, mc_ci95=est.ci95_halfwidth, trials=est.trials, seed=spec.sim.seed)
        for key, val in row.items():
            if isinstance(val, float) and not math.isfinite(val):
                raise QuadratureError(f"non-finite {key} at {spec.sweep.param}={v!r}")
        rows.append(row)
    return rows


def gain_rows(spec: RunSpec):
    params = spec.params
    rows = []
    for variant in spec.variants():
        opts = spec.options(variant)
        rows.append({
            "variant": variant,
            "gain": analytic.outage_gain(params, opts),
            "gain_from_coverage": analytic.outage_gain_from_coverage(params, opts),
            "outage_ratio": analytic.outage_ratio(params, opts),
        })
    return rows


# --- output ------------------------------------------------------------------


def _cell(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return "" if value is None else str(value)


def format_rows(rows, fmt):
    if fmt == "jsonl":
        return "".join(json.dumps(r) + "\n" for r in rows)
    buf = io.StringIO()
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(rows[0]))
        for r in rows:
            w.writerow([_cell(v) for v in r.values()])
    return buf.getvalue()


def emit(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# --- entry point ---------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (table units)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key; dotted keys reach sections, values are JSON")
    common.add_argument("--out", help="output file (directory for scene)")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--variant", choices=VARIANT_CHOICES)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="riscov", description="RIS-assisted LOS coverage on roads")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analytic", parents=[common], help="evaluate the coverage formulas")
    sub.add_parser("simulate", parents=[common], help="Monte Carlo estimates")
    sub.add_parser("compare", parents=[common], help="simulation against both formula variants")
    sub.add_parser("sweep", parents=[common], help="grid over one or two parameters")
    sub.add_parser("gain", parents=[common], help="outage gain of the RIS deployment")
    scene = sub.add_parser("scene", parents=[common], help="dump one sampled geometry as CSV")
    scene.add_argument("--radius", type=float, default=1000.0, help="window radius in metres")
    scene.add_argument("--typical-line", action="store_true", help="add a road through the origin")
    scene.add_argument("--angle-mode", choices=("isotropic", "manhattan"))
    return parser


def spec_from_args(args) -> RunSpec:
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(f"sim.seed={args.seed}")
    if args.trials is not None:
        overrides.append(f"sim.trials={args.trials}")
    if args.workers is not None:
        overrides.append(f"sim.workers={args.workers}")
    if args.variant is not None:
        overrides.append(f'analytic.variant="{args.variant}"')
    if args.format is not None:
        overrides.append(f'output.format="{args.format}"')
    if args.out is not None:
        overrides.append(f"output.path={json.dumps(args.out)}")
    if getattr(args, "angle_mode", None):
        overrides.append(f'sim.angle_mode="{args.angle_mode}"')
    return load_config(args.config, overrides)


def run(args) -> int:
    spec = spec_from_args(args)
    fmt, path = spec.output.format, spec.output.path
    if args.command == "analytic":
        emit(format_rows(analytic_rows(spec), fmt), path)
    elif args.command == "simulate":
        emit(format_rows(simulate_rows(spec), fmt), path)
    elif args.command == "gain":
        emit(format_rows(gain_rows(spec), fmt), path)
    elif args.command == "sweep":
        if path is None:
            raise ParameterError(["sweep needs an output path (--out or output.path)"])
        emit(format_rows(sweep_rows(spec), fmt), path)
    elif args.command == "compare":
        report = compare_report(spec)
        emit(json.dumps(report, indent=2) + "\n", path)
        if not report["pass"]:
            return EXIT_COMPARE
    elif args.command == "scene":
        if path is None:
            raise ParameterError(["scene needs an output directory (--out or output.path)"])
        if not args.radius > 0:
            raise ParameterError(["radius must be positive"])
        scene = sample_scenario(spec.params, args.radius, Stream(spec.sim.seed),
                                spec.sim.angle_mode, with_typical_line=args.typical_line)
        try:
            written = write_scene(scene, path)
        except OSError as exc:
            raise ParameterError([f"cannot write scene: {exc}"]) from exc
        for p in written:
            log.info("wrote %s", p)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return run(args)
    except QuadratureError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except (ParameterError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
