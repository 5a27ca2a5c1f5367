"""Command-line front end.

    qlmass <command> --config <path> [--out <path>] [--format csv|json]

The config is a JSON document; see README.md for the schema.  Output is
deterministic: floats are written with 17 significant digits (CSV) or as
round-trip reprs (JSON), rows keep input order, and no timestamps are
embedded.  Exit codes: 0 success, 1 domain error, 2 config or usage error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .criteria import evaluate_criteria, minkowski_bound_check, round_sphere_criterion
from .errors import ConfigError, InvalidParams, NoHorizon, ParseError, QLMassError, ValidationError
from .horizons import find_grazing, find_horizons, penrose_check
from .imcf_hulls import AlphaParams, geroch_report, imcf_trace, m_omega
from .profiles import G1Params, G2Params, build_flat, build_g1, build_g2, build_schwarzschild
from .quasimass import brown_york_radial, hawking_mass
from .radial_metric import sphere_geometry

COMMANDS = ("masses", "horizons", "imcf", "momega", "criteria", "sweep")

METRIC_PARAMS = {
    "flat": (),
    "schwarzschild": ("m",),
    "g1": ("m",),
    "g2": ("m", "rho0", "rho1"),
}

DEFAULT_NUMERIC = {"horizon_grid": 8192, "momega_grid": [64, 64], "momega_refine": 6, "imcf_samples": 200}
DEFAULT_ALPHA = {"C": 1.0, "iota": "auto", "curvature_root": True}

SECTION_KEYS = {
    "masses": ("radii", "r_min", "r_max", "n", "spacing"),
    "horizons": ("r_lo", "r_hi"),
    "imcf": ("r_start", "r_end", "n"),
    "momega": ("r_out",),
    "criteria": ("r_out", "s"),
    "sweep": ("command", "parameter", "values", "range"),
}

# ---------------------------------------------------------------------------
# config


@dataclass
class RunConfig:
    metric: dict
    numeric: dict = field(default_factory=lambda: dict(DEFAULT_NUMERIC))
    alpha: dict = field(default_factory=lambda: dict(DEFAULT_ALPHA))
    sections: dict = field(default_factory=dict)

    def canonical(self) -> str:
        doc = {"metric": self.metric, "numeric": self.numeric, "alpha": self.alpha, **self.sections}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()

    def alpha_params(self) -> AlphaParams:
        iota = self.alpha["iota"]
        return AlphaParams(
            C=float(self.alpha["C"]),
            iota=None if iota == "auto" else float(iota),
            curvature_root=bool(self.alpha["curvature_root"]),
        )

    def with_param(self, name, value) -> "RunConfig":
        out = copy.deepcopy(self)
        if name == "C":
            out.alpha["C"] = value
        else:
            out.metric[name] = value
        return out


def _reject_unknown(key, doc, allowed):
    if not isinstance(doc, dict):
        raise ValidationError(key, "must be an object")
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise ValidationError(f"{key}.{extra[0]}" if key else extra[0], "unknown key")


def _number(key, value, *, positive=False, nonnegative=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(key, "must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(key, "must be finite")
    if positive and not value > 0:
        raise ValidationError(key, "must be > 0")
    if nonnegative and not value >= 0:
        raise ValidationError(key, "must be >= 0")
    return value


def _count(key, value, minimum=1):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ValidationError(key, f"must be an integer >= {minimum}")
    return value


def _radius(key, value, metric):
    """A positive radius, or {"over_m": k} meaning k / m."""
    if isinstance(value, dict):
        _reject_unknown(key, value, ("over_m",))
        if "over_m" not in value:
            raise ValidationError(key, "relative radius needs 'over_m'")
        k = _number(f"{key}.over_m", value["over_m"], positive=True)
        if not metric.get("m", 0.0) > 0:
            raise ValidationError(key, "'over_m' needs a metric with m > 0")
        return {"over_m": k}
    return _number(key, value, positive=True)


def resolve_radius(value, metric: dict) -> float:
    if isinstance(value, dict):
        return value["over_m"] / metric["m"]
    return float(value)


def _validate_metric(doc) -> dict:
    if not isinstance(doc, dict):
        raise ValidationError("metric", "must be an object")
    kind = doc.get("kind")
    if kind not in METRIC_PARAMS:
        raise ValidationError("metric.kind", f"must be one of {', '.join(METRIC_PARAMS)}")
    _reject_unknown("metric", doc, ("kind",) + METRIC_PARAMS[kind])
    out = {"kind": kind}
    for name in METRIC_PARAMS[kind]:
        if name not in doc:
            raise ValidationError(f"metric.{name}", f"required for kind {kind}")
        out[name] = _number(f"metric.{name}", doc[name])
    _check_metric_constraints(out)
    return out


def _check_metric_constraints(metric: dict, key="metric"):
    kind = metric["kind"]
    if kind == "schwarzschild" and not metric["m"] >= 0:
        raise ValidationError(f"{key}.m", "must be >= 0")
    if kind == "g1" and not metric["m"] > 0:
        raise ValidationError(f"{key}.m", "must be > 0")
    if kind == "g2":
        if not metric["m"] > 0:
            raise ValidationError(f"{key}.m", "must be > 0")
        if not metric["rho0"] > metric["m"]:
            raise ValidationError(f"{key}.rho0", "must be > m")
        if not metric["rho1"] > metric["rho0"]:
            raise ValidationError(f"{key}.rho1", "must be > rho0")
    try:
        build_metric(metric)
    except InvalidParams as exc:
        raise ValidationError(key, str(exc)) from exc


def _validate_numeric(doc) -> dict:
    _reject_unknown("numeric", doc, tuple(DEFAULT_NUMERIC))
    out = dict(DEFAULT_NUMERIC)
    if "horizon_grid" in doc:
        out["horizon_grid"] = _count("numeric.horizon_grid", doc["horizon_grid"], 16)
    if "imcf_samples" in doc:
        out["imcf_samples"] = _count("numeric.imcf_samples", doc["imcf_samples"], 3)
    if "momega_refine" in doc:
        out["momega_refine"] = _count("numeric.momega_refine", doc["momega_refine"], 0)
    if "momega_grid" in doc:
        g = doc["momega_grid"]
        if not (isinstance(g, list) and len(g) == 2):
            raise ValidationError("numeric.momega_grid", "must be a pair [n1, n2]")
        out["momega_grid"] = [_count(f"numeric.momega_grid[{i}]", v, 2) for i, v in enumerate(g)]
    return out


def _validate_alpha(doc) -> dict:
    _reject_unknown("alpha", doc, tuple(DEFAULT_ALPHA))
    out = dict(DEFAULT_ALPHA)
    if "C" in doc:
        out["C"] = _number("alpha.C", doc["C"], positive=True)
    if "iota" in doc:
        out["iota"] = "auto" if doc["iota"] == "auto" else _number("alpha.iota", doc["iota"], positive=True)
    if "curvature_root" in doc:
        if not isinstance(doc["curvature_root"], bool):
            raise ValidationError("alpha.curvature_root", "must be true or false")
        out["curvature_root"] = doc["curvature_root"]
    return out


def _validate_section(name, doc, metric) -> dict:
    _reject_unknown(name, doc, SECTION_KEYS[name])
    out = {}
    if name == "masses":
        if "radii" in doc:
            if not isinstance(doc["radii"], list) or not doc["radii"]:
                raise ValidationError("masses.radii", "must be a non-empty list")
            if set(doc) & {"r_min", "r_max", "n", "spacing"}:
                raise ValidationError("masses", "give either radii or r_min/r_max/n")
            out["radii"] = [_radius(f"masses.radii[{i}]", v, metric) for i, v in enumerate(doc["radii"])]
        else:
            for key in ("r_min", "r_max", "n"):
                if key not in doc:
                    raise ValidationError(f"masses.{key}", "required when radii is absent")
            out["r_min"] = _radius("masses.r_min", doc["r_min"], metric)
            out["r_max"] = _radius("masses.r_max", doc["r_max"], metric)
            out["n"] = _count("masses.n", doc["n"], 1)
            out["spacing"] = doc.get("spacing", "log")
            if out["spacing"] not in ("log", "linear"):
                raise ValidationError("masses.spacing", "must be 'log' or 'linear'")
    elif name == "horizons":
        for key in ("r_lo", "r_hi"):
            if key in doc:
                out[key] = _radius(f"horizons.{key}", doc[key], metric)
    elif name == "imcf":
        for key in ("r_start", "r_end"):
            if key not in doc:
                raise ValidationError(f"imcf.{key}", "required")
            out[key] = _radius(f"imcf.{key}", doc[key], metric)
        if "n" in doc:
            out["n"] = _count("imcf.n", doc["n"], 3)
    elif name in ("momega", "criteria"):
        if "r_out" not in doc:
            raise ValidationError(f"{name}.r_out", "required")
        out["r_out"] = _radius(f"{name}.r_out", doc["r_out"], metric)
        if "s" in doc:
            out["s"] = _radius(f"{name}.s", doc["s"], metric)
    return out


def _validate_sweep(doc, metric) -> dict:
    _reject_unknown("sweep", doc, SECTION_KEYS["sweep"])
    command = doc.get("command")
    if command not in COMMANDS[:-1]:
        raise ValidationError("sweep.command", f"must be one of {', '.join(COMMANDS[:-1])}")
    parameter = doc.get("parameter")
    allowed = METRIC_PARAMS[metric["kind"]] + ("C",)
    if parameter not in allowed:
        raise ValidationError("sweep.parameter", f"must be one of {', '.join(allowed)} for this metric")
    if ("values" in doc) == ("range" in doc):
        raise ValidationError("sweep", "give exactly one of values or range")
    if "values" in doc:
        if not isinstance(doc["values"], list) or not doc["values"]:
            raise ValidationError("sweep.values", "must be a non-empty list")
        values = [_number(f"sweep.values[{i}]", v) for i, v in enumerate(doc["values"])]
        source = {"values": values}
    else:
        rng = doc["range"]
        _reject_unknown("sweep.range", rng, ("start", "stop", "num", "spacing"))
        for key in ("start", "stop", "num"):
            if key not in rng:
                raise ValidationError(f"sweep.range.{key}", "required")
        start = _number("sweep.range.start", rng["start"])
        stop = _number("sweep.range.stop", rng["stop"])
        num = _count("sweep.range.num", rng["num"], 1)
        spacing = rng.get("spacing", "linear")
        if spacing not in ("linear", "log"):
            raise ValidationError("sweep.range.spacing", "must be 'linear' or 'log'")
        if spacing == "log" and not (start > 0 and stop > 0):
            raise ValidationError("sweep.range", "log spacing needs positive endpoints")
        source = {"range": {"start": start, "stop": stop, "num": num, "spacing": spacing}}
        values = sweep_values(source)
    for i, v in enumerate(values):
        trial = dict(metric)
        if parameter == "C":
            if not v > 0:
                raise ValidationError(f"sweep.values[{i}]", "C must be > 0")
            continue
        trial[parameter] = v
        _check_metric_constraints(trial, key=f"sweep.values[{i}]")
    return {"command": command, "parameter": parameter, **source}


def sweep_values(source: dict) -> list:
    if "values" in source:
        return list(source["values"])
    rng = source["range"]
    space = np.geomspace if rng["spacing"] == "log" else np.linspace
    return [float(v) for v in space(rng["start"], rng["stop"], rng["num"])]


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON config document, filling defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed config: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("config must be a JSON object")
    _reject_unknown("", doc, ("metric", "numeric", "alpha") + tuple(SECTION_KEYS))
    if "metric" not in doc:
        raise ValidationError("metric", "required")
    metric = _validate_metric(doc["metric"])
    cfg = RunConfig(
        metric=metric,
        numeric=_validate_numeric(doc.get("numeric", {})),
        alpha=_validate_alpha(doc.get("alpha", {})),
    )
    for name in SECTION_KEYS:
        if name in doc and name != "sweep":
            cfg.sections[name] = _validate_section(name, doc[name], metric)
    if "sweep" in doc:
        # relative radii ({"over_m": k}) are resolved per sweep row
        cfg.sections["sweep"] = _validate_sweep(doc["sweep"], metric)
    return cfg


def build_metric(metric: dict):
    kind = metric["kind"]
    if kind == "flat":
        return build_flat()
    if kind == "schwarzschild":
        return build_schwarzschild(metric["m"])
    if kind == "g1":
        return build_g1(G1Params(metric["m"]))
    return build_g2(G2Params(metric["m"], metric["rho0"], metric["rho1"]))


# ---------------------------------------------------------------------------
# commands


@dataclass
class CommandResult:
    columns: list
    rows: list
    report: dict
    notes: dict = field(default_factory=dict)
    summary: list = field(default_factory=list)


def _section(cfg: RunConfig, name: str) -> dict:
    if name not in cfg.sections:
        raise ValidationError(name, f"section required for command {name}")
    return cfg.sections[name]


def run_masses(cfg: RunConfig) -> CommandResult:
    sec = _section(cfg, "masses")
    metric = build_metric(cfg.metric)
    if "radii" in sec:
        radii = [resolve_radius(v, cfg.metric) for v in sec["radii"]]
    else:
        lo, hi = resolve_radius(sec["r_min"], cfg.metric), resolve_radius(sec["r_max"], cfg.metric)
        space = np.geomspace if sec["spacing"] == "log" else np.linspace
        radii = [float(x) for x in space(lo, hi, sec["n"])]
    columns = ["r", "u", "H", "area", "areal_radius", "m_H", "m_BY"]
    rows = []
    for r in radii:
        rep = sphere_geometry(metric, r)
        u = float(metric.eval(r)[0])
        rows.append([r, u, rep.mean_curvature, rep.area, rep.areal_radius,
                     float(hawking_mass(metric, r)), float(brown_york_radial(metric, r))])
    report = {"rows": [dict(zip(columns, row)) for row in rows]}
    return CommandResult(columns, rows, report, summary=report["rows"])


def run_horizons(cfg: RunConfig) -> CommandResult:
    sec = cfg.sections.get("horizons", {})
    metric = build_metric(cfg.metric)
    r_lo = resolve_radius(sec["r_lo"], cfg.metric) if "r_lo" in sec else None
    r_hi = resolve_radius(sec["r_hi"], cfg.metric) if "r_hi" in sec else None
    grid = cfg.numeric["horizon_grid"]
    records = find_horizons(metric, r_lo, r_hi, grid)
    grazing = find_grazing(metric, r_lo, r_hi, grid)
    try:
        deficit = penrose_check(metric)
    except NoHorizon:
        deficit = None
    columns = ["r", "areal_radius", "area", "outermost", "outer_minimizing", "stable"]
    rows = [[rec.r, rec.areal_radius, rec.area, rec.outermost, rec.outer_minimizing, rec.stable] for rec in records]
    outer = max(records, key=lambda rec: rec.r) if records else None
    report = {
        "horizons": [dict(zip(columns, row)) for row in rows],
        "grazing_candidates": grazing,
        "penrose_deficit": deficit,
    }
    summary = [{
        "n_roots": len(records),
        "outermost_r": outer.r if outer else None,
        "outermost_areal_radius": outer.areal_radius if outer else None,
        "penrose_deficit": deficit,
    }]
    return CommandResult(columns, rows, report, {"penrose_deficit": deficit, "grazing_candidates": len(grazing)}, summary)


def run_imcf(cfg: RunConfig) -> CommandResult:
    sec = _section(cfg, "imcf")
    metric = build_metric(cfg.metric)
    n = sec.get("n", cfg.numeric["imcf_samples"])
    trace = imcf_trace(metric, resolve_radius(sec["r_start"], cfg.metric), resolve_radius(sec["r_end"], cfg.metric), n)
    slope = geroch_report(trace)
    columns = ["t", "r", "R", "A", "m_H"]
    rows = [[float(x) for x in row] for row in trace.rows()]
    report = {"samples": [dict(zip(columns, row)) for row in rows], "geroch_min_slope": slope}
    summary = [{"geroch_min_slope": slope, "m_H_start": rows[0][4], "m_H_end": rows[-1][4]}]
    return CommandResult(columns, rows, report, {"geroch_min_slope": slope}, summary)


def _momega_args(cfg):
    return cfg.alpha_params(), tuple(cfg.numeric["momega_grid"]), cfg.numeric["momega_refine"]


def run_momega(cfg: RunConfig) -> CommandResult:
    sec = _section(cfg, "momega")
    metric = build_metric(cfg.metric)
    params, grid, refine = _momega_args(cfg)
    r_out = resolve_radius(sec["r_out"], cfg.metric)
    res = m_omega(metric, r_out, params, grid, refine)
    columns = ["r_out", "m_omega", "r1", "r2", "alpha", "m_region"]
    rows = [[r_out, res.value, res.r1, res.r2, res.alpha, res.m_region]]
    report = {**dict(zip(columns, rows[0])), "provenance": res.provenance}
    return CommandResult(columns, rows, report, {"provenance": json.dumps(res.provenance, sort_keys=True)},
                         [dict(zip(columns, rows[0]))])


def run_criteria(cfg: RunConfig) -> CommandResult:
    sec = _section(cfg, "criteria")
    metric = build_metric(cfg.metric)
    params, grid, refine = _momega_args(cfg)
    r_out = resolve_radius(sec["r_out"], cfg.metric)
    rep = evaluate_criteria(metric, r_out, params, grid, refine)
    minkowski = minkowski_bound_check(metric, r_out)
    report = rep.to_dict()
    report["minkowski_margin"] = minkowski
    notes = {"m_by_boundary": rep.m_by_boundary, "m_omega_est": rep.m_omega_est, "two_R": rep.two_R,
             "diameter": rep.diameter, "minkowski_margin": minkowski}
    if "s" in sec:
        rs = round_sphere_criterion(metric, resolve_radius(sec["s"], cfg.metric), r_out)
        report["round_sphere"] = rs.__dict__
        notes["round_sphere_margin"] = rs.margin
    compared = {"a": rep.m_by_boundary, "b": rep.two_R, "c": rep.two_diam}
    columns = ["criterion", "satisfied", "margin", "m_omega_est", "compared_to"]
    rows = [[k, v.satisfied, v.margin, rep.m_omega_est, compared[k]] for k, v in rep.verdicts.items()]
    summary = {"r_out": r_out, "m_by_boundary": rep.m_by_boundary, "m_omega_est": rep.m_omega_est}
    for k, v in rep.verdicts.items():
        summary[f"{k}_satisfied"] = v.satisfied
        summary[f"{k}_margin"] = v.margin
    return CommandResult(columns, rows, report, notes, [summary])


RUNNERS = {
    "masses": run_masses,
    "horizons": run_horizons,
    "imcf": run_imcf,
    "momega": run_momega,
    "criteria": run_criteria,
}


def run_sweep(cfg: RunConfig) -> CommandResult:
    sec = _section(cfg, "sweep")
    name, parameter = sec["command"], sec["parameter"]
    columns, rows, report_rows = None, [], []
    for value in sweep_values(sec):
        inner = RUNNERS[name](cfg.with_param(parameter, value))
        for item in inner.summary:
            row = {parameter: value, **item}
            if columns is None:
                columns = list(row)
            rows.append([row.get(c) for c in columns])
            report_rows.append(row)
    return CommandResult(columns or [parameter], rows, {"command": name, "parameter": parameter, "rows": report_rows})


RUNNERS["sweep"] = run_sweep


def run_command(cfg: RunConfig, command: str) -> CommandResult:
    if command not in RUNNERS:
        raise ValidationError("command", f"must be one of {', '.join(COMMANDS)}")
    return RUNNERS[command](cfg)


# ---------------------------------------------------------------------------
# output


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def _meta(cfg: RunConfig, command: str) -> dict:
    return {"tool": "qlmass", "version": __version__, "command": command, "config_sha256": cfg.digest()}


def render(cfg: RunConfig, command: str, result: CommandResult, fmt: str) -> str:
    meta = _meta(cfg, command)
    if fmt == "json":
        doc = {"_meta": meta, "result": _jsonable(result.report)}
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# {meta['tool']} {meta['version']}\n")
    buf.write(f"# command: {command}\n")
    buf.write(f"# config_sha256: {meta['config_sha256']}\n")
    for key, value in result.notes.items():
        buf.write(f"# {key}: {_fmt(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlmass", description="Quasi-local mass and horizon tools for radial metrics.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--version", action="version", version=f"qlmass {__version__}")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
        result = run_command(cfg, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except QLMassError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    output = render(cfg, args.command, result, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(output)
    else:
        sys.stdout.write(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
