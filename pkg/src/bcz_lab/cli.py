"""Batch command-line interface.

Commands expose orbits, the verification suites and the statistical
reports.  Exact orbit tables serialize as CSV with separate numerator and
denominator columns (lossless round trip); statistical reports serialize
as JSON with the keys estimate, stderr, threshold, pass, seed, samples.
Report bodies are byte-identical across reruns with the same configuration.

Exit codes: 0 all verdicts pass, 1 a quantitative verdict failed, 2 usage
error.  A flat JSON config file can supply any parameter; explicit flags
win over the file, the file wins over defaults, unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__, acceptance
from .errors import BczLabError, UsageError
from .lattice import nth_slope
from .renorm import SectionConfig, plus_one_event, return_index
from .sampling import ExperimentSpec, Region, RunReport, sample_floats
from .statistics import (
    ClaimKind,
    ObservableId,
    birkhoff_slope_rate,
    claim_integral,
    correlation_cesaro,
    g0_fraction,
    invariance_histogram_test,
    observable_mean,
    observable_values,
    plus_one_fraction,
    uniform_theta_grid,
    weyl_scan,
)
from .strips import StripSpec, a_mn_region, strip_intersection_measure
from .triangle import OmegaPoint, bcz_orbit, farey_section_orbit


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _unit_fraction(text: str) -> Fraction:
    value = _fraction(text)
    if not 0 < value <= 1:
        raise UsageError(f"value {text} outside (0, 1]")
    return value


# parameter tables: name -> (parser, default, help); default None means required
_COMMON_OUT = {
    "output": (str, "", "output path (default: stdout)"),
    "format": (str, "", "csv or json (command default otherwise)"),
}

COMMANDS: dict[str, dict] = {
    "orbit": {
        "s": (_unit_fraction, None, "starting s, rational like 1/5 or 0.2"),
        "t": (_unit_fraction, None, "starting t"),
        "steps": (int, None, "number of map steps"),
        "exact": (bool, True, "exact rational iteration (default)"),
        "float": (bool, False, "float64 iteration instead of exact"),
        **_COMMON_OUT,
    },
    "farey": {
        "Q": (int, None, "Farey order of the section orbit"),
        **_COMMON_OUT,
    },
    "invariance": {
        "samples": (int, 1000000, "sample count"),
        "bins": (int, 16, "histogram bins per axis"),
        "iterates": (int, 5, "map iterates between histograms"),
        "seed": (int, 7, "PRNG seed"),
        **_COMMON_OUT,
    },
    "geometry": {
        "m": (int, None, "strip index m"),
        "n": (int, None, "strip index n"),
        "b": (_fraction, None, "shrink parameter"),
        "m2": (int, -1, "second strip index m' (pair mode)"),
        "n2": (int, -1, "second strip index n' (pair mode)"),
        **_COMMON_OUT,
    },
    "claims": {
        "which": (str, None, "F1 or F2_EXCESS"),
        "a": (_fraction, None, "box-height budget a"),
        "b": (_fraction, None, "shrink parameter b"),
        "samples": (int, 100000, "sample count"),
        "seed": (int, 7, "PRNG seed"),
        **_COMMON_OUT,
    },
    "return-times": {
        "stat": (str, "rate", "rate, g0 or plus-one"),
        "a": (_fraction, Fraction(1, 4), "box-height budget a"),
        "b": (_fraction, Fraction(1, 100), "shrink parameter b"),
        "N": (int, 100000, "slope depth for stat=rate"),
        "seeds": (int, 10, "number of seeds for stat=rate"),
        "samples": (int, 10000, "sample count for g0/plus-one"),
        "seed": (int, 7, "PRNG seed"),
        **_COMMON_OUT,
    },
    "mixing": {
        "s": (_unit_fraction, Fraction(0), "orbit start s (0 = draw from seed)"),
        "t": (_unit_fraction, Fraction(0), "orbit start t"),
        "N": (int, 1000000, "orbit length"),
        "H": (int, 10000, "correlation horizon"),
        "f": (str, "exp_s", "observable id"),
        "g": (str, "exp_s", "observable id"),
        "seed": (int, 7, "PRNG seed for the starting point"),
        **_COMMON_OUT,
    },
    "scan-eigenvalues": {
        "s": (_unit_fraction, Fraction(0), "orbit start s (0 = draw from seed)"),
        "t": (_unit_fraction, Fraction(0), "orbit start t"),
        "N": (int, 1000000, "orbit length"),
        "grid": (int, 1000, "size of the uniform theta grid"),
        "f": (str, "exp_s", "observable id (centered before scanning)"),
        "seed": (int, 7, "PRNG seed for the starting point"),
        **_COMMON_OUT,
    },
    "verify-all": {
        "criteria": (str, "", "comma-separated criterion numbers (default: all)"),
        **_COMMON_OUT,
    },
}

_FLAG_PARAMS = {"exact", "float"}


@dataclass
class CliConfig:
    command: str
    params: dict = field(default_factory=dict)


def parse_config(argv: list[str], config_path: Optional[str] = None) -> CliConfig:
    """Merge CLI flags over config-file entries over defaults.

    The config file is a flat JSON object keyed by parameter names; unknown
    keys are rejected.  Raises UsageError (exit code 2) on any problem.
    """
    if not argv:
        raise UsageError("missing command; try --help")
    command = argv[0]
    if command in ("-h", "--help"):
        print(usage_text())
        raise SystemExit(0)
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}; try --help")
    table = COMMANDS[command]

    parser = argparse.ArgumentParser(prog=f"bcz-lab {command}", add_help=True)
    parser.add_argument("--config", default=None, help="flat JSON config file")
    for name, (kind, default, help_text) in table.items():
        flag = f"--{name}"
        if name in _FLAG_PARAMS:
            parser.add_argument(flag, action="store_const", const=True,
                                default=None, help=help_text)
        else:
            parser.add_argument(flag, type=str, default=None, help=help_text)
    try:
        ns = parser.parse_args(argv[1:])
    except SystemExit as exc:
        if exc.code not in (0, None):
            raise UsageError("bad command-line arguments") from None
        raise

    file_values = {}
    path = ns.config or config_path
    if path:
        try:
            with open(path) as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise UsageError("config file must hold a flat JSON object")
        unknown = set(file_values) - set(table)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")

    params = {}
    for name, (kind, default, _help) in table.items():
        raw = getattr(ns, name if name != "float" else "float")
        if raw is None and name in file_values:
            raw = file_values[name]
        if raw is None:
            if default is None:
                raise UsageError(f"missing required parameter --{name}")
            params[name] = default
            continue
        try:
            if name in _FLAG_PARAMS:
                params[name] = bool(raw)
            elif kind is int:
                params[name] = int(raw)
            else:
                params[name] = kind(str(raw))
        except (ValueError, UsageError) as exc:
            raise UsageError(f"bad value for --{name}: {raw!r}") from exc
    return CliConfig(command, params)


def usage_text() -> str:
    lines = ["usage: bcz-lab COMMAND [--flags] [--config FILE]", "", "commands:"]
    for name in COMMANDS:
        lines.append(f"  {name}")
    lines.append("")
    lines.append("run 'bcz-lab COMMAND --help' for the command's flags")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------

def _frac_cols(x: Fraction) -> tuple[int, int]:
    return x.numerator, x.denominator


def _csv_body(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _report_from_run(run: RunReport) -> dict:
    return {
        "estimate": run.estimate,
        "stderr": run.stderr,
        "threshold": run.threshold,
        "pass": run.verdict,
        "seed": run.metadata.get("spec", {}).get("seed"),
        "samples": run.samples_used,
    }


def _render(cfg: CliConfig, body: str, verdicts: list[bool], fmt: str) -> str:
    header = {
        "version": __version__,
        "command": cfg.command,
        "config": {k: str(v) for k, v in cfg.params.items()},
    }
    if fmt == "json":
        doc = {"header": header, "body": json.loads(body), "verdicts": verdicts}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    head_lines = "".join(
        f"# {key}={value}\n"
        for key, value in [("version", __version__), ("command", cfg.command)]
        + sorted((k, v) for k, v in header["config"].items())
    )
    return head_lines + body


# ---------------------------------------------------------------------------
# command runners
# ---------------------------------------------------------------------------

def _start_point(params) -> OmegaPoint:
    if params["s"] and params["t"]:
        return OmegaPoint(float(params["s"]), float(params["t"]))
    spec = ExperimentSpec(Fraction(1, 4), Fraction(1, 100), 1, params["seed"], Region.OMEGA)
    s, t = sample_floats(spec, 0, 1)
    return OmegaPoint(float(s[0]), float(t[0]))


def _run_orbit(cfg: CliConfig):
    p = cfg.params
    use_float = p["float"]
    start = OmegaPoint(
        *( (float(p["s"]), float(p["t"])) if use_float else (p["s"], p["t"]) )
    )
    record = bcz_orbit(start, p["steps"])
    if use_float:
        rows = [[i, pt.s, pt.t] for i, pt in enumerate(record.points)]
        body = _csv_body(["step", "s", "t"], rows)
    else:
        rows = [
            [i, *_frac_cols(pt.s), *_frac_cols(pt.t)]
            for i, pt in enumerate(record.points)
        ]
        body = _csv_body(["step", "s_num", "s_den", "t_num", "t_den"], rows)
    return body, [], "csv"


def _run_farey(cfg: CliConfig):
    points = farey_section_orbit(cfg.params["Q"])
    rows = [
        [i, *_frac_cols(pt.s), *_frac_cols(pt.t)] for i, pt in enumerate(points)
    ]
    return _csv_body(["step", "s_num", "s_den", "t_num", "t_den"], rows), [], "csv"


def _run_invariance(cfg: CliConfig):
    p = cfg.params
    spec = ExperimentSpec(Fraction(1, 4), Fraction(1, 100), p["samples"], p["seed"],
                          Region.OMEGA)
    run = invariance_histogram_test(spec, p["bins"], p["iterates"])
    return json.dumps(_report_from_run(run), sort_keys=True), [run.verdict], "json"


def _run_geometry(cfg: CliConfig):
    p = cfg.params
    pair_mode = p["m2"] >= 0 and p["n2"] >= 1
    if pair_mode:
        unbounded, clipped = strip_intersection_measure(
            StripSpec(p["m"], p["n"], p["b"]), StripSpec(p["m2"], p["n2"], p["b"])
        )
        rows = [[
            p["m"], p["n"], p["m2"], p["n2"], *_frac_cols(Fraction(p["b"])),
            *_frac_cols(Fraction(unbounded)), *_frac_cols(Fraction(clipped)),
        ]]
        header = ["m", "n", "m2", "n2", "b_num", "b_den",
                  "unbounded_num", "unbounded_den", "clipped_num", "clipped_den"]
    else:
        region = a_mn_region(StripSpec(p["m"], p["n"], p["b"]))
        verts = ";".join(f"{v[0]}:{v[1]}" for v in region.vertices)
        rows = [[
            p["m"], p["n"], *_frac_cols(Fraction(p["b"])),
            *_frac_cols(region.area), *_frac_cols(region.measure), verts,
        ]]
        header = ["m", "n", "b_num", "b_den", "area_num", "area_den",
                  "measure_num", "measure_den", "vertices"]
    return _csv_body(header, rows), [], "csv"


def _run_claims(cfg: CliConfig):
    p = cfg.params
    try:
        which = ClaimKind(p["which"])
    except ValueError:
        raise UsageError(f"--which must be F1 or F2_EXCESS, got {p['which']!r}")
    spec = ExperimentSpec(p["a"], p["b"], p["samples"], p["seed"], Region.HALF_SECTION)
    run = claim_integral(which, spec)
    return json.dumps(_report_from_run(run), sort_keys=True), [run.verdict], "json"


def _run_return_times(cfg: CliConfig):
    p = cfg.params
    stat = p["stat"]
    if stat == "rate":
        spec = ExperimentSpec(p["a"], p["b"], max(p["seeds"], 1), p["seed"], Region.OMEGA)
        s, t = sample_floats(spec, 0, p["seeds"])
        target = math.pi**2 / 3
        rates = [
            birkhoff_slope_rate(OmegaPoint(float(si), float(ti)), p["N"], 1.0)
            for si, ti in zip(s, t)
        ]
        close = sum(1 for r in rates if abs(r - target) / target < 0.02)
        verdict = close * 10 >= 9 * len(rates)
        body = json.dumps({
            "estimate": sum(rates) / len(rates),
            "stderr": float(np.std(rates) / math.sqrt(len(rates))),
            "threshold": target,
            "pass": verdict,
            "seed": p["seed"],
            "samples": len(rates),
            "rates": rates,
        }, sort_keys=True)
        return body, [verdict], "json"
    if stat == "g0":
        run = g0_fraction(ExperimentSpec(p["a"], p["b"], p["samples"], p["seed"],
                                         Region.OMEGA_B))
    elif stat == "plus-one":
        run = plus_one_fraction(ExperimentSpec(p["a"], p["b"], p["samples"], p["seed"],
                                               Region.OMEGA_B))
    else:
        raise UsageError(f"--stat must be rate, g0 or plus-one, got {stat!r}")
    return json.dumps(_report_from_run(run), sort_keys=True), [run.verdict], "json"


def _observable(name: str) -> ObservableId:
    try:
        return ObservableId(name)
    except ValueError:
        raise UsageError(f"unknown observable {name!r}")


def _run_mixing(cfg: CliConfig):
    p = cfg.params
    start = _start_point(p)
    ces = correlation_cesaro(_observable(p["f"]), _observable(p["g"]), start,
                             p["N"], p["H"])
    early = float(ces[min(99, len(ces) - 1)])
    late = float(ces[-1])
    verdict = late < 0.5 * early
    body = json.dumps({
        "estimate": late,
        "stderr": 0.0,
        "threshold": 0.5 * early,
        "pass": verdict,
        "seed": p["seed"],
        "samples": p["N"],
        "cesaro_early": early,
        "cesaro_late": late,
        "start": [start.s, start.t],
    }, sort_keys=True)
    return body, [verdict], "json"


def _run_scan(cfg: CliConfig):
    p = cfg.params
    start = _start_point(p)
    obs = _observable(p["f"])
    mean = observable_mean(obs)

    def centered(ss, tt):
        return observable_values(obs, ss, tt) - mean

    mag, theta = weyl_scan(centered, start, p["N"], uniform_theta_grid(p["grid"]))
    verdict = mag <= 0.05
    body = json.dumps({
        "estimate": mag,
        "stderr": 0.0,
        "threshold": 0.05,
        "pass": verdict,
        "seed": p["seed"],
        "samples": p["N"],
        "argmax_theta": theta,
        "start": [start.s, start.t],
    }, sort_keys=True)
    return body, [verdict], "json"


def _run_verify_all(cfg: CliConfig):
    wanted = None
    if cfg.params["criteria"]:
        try:
            wanted = {int(tok) for tok in cfg.params["criteria"].split(",")}
        except ValueError:
            raise UsageError("--criteria must be comma-separated integers")
    results = acceptance.run_all(wanted, echo=True)
    body = json.dumps([
        {"criterion": r.number, "name": r.name, "pass": r.passed,
         "seconds": round(r.seconds, 3), "checks": r.details}
        for r in results
    ], sort_keys=True)
    return body, [r.passed for r in results], "json"


_RUNNERS = {
    "orbit": _run_orbit,
    "farey": _run_farey,
    "invariance": _run_invariance,
    "geometry": _run_geometry,
    "claims": _run_claims,
    "return-times": _run_return_times,
    "mixing": _run_mixing,
    "scan-eigenvalues": _run_scan,
    "verify-all": _run_verify_all,
}


def run_command(cfg: CliConfig) -> int:
    """Execute a parsed command; returns the exit code (0 pass / 1 fail)."""
    body, verdicts, default_fmt = _RUNNERS[cfg.command](cfg)
    fmt = cfg.params.get("format") or default_fmt
    if fmt not in ("csv", "json"):
        raise UsageError(f"unknown format {fmt!r}")
    if fmt != default_fmt and default_fmt == "csv":
        raise UsageError(f"command {cfg.command} produces csv output only")
    if fmt != default_fmt and default_fmt == "json":
        raise UsageError(f"command {cfg.command} produces json output only")
    text = _render(cfg, body, verdicts, fmt)
    out_path = cfg.params.get("output")
    if out_path:
        try:
            with open(out_path, "w") as fh:
                fh.write(text)
        except BaseException:
            if os.path.exists(out_path):
                os.unlink(out_path)
            raise
    else:
        sys.stdout.write(text)
    return 0 if all(verdicts) else 1


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
        return run_command(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(usage_text(), file=sys.stderr)
        return 2
    except BczLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2


if __name__ == "__main__":
    sys.exit(main())
