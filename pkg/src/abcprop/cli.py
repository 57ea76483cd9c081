"""Command-line front end: spectrum tables, amplitude evaluation and scans, identity checks.

Units are natural, hbar = 1. Output is JSON ``{config, results, diagnostics}``
or CSV with ``# key = value`` header lines; both embed the fully resolved
configuration, which can be fed back through ``--config``.

Exit codes: 0 success, 1 usage error, 2 numerical precondition violated,
3 a check exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Callable

import numpy as np

from . import battery
from .amplitude import (
    EndpointPair,
    FixedEnergy,
    TruncationSpec,
    green_partial_wave,
    green_q_integral,
)
from .errors import ABCError, NearPoleError
from .kstransform import SphericalPoint
from .spectrum import PhysParams, enumerate_levels

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_CHECK_FAILED = 0, 1, 2, 3
UNITS = "hbar = 1"
SCAN_KEYS = ("energy", "ra", "theta_a", "phi_a", "rb", "theta_b", "phi_b")

# key -> (parser, default)
_FIELDS: dict[str, tuple[Callable[[str], Any], Any]] = {
    "mass": (float, 1.0),
    "coulomb": (float, -1.0),
    "flux": (float, 0.0),
    "m_max": (int, 12),
    "n_max": (int, 40),
    "quad_rel_tol": (float, 1e-11),
    "energy": (float, -0.2),
    "ra": (float, 1.0),
    "theta_a": (float, 1.0),
    "phi_a": (float, 0.3),
    "rb": (float, 1.7),
    "theta_b": (float, 2.0),
    "phi_b": (float, 1.4),
    "max_principal": (float, 3.5),
    "scan": (str, "none"),
    "scan_start": (float, None),
    "scan_stop": (float, None),
    "scan_points": (int, 21),
    "check": (str, "all"),
    "samples": (int, 10_000),
    "seed": (int, 0),
    "format": (str, "json"),
    "out": (str, None),
}
_CHOICES = {
    "format": ("json", "csv"),
    "scan": ("none",) + SCAN_KEYS,
    "check": battery.CHECK_NAMES + ("all",),
}
_READ_ONLY = {"command", "units"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("physical parameters (natural units, hbar = 1)")
    g.add_argument("--mass", type=float, help="particle mass M > 0")
    g.add_argument("--coulomb", type=float, help="Coulomb strength xi; negative is attractive")
    g.add_argument("--flux", type=float, help="flux alpha in units of the flux quantum")
    t = common.add_argument_group("truncation")
    t.add_argument("--m-max", type=int, help="channels m0-m_max..m0+m_max")
    t.add_argument("--n-max", type=int, help="radial index cutoff of the partial-wave sum")
    t.add_argument("--quad-rel-tol", type=float, help="relative tolerance of the q-quadrature")
    e = common.add_argument_group("amplitude")
    e.add_argument("--energy", type=float, help="energy E < 0")
    for name in ("ra", "theta-a", "phi-a", "rb", "theta-b", "phi-b"):
        e.add_argument(f"--{name}", type=float)
    e.add_argument("--scan", choices=_CHOICES["scan"], help="scan one of energy or an endpoint coordinate")
    e.add_argument("--scan-start", type=float)
    e.add_argument("--scan-stop", type=float)
    e.add_argument("--scan-points", type=int)
    c = common.add_argument_group("spectrum and checks")
    c.add_argument("--max-principal", type=float, help="largest principal number listed or compared")
    c.add_argument("--check", choices=_CHOICES["check"])
    c.add_argument("--samples", type=int, help="random samples for the KS battery")
    c.add_argument("--seed", type=int)
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=_CHOICES["format"])
    o.add_argument("--out", help="write here instead of stdout")
    o.add_argument("--config", help="flat 'key = value' file or a previous JSON output")

    parser = _Parser(
        prog="abcprop",
        description="Coulomb problem with an Aharonov-Bohm flux line. Natural units, hbar = 1.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("spectrum", parents=[common], help="bound-state levels with degeneracies")
    sub.add_parser("green", parents=[common], help="fixed-energy amplitude from both evaluators")
    sub.add_parser("check", parents=[common], help="identity checks and oracle comparison")
    return parser


def _coerce(key: str, raw: Any) -> Any:
    if key not in _FIELDS:
        raise UsageError(f"unknown config key {key!r}")
    conv, _ = _FIELDS[key]
    if raw is None:
        return None
    try:
        if conv is int and isinstance(raw, float) and not raw.is_integer():
            raise ValueError
        value = conv(raw)
    except (TypeError, ValueError):
        raise UsageError(f"invalid value for {key}: {raw!r}") from None
    if key in _CHOICES and value not in _CHOICES[key]:
        raise UsageError(f"{key} must be one of {', '.join(_CHOICES[key])}")
    return value


def read_config(path: str) -> dict[str, Any]:
    """Parse a flat ``key = value`` file, or the ``config`` block of a JSON output."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed JSON config: {exc.msg}") from None
        items = raw.get("config", raw).items() if isinstance(raw, dict) else []
    else:
        items = []
        # a CSV output carries its config as '# key = value' lines above the table
        from_csv = text.startswith("# command = ")
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if from_csv:
                if not line.startswith("# "):
                    break
                line = line[2:]
            elif not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config line {lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            items.append((key, None if value in ("", "null", "None") else value))
    out = {}
    for key, value in items:
        key = key.replace("-", "_")
        if key in _READ_ONLY:
            continue
        out[key] = _coerce(key, value)
    return out


def resolve_config(args: argparse.Namespace) -> dict[str, Any]:
    """Defaults, then the config file, then explicit flags."""
    cfg = {k: default for k, (_, default) in _FIELDS.items()}
    if args.config:
        cfg.update({k: v for k, v in read_config(args.config).items()})
    for key in _FIELDS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if cfg["m_max"] < 0 or cfg["n_max"] < 0:
        raise UsageError("m_max and n_max must be non-negative")
    if cfg["samples"] < 1 or cfg["scan_points"] < 1:
        raise UsageError("samples and scan_points must be positive")
    return cfg


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def to_json(obj: Any, indent: int = 0) -> str:
    """JSON with every float at 17 significant digits; complex becomes ``{re, im}``."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, complex):
        return to_json({"re": obj.real, "im": obj.imag}, indent)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f"{pad}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + body + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        body = ",\n".join(pad + to_json(v, indent + 1) for v in obj)
        return "[\n" + body + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _flatten(record: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    flat = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, complex):
            flat[f"{name}_re"], flat[f"{name}_im"] = value.real, value.imag
        elif isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        elif isinstance(value, (list, tuple)):
            flat[name] = ";".join(str(v) for v in value)
        else:
            flat[name] = value
    return flat


def to_csv(config: dict[str, Any], rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    for key, value in config.items():
        buf.write(f"# {key} = {'' if value is None else _cell(value)}\n")
    flat = [_flatten(r) for r in rows]
    columns: list[str] = []
    for r in flat:
        columns.extend(k for k in r if k not in columns)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in flat:
        writer.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value)) if math.isfinite(value) else ""
    return str(value)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _params(cfg) -> PhysParams:
    return PhysParams(cfg["mass"], cfg["coulomb"], cfg["flux"])


def cmd_spectrum(cfg):
    params = _params(cfg)
    levels = enumerate_levels(params, cfg["max_principal"])
    results = [
        {
            "energy": lv.energy,
            "principal": lv.principal,
            "degeneracy": lv.degeneracy,
            "members": [f"{q.m}:{q.n}:{q.nprime}" for q in lv.members],
        }
        for lv in levels
    ]
    return results, {"levels": len(levels), "member_format": "m:n:nprime"}, results, EXIT_OK


def _endpoints(cfg) -> EndpointPair:
    pts = EndpointPair(
        SphericalPoint(cfg["ra"], cfg["theta_a"], cfg["phi_a"]),
        SphericalPoint(cfg["rb"], cfg["theta_b"], cfg["phi_b"]),
    )
    pts.require_off_axis()
    return pts


def _green_record(params, cfg, trunc):
    pts = _endpoints(cfg)
    fe = FixedEnergy.from_energy(params, cfg["energy"])
    qi = green_q_integral(params, pts, fe, trunc)
    pw = green_partial_wave(params, pts, fe, trunc)
    return {
        "q_integral": {"value": qi.value, "err_estimate": qi.err_estimate},
        "partial_wave": {"value": pw.value, "err_estimate": pw.err_estimate},
        "rel_diff": abs(qi.value - pw.value) / abs(pw.value),
        "magnitude": abs(pw.value),
    }


def cmd_green(cfg):
    params = _params(cfg)
    trunc = TruncationSpec(cfg["m_max"], cfg["n_max"], cfg["quad_rel_tol"])
    if cfg["scan"] == "none":
        record = {"energy": cfg["energy"], **_green_record(params, cfg, trunc)}
        return record, {"points": 1}, [record], EXIT_OK
    if cfg["scan_start"] is None or cfg["scan_stop"] is None:
        raise UsageError("a scan needs --scan-start and --scan-stop")
    key = cfg["scan"]
    # a guard violation marks the point instead of aborting the scan
    rows = []
    skipped = 0
    for x in np.linspace(cfg["scan_start"], cfg["scan_stop"], cfg["scan_points"]):
        point = dict(cfg, **{key: float(x)})
        row: dict[str, Any] = {key: float(x)}
        try:
            row.update(_green_record(params, point, trunc))
        except NearPoleError as exc:
            skipped += 1
            row["error"] = str(exc)
        rows.append(row)
    return rows, {"points": len(rows), "near_pole_points": skipped}, rows, EXIT_OK


def cmd_check(cfg):
    names = battery.CHECK_NAMES if cfg["check"] == "all" else (cfg["check"],)
    reports = battery.run_checks(names, _params(cfg), cfg["seed"], cfg["samples"], cfg["max_principal"])
    results = [r._asdict() for r in reports]
    rows = [{"name": r.name, "passed": r.passed, "max_residual": r.max_residual,
             "tolerance": r.tolerance} for r in reports]
    passed = all(r.passed for r in reports)
    return results, {"all_passed": passed}, rows, EXIT_OK if passed else EXIT_CHECK_FAILED


_COMMANDS = {"spectrum": cmd_spectrum, "green": cmd_green, "check": cmd_check}


def _fail(code: int, kind: str, message: str, **extra) -> int:
    payload = {"error": kind, "message": message, "exit_code": code, **extra}
    sys.stderr.write(json.dumps(payload, allow_nan=False, default=str) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    try:
        results, diagnostics, rows, code = _COMMANDS[args.command](cfg)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except NearPoleError as exc:
        return _fail(EXIT_PRECONDITION, type(exc).__name__, str(exc), level_energy=exc.level_energy,
                     principal=exc.principal, m=exc.m)
    except ABCError as exc:
        return _fail(EXIT_PRECONDITION, type(exc).__name__, str(exc))
    header = {"command": args.command, "units": UNITS, **cfg}
    if cfg["format"] == "json":
        text = to_json({"config": header, "results": results, "diagnostics": diagnostics}) + "\n"
    else:
        text = to_csv(header, rows)
    if cfg["out"]:
        with open(cfg["out"], "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
