"""Command-line front end: grid runs, reports and identity descriptions.

    verify run [config.json] [--systems ...] [--identities ...] [--grid.s=1,2] ...
    verify explain THM3
    verify list

A config file is JSON with any of the keys systems, identities, grids,
tolerances, table_size, threads, seed, output, format.  Command-line flags
override the file.  Exit status: 0 all checks passed, 1 some check failed,
2 the configuration was invalid.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import gmpy2
import numpy as np

from . import __version__
from . import identities as idt
from .hecke import DEFAULT_TABLE_SIZE, REGISTRY_EXAMPLES, SystemError_, get_system
from .identities import (IDENTITY_IDS, PreconditionError, VerificationRecord, failed_record,
                         skipped_record, tolerance_for)

__all__ = ["ConfigError", "RunConfig", "RunReport", "run", "explain", "list_text", "main",
           "load_config", "IDENTITY_AXES", "DEFAULT_GRIDS"]

SCHEMA = 1
CSV_COLUMNS = ("system", "identity", "s", "nu", "rho", "x", "beta", "r", "extra", "lhs", "rhs",
               "abs_residual", "rel_residual", "tail", "pass")
GRID_AXES = ("s", "nu", "rho", "x", "beta", "r")

DEFAULT_GRIDS = {
    "s": [0.5, 1.0, 2.0, 4.0, 8.0],
    "nu": [-0.5, 0.25, 1.0, 2.5],
    "rho": [0.0, 0.5, 1.0],
    "x": [0.5, 1.0, 2 * math.pi, 10.0],
    "beta": [0.5, 1.0, 3.0],
    "r": [0.5, 1.0, 2.0],
}

# grid axes each identity consumes, in record order
IDENTITY_AXES = {
    "MODULAR": ("x",),
    "RIESZ": ("x", "rho"),
    "THM2": ("s", "nu", "rho"),
    "THM3": ("s", "nu"),
    "CN_EXP": ("s", "rho"),
    "POPOV": ("beta", "nu"),
    "SIGMA_CLOSED": ("s", "nu"),
    "SIGMA_EXP": ("s",),
    "TAU_CLOSED": ("s", "nu"),
    "TAU_EXP": ("s",),
    "WATSON": ("s", "nu"),
    "CHAR_ODD": ("r", "nu"),
    "CHAR_EVEN": ("r", "nu"),
    "DEDEKIND": ("r", "nu"),
    "DEDEKIND_EXP": ("r",),
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


# ---------------------------------------------------------------- config

@dataclass
class RunConfig:
    systems: list = field(default_factory=lambda: list(REGISTRY_EXAMPLES))
    identities: list = field(default_factory=lambda: ["THM3"])
    grids: dict = field(default_factory=lambda: {k: list(v) for k, v in DEFAULT_GRIDS.items()})
    tolerances: dict = field(default_factory=dict)
    table_size: int = DEFAULT_TABLE_SIZE
    threads: int = 0
    seed: int = 0
    output: str | None = None
    format: str = "json"

    def validate(self):
        if not self.systems:
            raise ConfigError("systems: must not be empty")
        if not self.identities:
            raise ConfigError("identities: must not be empty")
        for i, ident in enumerate(self.identities):
            if ident not in IDENTITY_IDS:
                raise ConfigError(f"identities[{i}]: unknown identity {ident!r}")
        for i, sid in enumerate(self.systems):
            if not isinstance(sid, str):
                raise ConfigError(f"systems[{i}]: expected a string id")
            try:
                get_system(sid, self.table_size)
            except SystemError_ as exc:
                raise ConfigError(f"systems[{i}]: {exc}") from exc
        for axis, vals in self.grids.items():
            if axis not in GRID_AXES:
                raise ConfigError(f"grids.{axis}: unknown axis (expected one of {', '.join(GRID_AXES)})")
            for j, v in enumerate(vals):
                if not (isinstance(v, (int, float)) and math.isfinite(v)):
                    raise ConfigError(f"grids.{axis}[{j}]: {v!r} is not a finite number")
        for ident, tol in self.tolerances.items():
            if ident not in IDENTITY_IDS:
                raise ConfigError(f"tolerances.{ident}: unknown identity")
            if not (isinstance(tol, (int, float)) and tol > 0):
                raise ConfigError(f"tolerances.{ident}: must be a positive number")
        if not (isinstance(self.table_size, int) and self.table_size >= 100):
            raise ConfigError("table_size: must be an integer >= 100")
        if not (isinstance(self.threads, int) and self.threads >= 0):
            raise ConfigError("threads: must be a non-negative integer")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format: {self.format!r} is not json or csv")
        return self

    def echo(self):
        out = asdict(self)
        out.pop("threads")
        out.pop("output")
        return out


def _expand_grid(axis, grid_value, rng):
    """A grid is a list of numbers or {"random": n, "low": a, "high": b}."""
    if isinstance(grid_value, dict):
        try:
            n, lo, hi = int(grid_value["random"]), float(grid_value["low"]), float(grid_value["high"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"grids.{axis}: random grid needs integer 'random' and numeric 'low', 'high'") from exc
        if not (n >= 1 and lo < hi):
            raise ConfigError(f"grids.{axis}: need random >= 1 and low < high")
        return [float(f"{v:.12g}") for v in rng.uniform(lo, hi, n)]
    if not isinstance(grid_value, list):
        raise ConfigError(f"grids.{axis}: expected a list of numbers")
    return grid_value


def _parse_number_list(axis, text, rng):
    text = text.strip()
    if text.startswith("random(") and text.endswith(")"):
        parts = text[7:-1].split(",")
        if len(parts) != 3:
            raise ConfigError(f"grids.{axis}: random(n,low,high) needs three arguments")
        try:
            grid_value = {"random": int(parts[0]), "low": float(parts[1]), "high": float(parts[2])}
        except ValueError as exc:
            raise ConfigError(f"grids.{axis}: bad random() arguments") from exc
        return _expand_grid(axis, grid_value, rng)
    vals = []
    for j, tok in enumerate(filter(None, (t.strip() for t in text.split(",")))):
        try:
            vals.append(float(tok))
        except ValueError as exc:
            raise ConfigError(f"grids.{axis}[{j}]: {tok!r} is not a number") from exc
    return vals


def load_config(path=None, overrides=None):
    """Build a RunConfig from an optional JSON file plus command-line overrides."""
    data = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
    known = {f for f in RunConfig.__dataclass_fields__}
    for key in data:
        if key not in known:
            raise ConfigError(f"{key}: unknown configuration key")
    overrides = overrides or {}
    seed = overrides.get("seed", data.get("seed", 0))
    if not isinstance(seed, int):
        raise ConfigError("seed: must be an integer")
    rng = np.random.default_rng(seed)
    cfg = RunConfig()
    if "systems" in data:
        cfg.systems = data["systems"]
    if "identities" in data:
        cfg.identities = data["identities"]
    for name in ("tolerances", "table_size", "threads", "output", "format"):
        if name in data:
            setattr(cfg, name, data[name])
    cfg.seed = seed
    if not isinstance(cfg.systems, list) or not isinstance(cfg.identities, list):
        raise ConfigError("systems and identities must be lists")
    if not isinstance(cfg.tolerances, dict):
        raise ConfigError("tolerances: must be an object")
    grids = data.get("grids", {})
    if not isinstance(grids, dict):
        raise ConfigError("grids: must be an object")
    for axis in sorted(grids):
        if axis not in GRID_AXES:
            raise ConfigError(f"grids.{axis}: unknown axis (expected one of {', '.join(GRID_AXES)})")
        cfg.grids[axis] = _expand_grid(axis, grids[axis], rng)
    for key, val in overrides.items():
        if key == "grids":
            for axis, text in val.items():
                if axis not in GRID_AXES:
                    raise ConfigError(f"grids.{axis}: unknown axis")
                cfg.grids[axis] = _parse_number_list(axis, text, rng)
        elif key == "tolerances":
            cfg.tolerances.update(val)
        elif key != "seed":
            setattr(cfg, key, val)
    return cfg.validate()


def _threads(cfg):
    if cfg.threads:
        return cfg.threads
    env = os.environ.get("VERIFY_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigError(f"VERIFY_THREADS: {env!r} is not an integer") from exc
        if n < 1:
            raise ConfigError("VERIFY_THREADS: must be positive")
        return n
    return min(8, os.cpu_count() or 1)


# ------------------------------------------------------------- dispatch

def _applies(identity, sid):
    head = sid.split(":")[0]
    if identity == "POPOV":
        return head == "rk"
    if identity in ("SIGMA_CLOSED", "SIGMA_EXP"):
        return head == "sigma"
    if identity in ("TAU_CLOSED", "TAU_EXP"):
        return head == "tau"
    if identity == "WATSON":
        return head == "zeta"
    if identity in ("CHAR_ODD", "CHAR_EVEN"):
        if head != "char":
            return False
        parity = get_system(sid).info["parity"]
        return (parity == "odd") == (identity == "CHAR_ODD")
    if identity in ("DEDEKIND", "DEDEKIND_EXP"):
        return head == "dedekind"
    return True


def _call(identity, sid, p, tol, table_size):
    system = get_system(sid, table_size)
    arg = sid.split(":")[1:]
    if identity == "THM3":
        return idt.check_thm3(system, p["s"], p["nu"], tol=tol)
    if identity == "THM2":
        return idt.check_thm2(system, p["s"], p["nu"], p["rho"], tol=tol)
    if identity == "MODULAR":
        return idt.check_modular(system, p["x"], tol=tol)
    if identity == "RIESZ":
        rho = p["rho"]
        if rho != int(rho):
            raise PreconditionError(f"ρ = {rho:g} must be an integer ≥ 1")
        return idt.check_riesz(system, p["x"], int(rho), tol=tol)
    if identity == "CN_EXP":
        rho = p["rho"]
        if rho != int(rho):
            raise PreconditionError(f"ρ = {rho:g} must be 0, 1 or 2")
        return idt.check_cn_exponential(system, p["s"], int(rho), tol=tol)
    if identity == "POPOV":
        return idt.check_popov(int(arg[0]), p["beta"], p["nu"], tol=tol)
    if identity == "SIGMA_CLOSED":
        return idt.check_sigma_closed(int(arg[0]), p["s"], p["nu"], tol=tol)
    if identity == "SIGMA_EXP":
        return idt.check_sigma_exp(int(arg[0]), p["s"], tol=tol)
    if identity == "TAU_CLOSED":
        return idt.check_tau(p["s"], p["nu"], tol=tol)
    if identity == "TAU_EXP":
        return idt.check_tau_exp(p["s"], tol=tol)
    if identity == "WATSON":
        return idt.check_watson(p["s"], p["nu"], tol=tol)
    if identity in ("CHAR_ODD", "CHAR_EVEN"):
        return idt.check_char(system.info["chi"], p["r"], p["nu"], tol=tol)
    if identity == "DEDEKIND":
        return idt.check_dedekind(int(arg[0]), p["r"], p["nu"], tol=tol)
    if identity == "DEDEKIND_EXP":
        return idt.check_dedekind_exp(int(arg[0]), p["r"], tol=tol)
    raise ConfigError(f"unknown identity {identity!r}")


def _record_params(identity, sid, p):
    out = dict(p)
    if identity in ("POPOV", "SIGMA_CLOSED", "SIGMA_EXP", "DEDEKIND", "DEDEKIND_EXP"):
        out["extra"] = sid.split(":")[1]
    elif identity in ("CHAR_ODD", "CHAR_EVEN"):
        out["extra"] = sid.split(":", 1)[1]
    return out


def _task(identity, sid, p, cfg):
    tol = cfg.tolerances.get(identity, tolerance_for(identity, sid, p.get("s")))
    params = _record_params(identity, sid, p)
    try:
        rec = _call(identity, sid, p, tol, cfg.table_size)
    except PreconditionError as exc:
        return skipped_record(identity, sid, params, str(exc))
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        return failed_record(identity, sid, params, f"{type(exc).__name__}: {exc}")
    # report the grid values exactly as configured
    return VerificationRecord(**{**rec.__dict__, **params})


def _points(cfg, identity):
    axes = IDENTITY_AXES[identity]
    pts = [{}]
    for axis in axes:
        vals = cfg.grids.get(axis, DEFAULT_GRIDS[axis])
        pts = [{**p, axis: float(v)} for p in pts for v in vals]
    return pts


# --------------------------------------------------------------- reports

@dataclass
class RunReport:
    config: dict
    records: list
    summary: dict
    wall_time: float
    build: dict

    @property
    def exit_code(self):
        return 1 if self.summary["fail"] else 0

    def to_json(self):
        doc = {
            "schema": SCHEMA,
            "build": self.build,
            "config": self.config,
            "summary": self.summary,
            "records": [r.to_dict(timing=False) for r in self.records],
            "timing": {
                "total_wall_time": self.wall_time,
                "record_wall_time": [r.wall_time for r in self.records],
            },
        }
        return json.dumps(doc, indent=1, sort_keys=False, default=_json_default) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.records:
            row = [r.system, r.identity]
            for name in ("s", "nu", "rho", "x", "beta", "r"):
                row.append(_csv_num(getattr(r, name)))
            row.append(r.extra or "")
            for v in (r.lhs, r.rhs, r.abs_residual, r.rel_residual, r.certified_tail):
                row.append(_csv_num(v))
            row.append(r.status)
            writer.writerow(row)
        return buf.getvalue()

    def summary_text(self):
        s = self.summary
        lines = [f"{s['total']} records: {s['pass']} pass, {s['fail']} fail, {s['skipped']} skipped"]
        for ident, worst in s["max_rel_residual"].items():
            lines.append(f"  {ident:13s} max rel residual {worst:.3e}")
        for r in self.records:
            if r.status == "fail":
                lines.append(f"  FAIL {r.system} {r.identity} {r.params()} rel={r.rel_residual:.3e} {r.reason}")
        return "\n".join(lines)


def _csv_num(v):
    return "" if v is None else repr(float(v))


def _json_default(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _clean(v):
    return None if isinstance(v, float) and not math.isfinite(v) else v


def _summarize(records):
    counts = {"pass": 0, "fail": 0, "skipped": 0}
    worst, worst_abs = {}, {}
    for r in records:
        counts[r.status] += 1
        if r.status != "skipped" and math.isfinite(r.rel_residual):
            worst[r.identity] = max(worst.get(r.identity, 0.0), r.rel_residual)
            worst_abs[r.identity] = max(worst_abs.get(r.identity, 0.0), r.abs_residual)
    return {"total": len(records), **counts,
            "max_rel_residual": dict(sorted(worst.items())),
            "max_abs_residual": dict(sorted(worst_abs.items()))}


def _build_info():
    return {"version": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "gmpy2": gmpy2.version()}


def run(config: RunConfig) -> RunReport:
    """Run every (system, identity, grid point) of the configuration."""
    config.validate()
    start = time.perf_counter()
    tasks = []
    for sid in config.systems:
        get_system(sid, config.table_size)
        for ident in config.identities:
            if not _applies(ident, sid):
                continue
            for p in _points(config, ident):
                tasks.append((ident, sid, p))
    nthreads = _threads(config)
    if nthreads == 1:
        records = [_task(i, s, p, config) for i, s, p in tasks]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            futures = [pool.submit(_task, i, s, p, config) for i, s, p in tasks]
            records = [f.result() for f in futures]
    records = [VerificationRecord(**{k: _clean(v) for k, v in r.__dict__.items()}) for r in records]
    records.sort(key=VerificationRecord.sort_key)
    return RunReport(config=config.echo(), records=records, summary=_summarize(records),
                     wall_time=time.perf_counter() - start, build=_build_info())


# --------------------------------------------------------------- explain

_EXPLAIN = {
    "MODULAR": (
        "Modular relation (Bochner form of the functional equation)",
        "sum a(n) e^(-lambda_n x) = (2 pi/x)^delta sum b(n) e^(-4 pi^2 mu_n/x) + P(x)",
        "x > 0; P(x) is built from the pole data of phi",
        "The exponential-series transformation equivalent to the Gamma(s) functional "
        "equation; for r_2 it is the Jacobi theta transformation."),
    "RIESZ": (
        "Riesz-sum identity",
        "(1/Gamma(rho+1)) sum_{lambda_n <= x} a(n)(x - lambda_n)^rho = (2 pi)^-rho sum b(n) "
        "(x/mu_n)^((delta+rho)/2) J_{delta+rho}(4 pi sqrt(mu_n x)) + Q_rho(x)",
        "x > 0 not a point lambda_n with a(n) != 0; integer rho >= 1 with rho > 2 sigma_a* - delta - 1/2",
        "Exercised, not certified: the J-Bessel series is summed with a smooth window and "
        "the tolerance is absolute."),
    "THM2": (
        "Incomplete Bessel integral identity (general rho)",
        "(1/Gamma(rho+1)) sum a(n) int_{lambda_n}^inf (x - lambda_n)^rho x^(nu/2) K_nu(s sqrt x) dx "
        "= 2^(3 delta+2 rho+nu+1) s^nu pi^delta Gamma(delta+rho+nu+1) sum b(n) (s^2+16 pi^2 mu_n)^-(delta+rho+nu+1) "
        "+ int_0^inf Q_rho(x) x^(nu/2) K_nu(s sqrt x) dx",
        "s > 0, nu > 0, rho >= 0, delta + rho + nu + 1 > sigma_a*",
        "The left side is computed term by term with double-exponential quadrature."),
    "THM3": (
        "Master Bessel-K / Hurwitz identity",
        "(2/s) sum a(n) lambda_n^((nu+1)/2) K_{nu+1}(s sqrt(lambda_n)) = 2^(3 delta+nu+1) s^nu pi^delta "
        "Gamma(delta+nu+1) sum b(n) (s^2+16 pi^2 mu_n)^-(delta+nu+1) + int_0^inf Q_0(x) x^(nu/2) K_nu(s sqrt x) dx",
        "s > 0, nu > -1 (nu <= 0 by analytic continuation)",
        "The rho = 0 case of the incomplete-integral identity, with the integral in closed form."),
    "CN_EXP": (
        "Exponential identity of Chandrasekharan and Narasimhan",
        "(-(1/s) d/ds)^rho { (1/s) sum a(n) e^(-s sqrt(lambda_n)) } = 2^(3 delta+rho) Gamma(delta+rho+1/2) "
        "pi^(delta-1/2) sum b(n) (s^2+16 pi^2 mu_n)^-(delta+rho+1/2) + R_rho(s)",
        "s > 0, rho in {0, 1, 2}, delta + rho + 1/2 > sigma_a*",
        "Derivatives are taken term by term in closed form."),
    "POPOV": (
        "Popov's identity for sums of squares (Hardy's identity when k = 2)",
        "sum_{n>=0} r_k(n) n^((nu+1)/2) K_{nu+1}(2 pi sqrt(n beta)) = beta^((nu+1)/2) Gamma(nu+1+k/2) "
        "/ (2 pi^(k/2+nu+1)) sum_{n>=0} r_k(n) (beta+n)^-(k/2+nu+1)",
        "beta > 0, nu > -1; the n = 0 term on the left is the small-argument limit",
        "The r_k example of the master identity with s = 2^(3/2) pi sqrt(beta)."),
    "SIGMA_CLOSED": (
        "Divisor-function Bessel identity",
        "sum_{n>=0} sigma_k(n) n^((nu+1)/2) K_{nu+1}(s sqrt n) + [k=1] 2^(nu+1) Gamma(nu+2)/s^(nu+3) "
        "= 2^(3k+nu+3) s^(nu+1) pi^(k+1) Gamma(k+nu+2) sum_{n>=0} (-1)^((k+1)/2) sigma_k(n) (s^2+16 pi^2 n)^-(k+nu+2)",
        "k odd, s > 0, nu > -1; sigma_k(0) = -B_{k+1}/(2(k+1))",
        "The sigma_k example of the master identity in closed form."),
    "SIGMA_EXP": (
        "Divisor-function exponential identity (Chandrasekharan and Narasimhan)",
        "sum sigma_k(n) e^(-s sqrt n) = 2^(3k+3) Gamma(k+3/2) pi^(k+1/2) sum s (-1)^((k+1)/2) sigma_k(n) "
        "(s^2+16 pi^2 n)^-(k+3/2) + B_{k+1}/(2(k+1)) - [k=1]/s^2 + Bernoulli correction",
        "k odd, s > 0",
        "The nu = -1/2 case of the divisor-function Bessel identity."),
    "TAU_CLOSED": (
        "Ramanujan tau Bessel identity",
        "sum tau(n) n^((nu+1)/2) K_{nu+1}(s sqrt n) = 2^(36+nu) s^(nu+1) pi^12 Gamma(13+nu) "
        "sum tau(n) (s^2+16 pi^2 n)^-(nu+13)",
        "s > 0, nu > -1; at nu = -1/2 the exponential form is cross-checked",
        "The tau example of the master identity (phi entire, Q_0 = 0)."),
    "TAU_EXP": (
        "Ramanujan tau exponential identity (Chandrasekharan and Narasimhan)",
        "sum tau(n) e^(-s sqrt n) = 2^36 pi^(23/2) Gamma(25/2) sum s tau(n) (s^2+16 pi^2 n)^(-25/2)",
        "s > 0",
        "The nu = -1/2 case of the tau Bessel identity."),
    "WATSON": (
        "Watson's self-reciprocal identity",
        "Gamma(nu)/2 + 2 sum (nz/2)^nu K_nu(nz) = Gamma(1/2) Gamma(nu+1/2) z^(2 nu) "
        "{ z^-(2 nu+1) + 2 sum (z^2+4 pi^2 n^2)^-(nu+1/2) }",
        "z > 0 (reported in the s column), nu > 0",
        "Also rebuilt from the master identity on the zeta system with s = z sqrt 2 and order nu - 1."),
    "CHAR_ODD": (
        "Odd-character analogue of Watson's identity",
        "sum chi(n) n^(nu+2) K_{nu+1}(rn) = -i tau(chi) r^(nu+1) q^(2 nu+3) Gamma(nu+5/2) "
        "/ (2^(nu+2) pi^(2 nu+7/2)) sum n conj(chi)(n) (n^2+q^2 r^2/(4 pi^2))^-(nu+5/2)",
        "chi primitive and odd, r > 0, nu > -1",
        "Complex arithmetic throughout; the imaginary residual is reported."),
    "CHAR_EVEN": (
        "Even-character analogue of Watson's identity",
        "sum chi(n) n^(nu+1) K_{nu+1}(rn) = tau(chi) r^(nu+1) q^(2 nu+2) Gamma(nu+3/2) "
        "/ (2^(nu+2) pi^(2 nu+5/2)) sum conj(chi)(n) (n^2+q^2 r^2/(4 pi^2))^-(nu+3/2)",
        "chi primitive and even, non-principal, r > 0, nu > -1",
        "Complex arithmetic throughout; the imaginary residual is reported."),
    "DEDEKIND": (
        "Ideal-counting (Dedekind zeta) Bessel identity for imaginary quadratic fields",
        "sum_{n>=0} F(n) n^((nu+1)/2) K_{nu+1}(4 pi sqrt(rn)/d) = (1/(2 sqrt r)) (d sqrt(r)/(2 pi))^(nu+2) "
        "Gamma(nu+2) sum_{n>=0} F(n) (r+n)^-(nu+2)",
        "r > 0, nu > -1, F(0) = h/w, d = sqrt|D|",
        "The Dedekind-zeta example of the master identity with s = 4 pi sqrt(r/d)."),
    "DEDEKIND_EXP": (
        "Ideal-counting exponential identity",
        "sum_{n>=0} F(n) e^(-4 pi sqrt(rn)/d) = d sqrt(r)/(4 pi) sum_{n>=0} F(n) (r+n)^(-3/2)",
        "r > 0",
        "The nu = -1/2 case of the ideal-counting identity."),
}


def explain(identity_id: str) -> str:
    """Statement, parameter domain and provenance of one identity."""
    key = identity_id.strip().upper()
    if key not in _EXPLAIN:
        raise KeyError(f"unknown identity {identity_id!r}; try one of {', '.join(IDENTITY_IDS)}")
    title, statement, domain, note = _EXPLAIN[key]
    tol = idt.TOLERANCES[key]
    kind = "absolute" if key in idt.ABSOLUTE_TOLERANCE else "relative"
    return (f"{key}: {title}\n\n  {statement}\n\nDomain: {domain}\n"
            f"Default tolerance: {tol:g} ({kind})\nGrid axes: {', '.join(IDENTITY_AXES[key])}\n{note}\n")


def list_text() -> str:
    lines = ["Systems (registry ids):",
             "  rk:k (k = 2..12), sigma:k (odd k <= 11), tau, zeta,",
             "  char:q:index (q in 3, 4, 5, 7, 8), dedekind:D (D in -3, -4, -7, -8, -11)",
             f"  default run: {', '.join(REGISTRY_EXAMPLES)}",
             "Identities:"]
    for key in IDENTITY_IDS:
        lines.append(f"  {key:13s} {_EXPLAIN[key][0]}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------- CLI

def _parser():
    p = argparse.ArgumentParser(prog="verify", description="Numerical verification of Bessel-K / Hurwitz identities.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a verification grid")
    r.add_argument("config", nargs="?", help="JSON configuration file")
    r.add_argument("--systems", help="comma-separated system ids")
    r.add_argument("--identities", help="comma-separated identity ids")
    for axis in GRID_AXES:
        r.add_argument(f"--grid.{axis}", dest=f"grid_{axis}", metavar="V1,V2,...",
                       help=f"values for {axis}, or random(n,low,high)")
    r.add_argument("--tol", action="append", default=[], metavar="ID=VALUE", help="tolerance override")
    r.add_argument("--table-size", type=int)
    r.add_argument("--threads", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="report path")
    r.add_argument("--format", choices=("json", "csv"))
    e = sub.add_parser("explain", help="describe an identity")
    e.add_argument("identity")
    sub.add_parser("list", help="list systems and identities")
    return p


def _overrides(args):
    out = {}
    if args.systems:
        out["systems"] = [s.strip() for s in args.systems.split(",") if s.strip()]
    if args.identities:
        out["identities"] = [s.strip().upper() for s in args.identities.split(",") if s.strip()]
    grids = {axis: getattr(args, f"grid_{axis}") for axis in GRID_AXES
             if getattr(args, f"grid_{axis}") is not None}
    if grids:
        out["grids"] = grids
    tols = {}
    for item in args.tol:
        ident, _, val = item.partition("=")
        try:
            tols[ident.strip().upper()] = float(val)
        except ValueError as exc:
            raise ConfigError(f"--tol {item!r}: expected ID=VALUE") from exc
    if tols:
        out["tolerances"] = tols
    for name, attr in (("table_size", "table_size"), ("threads", "threads"), ("seed", "seed"),
                       ("output", "out"), ("format", "format")):
        v = getattr(args, attr)
        if v is not None:
            out[name] = v
    if "output" in out and "format" not in out and out["output"].endswith(".csv"):
        out["format"] = "csv"
    return out


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        sys.stdout.write(list_text())
        return 0
    if args.command == "explain":
        try:
            sys.stdout.write(explain(args.identity))
        except KeyError as exc:
            print(f"error: {exc.args[0]}", file=sys.stderr)
            return 2
        return 0
    try:
        cfg = load_config(args.config, _overrides(args))
        report = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    text = report.to_csv() if cfg.format == "csv" else report.to_json()
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(report.summary_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
