"""Scenario runner: config parsing, sweeps and deterministic CSV output.

A scenario file is flat INI-style text with [scenario], [state],
[environment], [time] and [quadrature] sections; environment entries
accept lists for parameter sweeps.  Each parameter combination produces
a per-combination CSV and one summary row; numerical warnings are
collected into warnings.txt and a manifest.json is written last.  All
numbers are printed with 17 significant digits so identical configs
yield byte-identical output.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import re
import sys
import warnings
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Callable

import numpy as np

from . import analysis, ck, cl, fluxeigen
from .errors import ConfigError, ConvergenceError
from .params import Environment, GaussianSuperposition, PhysicalConstants

__all__ = ["ScenarioConfig", "parse_config", "run_scenario", "main"]

_KINDS = ("ck-free", "ck-force", "cl-free", "cl-force", "eigen-free", "eigen-force")
_SERIES_KINDS = ("ck-free", "ck-force", "cl-free", "cl-force")
_SUMMARY_HEADER = (
    "gamma,kT,g,beta,beta_prime,first_interval_start,first_interval_end,"
    "first_interval_duration,first_interval_gain"
)
_EIGEN_SUMMARY_HEADER = "gamma,kT,g,xi,lambda_max,n_used,convergence_estimate"


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario: kind, physics, sweeps, grids, quadrature."""

    kind: str
    constants: PhysicalConstants
    state: GaussianSuperposition
    gammas: tuple[float, ...]
    kTs: tuple[float, ...]
    gs: tuple[float, ...]
    t_lo: float
    t_hi: float
    step: float
    tau: float
    quad: fluxeigen.QuadratureSpec
    eigen_tol: float
    allow_negative_time: bool
    echo: dict


# ---------------------------------------------------------------------------
# config text -> ScenarioConfig

_SECTION_RE = re.compile(r"^\[([a-z]+)\]$")
_LIST_RE = re.compile(r"^\[(.*)\]$")

_SCHEMA: dict[str, set[str]] = {
    "scenario": {"kind", "hbar", "m", "epsilon", "allow_negative_time"},
    "state": {"sigma_p", "p0a", "p0b", "alpha", "theta"},
    "environment": {"gamma", "kT", "g"},
    "time": {"t_lo", "t_hi", "step", "tau"},
    "quadrature": {"n", "mapping", "u_max", "scale", "rule", "tol"},
}

_BAREWORD_KEYS = {"kind", "mapping", "rule"}
_BOOL_KEYS = {"allow_negative_time"}
_LIST_KEYS = {"gamma", "kT", "g"}
_INT_KEYS = {"n"}


def _parse_scalar(key: str, token: str, line_no: int, col: int):
    token = token.strip()
    if key in _BAREWORD_KEYS:
        return token
    if key in _BOOL_KEYS:
        if token in ("true", "false"):
            return token == "true"
        raise ConfigError(f"line {line_no}, col {col}: {key} must be true or false, got {token!r}")
    if token == "pi":
        return math.pi
    if token == "-pi":
        return -math.pi
    try:
        value = float(token)
    except ValueError:
        raise ConfigError(
            f"line {line_no}, col {col}: cannot parse {token!r} as a number"
        ) from None
    if key in _INT_KEYS:
        if value != int(value):
            raise ConfigError(f"line {line_no}, col {col}: {key} must be an integer")
        return int(value)
    return value


def _parse_value(key: str, raw: str, line_no: int, col: int):
    raw = raw.strip()
    if not raw:
        raise ConfigError(f"line {line_no}, col {col}: empty value for {key!r}")
    m = _LIST_RE.match(raw)
    if m:
        if key not in _LIST_KEYS:
            raise ConfigError(f"line {line_no}, col {col}: {key} does not accept a list")
        items = [s for s in (part.strip() for part in m.group(1).split(",")) if s]
        if not items:
            raise ConfigError(f"line {line_no}, col {col}: empty list for {key!r}")
        return tuple(_parse_scalar(key, item, line_no, col) for item in items)
    value = _parse_scalar(key, raw, line_no, col)
    if key in _LIST_KEYS:
        return (value,)
    return value


def _read_sections(text: str) -> dict[str, dict[str, object]]:
    sections: dict[str, dict[str, object]] = {}
    current: str | None = None
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        m = _SECTION_RE.match(stripped)
        if m:
            name = m.group(1)
            if name not in _SCHEMA:
                raise ConfigError(f"line {line_no}: unknown section [{name}]")
            current = name
            sections.setdefault(name, {})
            continue
        if current is None:
            raise ConfigError(f"line {line_no}: entry before any [section] header")
        if "=" not in stripped:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {stripped!r}")
        key_part, value_part = stripped.split("=", 1)
        key = key_part.strip()
        col = raw_line.index("=") + 2
        if key not in _SCHEMA[current]:
            raise ConfigError(
                f"line {line_no}, col {raw_line.find(key) + 1}: unknown key {key!r} "
                f"in [{current}]"
            )
        if key in sections[current]:
            raise ConfigError(f"line {line_no}: duplicate key {key!r} in [{current}]")
        sections[current][key] = _parse_value(key, value_part, line_no, col)
    return sections


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario file; unknown keys are errors."""
    sections = _read_sections(text)
    scenario = sections.get("scenario", {})
    state_s = sections.get("state", {})
    env_s = sections.get("environment", {})
    time_s = sections.get("time", {})
    quad_s = sections.get("quadrature", {})

    kind = scenario.get("kind")
    if kind is None:
        raise ConfigError("missing required key 'kind' in [scenario]")
    if kind not in _KINDS:
        raise ConfigError(f"kind must be one of {_KINDS}, got {kind!r}")

    try:
        constants = PhysicalConstants(
            m=float(scenario.get("m", 1.0)),
            hbar=float(scenario.get("hbar", 1.0)),
            epsilon=float(scenario.get("epsilon", 1.0)),
        )
        state = GaussianSuperposition.from_momenta(
            sigma_p=float(state_s.get("sigma_p", 0.05)),
            p0a=float(state_s.get("p0a", 1.4)),
            p0b=float(state_s.get("p0b", 0.3)),
            alpha=float(state_s.get("alpha", 1.9)),
            theta=float(state_s.get("theta", math.pi)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    gammas = tuple(float(v) for v in env_s.get("gamma", (0.0,)))
    kTs = tuple(float(v) for v in env_s.get("kT", (0.0,)))
    gs = tuple(float(v) for v in env_s.get("g", (0.0,)))
    for name, values in (("gamma", gammas), ("kT", kTs), ("g", gs)):
        for v in values:
            if not math.isfinite(v):
                raise ConfigError(f"{name} values must be finite, got {v!r}")
    if any(v < 0.0 for v in gammas):
        raise ConfigError("gamma values must be >= 0")
    if any(v < 0.0 for v in kTs):
        raise ConfigError("kT values must be >= 0")

    t_lo = float(time_s.get("t_lo", 0.0))
    t_hi = float(time_s.get("t_hi", 50.0))
    step = float(time_s.get("step", 0.01))
    tau = float(time_s.get("tau", t_hi))
    if not step > 0.0:
        raise ConfigError(f"step must be > 0, got {step!r}")
    if not t_lo < t_hi:
        raise ConfigError(f"need t_lo < t_hi, got {t_lo!r} >= {t_hi!r}")

    try:
        quad = fluxeigen.QuadratureSpec(
            n=int(quad_s.get("n", 400)),
            mapping=str(quad_s.get("mapping", "truncation")),
            u_max=float(quad_s.get("u_max", 8.0)),
            scale=float(quad_s.get("scale", 4.0)),
            rule=str(quad_s.get("rule", "global")),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    eigen_tol = float(quad_s.get("tol", 1e-4))
    if not eigen_tol > 0.0:
        raise ConfigError(f"tol must be > 0, got {eigen_tol!r}")

    allow_negative = bool(scenario.get("allow_negative_time", False))

    # cross-rules tying sweeps to the scenario kind
    if kind in ("ck-free", "cl-free", "eigen-free") and any(v != 0.0 for v in gs):
        raise ConfigError(f"{kind} requires g = 0; use the -force variant")
    if kind.startswith("ck") and any(v != 0.0 for v in kTs):
        raise ConfigError("temperature only enters the cl-* kinds; set kT = 0")
    if kind.startswith("eigen") and any(v != 0.0 for v in kTs):
        raise ConfigError("temperature does not enter the eigen kinds; set kT = 0")
    if allow_negative and kind != "ck-free":
        raise ConfigError("allow_negative_time is only meaningful for kind = ck-free")
    if t_lo < 0.0 and not allow_negative:
        raise ConfigError("t_lo < 0 requires allow_negative_time = true (ck-free only)")
    if kind == "eigen-force" and not tau > 0.0:
        raise ConfigError(f"eigen-force needs tau > 0, got {tau!r}")

    echo = {
        "scenario": {
            "kind": kind,
            "hbar": constants.hbar,
            "m": constants.m,
            "epsilon": constants.epsilon,
            "allow_negative_time": allow_negative,
        },
        "state": {
            "sigma_p": state.sigma_p,
            "p0a": state.p0a,
            "p0b": state.p0b,
            "alpha": state.alpha,
            "theta": state.theta,
        },
        "environment": {"gamma": list(gammas), "kT": list(kTs), "g": list(gs)},
        "time": {"t_lo": t_lo, "t_hi": t_hi, "step": step, "tau": tau},
        "quadrature": {
            "n": quad.n,
            "mapping": quad.mapping,
            "u_max": quad.u_max,
            "scale": quad.scale,
            "rule": quad.rule,
            "tol": eigen_tol,
        },
    }
    return ScenarioConfig(
        kind=kind,
        constants=constants,
        state=state,
        gammas=gammas,
        kTs=kTs,
        gs=gs,
        t_lo=t_lo,
        t_hi=t_hi,
        step=step,
        tau=tau,
        quad=quad,
        eigen_tol=eigen_tol,
        allow_negative_time=allow_negative,
        echo=echo,
    )


# ---------------------------------------------------------------------------
# computation

def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _param_tag(gamma: float, kT: float, g: float) -> str:
    return f"gamma{gamma:g}_kT{kT:g}_g{g:g}"


def _time_grid(config: ScenarioConfig) -> np.ndarray:
    n_steps = int(math.floor((config.t_hi - config.t_lo) / config.step + 1e-9))
    return config.t_lo + config.step * np.arange(n_steps + 1)


def _model_functions(
    config: ScenarioConfig, env: Environment
) -> tuple[Callable[[float], float], Callable[[float], float]]:
    c, s = config.constants, config.state
    if config.kind.startswith("ck"):
        return (
            lambda t: ck.prob_left_ck(c, env, s, t),
            lambda t: ck.current_origin_ck(c, env, s, t),
        )
    return (
        lambda t: cl.prob_left_cl(c, env, s, t),
        lambda t: cl.current_origin_cl(c, env, s, t),
    )


def _series_combo(config: ScenarioConfig, env: Environment) -> dict:
    p_of, j_of = _model_functions(config, env)
    grid = _time_grid(config)
    p_vals = np.array([p_of(t) for t in grid])
    j_vals = np.array([j_of(t) for t in grid])
    neg = analysis.negative_part(analysis.TimeSeries(grid, j_vals)).values

    intervals = analysis.backflow_intervals(
        j_of,
        (config.t_lo, config.t_hi),
        scan_step=config.step,
        allow_negative_time=config.allow_negative_time,
    )
    beta = max((iv.gain for iv in intervals), default=0.0)

    # beta_prime sees the grid plus the refined interval endpoints, so the
    # supremum is not limited by the scan resolution
    extra = [iv.t_start for iv in intervals] + [iv.t_end for iv in intervals]
    extra = [t for t in extra if config.t_lo < t < config.t_hi]
    if extra:
        aug_times = np.unique(np.concatenate([grid, np.array(extra)]))
        aug_vals = np.array(
            [p_of(t) for t in aug_times]
        )  # recomputed: closed form, cheap
    else:
        aug_times, aug_vals = grid, p_vals
    bprime = analysis.beta_prime(analysis.TimeSeries(aug_times, aug_vals))

    first = intervals[0] if intervals else None
    summary = [
        _fmt(env.gamma),
        _fmt(env.kT),
        _fmt(env.g),
        _fmt(beta),
        _fmt(bprime),
        _fmt(first.t_start) if first else "",
        _fmt(first.t_end) if first else "",
        _fmt(first.duration) if first else "",
        _fmt(first.gain) if first else "",
    ]
    rows = [
        f"{_fmt(t)},{_fmt(p)},{_fmt(j)},{_fmt(nv)}"
        for t, p, j, nv in zip(grid, p_vals, j_vals, neg)
    ]
    return {"series_rows": rows, "summary": ",".join(summary)}


def _eigen_combo(config: ScenarioConfig, env: Environment) -> dict:
    if config.kind == "eigen-free":
        spec = fluxeigen.KernelSpec("free")
        xi_value = 0.0
    else:
        xi_value = fluxeigen.xi(config.constants, env, config.tau)
        spec = fluxeigen.KernelSpec("forced", xi_value)
    spectrum = fluxeigen.max_backflow(
        spec,
        config.eigen_tol,
        mapping=config.quad.mapping,
        start_n=config.quad.n,
        start_u_max=config.quad.u_max,
        scale=config.quad.scale,
        rule=config.quad.rule,
    )
    rows = [f"{i},{_fmt(lam)}" for i, lam in enumerate(spectrum.lambdas)]
    summary = ",".join(
        [
            _fmt(env.gamma),
            _fmt(env.kT),
            _fmt(env.g),
            _fmt(xi_value),
            _fmt(spectrum.lambda_max),
            str(spectrum.n_used),
            _fmt(spectrum.convergence_estimate),
        ]
    )
    return {"spectrum_rows": rows, "summary": summary}


def _compute_combo(config: ScenarioConfig, gamma: float, kT: float, g: float) -> dict:
    env = Environment(gamma=gamma, kT=kT, g=g)
    tag = _param_tag(gamma, kT, g)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if config.kind in _SERIES_KINDS:
            result = _series_combo(config, env)
        else:
            result = _eigen_combo(config, env)
    result["tag"] = tag
    result["warnings"] = [
        f"{tag}: {w.category.__name__}: {w.message}" for w in caught
    ]
    return result


def run_scenario(config: ScenarioConfig, out_dir: str | Path, jobs: int = 1) -> list[str]:
    """Execute every parameter combination and write the CSV set.

    Returns the list of written file names (also recorded, together with
    the resolved config echo, in manifest.json, which is written last).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    combos = list(product(config.gammas, config.kTs, config.gs))

    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(_compute_combo, *zip(*[(config, *c) for c in combos]))
            )
    else:
        results = [_compute_combo(config, *c) for c in combos]

    written: list[str] = []

    def write_text(name: str, text: str) -> None:
        (out / name).write_text(text, encoding="utf-8", newline="\n")
        written.append(name)

    summary_rows = []
    all_warnings: list[str] = []
    for result in results:
        tag = result["tag"]
        if "series_rows" in result:
            body = "\n".join(["t,P,j,neg_current"] + result["series_rows"]) + "\n"
            write_text(f"series_{config.kind}_{tag}.csv", body)
        else:
            body = "\n".join(["index,lambda"] + result["spectrum_rows"]) + "\n"
            write_text(f"spectrum_{config.kind}_{tag}.csv", body)
        summary_rows.append(result["summary"])
        all_warnings.extend(result["warnings"])

    header = _SUMMARY_HEADER if config.kind in _SERIES_KINDS else _EIGEN_SUMMARY_HEADER
    write_text(f"summary_{config.kind}.csv", "\n".join([header] + summary_rows) + "\n")
    write_text("warnings.txt", "".join(line + "\n" for line in all_warnings))

    manifest = json.dumps(
        {"files": written, "config": config.echo}, indent=2, sort_keys=True
    )
    (out / "manifest.json").write_text(manifest + "\n", encoding="utf-8", newline="\n")
    written.append("manifest.json")
    return written


# ---------------------------------------------------------------------------
# command line

def _cmd_run(args: argparse.Namespace) -> int:
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        files = run_scenario(config, args.out, jobs=args.jobs)
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {len(files)} files to {args.out}")
    return 0


def _cmd_eigen(args: argparse.Namespace) -> int:
    try:
        spec = fluxeigen.KernelSpec(args.kind, args.xi)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        spectrum = fluxeigen.max_backflow(
            spec, args.tol, mapping=args.mapping, start_n=args.n, start_u_max=args.u_max
        )
    except (ConvergenceError, ValueError) as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return 3
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tag = f"xi{args.xi:g}" if args.kind == "forced" else "xi0"
    rows = [f"{i},{_fmt(lam)}" for i, lam in enumerate(spectrum.lambdas)]
    name = f"spectrum_eigen-{args.kind}_{tag}.csv"
    (out / name).write_text(
        "\n".join(["index,lambda"] + rows) + "\n", encoding="utf-8", newline="\n"
    )
    summary = ",".join(
        [
            _fmt(args.xi),
            _fmt(spectrum.lambda_max),
            str(spectrum.n_used),
            _fmt(spectrum.convergence_estimate),
        ]
    )
    (out / f"summary_eigen-{args.kind}.csv").write_text(
        "xi,lambda_max,n_used,convergence_estimate\n" + summary + "\n",
        encoding="utf-8",
        newline="\n",
    )
    print(
        f"lambda_max = {spectrum.lambda_max:.6g} "
        f"(n = {spectrum.n_used}, estimate = {spectrum.convergence_estimate:.2e})"
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="backflow",
        description="Dissipative quantum backflow scenarios and eigenvalue bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config and write CSV tables")
    p_run.add_argument("config", help="scenario file (key = value sections)")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel combinations")
    p_run.set_defaults(func=_cmd_run)

    p_eigen = sub.add_parser("eigen", help="converge the flux-kernel spectrum")
    p_eigen.add_argument("--kind", choices=("free", "forced"), default="free")
    p_eigen.add_argument("--xi", type=float, default=0.0, help="drift parameter (forced)")
    p_eigen.add_argument("--tol", type=float, default=1e-4, help="convergence tolerance")
    p_eigen.add_argument("--out", required=True, help="output directory")
    p_eigen.add_argument("--mapping", choices=("truncation", "rational"), default="truncation")
    p_eigen.add_argument("--n", type=int, default=100, help="starting node count")
    p_eigen.add_argument("--u-max", type=float, default=12.0, help="starting domain edge")
    p_eigen.set_defaults(func=_cmd_eigen)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
