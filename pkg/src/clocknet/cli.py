"""Command-line runner: scenario presets, flat TOML configs, CSV and plot-data output.

Config files are flat ``key = value`` TOML.  Recognised keys:

* any scalar field of ``ExperimentConfig`` (``xi_mean``, ``eta_t``, ``trials``, ``seed``,
  ``scenario`` ...) and the list fields ``deltas`` / ``times``;
* any ``EmitterParams`` field (``epsilon``, ``T_d`` ...), applied to both nodes, or
  with a ``_1`` / ``_2`` suffix for one node;
* geometry: ``wavelength``, ``omega_ga``, ``geometry`` (``uniform`` or ``earth``),
  ``height_1``, ``height_2``, ``orbiting``;
* grids: ``t_min``, ``t_max``, ``t_steps``, ``delta_steps``.

Missing keys come from the selected preset.  Exit codes: 0 success, 2 parse
error, 3 validation error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .emitter import EmitterParams
from .protocol import ExperimentConfig, VisibilityPoint, fringe_period, uniform_deltas, visibility_curve
from .spacetime import C, ClockSpec, SiteWorldline

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_IO = 0, 2, 3, 4

HEADER = ["scenario", "T_s", "nu_mean", "nu_stderr", "P_s", "p_plus_at_delta0", "trials", "seed"]
PS_HEADER = ["nu_ps", "lambda"]

_NODE_KEYS = tuple(f.name for f in fields(EmitterParams))
_CFG_KEYS = ("xi_mean", "xi_std", "xi_prime_mean", "xi_prime_std", "eta_o", "eta_t", "eta_d", "varphi",
             "trials", "seed", "scenario", "independent_arm_phases", "shots", "deltas", "times")
_EXTRA_KEYS = ("wavelength", "omega_ga", "geometry", "height_1", "height_2", "orbiting",
               "t_min", "t_max", "t_steps", "delta_steps")
KNOWN_KEYS = frozenset(_CFG_KEYS + _EXTRA_KEYS + _NODE_KEYS
                       + tuple(k + s for k in _NODE_KEYS for s in ("_1", "_2")))

_DEVICES = dict(eta_i=0.99, epsilon=0.1, p_c=1.0, p_c_prime=1.0, Omega=0.5, phi_pi=0.0,
                eta_o=0.5, eta_d=0.5, wavelength=698e-9, omega_ga=0.0, varphi=0.0,
                xi_mean=0.0, xi_std=0.0, xi_prime_mean=0.0, delta_steps=64, trials=1000, seed=0)

PRESETS: dict[str, dict] = {
    "ground": dict(_DEVICES, scenario="ground", geometry="uniform", height_1=0.0, height_2=10.0,
                   T_d=10.0, T_c=10.0 / C, eta_t=0.9, xi_prime_std=0.1,
                   t_min=0.0, t_max=10.0, t_steps=200),
    "satellite": dict(_DEVICES, scenario="satellite", geometry="earth", height_1=0.0, height_2=5.0e5,
                      orbiting=False, T_d=0.1, T_c=5.0e5 / C, eta_t=0.01, xi_prime_std=1.0,
                      t_min=0.0, t_max=200e-6, t_steps=400),
    # ideal devices on the ground geometry, a clean starting point for edits
    "custom": dict(_DEVICES, scenario="custom", geometry="uniform", height_1=0.0, height_2=10.0,
                   eta_i=1.0, eta_o=1.0, eta_d=1.0, eta_t=1.0, T_d=math.inf, T_c=0.0, xi_prime_std=0.0,
                   t_min=0.0, t_max=10.0, t_steps=200),
}


class ConfigError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunRecord:
    scenario: str
    T_s: float
    nu_mean: float
    nu_stderr: float
    P_s: float
    p_plus_at_delta0: float
    trials: int
    seed: int
    nu_ps: float | None = None
    lambda_gap: float | None = None

    @classmethod
    def from_point(cls, p: VisibilityPoint, cfg: ExperimentConfig) -> "RunRecord":
        return cls(cfg.scenario, p.T, p.nu, p.nu_std, p.P_s, p.p_plus_at_delta0, cfg.trials, cfg.seed,
                   p.nu_ps, p.lambda_gap)

    def row(self, postselected: bool = False) -> list[str]:
        out = [self.scenario, _fmt(self.T_s), _fmt(self.nu_mean), _fmt(self.nu_stderr), _fmt(self.P_s),
               _fmt(self.p_plus_at_delta0), str(self.trials), str(self.seed)]
        if postselected:
            out += [_fmt(self.nu_ps), _fmt(self.lambda_gap)]
        return out


def _fmt(x: float | None) -> str:
    return "nan" if x is None else f"{x:.9g}"


# ---------------------------------------------------------------------------
# config


def _geometry(flat: dict) -> tuple[SiteWorldline, SiteWorldline]:
    h1, h2 = float(flat["height_1"]), float(flat["height_2"])
    kind = flat["geometry"]
    if kind == "uniform":
        return SiteWorldline.at_height(h1), SiteWorldline.at_height(h2)
    if kind == "earth":
        orbit = bool(flat.get("orbiting", False))
        # the ground station (height_1 = 0 by default) never orbits
        return (SiteWorldline.above_earth(h1, orbiting=orbit and h1 > 0),
                SiteWorldline.above_earth(h2, orbiting=orbit))
    raise ValueError(f"geometry={kind!r} must be 'uniform' or 'earth'")


def _grid(flat: dict) -> tuple[float, ...]:
    if "times" in flat:
        return tuple(float(t) for t in flat["times"])
    n = int(flat["t_steps"])
    if n < 1:
        raise ValueError("t_steps must be >= 1")
    return tuple(np.linspace(float(flat["t_min"]), float(flat["t_max"]), n).tolist())


def build_config(flat: dict) -> ExperimentConfig:
    """Turn a flat key/value mapping (preset merged with overrides) into a validated config."""
    unknown = sorted(set(flat) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}", EXIT_VALIDATION)
    key = None
    try:
        nodes = []
        for suffix in ("_1", "_2"):
            kw = {}
            for k in _NODE_KEYS:
                key = k + suffix if k + suffix in flat else k
                kw[k] = float(flat[key])
            key = "node" + suffix
            nodes.append(EmitterParams(**kw))
        key = "wavelength"
        clock = ClockSpec.from_wavelength(float(flat["wavelength"]), float(flat.get("omega_ga", 0.0)))
        key = "geometry"
        site1, site2 = _geometry(flat)
        key = "times"
        times = _grid(flat)
        key = "deltas"
        deltas = (tuple(float(d) for d in flat["deltas"]) if "deltas" in flat
                  else uniform_deltas(int(flat["delta_steps"])))
        kw = {}
        for k in ("xi_mean", "xi_std", "xi_prime_mean", "xi_prime_std", "eta_o", "eta_t", "eta_d", "varphi"):
            key = k
            kw[k] = float(flat[k])
        key = "trials"
        kw["trials"] = int(flat["trials"])
        key = "seed"
        kw["seed"] = int(flat["seed"])
        key = "shots"
        kw["shots"] = int(flat.get("shots", 0))
        key = None
        return ExperimentConfig(node1=nodes[0], node2=nodes[1], clock=clock, site1=site1, site2=site2,
                                deltas=deltas, times=times, scenario=str(flat["scenario"]),
                                independent_arm_phases=bool(flat.get("independent_arm_phases", False)),
                                **kw)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError, ZeroDivisionError) as exc:
        where = f" [{key}]" if key else ""
        raise ConfigError(f"invalid configuration{where}: {exc}", EXIT_VALIDATION) from exc


def load_flat(path: str | Path | None, scenario: str | None = None,
              overrides: dict | None = None) -> dict:
    data: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}", EXIT_IO) from exc
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}", EXIT_PARSE) from exc
        nested = [k for k, v in data.items() if isinstance(v, dict)]
        if nested:
            raise ConfigError(f"config must be flat; found table(s) {nested}", EXIT_PARSE)
    name = scenario or data.get("scenario", "ground")
    if name not in PRESETS:
        raise ConfigError(f"invalid configuration [scenario]: unknown scenario {name!r}", EXIT_VALIDATION)
    flat = dict(PRESETS[name])
    flat.update(data)
    flat["scenario"] = name
    flat.update(overrides or {})
    return flat


def load_config(path: str | Path | None = None, scenario: str | None = None,
                overrides: dict | None = None) -> ExperimentConfig:
    return build_config(load_flat(path, scenario, overrides))


# ---------------------------------------------------------------------------
# running and output


def run(cfg: ExperimentConfig, postselected: bool = False) -> list[RunRecord]:
    return [RunRecord.from_point(p, cfg) for p in visibility_curve(cfg, postselected=postselected)]


def records_csv(records: Sequence[RunRecord], postselected: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER + (PS_HEADER if postselected else []))
    for r in records:
        w.writerow(r.row(postselected))
    return buf.getvalue()


def emit_plotdata(records: Sequence[RunRecord], path: str | Path) -> list[Path]:
    """Write ``T nu`` lines sorted by T; one file per scenario.

    A single scenario goes to ``path``; several go to ``<stem>_<scenario><suffix>``.
    """
    if not records:
        raise ValueError("no records to write")
    path = Path(path)
    groups: dict[str, list[RunRecord]] = {}
    for r in records:
        groups.setdefault(r.scenario, []).append(r)
    written = []
    for name, recs in groups.items():
        target = path if len(groups) == 1 else path.with_name(f"{path.stem}_{name}{path.suffix}")
        lines = [f"{_fmt(r.T_s)} {_fmt(r.nu_mean)}\n" for r in sorted(recs, key=lambda r: r.T_s)]
        target.write_text("".join(lines))
        written.append(target)
    return written


def summary(records: Sequence[RunRecord]) -> str:
    T = [r.T_s for r in records]
    nu = [r.nu_mean for r in records]
    period = fringe_period(T, nu)
    per = "n/a (fewer than two minima)" if math.isnan(period) else f"{period:.6g} s"
    return (f"scenario={records[0].scenario} points={len(records)} "
            f"nu_min={min(nu):.6g} nu_max={max(nu):.6g} period={per}")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="clocknet",
                                 description="Visibility of entangled clocks at two heights.")
    ap.add_argument("--config", help="flat TOML config file")
    ap.add_argument("--scenario", choices=sorted(PRESETS))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--t-min", type=float, dest="t_min")
    ap.add_argument("--t-max", type=float, dest="t_max")
    ap.add_argument("--t-steps", type=int, dest="t_steps")
    ap.add_argument("--delta-steps", type=int, dest="delta_steps")
    ap.add_argument("--no-noise", action="store_true", help="fix every phase draw at its mean")
    ap.add_argument("--out", help="CSV path (default: stdout)")
    ap.add_argument("--plot-out", help="two-column T/nu file")
    ap.add_argument("--postselected", action="store_true",
                    help="also run the product-state variant; adds nu_ps and lambda columns")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    overrides = {k: getattr(args, k) for k in ("seed", "trials", "t_min", "t_max", "t_steps", "delta_steps")
                 if getattr(args, k) is not None}
    if args.no_noise:
        overrides.update(xi_std=0.0, xi_prime_std=0.0)
    try:
        flat = load_flat(args.config, args.scenario, overrides)
        if any(k in overrides for k in ("t_min", "t_max", "t_steps")):
            flat.pop("times", None)
        if "delta_steps" in overrides:
            flat.pop("deltas", None)
        cfg = build_config(flat)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code

    records = run(cfg, postselected=args.postselected)
    text = records_csv(records, args.postselected)
    try:
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        if args.plot_out:
            emit_plotdata(records, args.plot_out)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    print(summary(records), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
