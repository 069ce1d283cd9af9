"""Command-line harness: power sweeps, figure presets, and CSV emission.

``fsorf sweep`` evaluates one metric over a transmit-power grid (both hops
driven jointly unless a hop's power is pinned in the config) and optionally
runs the Monte-Carlo estimator alongside.  ``fsorf validate`` echoes the
resolved configuration with range diagnostics.

CSV contract: header ``metric,ptx_dbm,analytic_value,mc_value,mc_std_error,
n_samples,seed``, UTF-8, LF line endings, 17-significant-digit floats;
Monte-Carlo columns are empty unless --compare is given.  Reruns with the
same seed are byte-identical.
"""

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from . import metrics
from .channel import IM_DD
from .config import Config, ConfigError
from .metrics import ConstellationSpec, SeriesPolicy
from .montecarlo import SimConfig, simulate_outage, simulate_capacity, \
    simulate_aser

CSV_HEADER = "metric,ptx_dbm,analytic_value,mc_value,mc_std_error,n_samples,seed"

METRICS = ("outage", "asym_outage", "ergodic", "effective", "aser")

PRESET_NAMES = ("fig2a", "fig2b", "fig3", "fig4", "fig5", "fig6", "fig7",
                "fig8", "fig9")


@dataclass(frozen=True)
class SweepRequest:
    """One sweep order: metric, power grid start:stop:step (dBm), optional
    preset / constellation / delay exponent, MC sample count and seed."""
    metric: str = "outage"
    ptx_dbm: tuple = (-10.0, 40.0, 2.0)
    preset: str = None
    constellation: ConstellationSpec = None
    theta: float = None
    samples: int = 1_000_000
    seed: int = 12345
    compare: bool = False
    allow_im_dd: bool = False

    def __post_init__(self):
        start, stop, step = self.ptx_dbm
        if start > stop:
            raise ValueError("sweep start must not exceed stop")
        if step <= 0:
            raise ValueError("sweep step must be positive")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")


def _fmt(x):
    return f"{x:.17g}"


def _grid(start, stop, step):
    out = []
    k = 0
    while True:
        p = start + k * step
        if p > stop + 1e-9:
            break
        out.append(round(p, 10))
        k += 1
    return out


@dataclass
class _Curve:
    label: str
    overrides: dict = field(default_factory=dict)
    constellation: str = None
    theta: float = None
    z1_terms: int = None


def _load_preset(name):
    """Preset data file -> (request fields, base overrides, curves)."""
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; choose from "
                          f"{', '.join(PRESET_NAMES)}")
    text = resources.files("fsorf.presets").joinpath(f"{name}.cfg").read_text()
    fields = {}
    base = {}
    curves = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = (p.strip() for p in line.partition("="))
        if key.startswith("preset."):
            fields[key[len("preset."):]] = value
        elif key.startswith("curve"):
            cname, _, ckey = key.partition(".")
            curves.setdefault(cname, {})[ckey] = value
        elif key.startswith("base."):
            base[key[len("base."):]] = value
        else:
            raise ConfigError(f"{name}.cfg:{lineno}: unrecognized key {key!r}")
    out = []
    for cname in sorted(curves, key=lambda s: (len(s), s)):
        spec = curves[cname]
        cur = _Curve(label=spec.pop("label", cname))
        cur.constellation = spec.pop("constellation", None)
        if "theta" in spec:
            cur.theta = float(spec.pop("theta"))
        if "z1_terms" in spec:
            cur.z1_terms = int(spec.pop("z1_terms"))
        cur.overrides = spec
        out.append(cur)
    if not out:
        out = [_Curve(label="base")]
    return fields, base, out


def _analytic_value(metric, system, constellation, theta, z1_terms,
                    allow_im_dd=False):
    if metric == "outage":
        return metrics.outage(system)
    if metric == "asym_outage":
        return metrics.asymptotic_outage(system)
    if metric == "ergodic":
        return metrics.ergodic_capacity(system)
    if metric == "effective":
        if theta is None:
            raise ConfigError("effective capacity needs --theta")
        return metrics.effective_capacity(system, theta)
    if metric == "aser":
        if constellation is None:
            raise ConfigError("symbol-error sweeps need --constellation")
        policy = SeriesPolicy(z1_terms) if z1_terms else SeriesPolicy()
        return metrics.aser(constellation, system, policy,
                            allow_im_dd=allow_im_dd)
    raise ConfigError(f"unknown metric {metric!r}")


def _mc_estimate(metric, system, constellation, theta, samples, seed, workers,
                 effective_mode):
    if metric == "asym_outage":
        return None
    cfg = SimConfig(system, samples, seed, workers, effective_mode)
    if metric == "outage":
        return simulate_outage(cfg)
    if metric == "ergodic":
        return simulate_capacity(cfg, "ergodic")
    if metric == "effective":
        return simulate_capacity(cfg, "effective", theta=theta)
    return simulate_aser(cfg, constellation)


def run_sweep(req, config_path=None, workers=None):
    """Evaluate the request over its grid; returns the CSV document."""
    base_cfg = Config.from_path(config_path) if config_path \
        else Config.from_text("")
    curves = [_Curve(label="")]
    grid = _grid(*req.ptx_dbm)
    thetas = None
    if req.preset:
        fields, base, curves = _load_preset(req.preset)
        for key, value in base.items():
            base_cfg.set(key, value, f"{req.preset}.cfg")
        metric = fields.get("metric", req.metric)
        if "ptx" in fields:
            start, stop, step = (float(v) for v in fields["ptx"].split(":"))
            grid = _grid(start, stop, step)
        if "thetas" in fields:
            thetas = [float(v) for v in fields["thetas"].split(",")]
    else:
        metric = req.metric

    workers = workers or int(os.environ.get("FSORF_WORKERS", "0")) or \
        base_cfg.get("sim.workers")

    jobs = []
    row_idx = 0
    for cur in curves:
        cfg = base_cfg.copy()
        for key, value in cur.overrides.items():
            cfg.set(key, value, f"curve {cur.label}")
        constellation = req.constellation
        if cur.constellation:
            constellation = ConstellationSpec.from_string(cur.constellation)
        theta_list = [cur.theta if cur.theta is not None else req.theta]
        if metric == "effective" and thetas:
            theta_list = thetas
        for theta in theta_list:
            for p in grid:
                label = metric if not cur.label else f"{metric}[{cur.label}]"
                if metric == "effective" and theta is not None and thetas:
                    label += f"[theta={theta:g}]"
                jobs.append((row_idx, label, cfg, p, constellation, theta,
                             cur.z1_terms))
                row_idx += 1

    def work(job):
        idx, label, cfg, p, constellation, theta, z1_terms = job
        try:
            system = cfg.system(ptx_dbm=p)
            ana = _analytic_value(metric, system, constellation, theta,
                                  z1_terms, req.allow_im_dd)
            if req.compare:
                row_seed = req.seed + idx
                est = _mc_estimate(metric, system, constellation, theta,
                                   req.samples, row_seed, workers,
                                   cfg.get("sim.effective_mode"))
            else:
                est = None
                row_seed = req.seed
        except Exception as exc:
            raise RuntimeError(
                f"{label} at {p} dBm failed: {exc}") from exc
        if est is None:
            return (f"{label},{_fmt(p)},{_fmt(ana)},,,,"
                    f"{req.seed if not req.compare else row_seed}")
        return (f"{label},{_fmt(p)},{_fmt(ana)},{_fmt(est.value)},"
                f"{_fmt(est.std_error)},{est.n},{row_seed}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(work, jobs))
    else:
        rows = [work(j) for j in jobs]
    return "\n".join([CSV_HEADER] + rows) + "\n"


def validate_config(config_path):
    """Resolved-configuration echo with diagnostics; returns report text."""
    cfg = Config.from_path(config_path)
    lines = [f"configuration: {config_path}"]
    for key in sorted(cfg.values):
        mark = "*" if key in cfg.explicit else " "
        lines.append(f"  {mark} {key} = {cfg.values[key]!r}")
    level = 0
    for severity, key, message in cfg.diagnostics():
        lines.append(f"{severity.upper()}: {key}: {message}")
        if severity == "error":
            level = 2
    if cfg.get("fso.detector") == IM_DD:
        lines.append("WARNING: fso.detector: symbol-error sweeps are "
                     "calibrated for the coherent detector; intensity "
                     "detection needs the expert flag")
    lines.append("(* marks keys set explicitly; others are defaults)")
    return "\n".join(lines) + "\n", level


def _parse_range(text):
    parts = text.split(":")
    if len(parts) == 1:
        v = float(parts[0])
        return (v, v, 1.0)
    if len(parts) == 3:
        return tuple(float(p) for p in parts)
    raise argparse.ArgumentTypeError("power range must be start:stop:step")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="fsorf",
        description="link-level performance toolkit for a satellite-to-"
                    "platform optical hop relaying to multiuser RF")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="evaluate a metric over a power grid")
    sw.add_argument("--metric", choices=METRICS, default="outage")
    sw.add_argument("--preset", choices=PRESET_NAMES)
    sw.add_argument("--ptx-dbm", type=_parse_range, default=(-10.0, 40.0, 2.0),
                    metavar="START:STOP:STEP")
    sw.add_argument("--samples", type=int, default=1_000_000)
    sw.add_argument("--seed", type=int, default=12345)
    sw.add_argument("--compare", action="store_true",
                    help="run the Monte-Carlo estimator alongside")
    sw.add_argument("--config", metavar="PATH")
    sw.add_argument("--out", metavar="PATH")
    sw.add_argument("--constellation", metavar="FAMILY:M[:MixNq[:betaR]]")
    sw.add_argument("--theta", type=float, help="delay exponent for the "
                                                "effective-capacity metric")
    sw.add_argument("--allow-im-dd", action="store_true",
                    help="expert flag: admit the intensity detector in "
                         "symbol-error sweeps")

    va = sub.add_parser("validate", help="echo a resolved configuration")
    va.add_argument("--config", required=True, metavar="PATH")

    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            report, level = validate_config(args.config)
            sys.stdout.write(report)
            return level
        constellation = (ConstellationSpec.from_string(args.constellation)
                         if args.constellation else None)
        req = SweepRequest(metric=args.metric, ptx_dbm=args.ptx_dbm,
                           preset=args.preset, constellation=constellation,
                           theta=args.theta, samples=args.samples,
                           seed=args.seed, compare=args.compare,
                           allow_im_dd=args.allow_im_dd)
        csv_text = run_sweep(req, config_path=args.config)
    except (ConfigError, ValueError, RuntimeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
