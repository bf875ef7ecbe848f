"""``evtsir`` command line.

Every command writes one table, as CSV (with a ``# config:`` header line
holding the full resolved configuration) or as JSON
``{"config": {...}, "columns": [...], "rows": [[...], ...]}``.

Exit codes: 0 success, 2 numeric failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .evt import (
    FrechetParams,
    MomentDivergenceError,
    RootBracketError,
    convergence_exponent,
    frechet_cdf,
    frechet_moment,
    frechet_params,
    frechet_pdf,
    frechet_sample,
)
from .fading import Scenario, beta_prime_sir_cdf, beta_prime_sir_pdf
from .metrics import (
    FasConfig,
    QuadratureError,
    ergodic_rate_asymptotic,
    ergodic_rate_mc,
    fas_rate_upper_bound,
    fas_simulated_rate,
    outage_asymptotic,
    outage_exact_mc,
)
from .montecarlo import MaximaStudy, estimate_with_se, run_maxima_study
from .presets import PRESETS, TABLE1_COLUMNS, get_preset
from .sirdist import DEFAULT_CONTROL, exact_cdf, exact_pdf
from .specfun import SeriesControl, SeriesConvergenceWarning
from .stats import ecdf, empirical_kl
from .streams import DEFAULT_SEED, RandomStream

EXIT_OK = 0
EXIT_NUMERIC = 2
EXIT_USAGE = 64

_MIN_MC_REPS = 10_000
_DEFAULT_Z = tuple(float(v) for v in np.round(np.logspace(-2, 2, 41), 12))
REPRODUCE_TARGETS = ("table1",) + tuple(f"fig{i}" for i in range(1, 14))


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    scenario: Scenario | None
    preset: str | None
    params: dict
    seed: int = DEFAULT_SEED
    out: str | None = None
    fmt: str = "csv"
    workers: int = 1
    rel_tol: float | None = None

    @property
    def ctl(self) -> SeriesControl:
        if self.rel_tol is None:
            return DEFAULT_CONTROL
        return SeriesControl(
            rel_tol=self.rel_tol,
            max_total_order=DEFAULT_CONTROL.max_total_order,
            max_outer_p=DEFAULT_CONTROL.max_outer_p,
        )

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "preset": self.preset,
            "scenario": self.scenario.to_dict() if self.scenario else None,
            "params": self.params,
            "seed": self.seed,
            "rel_tol": self.rel_tol,
        }


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    flagged: bool = False


# ---------------------------------------------------------------- parsing


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    return vals


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _seed(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evtsir", description="Maximum-SIR statistics under kappa-mu shadowed fading.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--config", help="JSON scenario file, optionally with command fields")
            g.add_argument("--preset", help="named scenario (see `evtsir presets`)")
        p.add_argument("--seed", type=_seed, default=None, help=f"random seed (default {DEFAULT_SEED:#x})")
        p.add_argument("--out", help="output file (directory for reproduce); stdout if omitted")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--rel-tol", type=float, default=None, help="series relative tolerance")

    for name in ("cdf", "pdf"):
        p = sub.add_parser(name, help=f"exact SIR {name.upper()} on a z grid")
        common(p)
        p.add_argument("--z", type=_float_list, help="comma-separated thresholds")
        p.add_argument("--L", type=int, help="also tabulate the Frechet law of the max over L")
    p = sub.add_parser("frechet", help="Frechet scale, shape and convergence exponent")
    common(p)
    p.add_argument("--L", type=_int_list)
    p.add_argument("--nu", type=float, help="also report the Frechet moment of this order")
    p = sub.add_parser("outage", help="outage probability of the maximum SIR")
    common(p)
    p.add_argument("--L", type=_int_list)
    p.add_argument("--gamma-t", dest="gamma_t", type=_float_list)
    p.add_argument("--reps", type=int, help=f"Monte Carlo replications (>= {_MIN_MC_REPS}); 0 skips simulation")
    p = sub.add_parser("rate", help="ergodic rate of the maximum SIR")
    common(p)
    p.add_argument("--L", type=_int_list)
    p.add_argument("--reps", type=int)
    p = sub.add_parser("fas", help="antenna-selection rate bound and simulated rate")
    common(p)
    p.add_argument("--L", type=_int_list)
    p.add_argument("--Ls", type=_int_list)
    p.add_argument("--reps", type=int)
    p = sub.add_parser("kl", help="empirical KL divergence of simulated maxima from the Frechet law")
    common(p)
    p.add_argument("--L", type=_int_list)
    p.add_argument("--reps", type=int)
    p.add_argument("--winsorize", type=float, default=None, help="clip both samples at this pooled quantile")
    p = sub.add_parser("reproduce", help="emit the table and figure data sets as CSV")
    common(p, scenario=False)
    p.add_argument("target", choices=REPRODUCE_TARGETS + ("all",))
    p.add_argument("--reps", type=int)
    sub.add_parser("presets", help="list preset names")
    return parser


_COMMAND_FIELDS = {
    "cdf": ("z", "L"),
    "pdf": ("z", "L"),
    "frechet": ("L", "nu"),
    "outage": ("L", "gamma_t", "reps"),
    "rate": ("L", "reps"),
    "fas": ("L", "Ls", "reps"),
    "kl": ("L", "reps", "winsorize"),
    "reproduce": ("target", "reps"),
    "presets": (),
}
_SHARED_FIELDS = ("seed", "fmt", "workers", "rel_tol", "out")
_SCENARIO_KEYS = ("source", "interferers")


def _as_list(v):
    return v if isinstance(v, list) else [v]


def resolve(args: argparse.Namespace) -> RunConfig:
    """Merge flags over config-file fields and validate everything."""
    cmd = args.command
    file_fields: dict = {}
    scenario, preset = None, None
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        file_fields = {k: v for k, v in raw.items() if k not in _SCENARIO_KEYS}
        if "preset" in file_fields:
            preset = file_fields.pop("preset")
        if any(k in raw for k in _SCENARIO_KEYS):
            scenario = Scenario.from_dict({k: raw[k] for k in _SCENARIO_KEYS if k in raw})
        allowed = set(_COMMAND_FIELDS[cmd]) | set(_SHARED_FIELDS) | {"gamma-t"}
        unknown = set(file_fields) - allowed
        if unknown:
            raise UsageError(f"unknown config fields for {cmd}: {sorted(unknown)}")
        if "gamma-t" in file_fields:
            file_fields["gamma_t"] = file_fields.pop("gamma-t")
    if getattr(args, "preset", None):
        preset = args.preset
    if preset is not None:
        if scenario is not None:
            raise UsageError("give either a scenario or a preset, not both")
        scenario = get_preset(preset)

    def pick(name, default=None):
        v = getattr(args, name, None)
        if v is None:
            v = file_fields.get(name, default)
        return v

    params = {}
    for name in _COMMAND_FIELDS[cmd]:
        params[name] = pick(name)
    seed = pick("seed", DEFAULT_SEED)
    seed = int(seed, 0) if isinstance(seed, str) else int(seed)
    cfg = RunConfig(
        command=cmd,
        scenario=scenario,
        preset=preset,
        params=params,
        seed=seed,
        out=pick("out"),
        fmt=pick("fmt", "csv"),
        workers=int(pick("workers", 1)),
        rel_tol=pick("rel_tol"),
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    cmd, p = cfg.command, cfg.params
    if cmd not in ("reproduce", "presets") and cfg.scenario is None:
        raise UsageError(f"{cmd} needs --preset or --config with a scenario")
    if cfg.fmt not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    if cfg.workers < 1:
        raise UsageError("workers must be >= 1")
    if not 0 <= cfg.seed < 1 << 64:
        raise UsageError("seed must fit in 64 unsigned bits")
    if cfg.rel_tol is not None and not 0 < cfg.rel_tol < 1:
        raise UsageError("rel-tol must lie in (0, 1)")

    def need_L(min_L):
        if p.get("L") is None:
            raise UsageError(f"{cmd} needs --L")
        p["L"] = [int(v) for v in _as_list(p["L"])]
        if not p["L"]:
            raise UsageError("empty L list")
        bad = [v for v in p["L"] if v < min_L]
        if bad:
            raise UsageError(f"L must be >= {min_L}, got {bad}")

    def check_reps(default, minimum, allow_zero=False):
        reps = p.get("reps")
        reps = default if reps is None else int(reps)
        if allow_zero and reps == 0:
            p["reps"] = 0
            return
        if reps < minimum:
            raise UsageError(f"reps must be >= {minimum}" + (" (or 0)" if allow_zero else ""))
        p["reps"] = reps

    if cmd in ("cdf", "pdf"):
        z = p.get("z")
        z = list(_DEFAULT_Z) if z is None else [float(v) for v in _as_list(z)]
        if not z:
            raise UsageError("empty z grid")
        if any(not (v > 0 and math.isfinite(v)) for v in z):
            raise UsageError("z values must be positive and finite")
        p["z"] = z
        if p.get("L") is not None:
            if int(p["L"]) < 2:
                raise UsageError("L must be >= 2")
            p["L"] = int(p["L"])
    elif cmd == "frechet":
        need_L(2)
        if p.get("nu") is not None and not float(p["nu"]) > 0:
            raise UsageError("nu must be positive")
    elif cmd == "outage":
        need_L(2)
        g = p.get("gamma_t")
        if not g:
            raise UsageError("outage needs --gamma-t")
        p["gamma_t"] = [float(v) for v in _as_list(g)]
        if any(not v > 0 for v in p["gamma_t"]):
            raise UsageError("gamma-t must be positive")
        check_reps(0, _MIN_MC_REPS, allow_zero=True)
    elif cmd == "rate":
        need_L(2)
        check_reps(0, _MIN_MC_REPS, allow_zero=True)
    elif cmd == "fas":
        need_L(2)
        Ls = p.get("Ls")
        if not Ls:
            raise UsageError("fas needs --Ls")
        p["Ls"] = [int(v) for v in _as_list(Ls)]
        check_reps(100_000, 2)
        for L in p["L"]:
            for s in p["Ls"]:
                FasConfig(L, s, p["reps"])
    elif cmd == "kl":
        need_L(2)
        check_reps(1_000_000, 100)
        w = p.get("winsorize")
        if w is not None and not 0.5 < float(w) < 1:
            raise UsageError("winsorize level must lie in (0.5, 1)")
    elif cmd == "reproduce":
        check_reps(10_000, _MIN_MC_REPS)


# --------------------------------------------------------------- commands


def _series_call(fn: Callable, *args):
    """Run a series evaluation, reporting whether it converged."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SeriesConvergenceWarning)
        value = fn(*args)
    ok = not any(issubclass(w.category, SeriesConvergenceWarning) for w in caught)
    return value, ok


def cmd_cdf(cfg: RunConfig, density: bool = False) -> Table:
    s, p, ctl = cfg.scenario, cfg.params, cfg.ctl
    fp = frechet_params(s, p["L"], ctl) if p.get("L") else None
    t = Table(["z", "exact", "asymptotic_max_L", "beta_prime_approx", "flag"])
    for z in p["z"]:
        if density:
            exact, ok = _series_call(exact_pdf, s, z, ctl)
            asym = float(frechet_pdf(fp, z)) if fp else ""
            bp = beta_prime_sir_pdf(s, z)
        else:
            exact, ok = _series_call(exact_cdf, s, z, ctl)
            asym = float(frechet_cdf(fp, z)) if fp else ""
            bp = beta_prime_sir_cdf(s, z)
        t.rows.append([z, float(exact), asym, float(bp), "" if ok else "nonconverged"])
        t.flagged |= not ok
    return t


def cmd_pdf(cfg: RunConfig) -> Table:
    return cmd_cdf(cfg, density=True)


def cmd_frechet(cfg: RunConfig) -> Table:
    s, p = cfg.scenario, cfg.params
    cb = convergence_exponent(s)
    cols = ["L", "scale", "shape", "delta", "bound"]
    if p.get("nu") is not None:
        cols.append("moment")
    t = Table(cols)
    for L in p["L"]:
        fp = frechet_params(s, L, cfg.ctl)
        row = [L, fp.scale, fp.shape, cb.delta, cb.description]
        if p.get("nu") is not None:
            try:
                row.append(frechet_moment(fp, float(p["nu"])))
            except MomentDivergenceError:
                row.append("inf")
        t.rows.append(row)
    return t


def cmd_outage(cfg: RunConfig) -> Table:
    s, p = cfg.scenario, cfg.params
    t = Table(["L", "gamma_t", "asymptotic", "exact", "mc", "mc_se"])
    for i, L in enumerate(p["L"]):
        fp = frechet_params(s, L, cfg.ctl)
        for j, g in enumerate(p["gamma_t"]):
            F, ok = _series_call(exact_cdf, s, g, cfg.ctl)
            t.flagged |= not ok
            row = [L, g, outage_asymptotic(fp, g), float(F) ** L]
            if p["reps"]:
                st = RandomStream(cfg.seed, stream_id=1000 + 100 * i + j)
                e = outage_exact_mc(s, L, g, p["reps"], st, cfg.workers)
                row += [e.mean, e.stderr]
            else:
                row += ["", ""]
            t.rows.append(row)
    return t


def cmd_rate(cfg: RunConfig) -> Table:
    s, p = cfg.scenario, cfg.params
    t = Table(["L", "asymptotic", "mc", "mc_se"])
    for i, L in enumerate(p["L"]):
        row = [L, ergodic_rate_asymptotic(frechet_params(s, L, cfg.ctl))]
        if p["reps"]:
            e = ergodic_rate_mc(s, L, p["reps"], RandomStream(cfg.seed, stream_id=2000 + i), cfg.workers)
            row += [e.mean, e.stderr]
        else:
            row += ["", ""]
        t.rows.append(row)
    return t


def cmd_fas(cfg: RunConfig) -> Table:
    s, p = cfg.scenario, cfg.params
    t = Table(["L", "Ls", "upper_bound", "upper_bound_se", "simulated", "simulated_se"])
    for i, L in enumerate(p["L"]):
        fp = frechet_params(s, L, cfg.ctl)
        for j, Ls in enumerate(p["Ls"]):
            fc = FasConfig(L, Ls, p["reps"])
            ub = fas_rate_upper_bound(fp, fc, RandomStream(cfg.seed, stream_id=3000 + 100 * i + j), cfg.workers)
            sim = fas_simulated_rate(s, fc, RandomStream(cfg.seed, stream_id=4000 + 100 * i + j), cfg.workers)
            t.rows.append([L, Ls, ub.mean, ub.stderr, sim.mean, sim.stderr])
    return t


def kl_value(s: Scenario, L: int, n: int, seed: int, stream_id: int, ctl: SeriesControl | None = None,
             workers: int = 1, winsorize: float | None = None):
    """Empirical KL between ``n`` simulated maxima and ``n`` Frechet draws."""
    fp = frechet_params(s, L, ctl)
    maxima = run_maxima_study(MaximaStudy(s, L, n, seed), workers)
    ref = frechet_sample(fp, RandomStream(seed, stream_id=stream_id), n)
    return empirical_kl(maxima, ref, winsorize=winsorize)


def cmd_kl(cfg: RunConfig) -> Table:
    s, p = cfg.scenario, cfg.params
    t = Table(["L", "n", "bins", "kl", "raw", "winsorized"])
    for i, L in enumerate(p["L"]):
        r = kl_value(s, L, p["reps"], cfg.seed, 5000 + i, cfg.ctl, cfg.workers, p.get("winsorize"))
        t.rows.append([L, p["reps"], r.bins, r.value, r.raw, int(r.winsorized)])
    return t


def cmd_presets(cfg: RunConfig) -> Table:
    t = Table(["name", "scenario"])
    for name in sorted(PRESETS):
        t.rows.append([name, PRESETS[name].to_json()])
    return t


# -------------------------------------------------------------- reproduce


def _max_cdf_figure(cfg: RunConfig, names, L: int, simulate: bool = True) -> Table:
    reps = cfg.params["reps"]
    t = Table(["preset", "L", "z", "simulated", "asymptotic"])
    for i, name in enumerate(names):
        s = get_preset(name)
        fp = frechet_params(s, L, cfg.ctl)
        zs = fp.scale * np.round(np.logspace(-0.5, 1.0, 31), 12)
        sim = None
        if simulate:
            sim = np.sort(run_maxima_study(MaximaStudy(s, L, reps, cfg.seed + i), cfg.workers))
        for z in zs:
            t.rows.append([name, L, float(z), ecdf(sim, z) if simulate else "", float(frechet_cdf(fp, z))])
    return t


def _moment_figure(cfg: RunConfig, names, Ls=(32, 64, 128, 256, 512)) -> Table:
    reps = cfg.params["reps"]
    t = Table(["preset", "L", "simulated_mean", "simulated_se", "asymptotic"])
    for i, name in enumerate(names):
        s = get_preset(name)
        for j, L in enumerate(Ls):
            fp = frechet_params(s, L, cfg.ctl)
            e = estimate_with_se(run_maxima_study(MaximaStudy(s, L, reps, cfg.seed + 100 * i + j), cfg.workers))
            try:
                asym = frechet_moment(fp, 1.0)
            except MomentDivergenceError:
                asym = "inf"
            t.rows.append([name, L, e.mean, e.stderr, asym])
    return t


def _rate_figure(cfg: RunConfig, names, Ls=(32, 64, 128, 256, 512)) -> Table:
    reps = cfg.params["reps"]
    t = Table(["preset", "L", "simulated", "simulated_se", "asymptotic"])
    for i, name in enumerate(names):
        s = get_preset(name)
        for j, L in enumerate(Ls):
            fp = frechet_params(s, L, cfg.ctl)
            e = ergodic_rate_mc(s, L, reps, RandomStream(cfg.seed, stream_id=6000 + 100 * i + j), cfg.workers)
            t.rows.append([name, L, e.mean, e.stderr, ergodic_rate_asymptotic(fp)])
    return t


def _fas_figure(cfg: RunConfig, name, Ls_list=(4, 8), L_list=(32, 64, 128)) -> Table:
    reps = cfg.params["reps"]
    s = get_preset(name)
    t = Table(["preset", "L", "Ls", "upper_bound", "upper_bound_se", "simulated", "simulated_se"])
    for i, L in enumerate(L_list):
        fp = frechet_params(s, L, cfg.ctl)
        for j, Ls in enumerate(Ls_list):
            fc = FasConfig(L, Ls, reps)
            ub = fas_rate_upper_bound(fp, fc, RandomStream(cfg.seed, stream_id=7000 + 100 * i + j), cfg.workers)
            sim = fas_simulated_rate(s, fc, RandomStream(cfg.seed, stream_id=8000 + 100 * i + j), cfg.workers)
            t.rows.append([name, L, Ls, ub.mean, ub.stderr, sim.mean, sim.stderr])
    return t


def _table1(cfg: RunConfig) -> Table:
    n = cfg.params["reps"]
    t = Table(["L"] + list(TABLE1_COLUMNS))
    for L in (20, 40, 60, 80, 100):
        row = [L]
        for j, name in enumerate(TABLE1_COLUMNS):
            row.append(kl_value(get_preset(name), L, n, cfg.seed, 9000 + j, cfg.ctl, cfg.workers).value)
        t.rows.append(row)
    return t


_FIGURES: dict[str, Callable[[RunConfig], Table]] = {
    "table1": _table1,
    "fig1": lambda c: _max_cdf_figure(c, ["fig1-case1", "fig1-case2"], 64),
    "fig2": lambda c: _max_cdf_figure(c, [f"fig2-rayleigh-n{i}" for i in (1, 2, 3)], 32),
    "fig3": lambda c: _max_cdf_figure(c, [f"fig3-mu{i}" for i in (1, 2, 3)], 200),
    "fig4": lambda c: _max_cdf_figure(c, [f"fig4-m{i}" for i in (1, 2, 3)], 200),
    "fig5": lambda c: _max_cdf_figure(c, [f"fig5-kappa{i}" for i in (1, 2, 3)], 200, simulate=False),
    "fig6": lambda c: _max_cdf_figure(c, [f"fig6-kappa{i}" for i in (1, 2, 3)], 200, simulate=False),
    "fig7": lambda c: _moment_figure(c, [f"fig7-n{i}" for i in (1, 2, 3)]),
    "fig8": lambda c: _rate_figure(c, [f"fig8-n{i}" for i in (1, 2, 3)]),
    "fig9": lambda c: _rate_figure(c, ["fig9-i111", "fig9-i121", "fig9-i123"]),
    "fig10": lambda c: _rate_figure(c, ["fig10-s111", "fig10-s131", "fig10-s133"]),
    "fig11": lambda c: _fas_figure(c, "fig11-rayleigh"),
    "fig12": lambda c: _fas_figure(c, "fig12-fas"),
    "fig13": lambda c: _fas_figure(c, "fig13-fas"),
}


def cmd_reproduce(cfg: RunConfig) -> dict[str, Table]:
    target = cfg.params["target"]
    names = REPRODUCE_TARGETS if target == "all" else (target,)
    return {name: _FIGURES[name](cfg) for name in names}


COMMANDS: dict[str, Callable] = {
    "cdf": cmd_cdf,
    "pdf": cmd_pdf,
    "frechet": cmd_frechet,
    "outage": cmd_outage,
    "rate": cmd_rate,
    "fas": cmd_fas,
    "kl": cmd_kl,
    "reproduce": cmd_reproduce,
    "presets": cmd_presets,
}


# ----------------------------------------------------------------- output


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def render(table: Table, config: dict, fmt: str) -> str:
    if fmt == "json":
        rows = [[_json_cell(v) for v in r] for r in table.rows]
        return json.dumps({"config": config, "columns": table.columns, "rows": rows}, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _json_cell(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(args)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"evtsir: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = COMMANDS[cfg.command](cfg)
    except (RootBracketError, QuadratureError, ArithmeticError, FloatingPointError) as exc:
        print(f"evtsir: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if isinstance(result, dict):
        outdir = Path(cfg.out or "reproduce-out")
        outdir.mkdir(parents=True, exist_ok=True)
        flagged = False
        for name, table in result.items():
            conf = {**cfg.to_dict(), "target": name}
            (outdir / f"{name}.{cfg.fmt}").write_text(render(table, conf, cfg.fmt))
            flagged |= table.flagged
    else:
        _emit(render(result, cfg.to_dict(), cfg.fmt), cfg.out)
        flagged = result.flagged
    if flagged:
        print("evtsir: some series did not converge; see the flag column", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
