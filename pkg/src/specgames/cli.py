"""Command line: config parsing, experiment runs and CSV writers.

Config files are plain ``key = value`` lines; ``#`` starts a comment.
Scenario fields use their ``ScenarioConfig`` names. The floor is given
with indexed keys (``room.0.x0``, ``room.0.owner``, ``bs.0.x`` ...) or
scaled with ``room_size``. Experiment keys: ``schemes``, ``surplus_values``,
``load_reversal_at``.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import re
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import analysis
from .config import (OPERATOR_NAMES, BaseStation, ConfigError, FloorLayout, Room,
                     ScenarioConfig, Scheme, default_floor)
from .montecarlo import ExperimentPlan, ExperimentResult, rate_cdf, run_experiment

log = logging.getLogger("specgames")

SEED_ENV = "SPECGAMES_SEED"
CDF_POINTS = 256

_INT_FIELDS = {"num_carriers", "num_pcc", "surplus", "delta_seed_count", "warmup_slots",
               "rounds_per_deployment", "num_deployments", "rng_seed"}
_BOOL_FIELDS = {"truncate_zero_load", "carry_allocation"}
_SCALAR_FIELDS = {f.name for f in fields(ScenarioConfig)} - {"floor", "mean_loads", "scheme"}
_ROOM_KEY = re.compile(r"^room\.(\d+)\.(x0|y0|x1|y1|owner)$")
_BS_KEY = re.compile(r"^bs\.(\d+)\.(x|y)$")


@dataclass(frozen=True)
class RunManifest:
    config_path: str | None
    out_dir: str
    command: str
    flags: tuple[tuple[str, str], ...]
    plan: ExperimentPlan


def _fail(key: str, msg: str) -> ConfigError:
    return ConfigError(f"{key}: {msg}")


def _number(key: str, raw: str, kind=float):
    try:
        v = kind(raw)
    except ValueError:
        raise _fail(key, f"cannot parse {raw!r} as {kind.__name__}") from None
    if kind is float and not math.isfinite(v):
        raise _fail(key, "must be finite")
    return v


def _bool(key: str, raw: str) -> bool:
    s = raw.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise _fail(key, f"cannot parse {raw!r} as a boolean")


def _scheme(key: str, raw: str) -> Scheme:
    try:
        return Scheme(raw.strip())
    except ValueError:
        names = ", ".join(s.value for s in Scheme)
        raise _fail(key, f"unknown scheme {raw!r} (expected one of {names})") from None


def _owner(key: str, raw: str) -> int:
    s = raw.strip()
    if s in OPERATOR_NAMES:
        return OPERATOR_NAMES.index(s)
    v = _number(key, s, int)
    if v not in (0, 1):
        raise _fail(key, "must be a, b, 0 or 1")
    return v


def _split(raw: str) -> list[str]:
    return [p.strip() for p in raw.split(",") if p.strip()]


def read_pairs(text: str, source: str = "<config>") -> list[tuple[str, str]]:
    pairs, seen = [], set()
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in seen:
            raise _fail(key, "given more than once")
        seen.add(key)
        pairs.append((key, value))
    return pairs


def plan_from_pairs(pairs) -> ExperimentPlan:
    """Build an ``ExperimentPlan``; unknown keys and bad values raise ``ConfigError``."""
    kw: dict = {}
    rooms: dict[int, dict] = {}
    bss: dict[int, dict] = {}
    room_size = None
    schemes = tuple(Scheme)
    surplus_values: tuple[int, ...] = ()
    reversal = None
    for key, raw in pairs:
        if m := _ROOM_KEY.match(key):
            i, attr = int(m.group(1)), m.group(2)
            rooms.setdefault(i, {})[attr] = _owner(key, raw) if attr == "owner" else _number(key, raw)
        elif m := _BS_KEY.match(key):
            bss.setdefault(int(m.group(1)), {})[m.group(2)] = _number(key, raw)
        elif key == "room_size":
            room_size = _number(key, raw)
            if not room_size > 0:
                raise _fail(key, "must be > 0")
        elif key == "mean_loads":
            vals = tuple(_number(key, v) for v in _split(raw))
            if len(vals) != 2 or any(v < 0 for v in vals):
                raise _fail(key, "expected two non-negative means, e.g. 25,5")
            kw[key] = vals
        elif key == "scheme":
            kw[key] = _scheme(key, raw)
        elif key == "schemes":
            schemes = tuple(_scheme(key, v) for v in _split(raw))
            if not schemes:
                raise _fail(key, "empty scheme list")
        elif key == "surplus_values":
            surplus_values = tuple(_number(key, v, int) for v in _split(raw))
            if any(v < 0 for v in surplus_values):
                raise _fail(key, "surplus must be >= 0")
        elif key == "load_reversal_at":
            reversal = _number(key, raw, int)
        elif key in _BOOL_FIELDS:
            kw[key] = _bool(key, raw)
        elif key in _SCALAR_FIELDS:
            kw[key] = _number(key, raw, int if key in _INT_FIELDS else float)
        else:
            raise _fail(key, "unknown key")

    if room_size is not None and (rooms or bss):
        raise _fail("room_size", "cannot be combined with room.* / bs.* keys")
    if rooms or bss:
        kw["floor"] = _floor(rooms, bss)
    elif room_size is not None:
        kw["floor"] = default_floor(room_size)
    try:
        cfg = ScenarioConfig(**kw)
    except ConfigError as e:
        raise ConfigError(str(e)) from None
    try:
        return ExperimentPlan(cfg, schemes=schemes, surplus_values=surplus_values,
                              load_reversal_at=reversal)
    except ValueError as e:
        raise _fail("load_reversal_at", str(e)) from None


def _floor(rooms: dict, bss: dict) -> FloorLayout:
    def dense(d: dict, prefix: str, attrs) -> list[dict]:
        if sorted(d) != list(range(len(d))):
            raise _fail(f"{prefix}.*", "indices must run 0, 1, 2 ... without gaps")
        for i in sorted(d):
            missing = [a for a in attrs if a not in d[i]]
            if missing:
                raise _fail(f"{prefix}.{i}.{missing[0]}", "missing")
        return [d[i] for i in sorted(d)]

    rs = [Room(**r) for r in dense(rooms, "room", ("x0", "y0", "x1", "y1", "owner"))]
    bs = [BaseStation(**b) for b in dense(bss, "bs", ("x", "y"))]
    return FloorLayout(tuple(rs), tuple(bs))


def parse_config_text(text: str, source: str = "<config>") -> ExperimentPlan:
    return plan_from_pairs(read_pairs(text, source))


def parse_config(path) -> ExperimentPlan:
    p = Path(path)
    return parse_config_text(p.read_text(encoding="utf-8"), str(p))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Scheme):
        return v.value
    return str(v)


def effective_pairs(plan: ExperimentPlan) -> list[tuple[str, str]]:
    """Config keys that reproduce ``plan`` exactly when parsed back."""
    cfg = plan.base
    out = []
    for f in fields(ScenarioConfig):
        v = getattr(cfg, f.name)
        if f.name == "floor":
            continue
        if f.name == "mean_loads":
            out.append((f.name, ",".join(_fmt(float(m)) for m in v)))
        else:
            out.append((f.name, _fmt(v)))
    for i, r in enumerate(cfg.floor.rooms):
        out += [(f"room.{i}.{a}", _fmt(float(getattr(r, a)))) for a in ("x0", "y0", "x1", "y1")]
        out.append((f"room.{i}.owner", OPERATOR_NAMES[r.owner]))
    for i, b in enumerate(cfg.floor.base_stations):
        out += [(f"bs.{i}.x", _fmt(float(b.x))), (f"bs.{i}.y", _fmt(float(b.y)))]
    out.append(("schemes", ",".join(s.value for s in plan.schemes)))
    if plan.surplus_values:
        out.append(("surplus_values", ",".join(str(s) for s in plan.surplus_values)))
    if plan.load_reversal_at is not None:
        out.append(("load_reversal_at", str(plan.load_reversal_at)))
    return out


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _rate_grid(result: ExperimentResult) -> np.ndarray:
    top = max((float(r.rate_samples(op).max(initial=0.0))
               for r in result.runs.values() for op in range(2)), default=0.0)
    return np.linspace(0.0, top, CDF_POINTS)


def _run_label(result: ExperimentResult, scheme: Scheme, surplus: int) -> str:
    n = sum(1 for s, _ in result.runs if s is scheme)
    return scheme.value if n == 1 else f"{scheme.value}_s{surplus}"


def write_outputs(result: ExperimentResult, manifest: RunManifest) -> list[Path]:
    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = _rate_grid(result)
    phases = len(next(iter(result.runs.values())).rates)
    written = []
    util_rows = []
    for (scheme, surplus), run in result.runs.items():
        label = _run_label(result, scheme, surplus)
        for op, name in enumerate(OPERATOR_NAMES):
            variants = [("", None)]
            if phases > 1:
                variants += [(f"_phase{p + 1}", p) for p in range(phases)]
            for suffix, phase in variants:
                samples = run.rate_samples(op, phase)
                if samples.size == 0:
                    continue
                path = out / f"cdf_{label}_{name}{suffix}.csv"
                cdf = rate_cdf(samples, grid)
                _write_csv(path, ("rate_bps", "cdf"),
                           ((f"{x:.6e}", f"{c:.6f}") for x, c in zip(grid, cdf)))
                written.append(path)
            util_rows.append((label, name, f"{run.mean_scc()[op]:.4f}",
                              run.ledger["granted"][op]))
    path = out / "utilization.csv"
    _write_csv(path, ("scheme", "operator", "mean_scc", "favors_granted"), util_rows)
    written.append(path)

    # the output directory is left out so identical runs give identical bytes
    path = out / "manifest.csv"
    rows = [("run", "command", manifest.command),
            ("run", "config", manifest.config_path or ""),
            ("run", "seed", str(manifest.plan.seed))]
    rows += [("flag", k, v) for k, v in manifest.flags]
    rows += [("config", k, v) for k, v in effective_pairs(manifest.plan)]
    _write_csv(path, ("section", "key", "value"), rows)
    written.append(path)
    return written


def config_from_manifest(path) -> ExperimentPlan:
    """Re-create the plan echoed in a ``manifest.csv``."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    pairs = [(r["key"], r["value"]) for r in rows if r["section"] == "config"]
    return plan_from_pairs(pairs)


def _resolve_seed(cli_seed: int | None, plan: ExperimentPlan) -> ExperimentPlan:
    seed = cli_seed
    if seed is None and os.environ.get(SEED_ENV, "").strip():
        seed = _number(SEED_ENV, os.environ[SEED_ENV].strip(), int)
    if seed is None:
        return plan
    if seed < 0:
        raise _fail("seed", "must be >= 0")
    return ExperimentPlan(plan.base.with_(rng_seed=seed), plan.schemes, plan.surplus_values,
                          plan.num_deployments, plan.load_reversal_at)


def _load_plan(args) -> ExperimentPlan:
    plan = parse_config(args.config) if args.config else plan_from_pairs([])
    if getattr(args, "deployments", None) is not None:
        if args.deployments < 1:
            raise _fail("deployments", "must be >= 1")
        plan = ExperimentPlan(plan.base.with_(num_deployments=args.deployments), plan.schemes,
                              plan.surplus_values, None, plan.load_reversal_at)
    return _resolve_seed(args.seed, plan)


def cmd_run(args) -> int:
    plan = _load_plan(args)
    flags = (("jobs", str(args.jobs)),)
    manifest = RunManifest(args.config, args.out, "run", flags, plan)
    result = run_experiment(plan, jobs=args.jobs)
    for p in write_outputs(result, manifest):
        log.info("wrote %s", p)
    return 0


def cmd_sweep(args) -> int:
    plan = _load_plan(args)
    surpluses = tuple(_number("surplus", v, int) for v in _split(args.surplus))
    if not surpluses or any(s < 0 for s in surpluses):
        raise _fail("surplus", "need a comma list of values >= 0")
    walls = (tuple(_number("wall_loss", v) for v in _split(args.wall_loss))
             if args.wall_loss else (plan.base.wall_loss_db,))
    for w in walls:
        sub = ExperimentPlan(plan.base.with_(wall_loss_db=w), plan.schemes, surpluses,
                             None, plan.load_reversal_at)
        out = str(Path(args.out) / f"W{w:g}")
        flags = (("surplus", args.surplus), ("wall_loss", f"{w:g}"), ("jobs", str(args.jobs)))
        result = run_experiment(sub, jobs=args.jobs)
        for p in write_outputs(result, RunManifest(args.config, out, "sweep", flags, sub)):
            log.info("wrote %s", p)
    return 0


def analysis_rows(K, Na, Nb, gammas_db, gamma_shared_db, p1, p2, delta_k=None, delta=0.3, h_a=1):
    rows = []
    R, g_db = analysis.equal_load_stability_threshold(K)
    rows += [("stability_threshold_R", f"K={K:g}", f"{R:.6f}"),
             ("stability_threshold_db", f"K={K:g}", f"{g_db:.4f}")]
    R_inf, g_inf = analysis.equal_load_stability_threshold(math.inf)
    rows += [("stability_threshold_R", "K=inf", f"{R_inf:.6f}"),
             ("stability_threshold_db", "K=inf", f"{g_inf:.4f}")]
    dk = analysis.delta_k_limit(K, Na, Nb)
    rows.append(("delta_k_limit", f"K={K:g};Na={Na:g};Nb={Nb:g}", f"{dk:.6f}"))
    dk_eval = dk if delta_k is None else delta_k
    hi, lo = max(Na, Nb), min(Na, Nb)
    ok = analysis.pricing_feasible(p1, p2, K, hi, lo, dk_eval)
    rows.append(("pricing_feasible", f"p1={p1:g};p2={p2:g};dK={dk_eval:g}", str(ok).lower()))
    half = K / 2
    if half >= 1:
        rows.append(("immediate_gain", f"N={Na:g};k={half:g}->{half + 1:g}",
                     f"{analysis.immediate_gain(Na, half, half + 1):.6f}"))
        rows.append(("immediate_loss", f"N={Nb:g};k={half:g}->{half - 1:g}",
                     f"{analysis.immediate_loss(Nb, half, half - 1):.6f}"))
    gs = 10 ** (gamma_shared_db / 10)
    for gdb in gammas_db:
        g = 10 ** (gdb / 10)
        sc = analysis.AnalyticScenario(K, Na, Nb, g, g, gs, gs)
        tag = f"gamma_db={gdb:g};gamma_shared_db={gamma_shared_db:g}"
        rows.append(("rate_ratio", tag, f"{sc.R_a:.6f}"))
        for d in analysis.Direction:
            rows.append((f"transfer_{d.value}", tag,
                         str(analysis.coop_transfer_condition(sc, d)).lower()))
    return rows


def default_p_grid():
    p1 = np.round(np.arange(0.5, 20.0 + 1e-9, 0.5), 6)
    p2 = np.round(np.arange(-2.0, 2.0 + 1e-9, 0.1), 6)
    return p1, p2[p2 != 0]


def cmd_analyze(args) -> int:
    if args.K < 2 or args.Na < 0 or args.Nb < 0:
        raise _fail("K", "need K >= 2 and non-negative loads")
    gammas = [_number("gamma", v) for v in _split(args.gamma)]
    rows = analysis_rows(args.K, args.Na, args.Nb, gammas, args.gamma_shared, args.p1, args.p2,
                         args.delta_k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("quantity", "parameters", "value"))
    w.writerows(rows)
    sys.stdout.write(buf.getvalue())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "analysis.csv", ("quantity", "parameters", "value"), rows)
        hi, lo = max(args.Na, args.Nb), min(args.Na, args.Nb)
        dk = args.delta_k if args.delta_k is not None else analysis.delta_k_limit(args.K, hi, lo)
        p1s, p2s = default_p_grid()
        grid = analysis.feasibility_grid(p1s, p2s, args.K, hi, lo, dk)
        _write_csv(out / "feasibility_grid.csv", ("p1", "p2", "feasible"),
                   ((f"{a:g}", f"{b:g}", int(f)) for a, b, f in grid))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="specgames",
                                 description="Inter-operator spectrum sharing games")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value scenario file (defaults when omitted)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, help=f"master seed (overrides ${SEED_ENV} and config)")
        p.add_argument("--deployments", type=int, help="override num_deployments")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")

    run = sub.add_parser("run", help="run one experiment and write CSVs")
    common(run)
    run.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="run the game schemes over several surplus limits")
    common(sw)
    sw.add_argument("--surplus", required=True, help="comma list, e.g. 2,4")
    sw.add_argument("--wall-loss", help="comma list of wall losses in dB, e.g. 0,10")
    sw.set_defaults(func=cmd_sweep)

    an = sub.add_parser("analyze", help="closed-form thresholds and pricing feasibility")
    an.add_argument("--K", type=int, default=8)
    an.add_argument("--Na", type=float, default=25.0)
    an.add_argument("--Nb", type=float, default=5.0)
    an.add_argument("--gamma", default="3,5,10,20", help="SNR values in dB, comma list")
    an.add_argument("--gamma-shared", type=float, default=0.0, help="shared-carrier SINR in dB")
    an.add_argument("--p1", type=float, default=7.0)
    an.add_argument("--p2", type=float, default=0.8)
    an.add_argument("--delta-k", type=float, help="transfer size for the pricing check")
    an.add_argument("--out", help="directory for analysis.csv and feasibility_grid.csv")
    an.set_defaults(func=cmd_analyze)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"specgames: config error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"specgames: invalid input: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"specgames: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
