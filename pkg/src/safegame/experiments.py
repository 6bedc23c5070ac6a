"""Experiment configs and runners that turn the models into data files.

Configs are INI files with sections [table], [dynamics], [policy], [sim]
and [experiment]; see ``configs/`` for the shipped presets. Every runner
writes CSV/JSON only (no timestamps, so re-runs are byte-identical) and
returns a :class:`Report` whose ``checks`` drive the CLI exit code.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import driving_sim
from .dynamics import DynamicsSpec
from .game_model import (
    TABLE_KEYS, PayoffRiskTable, classify_interaction, expected_risk,
    expected_total_reward, get_preset, table_from_mapping,
)
from .mc_sim import simulate_mc
from .ode_sim import Trajectory, run_until, simulate_ode
from .policies import (
    InfeasibleTolerance, PolicyKind, PolicySpec, SegmentKind, admissible_set, feasible_set,
    optimal_strategy,
)

EXPERIMENT_KINDS = ("trajectory", "risk_map", "pareto", "robustness", "policy_report")
SUMMARY_HEADER = ("policy", "dynamics", "simulator", "pi_h_0", "seed", "final_pi_h",
                  "final_pi_a", "exp_reward", "exp_risk", "converged", "limit_pi_h",
                  "limit_exp_risk")
RISK_MAP_HEADER = ("kind", "label", "pi_h", "pi_a", "exp_reward", "exp_risk")
PARETO_HEADER = ("epsilon", "status", "pi_h", "pi_a", "exp_reward", "exp_risk", "branch",
                 "segment", "attained")
ROBUSTNESS_HEADER = ("simulator", "policy", "dynamics", "pi_h_0", "seed", "final_pi_h",
                     "final_pi_a", "exp_reward", "exp_risk", "risk_tol", "risk_ok",
                     "dist_to_target")
# Distance to the admissible set below which a run counts as settled.
CONVERGED_TOL = 1e-3


class ConfigError(ValueError):
    """The experiment config is incomplete or inconsistent."""


# ---------------------------------------------------------------- parsing

def _floats(text: str) -> list[float]:
    """Comma-separated numbers; fractions such as 1/3 are accepted."""
    out = []
    for item in text.replace("\n", ",").split(","):
        item = item.strip()
        if item:
            try:
                out.append(float(Fraction(item)) if "/" in item else float(item))
            except ValueError:
                raise ConfigError(f"not a number: {item!r}") from None
    return out


def _ints(text: str) -> list[int]:
    """Comma-separated integers; ``a-b`` expands to the inclusive range."""
    out = []
    for item in text.replace("\n", ",").split(","):
        item = item.strip()
        if not item:
            continue
        if "-" in item[1:]:
            lo, hi = item[0] + item[1:].split("-", 1)[0], item[1:].split("-", 1)[1]
            if int(hi) < int(lo):
                raise ConfigError(f"empty seed range {item!r}")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(item))
    return out


def _names(text: str) -> list[str]:
    return [s.strip().lower() for s in text.replace("\n", ",").split(",") if s.strip()]


@dataclass
class ExperimentConfig:
    kind: str
    table: PayoffRiskTable
    table_id: str
    dynamics: list[DynamicsSpec]
    policies: list[str]
    epsilon: float | None = None
    gain: float = 1.0
    simulator: str = "ode"
    pi_h_0: list[float] = field(default_factory=lambda: [0.9])
    dt: float = 1e-3
    steps: int = 100_000
    n: int = 1000
    seeds: list[int] = field(default_factory=lambda: [0])
    stride: int = 1
    grid: int = 101
    epsilons: list[float] = field(default_factory=list)
    out: Path | None = None
    table_source: dict = field(default_factory=dict)

    def policy_specs(self) -> list[PolicySpec]:
        specs = []
        for name in self.policies:
            if name == "dwsc":
                specs.append(PolicySpec.dwsc(self.table))
            elif name == "msne":
                specs.append(PolicySpec.msne(self.table))
            elif name == "proposed":
                if self.epsilon is None:
                    raise ConfigError("[policy] epsilon is required for the proposed policy")
                specs.append(PolicySpec.proposed(self.table, self.epsilon, self.gain))
            else:
                raise ConfigError(f"unknown policy {name!r}; use dwsc, msne or proposed")
        return specs


def _load_table(sec: configparser.SectionProxy | None, seed: int):
    if sec is None:
        raise ConfigError("config needs a [table] section")
    if "preset" in sec:
        name = sec["preset"].strip().lower()
        try:
            return get_preset(name), name, {"preset": name}
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
    if "driving" in sec:
        name = sec["driving"].strip().lower()
        if name not in driving_sim.TABLE3_PRESETS:
            raise ConfigError(f"unknown driving preset {name!r}; "
                              f"choose from {sorted(driving_sim.TABLE3_PRESETS)}")
        episodes = sec.getint("episodes", 10_000)
        table_seed = sec.getint("seed", seed)
        table = driving_sim.estimate_tables(driving_sim.TABLE3_PRESETS[name], episodes, table_seed)
        return table, f"driving_{name}", {"driving": name, "episodes": episodes,
                                          "seed": table_seed}
    missing = [k for k in TABLE_KEYS if k not in sec]
    if missing:
        raise ConfigError("[table] needs preset = <name>, driving = <name>, or all of "
                          + ", ".join(TABLE_KEYS) + f" (missing {', '.join(missing)})")
    values = {k: float(sec[k]) for k in TABLE_KEYS}
    return table_from_mapping(values), sec.get("name", "inline"), {"inline": values}


def load_config(path, seed: int | None = None, out=None) -> ExperimentConfig:
    """Parse an INI config; ``seed`` and ``out`` override the file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    path = Path(path)
    if not parser.read(path):
        raise ConfigError(f"cannot read config file {path}")
    return config_from_parser(parser, seed=seed, out=out)


def config_from_string(text: str, seed: int | None = None, out=None) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_string(text)
    return config_from_parser(parser, seed=seed, out=out)


def config_from_parser(parser: configparser.ConfigParser, seed=None, out=None):
    exp = parser["experiment"] if parser.has_section("experiment") else {}
    kind = exp.get("kind", "trajectory").strip().lower().replace("-", "_")
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"[experiment] kind must be one of {EXPERIMENT_KINDS}, got {kind!r}")
    sim = parser["sim"] if parser.has_section("sim") else {}
    seeds = _ints(sim.get("seeds", "0"))
    if seed is not None:
        seeds = [int(seed) + s - seeds[0] for s in seeds]
    table, table_id, source = _load_table(
        parser["table"] if parser.has_section("table") else None, seeds[0])

    dyn = parser["dynamics"] if parser.has_section("dynamics") else {}
    weights = _floats(dyn.get("weights", "1/3, 1/3, 1/3"))
    if len(weights) != 3:
        raise ConfigError("[dynamics] weights needs three numbers (w_r, w_b, w_s)")
    try:
        dynamics = [DynamicsSpec.from_name(k, weights) for k in _names(dyn.get("kinds", "mixed"))]
    except ValueError as exc:
        raise ConfigError(f"[dynamics] {exc}") from None

    pol = parser["policy"] if parser.has_section("policy") else {}
    epsilon = float(pol["epsilon"]) if "epsilon" in pol else None
    cfg = ExperimentConfig(
        kind=kind, table=table, table_id=table_id, dynamics=dynamics,
        policies=_names(pol.get("kinds", "proposed")), epsilon=epsilon,
        gain=float(pol.get("gain", 1.0)),
        simulator=sim.get("simulator", "ode").strip().lower(),
        pi_h_0=_floats(sim.get("pi_h_0", "0.9")),
        dt=float(sim.get("dt", 1e-3)), steps=int(float(sim.get("steps", 100_000))),
        n=int(sim.get("n", 1000)), seeds=seeds, stride=int(sim.get("stride", 1)),
        grid=int(exp.get("grid", 101)), epsilons=_floats(exp.get("epsilons", "")),
        out=Path(out) if out is not None else (Path(exp["out"]) if "out" in exp else None),
        table_source=source,
    )
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig) -> None:
    if cfg.simulator not in ("ode", "mc"):
        raise ConfigError(f"[sim] simulator must be ode or mc, got {cfg.simulator!r}")
    if not cfg.pi_h_0 or any(not 0.0 <= p <= 1.0 for p in cfg.pi_h_0):
        raise ConfigError("[sim] pi_h_0 must be a nonempty list of values in [0, 1]")
    if not cfg.seeds:
        raise ConfigError("[sim] seeds must be nonempty")
    if not cfg.dynamics or not cfg.policies:
        raise ConfigError("need at least one dynamics kind and one policy")
    if cfg.kind == "risk_map" and cfg.grid < 2:
        raise ConfigError("[experiment] grid must be >= 2")
    if cfg.kind == "pareto":
        if not cfg.epsilons:
            raise ConfigError("[experiment] epsilons is required for a pareto sweep")
        if any(not 0.0 < e < 1.0 for e in cfg.epsilons):
            raise ConfigError("[experiment] epsilons must lie in (0, 1)")
    if cfg.kind in ("trajectory", "robustness"):
        cfg.policy_specs()  # surfaces policy errors early


# ---------------------------------------------------------------- output

@dataclass
class Report:
    kind: str
    files: list[Path] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[h]) for h in header])
    return path


def write_json(path: Path, payload) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_fmt) + "\n")
    return path


def _out_dir(cfg: ExperimentConfig) -> Path:
    return cfg.out if cfg.out is not None else Path("results") / cfg.kind


def distance_to_admissible(table: PayoffRiskTable, pi_h: float, pi_a: float) -> float:
    """Euclidean distance from (pi_h, pi_a) to the admissible set."""
    best = math.inf
    for seg in admissible_set(table):
        lo, hi = seg.interval.lo, seg.interval.hi
        if seg.kind is SegmentKind.DIAG:
            s = min(max(pi_h, lo), hi)
            best = min(best, math.hypot(pi_h - s, pi_a - seg.level))
        else:
            s = min(max(pi_a, lo), hi)
            best = min(best, math.hypot(pi_h - seg.level, pi_a - s))
    return best


def _simulate(cfg: ExperimentConfig, spec, policy, pi_h_0, seed) -> Trajectory:
    if cfg.simulator == "ode":
        return simulate_ode(cfg.table, spec, policy, pi_h_0, dt=cfg.dt, steps=cfg.steps,
                            table_id=cfg.table_id)
    return simulate_mc(cfg.table, spec, policy, pi_h_0, n=cfg.n, steps=cfg.steps, seed=seed,
                       dt=cfg.dt, table_id=cfg.table_id)


# ---------------------------------------------------------------- runners

def run_trajectory(cfg: ExperimentConfig) -> Report:
    """One CSV per (policy, dynamics, pi_h_0, seed) plus summary.csv."""
    out = _out_dir(cfg)
    report = Report("trajectory")
    seeds = cfg.seeds if cfg.simulator == "mc" else cfg.seeds[:1]
    for policy in cfg.policy_specs():
        for spec in cfg.dynamics:
            for pi_h_0 in cfg.pi_h_0:
                base = f"traj_{policy.kind.value}_{spec.label}"
                if len(cfg.pi_h_0) > 1:
                    base += f"_h{pi_h_0:g}"
                runs = []
                limit = {"pi_h": math.nan, "exp_risk": math.nan}
                if cfg.simulator == "ode" and policy.target is not None:
                    limit = converge_ode(cfg.table, spec, policy, pi_h_0)
                for seed in seeds:
                    traj = _simulate(cfg, spec, policy, pi_h_0, seed)
                    name = base + (f"_seed{seed}" if cfg.simulator == "mc" else "")
                    report.files.append(traj.to_csv(out / f"{name}.csv", stride=cfg.stride))
                    runs.append(traj)
                    fin = traj.final
                    report.rows.append({
                        "policy": policy.kind.value, "dynamics": spec.label,
                        "simulator": cfg.simulator, "pi_h_0": pi_h_0, "seed": seed,
                        "final_pi_h": fin["pi_h"], "final_pi_a": fin["pi_a"],
                        "exp_reward": fin["exp_reward"], "exp_risk": fin["exp_risk"],
                        "converged": distance_to_admissible(
                            cfg.table, fin["pi_h"], fin["pi_a"]) < CONVERGED_TOL,
                        "limit_pi_h": limit["pi_h"], "limit_exp_risk": limit["exp_risk"],
                    })
                if cfg.simulator == "mc" and len(runs) > 1:
                    mean = Trajectory.from_path(
                        runs[0].t, np.mean([r.pi_h for r in runs], axis=0),
                        np.mean([r.pi_a for r in runs], axis=0), cfg.table)
                    report.files.append(mean.to_csv(out / f"{base}_mean.csv", stride=cfg.stride))
    report.files.append(write_csv(out / "summary.csv", SUMMARY_HEADER, report.rows))
    props = [r for r in report.rows if r["policy"] == PolicyKind.PROPOSED.value]
    if props and cfg.simulator == "ode":
        # judged at the limit; fixed horizons can stop inside a slow approach
        report.checks["proposed_within_epsilon"] = all(
            r["limit_exp_risk"] <= cfg.epsilon + 1e-9 for r in props)
    elif props:
        report.checks["proposed_within_epsilon"] = all(
            r["exp_risk"] <= cfg.epsilon + mc_risk_tolerance(
                cfg.table, r["final_pi_h"], r["final_pi_a"], cfg.n)
            for r in props if r["converged"])
    return report


def risk_map_rows(table: PayoffRiskTable, grid: int, epsilon: float | None,
                  overlay_points: int = 101) -> list[dict]:
    axis = np.linspace(0.0, 1.0, grid)
    H, A = np.meshgrid(axis, axis, indexing="ij")
    R = expected_total_reward(H, A, table)
    W = expected_risk(H, A, table)
    rows = [{"kind": "grid", "label": "", "pi_h": h, "pi_a": a, "exp_reward": r, "exp_risk": w}
            for h, a, r, w in zip(H.ravel(), A.ravel(), R.ravel(), W.ravel())]

    def add(kind, label, pts):
        for h, a in pts:
            rows.append({"kind": kind, "label": label, "pi_h": float(h), "pi_a": float(a),
                         "exp_reward": float(expected_total_reward(h, a, table)),
                         "exp_risk": float(expected_risk(h, a, table))})

    for seg in admissible_set(table):
        add("admissible", seg.kind.value, seg.sample(overlay_points))
    if epsilon is not None:
        try:
            for seg in feasible_set(table, epsilon):
                add("feasible", seg.kind.value, seg.sample(overlay_points))
            opt = optimal_strategy(table, epsilon)
            add("optimum", opt.branch.value, [(opt.pi_h, opt.pi_a)])
        except InfeasibleTolerance:
            pass
    # DWSC drives humans to defect, so its limit point is (0, 1).
    add("dwsc", "limit", [(0.0, 1.0)])
    add("msne", "", [(table.msne, table.msne)])
    return rows


def run_risk_map(cfg: ExperimentConfig) -> Report:
    if cfg.grid < 2:
        raise ConfigError("grid resolution must be >= 2")
    rows = risk_map_rows(cfg.table, cfg.grid, cfg.epsilon)
    report = Report("risk_map", rows=rows)
    report.files.append(write_csv(_out_dir(cfg) / "risk_map.csv", RISK_MAP_HEADER, rows))
    grid_rows = [r for r in rows if r["kind"] == "grid"]
    report.checks["grid_recomputes"] = all(
        abs(expected_risk(r["pi_h"], r["pi_a"], cfg.table) - r["exp_risk"]) <= 1e-12
        for r in grid_rows)
    return report


def pareto_rows(table: PayoffRiskTable, epsilons) -> list[dict]:
    rows = []
    for eps in sorted(epsilons):
        try:
            opt = optimal_strategy(table, eps)
        except InfeasibleTolerance:
            rows.append({"epsilon": eps, "status": "infeasible", "pi_h": math.nan,
                         "pi_a": math.nan, "exp_reward": math.nan, "exp_risk": math.nan,
                         "branch": "", "segment": "", "attained": False})
            continue
        rows.append({"epsilon": eps, "status": "ok", "pi_h": opt.pi_h, "pi_a": opt.pi_a,
                     "exp_reward": opt.reward, "exp_risk": opt.risk,
                     "branch": opt.branch.value, "segment": opt.segment.value,
                     "attained": opt.attained})
    return rows


def pareto_checks(rows, tol: float = 1e-12) -> dict[str, bool]:
    ok = [r for r in rows if r["status"] == "ok"]
    rewards = [r["exp_reward"] for r in ok]
    return {
        "reward_nondecreasing": all(b >= a - tol * max(1.0, abs(a))
                                    for a, b in zip(rewards, rewards[1:])),
        "risk_within_epsilon": all(r["exp_risk"] <= r["epsilon"] + 1e-15 for r in ok),
    }


def run_pareto(cfg: ExperimentConfig) -> Report:
    rows = pareto_rows(cfg.table, cfg.epsilons)
    report = Report("pareto", rows=rows, checks=pareto_checks(rows))
    report.files.append(write_csv(_out_dir(cfg) / "pareto.csv", PARETO_HEADER, rows))
    return report


def mc_risk_tolerance(table: PayoffRiskTable, pi_h: float, pi_a: float, n: int) -> float:
    """Three binomial standard errors of the fraction, mapped through E[W]."""
    slope = float(expected_risk(1.0, pi_a, table) - expected_risk(0.0, pi_a, table))
    return 3.0 * abs(slope) * math.sqrt(pi_h * (1.0 - pi_h) / n) + 1e-9


def converge_ode(table: PayoffRiskTable, spec: DynamicsSpec, policy: PolicySpec, pi_h_0: float,
                 tol: float = 1e-3, max_time: float = 1e7) -> dict[str, float]:
    """Integrate the proposed closed loop until it is within ``tol`` of pi_h* and epsilon.

    Targets on H0/H1 with pi_a near L are approached very slowly, so a fixed
    horizon can stop short of the constraint; this runs to the limit instead.
    """
    target, eps = policy.target.pi_h, policy.epsilon

    def done(h, a):
        return abs(h - target) < tol and float(expected_risk(h, a, table)) <= eps + 1e-9

    res = run_until(table, spec, policy, pi_h_0, done, max_time=max_time)
    return {"pi_h": res.pi_h, "pi_a": res.pi_a, "exp_reward": res.exp_reward,
            "exp_risk": res.exp_risk, "t": res.t, "converged": res.converged}


def run_robustness(cfg: ExperimentConfig) -> Report:
    """Endpoint statistics over initial conditions (and seeds for MC).

    ODE runs of the proposed policy are integrated to convergence; every
    other cell uses the configured fixed horizon.
    """
    out = _out_dir(cfg)
    report = Report("robustness")
    seeds = cfg.seeds if cfg.simulator == "mc" else cfg.seeds[:1]
    for policy in cfg.policy_specs():
        target = policy.target
        for spec in cfg.dynamics:
            for pi_h_0 in cfg.pi_h_0:
                for seed in seeds:
                    if cfg.simulator == "ode" and target is not None:
                        fin = converge_ode(cfg.table, spec, policy, pi_h_0)
                    else:
                        fin = _simulate(cfg, spec, policy, pi_h_0, seed).final
                    if cfg.simulator == "ode":
                        tol = 1e-9
                    else:
                        tol = mc_risk_tolerance(cfg.table, fin["pi_h"], fin["pi_a"], cfg.n)
                    eps = policy.epsilon
                    report.rows.append({
                        "simulator": cfg.simulator, "policy": policy.kind.value,
                        "dynamics": spec.label, "pi_h_0": pi_h_0, "seed": seed,
                        "final_pi_h": fin["pi_h"], "final_pi_a": fin["pi_a"],
                        "exp_reward": fin["exp_reward"], "exp_risk": fin["exp_risk"],
                        "risk_tol": tol,
                        "risk_ok": True if eps is None else fin["exp_risk"] <= eps + tol,
                        "dist_to_target": (math.nan if target is None
                                           else abs(fin["pi_h"] - target.pi_h)),
                    })
    report.files.append(write_csv(out / "robustness.csv", ROBUSTNESS_HEADER, report.rows))
    proposed = [r for r in report.rows if r["policy"] == PolicyKind.PROPOSED.value]
    report.checks["proposed_within_epsilon"] = all(r["risk_ok"] for r in proposed)
    if proposed and cfg.simulator == "ode":
        report.checks["proposed_converged"] = all(r["dist_to_target"] < 1e-3 for r in proposed)
    if proposed and cfg.simulator == "mc":
        ends = np.array([r["final_pi_h"] for r in proposed])
        report.checks["endpoint_spread_below_0.05"] = bool(ends.max() - ends.min() < 0.05)
    return report


def policy_summary(table: PayoffRiskTable, epsilon: float | None, gain: float = 1.0) -> dict:
    """Everything the AA needs to know about a table, as plain data."""
    try:
        kind = classify_interaction(table).name
    except ValueError:
        kind = None
    dwsc_limit = {"pi_h": 0.0, "pi_a": 1.0,
                  "exp_reward": float(expected_total_reward(0.0, 1.0, table)),
                  "exp_risk": float(expected_risk(0.0, 1.0, table))}
    L = table.msne
    summary = {
        "table": table.as_dict(), "interaction_type": kind, "msne_threshold": L,
        "admissible_set": [str(s) for s in admissible_set(table)],
        "dwsc_limit": dwsc_limit,
        "msne_point": {"pi_h": L, "pi_a": L,
                       "exp_reward": float(expected_total_reward(L, L, table)),
                       "exp_risk": float(expected_risk(L, L, table))},
    }
    if epsilon is not None:
        summary["epsilon"] = epsilon
        try:
            summary["feasible_set"] = [str(s) for s in feasible_set(table, epsilon)]
            opt = optimal_strategy(table, epsilon)
            summary["optimum"] = {
                "pi_h": opt.pi_h, "pi_a": opt.pi_a, "branch": opt.branch.value,
                "segment": opt.segment.value, "exp_reward": opt.reward, "exp_risk": opt.risk,
                "attained": opt.attained, "gain": gain,
            }
        except InfeasibleTolerance as exc:
            summary["feasible_set"] = []
            summary["optimum"] = {"infeasible": str(exc)}
    return summary


def policy_report(cfg: ExperimentConfig) -> Report:
    summary = policy_summary(cfg.table, cfg.epsilon, cfg.gain)
    report = Report("policy_report", rows=[summary])
    report.files.append(write_json(_out_dir(cfg) / "policy.json", summary))
    opt = summary.get("optimum", {})
    if "exp_risk" in opt:
        report.checks["optimum_within_epsilon"] = opt["exp_risk"] <= cfg.epsilon + 1e-15
    return report


def gen_table(params: driving_sim.ScenarioParams, episodes: int, seed: int, out: Path,
              label: str = "") -> Report:
    """Estimate a table from the driving sim and write it as a [table] config block."""
    stats = driving_sim.cell_statistics(params, episodes, seed)
    values = driving_sim.symmetrize(stats)
    report = Report("gen_table")
    try:
        table = table_from_mapping(values)
        kind = classify_interaction(table).name
        report.checks["valid_table"] = True
    except ValueError as exc:
        table, kind = None, f"invalid: {exc}"
        report.checks["valid_table"] = False
    parser = configparser.ConfigParser()
    parser["table"] = {k: repr(float(values[k])) for k in TABLE_KEYS}
    parser["provenance"] = {
        "source": "driving_sim", "preset": label, "seed": str(seed),
        "episodes_per_cell": str(episodes), "interaction_type": str(kind),
        **{f"param_{k}": repr(v) for k, v in params.as_dict().items()},
        **{f"se_{cell}_reward_h": repr(s.reward_h_se) for cell, s in stats.items()},
        **{f"se_{cell}_crash": repr(s.crash_se) for cell, s in stats.items()},
    }
    path = Path(out) / "table.ini"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        parser.write(fh)
    report.files.append(path)
    report.rows.append({**values, "interaction_type": kind})
    return report


RUNNERS = {
    "trajectory": run_trajectory,
    "risk_map": run_risk_map,
    "pareto": run_pareto,
    "robustness": run_robustness,
    "policy_report": policy_report,
}


def run(cfg: ExperimentConfig, kind: str | None = None) -> Report:
    return RUNNERS[kind or cfg.kind](cfg)


__all__ = [
    "ConfigError", "ExperimentConfig", "Report", "load_config", "config_from_string",
    "run_trajectory", "run_risk_map", "run_pareto", "run_robustness", "policy_report",
    "gen_table", "run", "risk_map_rows", "pareto_rows", "pareto_checks", "policy_summary",
    "distance_to_admissible", "mc_risk_tolerance",
]
