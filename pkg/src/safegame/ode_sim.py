"""Fixed-step RK4 integration of the closed-loop human strategy ODE.

The AA strategy is an instantaneous function of pi_h, so the state is the
scalar pi_h; pi_a is recomputed from the policy at every RK4 stage.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from numba import njit

from .dynamics import DynamicsSpec, mixed_rate_kernel, rate
from .game_model import PayoffRiskTable, expected_risk, expected_total_reward
from .policies import PolicySpec, policy_action

DEFAULT_DT = 1e-3
DEFAULT_STEPS = 100_000
CSV_HEADER = ("t", "pi_h", "pi_a", "exp_reward", "exp_risk")


class NonFiniteState(FloatingPointError):
    """The integrator produced NaN or infinity."""


@dataclass
class Trajectory:
    t: np.ndarray
    pi_h: np.ndarray
    pi_a: np.ndarray
    exp_reward: np.ndarray
    exp_risk: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)

    @classmethod
    def from_path(cls, t, pi_h, pi_a, table: PayoffRiskTable, **meta) -> "Trajectory":
        return cls(
            t=np.asarray(t, dtype=float), pi_h=np.asarray(pi_h, dtype=float),
            pi_a=np.asarray(pi_a, dtype=float),
            exp_reward=expected_total_reward(pi_h, pi_a, table),
            exp_risk=expected_risk(pi_h, pi_a, table),
            meta=meta,
        )

    @property
    def final(self) -> dict[str, float]:
        return {name: float(getattr(self, name)[-1]) for name in CSV_HEADER}

    def to_csv(self, path, stride: int = 1) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        idx = np.arange(0, len(self), stride)
        if idx[-1] != len(self) - 1:
            idx = np.append(idx, len(self) - 1)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for i in idx:
                writer.writerow([repr(float(getattr(self, name)[i])) for name in CSV_HEADER])
        return path

    @classmethod
    def read_csv(cls, path) -> "Trajectory":
        data = np.genfromtxt(path, delimiter=",", names=True)
        return cls(*(np.atleast_1d(data[name]) for name in CSV_HEADER))


@njit(cache=True)
def _action(pi_h, dynamic, const_a, L, target_h, gain):
    if not dynamic:
        return const_a
    a = L - gain * (target_h - pi_h)
    return min(1.0, max(0.0, a))


@njit(cache=True)
def _rhs(pi_h, denom, L, w_r, w_b, w_s, dynamic, const_a, target_h, gain):
    pi_a = _action(pi_h, dynamic, const_a, L, target_h, gain)
    return mixed_rate_kernel(pi_h, pi_a, denom, L, w_r, w_b, w_s)


@njit(cache=True)
def _rk4_kernel(pi_h, dt, denom, L, w_r, w_b, w_s, dynamic, const_a, target_h, gain):
    k1 = _rhs(pi_h, denom, L, w_r, w_b, w_s, dynamic, const_a, target_h, gain)
    k2 = _rhs(pi_h + 0.5 * dt * k1, denom, L, w_r, w_b, w_s, dynamic, const_a, target_h, gain)
    k3 = _rhs(pi_h + 0.5 * dt * k2, denom, L, w_r, w_b, w_s, dynamic, const_a, target_h, gain)
    k4 = _rhs(pi_h + dt * k3, denom, L, w_r, w_b, w_s, dynamic, const_a, target_h, gain)
    return pi_h + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@njit(cache=True)
def _integrate(pi_h0, dt, steps, denom, L, w_r, w_b, w_s, dynamic, const_a, target_h, gain):
    pi_h = np.empty(steps + 1)
    pi_h[0] = pi_h0
    clamps = 0
    bad = -1
    for k in range(steps):
        x = _rk4_kernel(pi_h[k], dt, denom, L, w_r, w_b, w_s, dynamic, const_a, target_h, gain)
        if not np.isfinite(x):
            bad = k
            pi_h[k + 1:] = np.nan
            break
        if x < 0.0:
            x = 0.0
            clamps += 1
        elif x > 1.0:
            x = 1.0
            clamps += 1
        pi_h[k + 1] = x
    return pi_h, clamps, bad


def _policy_args(policy: PolicySpec):
    dynamic = policy.dynamic
    const_a = 0.0 if dynamic else float(policy.constant_action)
    target_h = float(policy.target.pi_h) if dynamic else 0.0
    gain = float(policy.gain) if dynamic else 0.0
    return dynamic, const_a, float(policy.L), target_h, gain


def rk4_step(pi_h: float, table: PayoffRiskTable, spec: DynamicsSpec, policy: PolicySpec,
             dt: float) -> float:
    """One classical RK4 step of pi_h, clamped to [0, 1]."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    dynamic, const_a, L, target_h, gain = _policy_args(policy)
    x = _rk4_kernel(float(pi_h), float(dt), table.denominator, table.msne,
                    spec.w_r, spec.w_b, spec.w_s, dynamic, const_a, target_h, gain)
    if not math.isfinite(x):
        raise NonFiniteState(f"RK4 step from pi_h={pi_h} produced {x}")
    return min(1.0, max(0.0, x))


def simulate_ode(table: PayoffRiskTable, spec: DynamicsSpec, policy: PolicySpec, pi_h_0: float,
                 dt: float = DEFAULT_DT, steps: int = DEFAULT_STEPS, table_id: str = "") -> Trajectory:
    if not 0.0 <= pi_h_0 <= 1.0:
        raise ValueError(f"pi_h_0 must lie in [0, 1], got {pi_h_0}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    dynamic, const_a, L, target_h, gain = _policy_args(policy)
    pi_h, clamps, bad = _integrate(float(pi_h_0), float(dt), int(steps), table.denominator,
                                   table.msne, spec.w_r, spec.w_b, spec.w_s,
                                   dynamic, const_a, target_h, gain)
    if bad >= 0:
        raise NonFiniteState(f"non-finite pi_h after step {bad}")
    pi_a = np.asarray(policy_action(policy, pi_h))
    side = np.sign(pi_a - policy.L)
    crossings = int(np.count_nonzero(side[1:] * side[:-1] < 0))
    t = dt * np.arange(steps + 1)
    return Trajectory.from_path(
        t, pi_h, pi_a, table, simulator="ode", table_id=table_id, dynamics=spec.label,
        policy=policy.label, dt=dt, steps=steps, pi_h_0=pi_h_0,
        clamp_count=int(clamps), branch_crossings=crossings,
    )


# Real-axis stability limit of classical RK4.
RK4_STABILITY = 2.785


def stable_dt(table: PayoffRiskTable, spec: DynamicsSpec, policy: PolicySpec,
              max_dt: float = 1.0, safety: float = 0.5) -> float:
    """Step size well inside RK4's stability interval for this closed loop.

    The Lipschitz constant of the closed-loop right-hand side is estimated by
    finite differences on a fine pi_h grid.
    """
    x = np.linspace(0.0, 1.0, 4001)
    f = rate(spec, x, policy_action(policy, x), table)
    lip = float(np.max(np.abs(np.diff(f) / np.diff(x))))
    if lip == 0.0:
        return max_dt
    return min(max_dt, safety * RK4_STABILITY / lip)


@dataclass(frozen=True)
class ConvergenceResult:
    converged: bool
    t: float
    steps: int
    pi_h: float
    pi_a: float
    exp_reward: float
    exp_risk: float
    dt: float


def run_until(table: PayoffRiskTable, spec: DynamicsSpec, policy: PolicySpec, pi_h_0: float,
              done: Callable[[float, float], bool], dt: float | None = None,
              max_time: float = 1e7, chunk_steps: int = 200_000) -> ConvergenceResult:
    """Integrate in chunks until ``done(pi_h, pi_a)`` holds or ``max_time`` passes.

    ``done`` is checked at chunk boundaries only, so the reported time is an
    upper bound on the first hitting time.
    """
    if dt is None:
        dt = stable_dt(table, spec, policy)
    dynamic, const_a, L, target_h, gain = _policy_args(policy)
    x, t, steps = float(pi_h_0), 0.0, 0
    while True:
        pi_a = float(policy_action(policy, x))
        if done(x, pi_a) or t >= max_time:
            break
        path, _, bad = _integrate(x, float(dt), chunk_steps, table.denominator, table.msne,
                                  spec.w_r, spec.w_b, spec.w_s, dynamic, const_a, target_h, gain)
        if bad >= 0:
            raise NonFiniteState(f"non-finite pi_h after step {steps + bad}")
        x = float(path[-1])
        steps += chunk_steps
        t = steps * dt
    return ConvergenceResult(
        converged=bool(done(x, pi_a)), t=t, steps=steps, pi_h=x, pi_a=pi_a,
        exp_reward=float(expected_total_reward(x, pi_a, table)),
        exp_risk=float(expected_risk(x, pi_a, table)), dt=dt,
    )
