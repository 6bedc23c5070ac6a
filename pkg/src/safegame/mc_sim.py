"""Finite-population Monte Carlo counterpart of the strategy ODE.

A fixed population of ``n`` humans each hold an intention (C or D). Every
step, each human may switch intention with probability ``eta`` times a
payoff excess; which excess depends on the revision rule of the human's
subpopulation:

- RD: pick another human uniformly, adopt their intention w.p.
  eta * [theta(theirs) - theta(mine)]_+
- BNN: switch to the other intention w.p. eta * [theta(other) - theta_bar]_+
- SD: switch to the other intention w.p. eta * [theta(other) - theta(mine)]_+

Expected payoffs theta_C, theta_D, theta_bar are analytic, evaluated at the
current AA strategy and the cooperator fraction of the whole population.
Updates are synchronous: all switch decisions use the pre-step state.

With several rules, subpopulation sizes are fixed but, by default, humans
are reassigned to rules uniformly at random before every step. Each rule
then sees the whole-population cooperator fraction in expectation and the
expected one-step drift of the fraction is exactly ``eta`` times the mixed
ODE rate, so step k corresponds to strategy-time k * eta. With frozen groups
(``regroup=False``) each subpopulation drifts on its own and the pooled path
departs from the mixed ODE by several percent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from numba import njit

from .dynamics import DynamicsSpec
from .game_model import PayoffRiskTable, conditional_reward
from .ode_sim import DEFAULT_DT, Trajectory, _policy_args
from .policies import PolicySpec, policy_action

RD, BNN, SD = 0, 1, 2


class RateOverflow(ValueError):
    """eta times a payoff excess exceeded 1, so it is not a probability."""


def subpopulation_sizes(n: int, weights) -> np.ndarray:
    """Largest-remainder apportionment of n agents to (RD, BNN, SD)."""
    w = np.asarray(weights, dtype=float)
    quotas = n * w / w.sum()
    sizes = np.floor(quotas).astype(int)
    short = n - sizes.sum()
    # ties broken by rule order RD, BNN, SD (stable sort)
    order = np.argsort(-(quotas - sizes), kind="stable")
    sizes[order[:short]] += 1
    return sizes


@dataclass(frozen=True)
class Population:
    cooperate: np.ndarray   # bool per human, True = C
    group: np.ndarray       # revision rule per human: RD, BNN or SD
    rng: np.random.Generator
    seed: int

    @property
    def n(self) -> int:
        return len(self.cooperate)

    @property
    def fraction(self) -> float:
        return float(np.count_nonzero(self.cooperate)) / self.n


def make_population(n: int, pi_h_0: float, spec: DynamicsSpec, seed: int) -> Population:
    if n < 2:
        raise ValueError("need at least two humans")
    if not 0.0 <= pi_h_0 <= 1.0:
        raise ValueError(f"pi_h_0 must lie in [0, 1], got {pi_h_0}")
    rng = np.random.default_rng(seed)
    sizes = subpopulation_sizes(n, spec.weights)
    group = np.repeat(np.array([RD, BNN, SD], dtype=np.int8), sizes)
    cooperate = np.zeros(n, dtype=bool)
    cooperate[rng.permutation(n)[:int(round(n * pi_h_0))]] = True
    return Population(cooperate, group, rng, int(seed))


def default_eta(table: PayoffRiskTable, dt: float = DEFAULT_DT) -> float:
    """dt divided by the reward spread; keeps every switch probability <= dt."""
    rewards = (table.r_cc, table.r_cd, table.r_dc, table.r_dd)
    return dt / (max(rewards) - min(rewards))


def _switch_probabilities(pop: Population, pi_a: float, table: PayoffRiskTable, eta: float):
    x = pop.fraction
    theta_c = conditional_reward("C", pi_a, table)
    theta_d = conditional_reward("D", pi_a, table)
    theta_bar = x * theta_c + (1.0 - x) * theta_d
    gain_to_d = theta_d - theta_c        # excess of D over C
    excess = {
        # (rule, currently C) -> excess of the alternative
        (BNN, True): max(0.0, theta_d - theta_bar),
        (BNN, False): max(0.0, theta_c - theta_bar),
        (SD, True): max(0.0, gain_to_d),
        (SD, False): max(0.0, -gain_to_d),
        (RD, True): max(0.0, gain_to_d),
        (RD, False): max(0.0, -gain_to_d),
    }
    worst = eta * max(excess.values())
    if worst > 1.0:
        raise RateOverflow(f"eta * excess = {worst:g} > 1; reduce eta")
    return {key: eta * value for key, value in excess.items()}


def mc_update_step(pop: Population, pi_a: float, table: PayoffRiskTable, eta: float,
                   regroup: bool = False) -> Population:
    """One synchronous revision round; consumes draws from ``pop.rng``.

    With ``regroup`` the rule labels are shuffled across humans first.
    """
    if not 0.0 <= pi_a <= 1.0:
        raise ValueError(f"pi_a must lie in [0, 1], got {pi_a}")
    prob = _switch_probabilities(pop, pi_a, table, eta)
    coop, group, rng = pop.cooperate, pop.group, pop.rng
    n = pop.n
    if regroup:
        group = rng.permutation(group)
    u = rng.random(n)
    lut = np.empty(6)
    for (rule, is_c), value in prob.items():
        lut[2 * rule + int(is_c)] = value
    switch = u < lut[2 * group + coop]

    rd = np.flatnonzero(group == RD)
    if rd.size:
        # partner j != i drawn uniformly from the whole population
        j = rng.integers(0, n - 1, size=rd.size)
        j += j >= rd
        switch[rd] &= coop[j] != coop[rd]

    return replace(pop, cooperate=coop ^ switch, group=group)


def _count_probs(total_c, n, pi_a, r_cc, r_cd, r_dc, r_dd, eta, p_c, p_d):
    """Per-subpopulation switch probabilities (RD, BNN, SD) for C and D holders.

    Returns the largest eta * excess so the caller can reject overflow.
    """
    x = total_c / n
    theta_c = pi_a * r_cc + (1.0 - pi_a) * r_cd
    theta_d = pi_a * r_dc + (1.0 - pi_a) * r_dd
    theta_bar = x * theta_c + (1.0 - x) * theta_d
    to_d = max(0.0, theta_d - theta_c)
    to_c = max(0.0, theta_c - theta_d)
    bnn_d = max(0.0, theta_d - theta_bar)
    bnn_c = max(0.0, theta_c - theta_bar)
    # an RD cooperator only switches if its partner is a defector, and vice versa
    p_c[0] = eta * to_d * (n - total_c) / (n - 1)
    p_c[1] = eta * bnn_d
    p_c[2] = eta * to_d
    p_d[0] = eta * to_c * total_c / (n - 1)
    p_d[1] = eta * bnn_c
    p_d[2] = eta * to_c
    return eta * max(to_d, to_c, bnn_d, bnn_c)


_count_probs_jit = njit(cache=True)(_count_probs)


@njit(cache=True)
def _hypergeometric_logpmf(good, bad, draws, k):
    return (math.lgamma(good + 1) - math.lgamma(k + 1) - math.lgamma(good - k + 1)
            + math.lgamma(bad + 1) - math.lgamma(draws - k + 1)
            - math.lgamma(bad - draws + k + 1)
            - math.lgamma(good + bad + 1) + math.lgamma(draws + 1)
            + math.lgamma(good + bad - draws + 1))


@njit(cache=True)
def _hypergeometric(rng, good, bad, draws):
    """Number of good items in ``draws`` taken without replacement.

    Inversion starting at the mode and walking outward on alternate sides;
    the pmf at the mode never underflows, unlike at the support ends.
    """
    lo = max(0, draws - bad)
    hi = min(draws, good)
    if lo == hi:
        return lo
    m = int((draws + 1.0) * (good + 1.0) / (good + bad + 2.0))
    m = min(max(m, lo), hi)
    pm = math.exp(_hypergeometric_logpmf(good, bad, draws, m))
    u = rng.random() - pm
    if u <= 0.0:
        return m
    kl, ku, pl, pu = m, m, pm, pm
    while kl > lo or ku < hi:
        if kl > lo:
            # p(k-1) / p(k)
            pl *= kl * (bad - draws + kl) / ((good - kl + 1.0) * (draws - kl + 1.0))
            kl -= 1
            u -= pl
            if u <= 0.0:
                return kl
        if ku < hi:
            pu *= (good - ku) * (draws - ku) / ((ku + 1.0) * (bad - draws + ku + 1.0))
            ku += 1
            u -= pu
            if u <= 0.0:
                return ku
    return m


@njit(cache=True)
def _regroup(rng, total_c, sizes, c):
    """Random reassignment of rules: cooperators per group, group sizes kept."""
    good = total_c
    bad = sizes.sum() - total_c
    for g in range(2):
        c[g] = _hypergeometric(rng, good, bad, sizes[g])
        good -= c[g]
        bad -= sizes[g] - c[g]
    c[2] = good


@njit(cache=True)
def _count_loop(rng, counts, sizes, steps, eta, r_cc, r_cd, r_dc, r_dd,
                dynamic, const_a, L, target_h, gain, regroup):
    n = sizes.sum()
    pi_h = np.empty(steps + 1)
    pi_a = np.empty(steps + 1)
    p_c = np.empty(3)
    p_d = np.empty(3)
    c = counts.copy()
    for k in range(steps + 1):
        total = c.sum()
        x = total / n
        if dynamic:
            a = min(1.0, max(0.0, L - gain * (target_h - x)))
        else:
            a = const_a
        pi_h[k] = x
        pi_a[k] = a
        if k == steps:
            break
        worst = _count_probs_jit(total, n, a, r_cc, r_cd, r_dc, r_dd, eta, p_c, p_d)
        if worst > 1.0:
            return pi_h, pi_a, k
        if regroup:
            _regroup(rng, total, sizes, c)
        for g in range(3):
            leave = rng.binomial(c[g], p_c[g]) if c[g] > 0 else 0
            join = rng.binomial(sizes[g] - c[g], p_d[g]) if sizes[g] > c[g] else 0
            c[g] += join - leave
    return pi_h, pi_a, -1


def mc_count_step(counts: np.ndarray, sizes: np.ndarray, pi_a: float, table: PayoffRiskTable,
                  eta: float, rng: np.random.Generator) -> np.ndarray:
    """Count-level form of :func:`mc_update_step`.

    ``counts[g]`` is the number of cooperators in subpopulation g. Humans of
    the same rule and intention are exchangeable and switch independently
    given the pre-step state, so per-class switch totals are binomial; for RD
    the switch probability includes the chance of drawing a partner with the
    other intention. Same law for the cooperator counts as the agent update.
    """
    p_c, p_d = np.empty(3), np.empty(3)
    n = int(sizes.sum())
    worst = _count_probs(int(counts.sum()), n, pi_a, table.r_cc, table.r_cd, table.r_dc,
                         table.r_dd, eta, p_c, p_d)
    if worst > 1.0:
        raise RateOverflow(f"eta * excess = {worst:g} > 1; reduce eta")
    leave = rng.binomial(counts, p_c)
    join = rng.binomial(sizes - counts, p_d)
    return counts - leave + join


def simulate_mc(table: PayoffRiskTable, spec: DynamicsSpec, policy: PolicySpec, pi_h_0: float,
                n: int = 1000, steps: int = 100_000, seed: int = 0, dt: float = DEFAULT_DT,
                eta: float | None = None, method: str = "counts", regroup: bool = True,
                table_id: str = "") -> Trajectory:
    """Simulate the population against ``policy``; pi_h samples are cooperator fractions.

    ``method="agents"`` runs :func:`mc_update_step` on explicit per-human
    intentions; ``method="counts"`` (default, compiled and much faster) draws
    the per-subpopulation switch totals from their exact binomial law. The
    two methods consume random numbers differently, so equal seeds give equal
    results only within one method. ``regroup`` is described in the module
    docstring; it has no effect for a single rule.
    """
    if eta is None:
        eta = default_eta(table, dt)
    if not eta >= 0:
        raise ValueError(f"eta must be nonnegative, got {eta}")
    if method not in ("counts", "agents"):
        raise ValueError(f"unknown method {method!r}")
    pop = make_population(n, pi_h_0, spec, seed)
    if method == "counts":
        sizes = np.bincount(pop.group, minlength=3).astype(np.int64)
        counts = np.bincount(pop.group[pop.cooperate], minlength=3).astype(np.int64)
        dynamic, const_a, L, target_h, gain = _policy_args(policy)
        pi_h, pi_a, bad = _count_loop(pop.rng, counts, sizes, int(steps), float(eta),
                                      table.r_cc, table.r_cd, table.r_dc, table.r_dd,
                                      dynamic, const_a, L, target_h, gain, bool(regroup))
        if bad >= 0:
            raise RateOverflow(f"eta * excess > 1 at step {bad}; reduce eta")
    else:
        pi_h = np.empty(steps + 1)
        pi_a = np.empty(steps + 1)
        for k in range(steps + 1):
            x = pop.fraction
            a = float(policy_action(policy, x))
            pi_h[k], pi_a[k] = x, a
            if k == steps:
                break
            pop = mc_update_step(pop, a, table, eta, regroup)
    t = eta * np.arange(steps + 1)
    return Trajectory.from_path(
        t, pi_h, pi_a, table, simulator="mc", table_id=table_id, dynamics=spec.label,
        policy=policy.label, eta=eta, dt=dt, steps=steps, n=n, seed=seed, pi_h_0=pi_h_0,
        method=method, regroup=bool(regroup),
    )


def simulate_replicates(table, spec, policy, pi_h_0, seeds, out_dir=None, stride: int = 1,
                        **kwargs) -> list[Trajectory]:
    """One trajectory per seed; optionally one CSV per seed in ``out_dir``."""
    runs = []
    for seed in seeds:
        traj = simulate_mc(table, spec, policy, pi_h_0, seed=int(seed), **kwargs)
        if out_dir is not None:
            traj.to_csv(Path(out_dir) / f"mc_seed{int(seed)}.csv", stride=stride)
        runs.append(traj)
    return runs
