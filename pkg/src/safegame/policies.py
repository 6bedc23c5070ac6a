"""Autonomous-agent policies and the admissible/feasible strategy sets.

The admissible set (pairs that freeze the human strategy) is a union of
three segments in the unit square:

    H0:   pi_h = 0, pi_a in (L, 1]
    H1:   pi_h = 1, pi_a in [0, L)
    Diag: pi_a = L, pi_h in [0, 1]

The feasible set intersects each segment with the half-line on which the
expected risk stays below the tolerance. Along every segment both the
expected risk and the expected reward are affine, so the constrained
optimum is found by enumerating segment endpoints.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .game_model import PayoffRiskTable, expected_risk, expected_total_reward

OPEN_ENDPOINT_SHIFT = 1e-9
TIE_TOL = 1e-12


class InfeasibleTolerance(ValueError):
    """No admissible strategy meets the requested risk tolerance."""


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    @property
    def empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    def contains(self, x) -> bool:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return bool(above and below)

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo:
            lo, lo_closed = self.lo, self.lo_closed
        elif other.lo > self.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        elif other.hi < self.hi:
            hi, hi_closed = other.hi, other.hi_closed
        else:
            hi, hi_closed = self.hi, self.hi_closed and other.hi_closed
        return Interval(lo, hi, lo_closed, hi_closed)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:.10g}, {self.hi:.10g}{right}"


def halfline(coef: float, rhs: float) -> Interval:
    """Solution set of ``coef * x <= rhs`` over the reals."""
    if coef > 0:
        return Interval(-math.inf, rhs / coef, False, True)
    if coef < 0:
        return Interval(rhs / coef, math.inf, True, False)
    return Interval(-math.inf, math.inf, False, False) if rhs >= 0 else Interval(1.0, 0.0)


class SegmentKind(enum.Enum):
    H0 = "H0"
    H1 = "H1"
    DIAG = "Diag"


@dataclass(frozen=True)
class Segment:
    """A piece of the unit square: pi_h fixed (H0/H1) or pi_a fixed (Diag)."""

    kind: SegmentKind
    level: float
    interval: Interval

    def point(self, s: float) -> tuple[float, float]:
        """Map a coordinate along the segment to (pi_h, pi_a)."""
        if self.kind is SegmentKind.DIAG:
            return (s, self.level)
        return (self.level, s)

    def contains(self, pi_h: float, pi_a: float) -> bool:
        if self.kind is SegmentKind.DIAG:
            return pi_a == self.level and self.interval.contains(pi_h)
        return pi_h == self.level and self.interval.contains(pi_a)

    def sample(self, n: int, rng: np.random.Generator | None = None) -> np.ndarray:
        """Points on the segment as an (n, 2) array of (pi_h, pi_a).

        Deterministic and evenly spaced (open ends excluded) unless ``rng``
        is given, in which case coordinates are uniform draws.
        """
        lo, hi = self.interval.lo, self.interval.hi
        if rng is None:
            s = np.linspace(lo, hi, n + 2)
            keep = np.ones_like(s, dtype=bool)
            keep[0] = self.interval.lo_closed
            keep[-1] = self.interval.hi_closed
            s = s[keep]
        else:
            s = rng.uniform(lo, hi, size=n)
            if self.interval.lo_closed:
                s[0] = lo
        level = np.full_like(s, self.level)
        if self.kind is SegmentKind.DIAG:
            return np.column_stack([s, level])
        return np.column_stack([level, s])

    def __str__(self) -> str:
        if self.kind is SegmentKind.DIAG:
            return f"Diag: pi_a = {self.level:.10g}, pi_h in {self.interval}"
        return f"{self.kind.value}: pi_h = {self.level:g}, pi_a in {self.interval}"


@dataclass(frozen=True)
class SegmentSet:
    segments: tuple[Segment, ...] = field(default_factory=tuple)

    def __iter__(self):
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def contains(self, pi_h: float, pi_a: float) -> bool:
        return any(seg.contains(pi_h, pi_a) for seg in self.segments)

    def get(self, kind: SegmentKind) -> Segment | None:
        for seg in self.segments:
            if seg.kind is kind:
                return seg
        return None

    def __str__(self) -> str:
        if not self.segments:
            return "(empty)"
        return "\n".join(str(seg) for seg in self.segments)


def admissible_set(table: PayoffRiskTable) -> SegmentSet:
    L = table.msne
    return SegmentSet((
        Segment(SegmentKind.H0, 0.0, Interval(L, 1.0, False, True)),
        Segment(SegmentKind.H1, 1.0, Interval(0.0, L, True, False)),
        Segment(SegmentKind.DIAG, L, Interval(0.0, 1.0, True, True)),
    ))


def risk_bounds(table: PayoffRiskTable, epsilon: float) -> dict[SegmentKind, Interval]:
    """Half-lines on which the risk restricted to each segment is <= epsilon."""
    L = table.msne
    w_cc, w_cd, w_dd = table.w_cc, table.w_cd, table.w_dd
    # pi_h = 0: w_cd*pi_a + w_dd*(1 - pi_a) <= eps
    b0 = halfline(w_cd - w_dd, epsilon - w_dd)
    # pi_h = 1: w_cc*pi_a + w_cd*(1 - pi_a) <= eps
    b1 = halfline(w_cc - w_cd, epsilon - w_cd)
    # pi_a = L: affine in pi_h
    coef_d = w_cc * L + w_cd - 2.0 * w_cd * L - w_dd * (1.0 - L)
    bd = halfline(coef_d, epsilon - w_cd * L - w_dd * (1.0 - L))
    return {SegmentKind.H0: b0, SegmentKind.H1: b1, SegmentKind.DIAG: bd}


def feasible_set(table: PayoffRiskTable, epsilon: float) -> SegmentSet:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    bounds = risk_bounds(table, epsilon)
    kept = []
    for seg in admissible_set(table):
        interval = seg.interval.intersect(bounds[seg.kind])
        if not interval.empty:
            kept.append(Segment(seg.kind, seg.level, interval))
    if not kept:
        raise InfeasibleTolerance(
            f"no admissible strategy has expected risk <= {epsilon:g}")
    return SegmentSet(tuple(kept))


class Branch(enum.Enum):
    DYNAMIC = "dynamic"
    STATIC = "static"


@dataclass(frozen=True)
class OptimalStrategy:
    pi_h: float
    pi_a: float
    branch: Branch
    segment: SegmentKind
    reward: float
    risk: float
    attained: bool = True


# Final tie-break among equal-reward, equal-risk candidates.
_SEGMENT_PREFERENCE = {SegmentKind.DIAG: 0, SegmentKind.H0: 1, SegmentKind.H1: 2}


def _candidates(feasible: SegmentSet):
    for seg in feasible:
        iv = seg.interval
        for s, closed, inward in ((iv.lo, iv.lo_closed, 1.0), (iv.hi, iv.hi_closed, -1.0)):
            if closed:
                yield seg, seg.point(s), True
                continue
            limit = seg.point(s)
            if feasible.contains(*limit):
                # reached as a closed endpoint of another segment
                continue
            yield seg, seg.point(s + inward * OPEN_ENDPOINT_SHIFT), False


def optimal_strategy(table: PayoffRiskTable, epsilon: float) -> OptimalStrategy:
    """Reward-maximizing feasible strategy and the branch of the feedback law."""
    feasible = feasible_set(table, epsilon)
    cands = []
    for seg, (pi_h, pi_a), attained in _candidates(feasible):
        cands.append((seg, pi_h, pi_a, attained,
                      float(expected_total_reward(pi_h, pi_a, table)),
                      float(expected_risk(pi_h, pi_a, table))))
    best_reward = max(c[4] for c in cands)
    top = [c for c in cands if best_reward - c[4] <= TIE_TOL * max(1.0, abs(best_reward))]
    seg, pi_h, pi_a, attained, reward, risk = min(
        top, key=lambda c: (c[5], _SEGMENT_PREFERENCE[c[0].kind]))
    diag = feasible.get(SegmentKind.DIAG)
    in_diag = diag is not None and diag.contains(pi_h, pi_a)
    return OptimalStrategy(
        pi_h=pi_h, pi_a=pi_a,
        branch=Branch.DYNAMIC if in_diag else Branch.STATIC,
        segment=seg.kind, reward=reward, risk=risk, attained=attained,
    )


class PolicyKind(enum.Enum):
    DWSC = "dwsc"
    MSNE = "msne"
    PROPOSED = "proposed"


@dataclass(frozen=True)
class PolicySpec:
    """An AA policy. Only PROPOSED carries epsilon, gain and a target."""

    kind: PolicyKind
    L: float
    epsilon: float | None = None
    gain: float | None = None
    target: OptimalStrategy | None = None

    def __post_init__(self):
        if self.kind is PolicyKind.PROPOSED:
            if self.gain is None or not self.gain > 0:
                raise ValueError(f"gain must be strictly positive, got {self.gain}")
            if self.target is None or self.epsilon is None:
                raise ValueError("proposed policy needs epsilon and a precomputed target")

    @classmethod
    def dwsc(cls, table: PayoffRiskTable) -> "PolicySpec":
        return cls(PolicyKind.DWSC, table.msne)

    @classmethod
    def msne(cls, table: PayoffRiskTable) -> "PolicySpec":
        return cls(PolicyKind.MSNE, table.msne)

    @classmethod
    def proposed(cls, table: PayoffRiskTable, epsilon: float, gain: float = 1.0) -> "PolicySpec":
        target = optimal_strategy(table, epsilon)
        return cls(PolicyKind.PROPOSED, table.msne, float(epsilon), float(gain), target)

    @property
    def dynamic(self) -> bool:
        return self.kind is PolicyKind.PROPOSED and self.target.branch is Branch.DYNAMIC

    @property
    def constant_action(self) -> float:
        """Action of the policy when it ignores pi_h (nan for the feedback law)."""
        if self.kind is PolicyKind.DWSC:
            return 1.0
        if self.kind is PolicyKind.MSNE:
            return self.L
        return math.nan if self.dynamic else self.target.pi_a

    @property
    def label(self) -> str:
        if self.kind is PolicyKind.PROPOSED:
            return f"proposed(eps={self.epsilon:g},G={self.gain:g})"
        return self.kind.value


def policy_action(spec: PolicySpec, pi_h_t):
    """AA cooperation probability given the observed human strategy."""
    if spec.dynamic:
        raw = spec.L - spec.gain * (spec.target.pi_h - pi_h_t)
        return np.clip(raw, 0.0, 1.0) if np.ndim(raw) else min(1.0, max(0.0, raw))
    value = spec.constant_action
    return np.full(np.shape(pi_h_t), value) if np.ndim(pi_h_t) else value
