"""Reward/risk tables for the two-intention human-machine game.

A table holds the symmetric rewards ``R_XY`` (reward of an agent playing X
against Y) and the three interaction risks ``W_CC``, ``W_CD`` (= ``W_DC``)
and ``W_DD``. Strategies are cooperation probabilities, ``pi_h`` for the
human population and ``pi_a`` for the autonomous agents.

All expectation helpers broadcast over numpy arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Mapping, NamedTuple

import numpy as np

TABLE_KEYS = ("r_cc", "r_cd", "r_dc", "r_dd", "w_cc", "w_cd", "w_dd")


class AssumptionViolation(ValueError):
    """A raw table breaks one of the ordering/probability assumptions."""


class DegenerateDenominator(ValueError):
    """r_cc + r_dd - r_dc - r_cd == 0, so the MSNE threshold is undefined."""


class UnclassifiableTable(ValueError):
    """The table falls outside the Type A-D taxonomy (ties or w_dd not maximal)."""


@dataclass(frozen=True)
class PayoffRiskTable:
    r_cc: float
    r_cd: float
    r_dc: float
    r_dd: float
    w_cc: float
    w_cd: float
    w_dd: float

    def __post_init__(self):
        for key in TABLE_KEYS:
            value = getattr(self, key)
            if not math.isfinite(value):
                raise AssumptionViolation(f"{key} must be finite, got {value!r}")
        # Any zero denominator also breaks an ordering; report it as the root cause.
        if self.denominator == 0.0:
            raise DegenerateDenominator(
                "r_cc + r_dd - r_dc - r_cd == 0; MSNE threshold undefined")
        if not self.r_dd < self.r_cd:
            raise AssumptionViolation(
                f"r_dd < r_cd violated: r_dd={self.r_dd}, r_cd={self.r_cd}")
        if not self.r_cc < self.r_dc:
            raise AssumptionViolation(
                f"r_cc < r_dc violated: r_cc={self.r_cc}, r_dc={self.r_dc}")
        for key in ("w_cc", "w_cd", "w_dd"):
            value = getattr(self, key)
            if not 0.0 <= value <= 1.0:
                raise AssumptionViolation(f"0 <= {key} <= 1 violated: {key}={value}")
        L = self.msne
        if not 0.0 < L < 1.0:
            raise AssumptionViolation(f"0 < L < 1 violated: L={L}")

    @property
    def denominator(self) -> float:
        """r_cc + r_dd - r_dc - r_cd; strictly negative for every valid table."""
        return self.r_cc + self.r_dd - self.r_dc - self.r_cd

    @property
    def msne(self) -> float:
        return (self.r_dd - self.r_cd) / self.denominator

    @property
    def w_dc(self) -> float:
        return self.w_cd

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def validate_table(r_cc, r_cd, r_dc, r_dd, w_cc, w_cd, w_dd) -> PayoffRiskTable:
    """Build a :class:`PayoffRiskTable`, raising if any assumption fails."""
    return PayoffRiskTable(*(float(v) for v in (r_cc, r_cd, r_dc, r_dd, w_cc, w_cd, w_dd)))


def table_from_mapping(values: Mapping[str, float]) -> PayoffRiskTable:
    missing = [k for k in TABLE_KEYS if k not in values]
    if missing:
        raise KeyError(f"table is missing keys: {', '.join(missing)}")
    return validate_table(*(values[k] for k in TABLE_KEYS))


# Reward and risk values for the four interaction types of the driving study.
PRESETS: dict[str, PayoffRiskTable] = {
    "type_a": validate_table(65.51, 17.93, 96.8, -69.23, 0.00078, 0.00109, 0.00147),
    "type_b": validate_table(53.53, -0.05, 68.7, -264.59, 0.00147, 0.00134, 0.00172),
    "type_c": validate_table(60.29, 40.79, 95.28, 40.31, 0.00058, 0.00073, 0.0015),
    "type_d": validate_table(56.13, 49.87, 88.24, 43.49, 0.00057, 0.00044, 0.00077),
}

# Tolerable risk used for each preset in the reference experiments.
PRESET_EPSILON: dict[str, float] = {
    "type_a": 9e-4,
    "type_b": 1.4e-3,
    "type_c": 7.29e-4,
    "type_d": 4.4e-4,
}


def get_preset(name: str) -> PayoffRiskTable:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown table preset {name!r}; choose from {sorted(PRESETS)}") from None


class StrategyPair(NamedTuple):
    pi_h: float
    pi_a: float


def msne_threshold(table: PayoffRiskTable) -> float:
    """Cooperation level L at which humans are indifferent between C and D."""
    return table.msne


def conditional_reward(intent: str, pi_a, table: PayoffRiskTable):
    """Expected human reward for a fixed intention against AA strategy ``pi_a``."""
    if intent == "C":
        return pi_a * table.r_cc + (1.0 - pi_a) * table.r_cd
    if intent == "D":
        return pi_a * table.r_dc + (1.0 - pi_a) * table.r_dd
    raise ValueError(f"intent must be 'C' or 'D', got {intent!r}")


def expected_total_reward(pi_h, pi_a, table: PayoffRiskTable):
    mixed = pi_h * (1.0 - pi_a) + (1.0 - pi_h) * pi_a
    return (2.0 * table.r_cc * pi_h * pi_a
            + (table.r_cd + table.r_dc) * mixed
            + 2.0 * table.r_dd * (1.0 - pi_h) * (1.0 - pi_a))


def expected_risk(pi_h, pi_a, table: PayoffRiskTable):
    mixed = pi_h * (1.0 - pi_a) + (1.0 - pi_h) * pi_a
    return (table.w_cc * pi_h * pi_a
            + table.w_cd * mixed
            + table.w_dd * (1.0 - pi_h) * (1.0 - pi_a))


def msne_risk(table: PayoffRiskTable) -> float:
    """Closed-form risk at pi_h = pi_a = L."""
    L = table.msne
    return (L * L * (table.w_cc + table.w_dd - 2.0 * table.w_cd)
            + 2.0 * L * (table.w_cd - table.w_dd) + table.w_dd)


class InteractionType(enum.Enum):
    A = (1, 1)
    B = (1, 2)
    C = (2, 1)
    D = (2, 2)

    @property
    def reward_case(self) -> int:
        return self.value[0]

    @property
    def risk_case(self) -> int:
        return self.value[1]

    @classmethod
    def from_cases(cls, reward_case: int, risk_case: int) -> "InteractionType":
        return cls((reward_case, risk_case))


def reward_case(table: PayoffRiskTable) -> int:
    both_c = 2.0 * table.r_cc
    mixed = table.r_cd + table.r_dc
    both_d = 2.0 * table.r_dd
    if both_c > mixed > both_d:
        return 1
    if mixed > both_c > both_d:
        return 2
    raise UnclassifiableTable(
        f"rewards fit neither case: 2r_cc={both_c}, r_cd+r_dc={mixed}, 2r_dd={both_d}")


def risk_case(table: PayoffRiskTable) -> int:
    if table.w_cc < table.w_cd < table.w_dd:
        return 1
    if table.w_cd < table.w_cc < table.w_dd:
        return 2
    raise UnclassifiableTable(
        f"risks fit neither case: w_cc={table.w_cc}, w_cd={table.w_cd}, w_dd={table.w_dd}")


def classify_interaction(table: PayoffRiskTable) -> InteractionType:
    return InteractionType.from_cases(reward_case(table), risk_case(table))


def pure_corners(table: PayoffRiskTable) -> np.ndarray:
    """Rows (pi_h, pi_a, E[R], E[W]) for the four pure strategy pairs."""
    rows = []
    for pi_h in (0.0, 1.0):
        for pi_a in (0.0, 1.0):
            rows.append((pi_h, pi_a, expected_total_reward(pi_h, pi_a, table),
                         expected_risk(pi_h, pi_a, table)))
    return np.array(rows)
