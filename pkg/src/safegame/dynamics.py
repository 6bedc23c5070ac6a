"""Human strategy dynamics: replicator, BNN, Smith and their mixture.

``rate`` is the closed piecewise form, written in terms of

    alpha = r_cd - r_dd + pi_a * (r_cc + r_dd - r_cd - r_dc) = denom * (pi_a - L)

whose sign flips exactly at the MSNE threshold L. ``rate_generic`` evaluates
the revision protocols literally from conditional expected rewards; it is
kept as an independent check on ``rate``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numba import njit, vectorize

from .game_model import PayoffRiskTable, conditional_reward


class DynamicsKind(enum.Enum):
    REPLICATOR = "replicator"
    BNN = "bnn"
    SMITH = "smith"
    MIXED = "mixed"


@dataclass(frozen=True)
class DynamicsSpec:
    kind: DynamicsKind
    w_r: float
    w_b: float
    w_s: float

    def __post_init__(self):
        weights = (self.w_r, self.w_b, self.w_s)
        if any(w < 0 or not math.isfinite(w) for w in weights):
            raise ValueError(f"weights must be finite and nonnegative, got {weights}")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(weights)!r}")
        pure = {
            DynamicsKind.REPLICATOR: (1.0, 0.0, 0.0),
            DynamicsKind.BNN: (0.0, 1.0, 0.0),
            DynamicsKind.SMITH: (0.0, 0.0, 1.0),
        }
        if self.kind in pure and weights != pure[self.kind]:
            raise ValueError(f"{self.kind.value} dynamics must use weights {pure[self.kind]}")

    @classmethod
    def replicator(cls) -> "DynamicsSpec":
        return cls(DynamicsKind.REPLICATOR, 1.0, 0.0, 0.0)

    @classmethod
    def bnn(cls) -> "DynamicsSpec":
        return cls(DynamicsKind.BNN, 0.0, 1.0, 0.0)

    @classmethod
    def smith(cls) -> "DynamicsSpec":
        return cls(DynamicsKind.SMITH, 0.0, 0.0, 1.0)

    @classmethod
    def mixed(cls, w_r: float = 1 / 3, w_b: float = 1 / 3, w_s: float = 1 / 3) -> "DynamicsSpec":
        return cls(DynamicsKind.MIXED, float(w_r), float(w_b), float(w_s))

    @classmethod
    def from_name(cls, name: str, weights=None) -> "DynamicsSpec":
        kind = DynamicsKind(name.lower())
        if kind is DynamicsKind.MIXED:
            return cls.mixed(*(weights or (1 / 3, 1 / 3, 1 / 3)))
        return getattr(cls, kind.value)()

    @property
    def weights(self) -> tuple[float, float, float]:
        return (self.w_r, self.w_b, self.w_s)

    @property
    def label(self) -> str:
        return self.kind.value


ALL_KINDS = (DynamicsSpec.replicator(), DynamicsSpec.bnn(), DynamicsSpec.smith(),
             DynamicsSpec.mixed())


def alpha(pi_a, table: PayoffRiskTable):
    """Payoff advantage of cooperating over defecting, theta_C - theta_D.

    Evaluated as ``denom * (pi_a - L)`` so that its sign is exactly that of
    ``L - pi_a`` in floating point and it vanishes at ``pi_a == L``.
    """
    return table.denominator * (pi_a - table.msne)


@njit(cache=True)
def mixed_rate_kernel(pi_h, pi_a, denom, L, w_r, w_b, w_s):
    # denom * (pi_a - L) has the exact sign of (L - pi_a) since denom < 0
    a = denom * (pi_a - L)
    rep = a * pi_h * (1.0 - pi_h)
    if pi_a < L:
        smith = a * (1.0 - pi_h)
        bnn = a * (1.0 - pi_h) ** 2 if pi_h < 1.0 else 0.0
    elif pi_a > L:
        smith = a * pi_h
        bnn = a * pi_h ** 2 if pi_h > 0.0 else 0.0
    else:
        rep = 0.0
        smith = 0.0
        bnn = 0.0
    return w_r * rep + w_b * bnn + w_s * smith


_rate_ufunc = vectorize(
    ["float64(float64, float64, float64, float64, float64, float64, float64)"],
    nopython=True,
)(mixed_rate_kernel.py_func)


def rate(spec: DynamicsSpec, pi_h, pi_a, table: PayoffRiskTable):
    """Time derivative of pi_h (closed piecewise form); broadcasts over arrays."""
    out = _rate_ufunc(pi_h, pi_a, table.denominator, table.msne, spec.w_r, spec.w_b, spec.w_s)
    return float(out) if np.ndim(out) == 0 else out


def _pos(q):
    return np.maximum(q, 0.0)


def replicator_generic(pi_h, pi_a, table):
    theta_c = conditional_reward("C", pi_a, table)
    theta_d = conditional_reward("D", pi_a, table)
    theta_bar = pi_h * theta_c + (1.0 - pi_h) * theta_d
    return pi_h * (theta_c - theta_bar)


def bnn_generic(pi_h, pi_a, table):
    theta_c = conditional_reward("C", pi_a, table)
    theta_d = conditional_reward("D", pi_a, table)
    theta_bar = pi_h * theta_c + (1.0 - pi_h) * theta_d
    excess_c = _pos(theta_c - theta_bar)
    excess_d = _pos(theta_d - theta_bar)
    return excess_c - pi_h * (excess_c + excess_d)


def smith_generic(pi_h, pi_a, table):
    theta_c = conditional_reward("C", pi_a, table)
    theta_d = conditional_reward("D", pi_a, table)
    return (1.0 - pi_h) * _pos(theta_c - theta_d) - pi_h * _pos(theta_d - theta_c)


def rate_generic(spec: DynamicsSpec, pi_h, pi_a, table: PayoffRiskTable):
    """Weighted revision-protocol rate computed from conditional rewards and [.]_+."""
    out = 0.0
    if spec.w_r:
        out = out + spec.w_r * replicator_generic(pi_h, pi_a, table)
    if spec.w_b:
        out = out + spec.w_b * bnn_generic(pi_h, pi_a, table)
    if spec.w_s:
        out = out + spec.w_s * smith_generic(pi_h, pi_a, table)
    return out
