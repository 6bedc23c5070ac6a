"""Exact rational evaluations used as frozen expected values in the tests.

Uses only fractions and the bilinear reward/risk forms written out here, so
it shares no code with the package.

    python scripts/oracles.py
"""

from fractions import Fraction as F

TYPE_A = dict(r_cc=F("65.51"), r_cd=F("17.93"), r_dc=F("96.8"), r_dd=F("-69.23"),
              w_cc=F("0.00078"), w_cd=F("0.00109"), w_dd=F("0.00147"))


def reward(h, a, t):
    return (2 * t["r_cc"] * h * a + (t["r_cd"] + t["r_dc"]) * (h * (1 - a) + (1 - h) * a)
            + 2 * t["r_dd"] * (1 - h) * (1 - a))


def risk(h, a, t):
    return (t["w_cc"] * h * a + t["w_cd"] * (h * (1 - a) + (1 - h) * a)
            + t["w_dd"] * (1 - h) * (1 - a))


def main():
    t = TYPE_A
    denom = t["r_cc"] + t["r_dd"] - t["r_dc"] - t["r_cd"]
    L = (t["r_dd"] - t["r_cd"]) / denom
    eps = F("9e-4")
    rows = {
        "L": L,
        "reward at (1, L)": reward(1, L, t),
        "risk at (1, L)": risk(1, L, t),
        "reward at (0, 1)": reward(0, 1, t),
        "risk at (0, 1)": risk(0, 1, t),
        "alpha at pi_a = 1": denom * (1 - L),
        "alpha at pi_a = 0": denom * (0 - L),
        "mixed rate at (0.5, 1)": denom * (1 - L) * F(1, 3) * (F(1, 4) + F(1, 2) + F(1, 4)),
        "feedback action at pi_h = 0.5": L - F(1, 2),
        "H1 lower end for eps = 9e-4": (t["w_cd"] - eps) / (t["w_cd"] - t["w_cc"]),
        "Diag lower end for eps = 9e-4": (eps - risk(0, L, t)) / (risk(1, L, t) - risk(0, L, t)),
    }
    for name, value in rows.items():
        print(f"{name:32s} {float(value)!r:>24}  ({value})")


if __name__ == "__main__":
    main()
