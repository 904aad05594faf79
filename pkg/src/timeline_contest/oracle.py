"""Equilibrium validation: first-order conditions and a brute-force deviation scan.

These checks are deliberately independent of how a profile was produced, so
they can serve as the oracle for both the closed-form and the best-response
solvers.
"""

from __future__ import annotations

import math

import numpy as np

from .core import (
    ContestInstance,
    LinearUtility,
    LogUtility,
    StrategyProfile,
    StructuralError,
)


def _opponent_sums(x) -> list[float]:
    """sum_{j != i} x_j for each i, built from prefix/suffix sums of the parts.

    Subtracting x_i from the total cancels catastrophically when one agent
    dominates the aggregate; summing the opponents' nonnegative rates directly
    keeps the relative error at O(n * eps).
    """
    m = len(x)
    prefix = [0.0] * (m + 1)
    for i in range(m):
        prefix[i + 1] = prefix[i] + x[i]
    suffix = [0.0] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] + x[i]
    return [prefix[i] + suffix[i + 1] for i in range(m)]


def foc_residuals(instance: ContestInstance, x) -> tuple[float, ...]:
    """Signed stationarity residuals for every agent at rates x_0..x_N.

    Entry 0 is the malicious condition theta * sum_i U_i'(d_i) x_i / z^2 - c
    (targeted agents only); entry i >= 1 is U_i'(d_i) z_{-i} / z^2 - c.
    At an equilibrium, active agents have residual 0 and inactive agents have
    residual <= 0.  Degenerate profiles (z = 0) return all zeros.
    """
    if len(x) != instance.n + 1:
        raise StructuralError(f"got {len(x)} rates, expected {instance.n + 1}")
    z = math.fsum(x)
    if z <= 0.0:
        return (0.0,) * (instance.n + 1)
    c = instance.cost
    z2 = z * z
    z_minus = _opponent_sums(x)
    res = [0.0] * (instance.n + 1)
    mal_gain = 0.0
    for i, spec in enumerate(instance.utilities):
        xi = x[i + 1]
        du = spec.derivative(min(xi / z, 1.0))
        res[i + 1] = du * z_minus[i + 1] / z2 - c
        if instance.targeted[i]:
            mal_gain += du * xi / z2
    theta = instance.theta if instance.has_malicious else 0.0
    res[0] = theta * mal_gain - c
    return tuple(res)


def ne_condition_violation(
    instance: ContestInstance,
    profile: StrategyProfile,
    activity_eps: float = 1e-12,
) -> float:
    """Largest stationarity violation at `profile` (0 at an exact equilibrium).

    Active agents contribute |residual|, inactive agents only positive slack.
    """
    if profile.degenerate:
        return 0.0
    res = foc_residuals(instance, profile.x)
    worst = 0.0
    for i, r in enumerate(res):
        if i == 0 and not instance.has_malicious:
            continue
        if profile.x[i] > activity_eps:
            worst = max(worst, abs(r))
        else:
            worst = max(worst, r)
    return worst


def check_ne_conditions(
    instance: ContestInstance,
    profile: StrategyProfile,
    foc_tolerance: float = 1e-10,
    activity_eps: float = 1e-12,
) -> bool:
    """True iff the KKT conditions hold at `profile` within `foc_tolerance`."""
    return ne_condition_violation(instance, profile, activity_eps) < foc_tolerance


def _payoff_grid(spec, z_minus, c, grid):
    """Benign payoff U(x/(x+z_minus)) - c*x on a vector of candidate rates."""
    z = grid + z_minus
    d = np.where(z > 0.0, grid / np.where(z > 0.0, z, 1.0), 0.0)
    if isinstance(spec, LinearUtility):
        u = spec.v * d
    elif isinstance(spec, LogUtility):
        u = spec.a * np.log1p(spec.b * d)
    else:
        u = np.array([spec.value(di) for di in d])
    return u - c * grid


def max_unilateral_gain(
    instance: ContestInstance,
    profile: StrategyProfile,
    grid_points: int = 10_000,
    span: float = 4.0,
) -> float:
    """Best payoff improvement any single agent can find on a rate grid.

    Each agent scans `grid_points` deviations over [0, span * z] while the
    others hold their equilibrium rates.  At an exact NE the result is <= 0 up
    to rounding; the solvers promise it stays below 1e-6.
    """
    if profile.degenerate:
        return 0.0
    x = np.asarray(profile.x, dtype=float)
    z = float(x.sum())
    grid = np.linspace(0.0, span * z, grid_points)
    c = instance.cost
    opponents = _opponent_sums(list(profile.x))
    gain = -math.inf

    for i, spec in enumerate(instance.utilities):
        xi = x[i + 1]
        z_minus = opponents[i + 1]
        current = spec.value(min(xi / z, 1.0)) - c * xi
        best = float(np.max(_payoff_grid(spec, z_minus, c, grid)))
        gain = max(gain, best - current)

    if instance.has_malicious:
        theta = instance.theta
        benign = x[1:]
        z_minus = float(benign.sum())
        zz = grid + z_minus
        zz_safe = np.where(zz > 0.0, zz, 1.0)
        total_u = np.zeros_like(grid)
        for i, spec in enumerate(instance.utilities):
            if not instance.targeted[i]:
                continue
            d = benign[i] / zz_safe
            if isinstance(spec, LinearUtility):
                total_u += spec.v * d
            elif isinstance(spec, LogUtility):
                total_u += spec.a * np.log1p(spec.b * d)
            else:
                total_u += np.array([spec.value(di) for di in d])
        payoff = -theta * total_u - c * grid
        d_cur = benign / z
        current = -theta * math.fsum(
            spec.value(d_cur[i])
            for i, spec in enumerate(instance.utilities)
            if instance.targeted[i]
        ) - c * x[0]
        gain = max(gain, float(np.max(payoff)) - current)

    return gain
