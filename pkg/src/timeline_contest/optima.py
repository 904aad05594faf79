"""Social-optimum reference values, always excluding the malicious agent.

SU_max maximizes the summed utilities over the share simplex.  For linear
utilities the whole timeline goes to the top valuation; for general concave
utilities a Lagrangian water-filling equalizes marginal utilities.  SV_max
equals SU_max under the supremum convention: keep the optimal shares and let
every rate shrink toward zero, so total cost vanishes in the limit (flagged
on the report).  SW_max is the best equilibrium revenue over admissible
valuation vectors and is a constant (N-1)/N of the agent count alone, which
is what makes revenue ratios comparable across random draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ContestInstance, DomainError, LinearUtility, LogUtility

LAMBDA_TOLERANCE = 1e-12


@dataclass(frozen=True)
class OptimumReport:
    """Optimal measures without the malicious agent.

    `sv_max` always equals `su_max` (supremum convention, see module doc);
    `sw_max` is filled only for all-linear instances.
    """

    su_max: float
    sv_max: float
    sw_max: float | None
    shares: tuple[float, ...]
    supremum_convention: bool = True


@dataclass(frozen=True)
class OsnRevenueMax:
    """Maximum no-malicious equilibrium revenue; degenerate when N = 1."""

    value: float
    degenerate: bool = False


def _share_at_marginal(spec, lam: float) -> float:
    """Share where the marginal utility equals lam, clamped to [0, 1]."""
    d0 = spec.derivative(0.0)
    if d0 <= lam:
        return 0.0
    if spec.derivative(1.0) >= lam:
        return 1.0
    if isinstance(spec, LinearUtility):
        # Constant marginal: the step was handled by the two cases above.
        return 1.0 if spec.v > lam else 0.0
    if isinstance(spec, LogUtility):
        return min(1.0, max(0.0, spec.a / lam - 1.0 / spec.b))
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if spec.derivative(mid) > lam:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def social_optimum_utility(instance: ContestInstance) -> OptimumReport:
    """Maximize total benign utility over nonnegative shares summing to one."""
    specs = instance.utilities
    n = len(specs)
    if max(s.marginal_at_zero() for s in specs) <= 0.0:
        raise DomainError("social optimum undefined: all utilities are flat at zero")

    if n == 1:
        su = specs[0].value(1.0)
        return OptimumReport(su_max=su, sv_max=su, sw_max=None, shares=(1.0,))

    if instance.all_linear:
        # Everything to the highest valuation; ties go to the lowest index.
        best = max(range(n), key=lambda i: specs[i].v)
        shares = tuple(1.0 if i == best else 0.0 for i in range(n))
        su = specs[best].v
        return OptimumReport(su_max=su, sv_max=su, sw_max=None, shares=shares)

    lam_hi = max(s.derivative(0.0) for s in specs)
    # At lam = min_i U'_i(1) at least one agent takes the full timeline, so the
    # bracket always straddles total share 1.
    lam_lo = min(s.derivative(1.0) for s in specs)
    while lam_hi - lam_lo > LAMBDA_TOLERANCE:
        lam = 0.5 * (lam_lo + lam_hi)
        if _total_share(specs, lam) > 1.0:
            lam_lo = lam
        else:
            lam_hi = lam
    lam = 0.5 * (lam_lo + lam_hi)
    shares = [_share_at_marginal(s, lam) for s in specs]
    total = math.fsum(shares)
    residual = 1.0 - total
    if abs(residual) > 1e-9:
        # A linear spec sitting exactly at the water level takes the slack.
        for i, s in enumerate(specs):
            if isinstance(s, LinearUtility) and abs(s.v - lam) <= 1e-9:
                shares[i] = min(1.0, max(0.0, shares[i] + residual))
                break
    su = math.fsum(s.value(d) for s, d in zip(specs, shares))
    return OptimumReport(su_max=su, sv_max=su, sw_max=None, shares=tuple(shares))


def _total_share(specs, lam):
    return math.fsum(_share_at_marginal(s, lam) for s in specs)


def social_optimum_net_utility(instance: ContestInstance) -> float:
    """Supremum of total net utility: equals SU_max since costs vanish in the limit."""
    return social_optimum_utility(instance).su_max


def max_osn_revenue(N: int) -> OsnRevenueMax:
    """Best no-malicious equilibrium revenue over normalized linear valuations.

    Attained with N unit valuations, giving (N-1)/N.  A single benign agent
    has no two-player equilibrium, so N = 1 reports zero with the degenerate
    flag set.
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if N == 1:
        return OsnRevenueMax(value=0.0, degenerate=True)
    return OsnRevenueMax(value=(N - 1) / N)
