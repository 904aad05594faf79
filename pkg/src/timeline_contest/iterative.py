"""Best-response dynamics for general concave utilities.

Damped Gauss-Seidel sweeps: benign agents update in valuation order, then the
malicious agent.  Each best response is found by bracketed bisection on the
strictly decreasing stationarity condition.  The game has a unique
equilibrium under the concavity assumption, so converged runs are
start-point independent; non-convergence is surfaced, never hidden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import backends
from .closed_form import EquilibriumResult, _degenerate_result
from .core import (
    ContestError,
    ContestInstance,
    DomainError,
    LinearUtility,
    LogUtility,
    StrategyProfile,
    UsageError,
)
from .oracle import foc_residuals

# Sweeps with a zero best response before an agent is pinned at exactly 0.
FREEZE_AFTER = 50
# Bisection stops when the bracket is this narrow (relative to its size).
BRACKET_REL_TOL = 1e-15

STATUS_CONVERGED = 0
STATUS_MAX_SWEEPS = 1
STATUS_COLLAPSED = 2


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and update schedule for the best-response solver.

    Defaults are calibrated to be robust on uniform random valuation sweeps
    up to N = 100.
    """

    rate_tolerance: float = 1e-9
    foc_tolerance: float = 1e-8
    max_sweeps: int = 100_000
    damping: float = 0.5
    initial_rate: float = 0.1
    bracket_growth: float = 2.0

    def __post_init__(self):
        if self.rate_tolerance <= 0 or self.foc_tolerance <= 0:
            raise DomainError("tolerances must be positive")
        if self.max_sweeps < 1:
            raise DomainError("max_sweeps must be >= 1")
        if not (0.0 < self.damping <= 1.0):
            raise DomainError("damping must be in (0, 1]")
        if self.initial_rate <= 0:
            raise DomainError("initial_rate must be positive")
        if self.bracket_growth <= 1.0:
            raise DomainError("bracket_growth must exceed 1")


class ConvergenceError(ContestError):
    """Best-response dynamics hit the sweep limit; carries the last state."""

    def __init__(self, message, profile: StrategyProfile, residuals, sweeps: int):
        super().__init__(message)
        self.profile = profile
        self.residuals = residuals
        self.sweeps = sweeps


def check_p1(spec, grid_points: int = 33) -> None:
    """Heuristic concavity screen: derivative positive and non-increasing on a grid.

    This is a numerical stand-in for the structural assumption the uniqueness
    result needs; it cannot certify concavity for arbitrary callables.
    """
    if abs(spec.value(0.0)) > 1e-12:
        raise DomainError("utility must vanish at zero share (P1)")
    prev = None
    for k in range(grid_points):
        d = k / (grid_points - 1)
        du = spec.derivative(d)
        if not (du > 0.0) or not math.isfinite(du):
            raise DomainError(f"marginal utility must stay positive on [0,1] (P1); got {du!r} at d={d:g}")
        if prev is not None and du > prev * (1.0 + 1e-12) + 1e-15:
            raise DomainError(f"marginal utility must be non-increasing (P1); rises at d={d:g}")
        prev = du
    return None


def best_response_benign(spec, z_minus: float, c: float = 1.0, bracket_growth: float = 2.0) -> float:
    """Unique maximizer of U(x/(x+z_minus)) - c*x over x >= 0.

    Returns 0 when the marginal condition at zero is already nonpositive;
    otherwise bisects the strictly decreasing condition
    U'(x/z) * z_minus / z^2 = c after growing the bracket by doubling.
    """
    if z_minus <= 0 or not math.isfinite(z_minus):
        raise DomainError(f"aggregate of other rates must be positive, got {z_minus!r}")
    if c <= 0:
        raise DomainError("cost must be positive")

    def g(x):
        z = x + z_minus
        return spec.derivative(x / z) * z_minus / (z * z) - c

    if g(0.0) <= 0.0:
        return 0.0
    hi = z_minus
    for _ in range(400):
        if g(hi) < 0.0:
            break
        hi *= bracket_growth
    else:
        raise DomainError("failed to bracket the benign best response")
    lo = 0.0
    while hi - lo > BRACKET_REL_TOL * hi:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def best_response_malicious(
    instance: ContestInstance, benign_rates, c: float | None = None, bracket_growth: float = 2.0
) -> float:
    """Unique maximizer of the malicious payoff given the benign rates.

    Solves theta * sum_targeted U_i'(x_i/z) x_i / z^2 = c by bisection; the
    payoff is concave in the malicious rate, so the condition is decreasing.
    """
    rates = [float(r) for r in benign_rates]
    if len(rates) != instance.n:
        raise DomainError(f"expected {instance.n} benign rates, got {len(rates)}")
    s = math.fsum(rates)
    if s <= 0:
        raise DomainError("malicious best response needs a positive total benign rate")
    if instance.theta <= 0:
        raise DomainError("malicious best response needs theta > 0")
    c = instance.cost if c is None else c
    theta = instance.theta

    def g(x0):
        z = x0 + s
        z2 = z * z
        total = 0.0
        for i, spec in enumerate(instance.utilities):
            if instance.targeted[i] and rates[i] > 0.0:
                total += spec.derivative(rates[i] / z) * rates[i]
        return theta * total / z2 - c

    if g(0.0) <= 0.0:
        return 0.0
    hi = s
    for _ in range(400):
        if g(hi) < 0.0:
            break
        hi *= bracket_growth
    else:
        raise DomainError("failed to bracket the malicious best response")
    lo = 0.0
    while hi - lo > BRACKET_REL_TOL * hi:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _typed_arrays(instance):
    """(families, p1, p2) when every utility is linear or logarithmic, else None."""
    fams, p1, p2 = [], [], []
    for spec in instance.utilities:
        if isinstance(spec, LinearUtility):
            fams.append(0)
            p1.append(spec.v)
            p2.append(0.0)
        elif isinstance(spec, LogUtility):
            fams.append(1)
            p1.append(spec.a)
            p2.append(spec.b)
        else:
            return None
    return fams, p1, p2


def _sweep_python(instance, cfg, x):
    """Pure-Python reference kernel; returns (x, sweeps, status)."""
    N = instance.n
    theta = instance.theta if instance.has_malicious else 0.0
    c = instance.cost
    lam = cfg.damping
    derivs = [u.derivative for u in instance.utilities]
    targeted = instance.targeted

    def benign_foc(i, xi, z_minus):
        z = xi + z_minus
        return derivs[i](xi / z) * z_minus / (z * z) - c

    def benign_br(i, z_minus):
        if derivs[i](0.0) / z_minus - c <= 0.0:
            return 0.0
        hi = z_minus
        for _ in range(400):
            if benign_foc(i, hi, z_minus) < 0.0:
                break
            hi *= cfg.bracket_growth
        lo = 0.0
        while hi - lo > BRACKET_REL_TOL * hi:
            mid = 0.5 * (lo + hi)
            if benign_foc(i, mid, z_minus) > 0.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def malicious_foc(x0, s):
        z = x0 + s
        z2 = z * z
        total = 0.0
        for i in range(N):
            if targeted[i] and x[i + 1] > 0.0:
                total += derivs[i](x[i + 1] / z) * x[i + 1]
        return theta * total / z2 - c

    def malicious_br(s):
        if malicious_foc(0.0, s) <= 0.0:
            return 0.0
        hi = s
        for _ in range(400):
            if malicious_foc(hi, s) < 0.0:
                break
            hi *= cfg.bracket_growth
        lo = 0.0
        while hi - lo > BRACKET_REL_TOL * hi:
            mid = 0.5 * (lo + hi)
            if malicious_foc(mid, s) > 0.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    zero_streak = [0] * (N + 1)
    frozen = [False] * (N + 1)
    order = list(range(1, N + 1)) + ([0] if theta > 0.0 else [])

    for sweep in range(1, cfg.max_sweeps + 1):
        delta = 0.0
        total = math.fsum(x)
        for i in order:
            if frozen[i]:
                continue
            z_minus = total - x[i]
            if z_minus <= 0.0:
                # Everyone else is silent; any positive rate wins the whole
                # timeline, so nudge toward a vanishing rate.
                br = 0.0 if x[i] == 0.0 else x[i] * 0.5
            elif i == 0:
                br = malicious_br(z_minus)
            else:
                br = benign_br(i - 1, z_minus)
            new = (1.0 - lam) * x[i] + lam * br
            if br == 0.0:
                zero_streak[i] += 1
                if zero_streak[i] >= FREEZE_AFTER:
                    frozen[i] = True
                    new = 0.0
            else:
                zero_streak[i] = 0
            delta = max(delta, abs(new - x[i]))
            total += new - x[i]
            x[i] = new

        if math.fsum(x) < 1e-12:
            return x, sweep, STATUS_COLLAPSED
        if delta < cfg.rate_tolerance:
            ok, thawed = _kkt_pass(instance, x, frozen, cfg)
            if ok:
                return x, sweep, STATUS_CONVERGED
            if thawed:
                for i in thawed:
                    frozen[i] = False
                    zero_streak[i] = 0
    return x, cfg.max_sweeps, STATUS_MAX_SWEEPS


def _kkt_pass(instance, x, frozen, cfg):
    """Check the stationarity system at x; report frozen agents that must thaw."""
    res = foc_residuals(instance, x)
    thaw = []
    ok = True
    for i, r in enumerate(res):
        if i == 0 and not instance.has_malicious:
            continue
        if x[i] > cfg.rate_tolerance:
            if abs(r) >= cfg.foc_tolerance:
                ok = False
        elif r > cfg.foc_tolerance:
            ok = False
            if frozen[i]:
                thaw.append(i)
    return ok, thaw


def solve_general_ne(
    instance: ContestInstance,
    config: SolverConfig | None = None,
    initial_rates=None,
) -> EquilibriumResult:
    """Solve any concave-utility instance by damped best-response iteration.

    Convergence requires both the largest per-sweep rate change to drop below
    `rate_tolerance` and every stationarity residual to pass
    `foc_tolerance`.  Raises ConvergenceError (with the last profile and
    residuals attached) if the sweep limit is hit first.
    """
    cfg = config or SolverConfig()
    for spec in instance.utilities:
        check_p1(spec)
    N = instance.n
    if N == 1 and not instance.has_malicious:
        return _degenerate_result(instance, "best_response")

    if initial_rates is None:
        x = [cfg.initial_rate] * (N + 1)
    else:
        x = [float(r) for r in initial_rates]
        if len(x) != N + 1:
            raise UsageError(f"initial_rates must have {N + 1} entries")
        if any(r < 0 for r in x):
            raise DomainError("initial rates must be >= 0")
    if not instance.has_malicious:
        x[0] = 0.0

    typed = _typed_arrays(instance)
    backend = backends.resolve_backend(typed is not None)
    if backend == "compiled":
        fams, p1, p2 = typed
        rates, sweeps, status = backends._fast.sweep_solve(
            fams,
            p1,
            p2,
            [1 if t else 0 for t in instance.targeted],
            instance.theta if instance.has_malicious else 0.0,
            instance.cost,
            x,
            cfg.rate_tolerance,
            cfg.foc_tolerance,
            cfg.max_sweeps,
            cfg.damping,
            cfg.bracket_growth,
            FREEZE_AFTER,
        )
        x = list(rates)
    else:
        x, sweeps, status = _sweep_python(instance, cfg, x)

    if status == STATUS_COLLAPSED:
        return _degenerate_result(instance, "best_response")
    if status == STATUS_MAX_SWEEPS:
        profile = StrategyProfile.from_rates(x)
        raise ConvergenceError(
            f"no convergence within {cfg.max_sweeps} sweeps",
            profile,
            foc_residuals(instance, x),
            cfg.max_sweeps,
        )

    profile = StrategyProfile.from_rates(x)
    eps = cfg.rate_tolerance
    participating = tuple(i for i in range(1, N + 1) if x[i] > eps)
    malicious_active = instance.has_malicious and x[0] > eps
    if len(participating) + (1 if malicious_active else 0) < 2:
        # Extreme parameter corners can push true rates below the activity
        # threshold; classify by strict positivity so the two-player floor holds.
        participating = tuple(i for i in range(1, N + 1) if x[i] > 0.0)
        malicious_active = instance.has_malicious and x[0] > 0.0
    result = EquilibriumResult(
        profile=profile,
        participating_benign=participating,
        malicious_active=malicious_active,
        foc_residuals=foc_residuals(instance, x),
        method="best_response",
        iterations=sweeps,
    )
    assert result.active_count >= 2 or result.degenerate
    return result
