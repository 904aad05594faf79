"""Exact Nash equilibrium for all-linear instances.

The search starts from all N benign agents as participation candidates.  At
each step the willingness factor decides which stationarity system applies
(malicious in or out); if the weakest candidate's rate comes out nonpositive,
the lowest-valuation benign agent is dropped and the step repeats, down to a
single benign agent.  Imperfect targeting only changes the malicious
condition: the valuation sums there run over targeted agents alone.

Costs other than 1 are handled by solving with valuations v_i / c at unit
cost, which yields exactly the rates of the original game; the OSN revenue is
invariant under this substitution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    ContestInstance,
    DomainError,
    Measures,
    StrategyProfile,
    UsageError,
)
from .oracle import foc_residuals

# A candidate rate at or below this is treated as zero and triggers removal.
DROP_TOLERANCE = 1e-14


@dataclass(frozen=True)
class EquilibriumResult:
    """A solved contest: the profile plus participation and diagnostics.

    `participating_benign` holds the x-vector indices (1..N) of active benign
    agents.  `foc_residuals` has one signed entry per agent, malicious first.
    Unless the result is degenerate, at least two agents are active.
    """

    profile: StrategyProfile
    participating_benign: tuple[int, ...]
    malicious_active: bool
    foc_residuals: tuple[float, ...]
    method: str
    iterations: int
    degenerate: bool = False

    @property
    def active_count(self) -> int:
        return len(self.participating_benign) + (1 if self.malicious_active else 0)


def participation_threshold(valuations) -> float:
    """Willingness factor above which the malicious agent enters the contest,
    given the n participating benign valuations.

    Returns (n-1) / (sum(v) * sum(1/v) - n(n-1)); zero for n = 1 (a single
    benign agent never keeps the malicious agent out).
    """
    vs = list(valuations)
    if not vs:
        raise UsageError("need at least one valuation")
    for v in vs:
        if v <= 0 or not math.isfinite(v):
            raise DomainError(f"valuations must be positive, got {v!r}")
    n = len(vs)
    if n == 1:
        return 0.0
    delta = math.fsum(vs) * math.fsum(1.0 / v for v in vs)
    # Cauchy-Schwarz gives delta >= n^2, so the denominator is >= n > 0.
    return (n - 1) / (delta - n * (n - 1))


def _targeted_threshold(sum_vi, sum_inv, sum_i, n) -> float:
    """Participation threshold when only targeted agents enter the malicious sum."""
    if n == 1:
        return 0.0
    denom = sum_vi * sum_inv - sum_i * (n - 1)
    if denom <= 0.0:
        return math.inf
    return (n - 1) / denom


def _degenerate_result(instance, method) -> EquilibriumResult:
    profile = StrategyProfile.from_rates([0.0] * (instance.n + 1), degenerate=True)
    return EquilibriumResult(
        profile=profile,
        participating_benign=(1,),
        malicious_active=False,
        foc_residuals=(0.0,) * (instance.n + 1),
        method=method,
        iterations=0,
        degenerate=True,
    )


def solve_linear_ne(instance: ContestInstance) -> EquilibriumResult:
    """Exact NE of an all-linear instance via the descending participation search.

    Honors the instance's targeting indicators; with every agent targeted this
    is the classic full-competition game.  The degenerate case (one benign
    agent and no effective malicious) returns the supremum profile.
    """
    if not instance.all_linear:
        raise UsageError("the closed form requires all-linear utilities; use the iterative solver")
    N = instance.n
    c = instance.cost
    w = [u.v / c for u in instance.utilities]  # unit-cost substitution
    malicious = instance.has_malicious

    n = N
    sum_inv = math.fsum(1.0 / wi for wi in w)
    sum_wi = math.fsum(wi for wi, t in zip(w, instance.targeted) if t)
    sum_i = instance.targeted_count
    steps = 0

    while n >= 1:
        steps += 1
        mal_active = False
        if malicious and sum_i > 0:
            threshold = _targeted_threshold(sum_wi, sum_inv, sum_i, n)
            mal_active = instance.theta >= threshold and threshold != math.inf
        if mal_active:
            z = sum_wi / (sum_i + 1.0 / instance.theta)
        else:
            if n == 1:
                return _degenerate_result(instance, "closed_form")
            z = (n - 1) / sum_inv
        # Rates are increasing in valuation, so only the weakest candidate
        # can be nonpositive.
        x_last = z - z * z / w[n - 1]
        if x_last <= DROP_TOLERANCE:
            last = w[n - 1]
            sum_inv -= 1.0 / last
            if instance.targeted[n - 1]:
                sum_wi -= last
                sum_i -= 1
            n -= 1
            continue
        rates = [0.0] * (N + 1)
        for i in range(n):
            rates[i + 1] = z - z * z / w[i]
        if mal_active:
            # Direct form of z - sum(benign rates); subtracting the near-z
            # benign total would destroy the relative accuracy of a tiny x_0.
            rates[0] = z * (1.0 - n + z * sum_inv)
            if rates[0] < 0.0:  # rounding guard; analytically >= 0 here
                rates[0] = 0.0
        profile = StrategyProfile.from_rates(rates)
        result = EquilibriumResult(
            profile=profile,
            participating_benign=tuple(range(1, n + 1)),
            malicious_active=mal_active and rates[0] > 0.0,
            foc_residuals=foc_residuals(instance, rates),
            method="closed_form",
            iterations=steps,
        )
        assert result.active_count >= 2 or result.degenerate
        return result

    raise AssertionError("participation search exhausted without a solution")


def solve_linear_ne_targeted(instance: ContestInstance) -> EquilibriumResult:
    """NE under imperfect targeting (indicator vector on the instance).

    Identical search as the full game with the malicious-side sums restricted
    to targeted agents; reduces exactly to `solve_linear_ne` when every
    indicator is set.  With no targeted agent the malicious agent never
    participates and the game without it is returned.
    """
    return solve_linear_ne(instance)


def homogeneous_measures(N: int, M: int, theta: float) -> Measures:
    """Closed-form outcome for N unit-valuation agents with M of them targeted.

    Valid only when the malicious agent participates, i.e. theta > (N-1)/M:
    every benign agent sends M*theta/(1+M*theta)^2, total utility is
    N/(1+M*theta), revenue M*theta/(1+M*theta).
    """
    if N < 1 or M < 1 or M > N:
        raise UsageError(f"need 1 <= M <= N, got N={N}, M={M}")
    if theta <= (N - 1) / M:
        raise DomainError(
            f"homogeneous closed forms need theta > (N-1)/M = {(N - 1) / M:g}, got {theta:g}"
        )
    mt = M * theta
    denom = 1.0 + mt
    u_i = 1.0 / denom
    v_i = 1.0 / denom**2
    su = N / denom
    sv = N / denom**2
    sw = mt / denom
    v0 = -2.0 * mt / denom + N * mt / denom**2
    return Measures(
        su=su,
        sv=sv,
        sw=sw,
        per_agent_u=(u_i,) * N,
        per_agent_v=(v_i,) * N,
        v0=v0,
    )
