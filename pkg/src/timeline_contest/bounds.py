"""Closed-form efficiency-loss bounds for the six contest ratios.

Ratio naming: B1 = SU_mal/SU_max, B2 = SU_mal/SU_nom, B3 = SV_mal/SV_max,
B4 = SV_mal/SV_nom, B5 = SW_mal/SW_max, B6 = SW_mal/SW_nom.  Lower bounds for
B1-B4 hold for any concave utilities (linear is the worst case); the upper
bounds and the revenue bounds are statements about linear utilities only.
The B2 upper bound is an approximation and is flagged advisory everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import DomainError, UsageError

SQRT2 = math.sqrt(2.0)


def lb_su_mal_over_max(N: int, theta: float) -> float:
    """Worst-case total utility relative to the optimum.

    min of the adversarial branch 1/(1+theta) and the pure-competition branch
    1 - (N-1)(sqrt(N) - sqrt(N-1))^2; the branches cross exactly at the
    regime-switch willingness factor.
    """
    _check_n_theta(N, theta)
    competition = 1.0 - (N - 1) * (math.sqrt(N) - math.sqrt(N - 1)) ** 2
    return min(1.0 / (1.0 + theta), competition)


def lb_su_asymptotic(theta: float) -> float:
    """Large-N limit of the B1 lower bound: min(3/4, 1/(1+theta))."""
    if theta < 0:
        raise DomainError("theta must be >= 0")
    return min(0.75, 1.0 / (1.0 + theta))


def b1_crossover(N: int) -> float:
    """Willingness factor where the two B1 lower-bound branches meet."""
    if N < 2:
        raise UsageError("the branch crossover needs N >= 2")
    return 1.0 / ((math.sqrt(N / (N - 1)) + 1.0) ** 2 - 1.0)


def ub_su_mal_over_max(N: int, theta: float) -> float:
    """Best-case total utility relative to the optimum: min(1, N/(1+N*theta))."""
    _check_n_theta(N, theta)
    return min(1.0, N / (1.0 + N * theta))


def lb_su_mal_over_nom(theta: float) -> float:
    """Worst-case utility damage from adding the malicious agent: 1/(1+theta)."""
    if theta < 0:
        raise DomainError("theta must be >= 0")
    return 1.0 / (1.0 + theta)


def lb_sv_mal_over_nom(theta: float) -> float:
    """Worst-case net-utility damage from adding the malicious agent: 1/(1+theta)^2."""
    if theta < 0:
        raise DomainError("theta must be >= 0")
    return 1.0 / (1.0 + theta) ** 2


def solve_vtilde(n: int, theta: float) -> float:
    """Root in (0, 1) of 2(n-1)v^3 + (3 - 2n + theta^-2)v^2 - 1 = 0.

    The polynomial is -1 at v=0 and theta^-2 at v=1, so plain bisection on the
    sign change pins the unique positive root; the residual stays below 1e-12.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if theta <= 0:
        raise DomainError("theta must be positive (theta^-2 appears in the cubic)")
    a3 = 2.0 * (n - 1)
    a2 = 3.0 - 2.0 * n + theta**-2
    f = lambda v: (a3 * v + a2) * v * v - 1.0
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 5e-17:
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _nomal_candidate(N: int) -> float:
    """Worst no-malicious total net utility (all agents at the interior minimizer)."""
    root = math.sqrt(N * N - 1.0)
    return 1.0 + (N - 1) * (root - (N + 1)) / (1.0 + 0.5 * (root + (N - 1)))


def _malicious_candidate(n: int, theta: float) -> float:
    vt = solve_vtilde(n, theta)
    top = 1.0 + (n - 1) * vt
    frac = top / (1.0 + n * theta)
    return (1.0 - n * theta) * frac + (1.0 + (n - 1) / vt) * (theta * frac) ** 2


def lb_sv_mal_over_max(N: int, theta: float) -> float:
    """Worst-case total net utility relative to the optimum.

    Explicit minimum over the no-malicious candidate and the n = 1..N
    adversarial candidates (each using its own cubic root); at theta = 0 only
    the no-malicious candidate applies.
    """
    _check_n_theta(N, theta)
    best = _nomal_candidate(N)
    if theta > 0:
        for n in range(1, N + 1):
            best = min(best, _malicious_candidate(n, theta))
    return best


def ub_sv_mal_over_max(theta: float) -> float:
    """Best-case total net utility relative to the optimum (four-piece form)."""
    if theta < 0:
        raise DomainError("theta must be >= 0")
    if theta <= SQRT2 - 1.0:
        return 1.0 / (1.0 + theta) ** 2
    if theta <= 0.5:
        return 0.5
    if theta <= SQRT2 / 2.0:
        return 2.0 / (1.0 + 2.0 * theta) ** 2
    return 1.0 / (1.0 + theta) ** 2


def ub_su_mal_over_nom_approx(N: int, theta: float) -> float:
    """Approximated best-case B2; advisory only, never an acceptance gate."""
    _check_n_theta(N, theta)
    if theta <= (N - 1) / N:
        return 1.0
    competition = 1.0 - (N - 1) * (math.sqrt(N) - math.sqrt(N - 1)) ** 2
    return max(N / (1.0 + N * theta), 1.0 / ((1.0 + theta) * competition))


def bounds_sw_mal_over_max(N: int, theta: float) -> tuple[float, float]:
    """Revenue envelope against the best no-malicious revenue (N >= 2)."""
    if N < 2:
        raise UsageError("revenue bounds need N >= 2 (no two-player game otherwise)")
    if theta < 0:
        raise DomainError("theta must be >= 0")
    lower = theta * N / ((1.0 + theta) * (N - 1))
    upper = max(1.0, theta * N * N / ((1.0 + theta * N) * (N - 1)))
    return lower, upper


def bounds_sw_mal_over_nom() -> tuple[float, float]:
    """Revenue with/without the malicious agent: at least 1, unbounded above."""
    return 1.0, math.inf


def _check_n_theta(N: int, theta: float) -> None:
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if theta < 0 or not math.isfinite(theta):
        raise DomainError(f"theta must be finite and >= 0, got {theta!r}")


@dataclass(frozen=True)
class BoundValue:
    """One ratio's envelope; `upper` is None where no bound exists."""

    lower: float | None
    upper: float | None
    advisory: bool = False
    regime: str = ""


@dataclass(frozen=True)
class BoundReport:
    """All six envelopes at one (N, theta) point."""

    N: int
    theta: float
    b1: BoundValue
    b2: BoundValue
    b3: BoundValue
    b4: BoundValue
    b5: BoundValue
    b6: BoundValue


def bound_report(N: int, theta: float) -> BoundReport:
    """Evaluate every bound at (N, theta) with regime annotations."""
    _check_n_theta(N, theta)
    competition = 1.0 - (N - 1) * (math.sqrt(N) - math.sqrt(N - 1)) ** 2
    adv_branch = 1.0 / (1.0 + theta)
    b1_regime = "adversarial" if adv_branch < competition else "competition"
    ub1_regime = "capped" if theta <= (N - 1) / N else "adversarial"

    lb3 = _nomal_candidate(N)
    b3_regime = "no-malicious"
    if theta > 0:
        for n in range(1, N + 1):
            cand = _malicious_candidate(n, theta)
            if cand < lb3:
                lb3 = cand
                b3_regime = f"adversarial n={n}"
    if theta <= SQRT2 - 1.0:
        ub3_regime = "single-agent"
    elif theta <= 0.5:
        ub3_regime = "plateau"
    elif theta <= SQRT2 / 2.0:
        ub3_regime = "two-agent"
    else:
        ub3_regime = "single-agent"

    b5 = None if N < 2 else bounds_sw_mal_over_max(N, theta)
    b6 = bounds_sw_mal_over_nom()
    return BoundReport(
        N=N,
        theta=theta,
        b1=BoundValue(lb_su_mal_over_max(N, theta), ub_su_mal_over_max(N, theta), regime=b1_regime + "/" + ub1_regime),
        b2=BoundValue(lb_su_mal_over_nom(theta), ub_su_mal_over_nom_approx(N, theta), advisory=True),
        b3=BoundValue(lb3, ub_sv_mal_over_max(theta), regime=b3_regime + "/" + ub3_regime),
        b4=BoundValue(lb_sv_mal_over_nom(theta), None),
        b5=BoundValue(b5[0], b5[1]) if b5 else BoundValue(None, None, regime="degenerate N=1"),
        b6=BoundValue(b6[0], b6[1]),
    )


BOUND_TABLE_HEADER = "theta,N,lb_b1,ub_b1,lb_b2,ub_b2_advisory,lb_b3,ub_b3,lb_b4,lb_b5,ub_b5,lb_b6"


def format_float(x: float | None) -> str:
    if x is None:
        return ""
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return format(x, ".17g")


def bound_table_rows(N: int, thetas) -> list[str]:
    """CSV rows (without header) of the bound table over a theta grid."""
    rows = []
    for theta in thetas:
        r = bound_report(N, theta)
        cells = [
            format_float(theta),
            str(N),
            format_float(r.b1.lower),
            format_float(r.b1.upper),
            format_float(r.b2.lower),
            format_float(r.b2.upper),
            format_float(r.b3.lower),
            format_float(r.b3.upper),
            format_float(r.b4.lower),
            format_float(r.b5.lower),
            format_float(r.b5.upper),
            format_float(r.b6.lower),
        ]
        rows.append(",".join(cells))
    return rows
