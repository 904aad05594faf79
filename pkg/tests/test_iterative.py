"""Best-response dynamics: single responses, full solves, backend parity."""

import math
import os

import numpy as np
import pytest

from timeline_contest import (
    ContestInstance,
    ConvergenceError,
    CustomUtility,
    DomainError,
    LinearUtility,
    LogUtility,
    SolverConfig,
    best_response_benign,
    best_response_malicious,
    solve_general_ne,
    solve_linear_ne,
    solve_linear_ne_targeted,
)
from timeline_contest.backends import HAVE_COMPILED
from timeline_contest.iterative import check_p1
from timeline_contest.oracle import max_unilateral_gain, ne_condition_violation


def test_benign_br_linear_analytic():
    # analytic solution of v*z/(x+z)^2 = c is x = sqrt(v*z/c) - z
    assert best_response_benign(LinearUtility(1.0), 0.25) == pytest.approx(0.25, abs=1e-10)
    rng = np.random.default_rng(2)
    for _ in range(50):
        v, z, c = rng.uniform(0.1, 1.0), rng.uniform(0.05, 2.0), rng.uniform(0.5, 2.0)
        expected = max(0.0, math.sqrt(v * z / c) - z)
        got = best_response_benign(LinearUtility(v), z, c)
        assert got == pytest.approx(expected, abs=1e-10)


def test_benign_br_inactive_at_boundary():
    assert best_response_benign(LinearUtility(0.5), 0.7) == 0.0


def test_benign_br_log_against_grid_search():
    spec = LogUtility(1.0, 1.0)
    z_minus, c = 0.1, 1.0
    xs = np.linspace(0.0, 2.0, 1_000_001)
    payoff = spec.a * np.log1p(spec.b * (xs / (xs + z_minus))) - c * xs
    best_grid = xs[int(np.argmax(payoff))]
    assert best_response_benign(spec, z_minus, c) == pytest.approx(best_grid, abs=1e-5)


def test_benign_br_domain_errors():
    with pytest.raises(DomainError):
        best_response_benign(LinearUtility(1.0), 0.0)
    with pytest.raises(DomainError):
        best_response_benign(LinearUtility(1.0), 0.5, c=0.0)


def test_malicious_br_single_benign():
    inst = ContestInstance.create([("linear", 1.0)], theta=1.0)
    # analytic aggregate: z = sqrt(theta * sum v_i x_i / c) = 0.5
    assert best_response_malicious(inst, [0.25]) == pytest.approx(0.25, abs=1e-10)


def test_malicious_br_nonparticipation():
    inst = ContestInstance.create([("linear", 1.0)], theta=0.01)
    assert best_response_malicious(inst, [0.25]) == 0.0


def test_malicious_br_errors():
    inst = ContestInstance.create([("linear", 1.0)], theta=1.0)
    with pytest.raises(DomainError):
        best_response_malicious(inst, [0.0])
    with pytest.raises(DomainError):
        best_response_malicious(ContestInstance.create([("linear", 1.0)], theta=0.0), [0.2])


def test_malicious_br_consistent_with_targeted_closed_form():
    rng = np.random.default_rng(4)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        vals = [("linear", 1.0)] + [("linear", float(v)) for v in rng.uniform(0.1, 1.0, n - 1)]
        targeted = [bool(rng.random() < 0.7) for _ in range(n)]
        if not any(targeted):
            targeted[0] = True
        inst = ContestInstance.create(vals, theta=float(rng.uniform(0.5, 3.0)), targeted=targeted)
        res = solve_linear_ne_targeted(inst)
        if res.degenerate:
            continue
        # at equilibrium the malicious best response reproduces its own rate
        br = best_response_malicious(inst, res.profile.x[1:])
        assert br == pytest.approx(res.profile.x[0], abs=1e-9)


def test_solve_matches_closed_form_linear():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(1, 7))
        vals = [("linear", 1.0)] + [("linear", float(v)) for v in rng.uniform(0.05, 1.0, n - 1)]
        inst = ContestInstance.create(vals, theta=float(rng.uniform(0, 3)))
        closed = solve_linear_ne(inst)
        res = solve_general_ne(inst)
        assert res.method == "best_response"
        for a, b in zip(closed.profile.x, res.profile.x):
            assert b == pytest.approx(a, abs=1e-6)


def test_solve_matches_closed_form_targeted():
    rng = np.random.default_rng(15)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        vals = [("linear", 1.0)] + [("linear", float(v)) for v in rng.uniform(0.1, 1.0, n - 1)]
        targeted = [bool(rng.random() < 0.6) for _ in range(n)]
        inst = ContestInstance.create(
            vals, theta=float(rng.uniform(0.2, 3.0)), targeted=targeted
        )
        closed = solve_linear_ne_targeted(inst)
        if closed.degenerate:
            continue
        res = solve_general_ne(inst)
        for a, b in zip(closed.profile.x, res.profile.x):
            assert b == pytest.approx(a, abs=1e-6)


def test_symmetric_instance_equal_rates():
    inst = ContestInstance.create([("log", 0.6, 0.9)] * 4, theta=1.0)
    res = solve_general_ne(inst)
    rates = res.profile.x[1:]
    assert max(rates) - min(rates) < 1e-9


def test_multi_start_uniqueness_smoke():
    rng = np.random.default_rng(6)
    inst = ContestInstance.create(
        [("log", float(a), float(b)) for a, b in rng.uniform(0.1, 1.0, (5, 2))], theta=1.0
    )
    ref = solve_general_ne(inst).profile.x
    for _ in range(5):
        x0 = rng.uniform(0.01, 1.0, size=6)
        alt = solve_general_ne(inst, initial_rates=x0).profile.x
        assert max(abs(a - b) for a, b in zip(ref, alt)) < 1e-7


def test_damping_invariance():
    inst = ContestInstance.create([("log", 0.8, 0.5), ("log", 0.4, 0.9)], theta=0.7)
    a = solve_general_ne(inst, SolverConfig(damping=0.5)).profile.x
    b = solve_general_ne(inst, SolverConfig(damping=0.25)).profile.x
    assert max(abs(p - q) for p, q in zip(a, b)) < 1e-7


def test_log_solution_satisfies_kkt():
    rng = np.random.default_rng(8)
    for _ in range(20):
        inst = ContestInstance.create(
            [("log", float(a), float(b)) for a, b in rng.uniform(0.05, 1.0, (5, 2))],
            theta=float(rng.uniform(0, 3)),
        )
        res = solve_general_ne(inst)
        assert ne_condition_violation(inst, res.profile, activity_eps=1e-9) < 1e-8
        assert max_unilateral_gain(inst, res.profile, grid_points=2000) < 1e-6


def test_nonconvergence_surfaces():
    inst = ContestInstance.create([("linear", 1.0), ("linear", 0.9)], theta=1.0)
    with pytest.raises(ConvergenceError) as exc:
        solve_general_ne(inst, SolverConfig(max_sweeps=3))
    assert exc.value.sweeps == 3
    assert len(exc.value.profile.x) == 3
    assert len(exc.value.residuals) == 3


def test_degenerate_single_agent():
    res = solve_general_ne(ContestInstance.create([("log", 0.5, 0.5)], theta=0.0))
    assert res.degenerate and res.profile.d == (0.0, 1.0)


def test_p1_check_rejects_convex_utility():
    # increasing marginal utility violates the concavity assumption
    convex = CustomUtility(lambda d: d + d * d, lambda d: 1.0 + 2.0 * d, label="convex")
    inst = ContestInstance.create([convex, ("linear", 1.0)], theta=1.0)
    with pytest.raises(DomainError):
        solve_general_ne(inst)
    check_p1(LinearUtility(0.5))
    check_p1(LogUtility(1.0, 2.0))


def test_custom_concave_spec_solves():
    sqrt_spec = CustomUtility(
        lambda d: math.sqrt(1.0 + d) - 1.0, lambda d: 0.5 / math.sqrt(1.0 + d), label="sqrt"
    )
    inst = ContestInstance.create([sqrt_spec, ("log", 0.5, 0.8)], theta=0.5)
    res = solve_general_ne(inst)
    assert ne_condition_violation(inst, res.profile, activity_eps=1e-9) < 1e-8


def test_solver_config_validation():
    with pytest.raises(DomainError):
        SolverConfig(damping=0.0)
    with pytest.raises(DomainError):
        SolverConfig(rate_tolerance=-1.0)
    with pytest.raises(DomainError):
        SolverConfig(bracket_growth=1.0)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernel not built")
def test_backend_parity():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(20):
        if rng.random() < 0.5:
            agents = [("linear", 1.0)] + [
                ("linear", float(v)) for v in rng.uniform(0.05, 1.0, 4)
            ]
        else:
            agents = [("log", float(a), float(b)) for a, b in rng.uniform(0.05, 1.0, (5, 2))]
        inst = ContestInstance.create(agents, theta=float(rng.uniform(0, 3)))
        os.environ["TIMELINE_CONTEST_BACKEND"] = "compiled"
        try:
            fast = solve_general_ne(inst).profile.x
            os.environ["TIMELINE_CONTEST_BACKEND"] = "python"
            slow = solve_general_ne(inst).profile.x
        finally:
            os.environ.pop("TIMELINE_CONTEST_BACKEND", None)
        worst = max(worst, max(abs(a - b) for a, b in zip(fast, slow)))
    assert worst < 1e-9
