"""Bound formulas: frozen values, branch structure, monotonicity, CSV table."""

import math

import numpy as np
import pytest

from timeline_contest import DomainError, UsageError
from timeline_contest import bounds as bnd

# extended-precision evaluations, frozen
LB1_N5_COMPETITION = 0.7770876399966351  # 16*sqrt(5) - 35
CROSSOVER_N5 = 0.2868561389090297
VTILDE_5_1 = 0.9032219661793862
NOMAL_N2 = 0.4641016151377546
NOMAL_N5 = 0.19183588453084957
LB3_N5_T1 = 0.1334506053460934
UB2_N5_T3 = 0.32171403472725746


def test_lb_su_over_max_values():
    assert bnd.lb_su_mal_over_max(5, 0.1) == pytest.approx(LB1_N5_COMPETITION, abs=1e-14)
    assert bnd.lb_su_mal_over_max(5, 1.0) == pytest.approx(0.5, rel=1e-15)
    assert bnd.lb_su_mal_over_max(1, 2.0) == pytest.approx(1 / 3, rel=1e-15)


def test_lb_su_branches_cross_at_crossover():
    t = bnd.b1_crossover(5)
    assert t == pytest.approx(CROSSOVER_N5, abs=1e-14)
    assert 1.0 / (1.0 + t) == pytest.approx(LB1_N5_COMPETITION, abs=1e-12)
    # below: competition branch; above: adversarial branch
    assert bnd.lb_su_mal_over_max(5, t - 0.01) == pytest.approx(LB1_N5_COMPETITION, abs=1e-14)
    assert bnd.lb_su_mal_over_max(5, t + 0.01) == pytest.approx(1 / (1 + t + 0.01), rel=1e-14)


def test_asymptotic_lower_bound():
    assert bnd.lb_su_asymptotic(0.1) == 0.75
    assert bnd.lb_su_asymptotic(1.0) == 0.5
    # finite-N competition branch approaches 3/4 from above
    assert bnd.lb_su_mal_over_max(10_000, 0.01) == pytest.approx(0.75, abs=2e-5)


def test_ub_su_over_max():
    assert bnd.ub_su_mal_over_max(5, 0.5) == 1.0
    assert bnd.ub_su_mal_over_max(5, 1.0) == pytest.approx(5 / 6, rel=1e-15)
    switch = 4 / 5
    assert bnd.ub_su_mal_over_max(5, switch) == pytest.approx(1.0, rel=1e-15)
    assert bnd.ub_su_mal_over_max(5, switch + 1e-12) == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize(
    "theta,b2,b4",
    [(0.0, 1.0, 1.0), (1.0, 0.5, 0.25), (3.0, 0.25, 0.0625)],
)
def test_nom_lower_bounds(theta, b2, b4):
    assert bnd.lb_su_mal_over_nom(theta) == pytest.approx(b2, rel=1e-15)
    assert bnd.lb_sv_mal_over_nom(theta) == pytest.approx(b4, rel=1e-15)


def test_vtilde_single_agent_reduces_to_quadratic():
    for theta in (0.3, 1.0, 2.5):
        assert bnd.solve_vtilde(1, theta) == pytest.approx(
            theta / math.sqrt(1 + theta * theta), abs=1e-13
        )


def test_vtilde_values_and_residuals():
    assert bnd.solve_vtilde(5, 1.0) == pytest.approx(VTILDE_5_1, abs=1e-12)
    for n in (1, 2, 7, 25, 50):
        for theta in (0.1, 0.7, 1.9, 3.0):
            v = bnd.solve_vtilde(n, theta)
            assert 0.0 < v < 1.0
            resid = 2 * (n - 1) * v**3 + (3 - 2 * n + theta**-2) * v**2 - 1
            assert abs(resid) < 1e-12


def test_vtilde_domain():
    with pytest.raises(DomainError):
        bnd.solve_vtilde(5, 0.0)
    with pytest.raises(DomainError):
        bnd.solve_vtilde(0, 1.0)


def test_lb_sv_over_max():
    # n=1 candidate collapses to 1/(1+theta)^2, matching the B4 floor
    assert bnd.lb_sv_mal_over_max(1, 1.0) == pytest.approx(0.25, abs=1e-12)
    assert bnd._nomal_candidate(2) == pytest.approx(NOMAL_N2, abs=1e-14)
    assert bnd._nomal_candidate(5) == pytest.approx(NOMAL_N5, abs=1e-14)
    assert bnd.lb_sv_mal_over_max(5, 1.0) == pytest.approx(LB3_N5_T1, abs=1e-12)
    # tiny theta: the no-malicious candidate dominates
    assert bnd.lb_sv_mal_over_max(5, 1e-6) == pytest.approx(NOMAL_N5, abs=1e-12)
    assert bnd.lb_sv_mal_over_max(5, 0.0) == pytest.approx(NOMAL_N5, abs=1e-14)


def test_ub_sv_over_max_pieces():
    assert bnd.ub_sv_mal_over_max(0.3) == pytest.approx(1 / 1.69, rel=1e-12)
    assert bnd.ub_sv_mal_over_max(0.45) == 0.5
    assert bnd.ub_sv_mal_over_max(0.6) == pytest.approx(2 / 2.2**2, rel=1e-12)
    assert bnd.ub_sv_mal_over_max(2.0) == pytest.approx(1 / 9, rel=1e-12)
    # continuity at the piece joints
    for joint in (math.sqrt(2) - 1, 0.5, math.sqrt(2) / 2):
        assert bnd.ub_sv_mal_over_max(joint - 1e-12) == pytest.approx(
            bnd.ub_sv_mal_over_max(joint + 1e-12), abs=1e-9
        )


def test_ub_su_over_nom_advisory():
    assert bnd.ub_su_mal_over_nom_approx(5, 0.5) == 1.0
    assert bnd.ub_su_mal_over_nom_approx(5, 1.0) == pytest.approx(5 / 6, rel=1e-15)
    assert bnd.ub_su_mal_over_nom_approx(5, 3.0) == pytest.approx(UB2_N5_T3, abs=1e-14)


def test_revenue_bounds():
    assert bnd.bounds_sw_mal_over_max(5, 0.0) == (0.0, 1.0)
    lo, hi = bnd.bounds_sw_mal_over_max(5, 3.0)
    assert lo == pytest.approx(15 / 16, rel=1e-15)
    assert hi == pytest.approx(75 / 64, rel=1e-15)
    lo, hi = bnd.bounds_sw_mal_over_max(2, 1.0)
    assert lo == 1.0 and hi == pytest.approx(4 / 3, rel=1e-15)
    with pytest.raises(UsageError):
        bnd.bounds_sw_mal_over_max(1, 1.0)
    assert bnd.bounds_sw_mal_over_nom() == (1.0, math.inf)


def test_bound_monotonicity_on_grid():
    thetas = np.arange(0.0, 3.0001, 1e-3)
    lb1 = [bnd.lb_su_mal_over_max(5, t) for t in thetas]
    ub1 = [bnd.ub_su_mal_over_max(5, t) for t in thetas]
    lb5 = [bnd.bounds_sw_mal_over_max(5, t)[0] for t in thetas]
    assert all(b <= a + 1e-15 for a, b in zip(lb1, lb1[1:]))
    assert all(b <= a + 1e-15 for a, b in zip(ub1, ub1[1:]))
    assert all(b >= a - 1e-15 for a, b in zip(lb5, lb5[1:]))


def test_lower_below_upper_everywhere():
    for n in (1, 2, 5, 20):
        for t in np.arange(0.0, 3.0001, 0.01):
            r = bnd.bound_report(n, float(t))
            for bv in (r.b1, r.b2, r.b3, r.b4, r.b5, r.b6):
                if bv.lower is not None:
                    assert bv.lower >= 0.0
                if bv.advisory or bv.lower is None or bv.upper is None:
                    continue
                assert bv.lower <= bv.upper + 1e-12


def test_bound_report_regimes():
    r = bnd.bound_report(5, 0.1)
    assert r.b1.regime.startswith("competition")
    assert r.b2.advisory
    r = bnd.bound_report(5, 2.0)
    assert r.b1.regime.startswith("adversarial")
    assert "adversarial" in r.b3.regime


def test_bound_table_rows():
    rows = bnd.bound_table_rows(5, [0.0, 1.0])
    assert len(rows) == 2
    header_cols = bnd.BOUND_TABLE_HEADER.split(",")
    first = rows[0].split(",")
    assert len(first) == len(header_cols) == 12
    assert first[0] == "0" and first[1] == "5"
    second = dict(zip(header_cols, rows[1].split(",")))
    assert float(second["lb_b1"]) == 0.5
    assert float(second["lb_b4"]) == 0.25
