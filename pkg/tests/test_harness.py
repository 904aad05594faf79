"""Sweep machinery: generators, determinism, CSV schema, worst-case probes."""

import math

import pytest

from timeline_contest import RegimeError, UsageError, compute_measures, solve_linear_ne
from timeline_contest import harness as H
from timeline_contest.optima import social_optimum_utility

LB1_N5_COMPETITION = 0.7770876399966351
NOMAL_N5 = 0.19183588453084957


def small_config(**overrides):
    base = dict(
        n=5,
        theta_start=0.0,
        theta_stop=1.0,
        theta_step=0.25,
        instances_per_theta=8,
        rng_seed=123,
    )
    base.update(overrides)
    return H.SweepConfig(**base)


def test_generators_deterministic():
    a = H.generate_linear_instance(5, 42, theta=1.0)
    b = H.generate_linear_instance(5, 42, theta=1.0)
    assert a.valuations == b.valuations
    la = H.generate_log_instance(5, 42, theta=1.0)
    lb = H.generate_log_instance(5, 42, theta=1.0)
    assert la.utilities == lb.utilities


def test_linear_generator_shape():
    inst = H.generate_linear_instance(1, 7)
    assert inst.valuations == (1.0,)
    inst = H.generate_linear_instance(5, 7)
    assert inst.valuations[0] == 1.0
    assert all(0.0 < v <= 1.0 for v in inst.valuations)
    assert sorted(inst.valuations, reverse=True) == list(inst.valuations)


def test_linear_generator_mean():
    # sorting preserves the multiset, so the stored tail mean equals the draw mean
    total, count = 0.0, 0
    for seed in range(25_000):
        inst = H.generate_linear_instance(5, seed)
        total += math.fsum(inst.valuations[1:])
        count += 4
    assert total / count == pytest.approx(0.5, abs=0.01)


def test_log_generator_ranges_and_collisions():
    seen = set()
    for seed in range(10_000):
        inst = H.generate_log_instance(3, seed)
        key = tuple((u.a, u.b) for u in inst.utilities)
        assert all(0.0 < u.a <= 1.0 and 0.0 < u.b <= 1.0 for u in inst.utilities)
        seen.add(key)
    assert len(seen) == 10_000


def test_cell_seed_is_stable():
    s = H.derive_cell_seed(123, 4, 5)
    assert s == H.derive_cell_seed(123, 4, 5)
    assert s != H.derive_cell_seed(123, 4, 6)
    assert s != H.derive_cell_seed(123, 5, 5)
    assert 0 <= s < 2**32


def test_sweep_deterministic_and_worker_invariant():
    cfg = small_config()
    a = H.run_sweep(cfg, workers=1)
    b = H.run_sweep(cfg, workers=1)
    assert a.to_csv() == b.to_csv()
    c = H.run_sweep(cfg, workers=2)
    assert a.to_csv() == c.to_csv()


def test_sweep_csv_schema():
    res = H.run_sweep(small_config())
    lines = res.to_csv().splitlines()
    assert lines[0] == H.SWEEP_HEADER
    assert len(lines) == 1 + 5 * 8
    ncols = len(H.SWEEP_HEADER.split(","))
    for line in lines[1:]:
        assert len(line.split(",")) == ncols


def test_sweep_theta_zero_column():
    res = H.run_sweep(small_config())
    zero = [r for r in res.records if r.theta == 0.0]
    assert zero and all(r.r2 == 1.0 and r.r4 == 1.0 and r.r6 == 1.0 for r in zero)
    assert all(not r.malicious_active for r in zero)


def test_sweep_records_respect_optima():
    res = H.run_sweep(small_config(theta_stop=3.0, theta_step=0.5))
    assert res.summary["violation_total"] == 0
    for r in res.records:
        assert r.su_mal <= r.su_max + 1e-9
        assert r.sv_mal <= r.sv_max + 1e-9
        assert r.r6 >= 1.0 - 1e-9
        lo, hi = r.lb5, r.ub5
        assert lo - 1e-9 <= r.r5 <= hi + 1e-9


def test_log_sweep_blanks_linear_only_columns():
    cfg = small_config(instances_per_theta=2, utility_family="logarithmic")
    res = H.run_sweep(cfg)
    assert res.summary["violation_total"] == 0
    for r in res.records:
        assert r.sw_max is None and r.r5 is None and r.r6 is None
        assert r.ub1 is None and r.ub3 is None and r.ub2_adv is None
        assert r.r1 is not None and r.lb1 is not None
    row = res.records[0].to_csv_row().split(",")
    header = H.SWEEP_HEADER.split(",")
    assert row[header.index("sw_max")] == ""
    assert row[header.index("ub1")] == ""


def test_b6_sentinel_for_single_agent():
    cfg = small_config(n=1, theta_start=0.5, theta_stop=0.5, instances_per_theta=1)
    res = H.run_sweep(cfg)
    rec = res.records[0]
    assert rec.sw_nom == 0.0 and math.isinf(rec.r6)
    assert "lb6" not in rec.violations
    row = rec.to_csv_row().split(",")
    assert row[H.SWEEP_HEADER.split(",").index("r6")] == "+inf"


def test_sweep_output_file(tmp_path):
    path = tmp_path / "sweep.csv"
    cfg = small_config(instances_per_theta=2, output_path=str(path))
    res = H.run_sweep(cfg)
    assert path.read_text(encoding="utf-8") == res.to_csv()


def test_sweep_config_roundtrip_and_validation():
    cfg = small_config()
    assert H.SweepConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(UsageError):
        H.SweepConfig.from_dict({"n": 5})
    with pytest.raises(UsageError):
        H.SweepConfig.from_dict({**cfg.to_dict(), "bogus": 1})
    with pytest.raises(UsageError):
        small_config(utility_family="cubic")


def test_worst_case_su_max_branch():
    inst = H.worst_case_instance("su_max_branch", 5, 0.1)
    m = compute_measures(inst, solve_linear_ne(inst).profile)
    r1 = m.su / social_optimum_utility(inst).su_max
    assert r1 == pytest.approx(LB1_N5_COMPETITION, abs=1e-6)


def test_worst_case_su_theta_branch():
    inst = H.worst_case_instance("su_theta_branch", 5, 1.0)
    m = compute_measures(inst, solve_linear_ne(inst).profile)
    assert m.su == pytest.approx(0.5, abs=1e-4)


def test_worst_case_sv_nomal():
    inst = H.worst_case_instance("sv_nomal", 5, 0.3)
    m = compute_measures(inst, solve_linear_ne(inst).profile)
    assert m.sv == pytest.approx(NOMAL_N5, abs=1e-6)


def test_worst_case_regime_errors():
    with pytest.raises(RegimeError, match="su_theta_branch"):
        H.worst_case_instance("su_max_branch", 5, 2.0)
    with pytest.raises(RegimeError, match="su_max_branch"):
        H.worst_case_instance("su_theta_branch", 5, 0.05)
    with pytest.raises(UsageError):
        H.worst_case_instance("nonsense", 5, 1.0)


def test_partial_targeting_sweep_suppresses_theorem_flags():
    # the utility upper bound assumes full competition; with M=2 of 5 targeted
    # and a large willingness factor the ratio provably exceeds it, which must
    # not be reported as a violation
    cfg = small_config(
        theta_start=2.5, theta_stop=2.5, theta_step=0.5, instances_per_theta=5, targeted_count=2
    )
    res = H.run_sweep(cfg)
    assert res.summary["violation_total"] == 0
    assert any(r.r1 > r.ub1 + 1e-9 for r in res.records)
    # the optimum still dominates every equilibrium
    assert all(r.r1 <= 1.0 + 1e-9 for r in res.records)


def test_nonconvergence_flagged_and_excluded(monkeypatch):
    from timeline_contest.iterative import ConvergenceError

    def explode(instance):
        raise ConvergenceError("forced", None, (), 0)

    monkeypatch.setattr(H, "solve_auto", explode)
    res = H.run_sweep(small_config(instances_per_theta=2, theta_stop=0.0))
    assert res.summary["solver_failures"] == 2
    assert res.summary["violation_total"] == 0
    assert all(r.failed and r.violations == ("non_convergence",) for r in res.records)
    row = res.records[0].to_csv_row().split(",")
    assert row[-1] == "non_convergence"


def test_regime_features_shape():
    res = H.run_sweep(small_config(theta_stop=0.5))
    feats = H.b1_regime_features(res.records, N=5)
    assert [t for t, _, _ in feats] == [0.0, 0.25, 0.5]
    for theta, lo, hi in feats:
        assert lo <= hi
        if theta <= 0.28:
            assert lo == pytest.approx(LB1_N5_COMPETITION, abs=1e-12)
        assert hi == pytest.approx(1.0, abs=1e-12)
