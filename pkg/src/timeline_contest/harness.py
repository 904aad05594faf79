"""Monte Carlo sweeps that validate every bound at desk scale.

A sweep walks a willingness-factor grid; each (theta, instance) cell gets its
own derived seed so results are byte-identical for a given config regardless
of worker count.  Every record solves the game with and without the malicious
agent, computes the social optima, forms the six ratios and flags any bound
violation beyond an absolute tolerance of 1e-9.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bnd
from .closed_form import EquilibriumResult, participation_threshold, solve_linear_ne
from .core import ContestInstance, DomainError, RegimeError, UsageError, compute_measures
from .iterative import ConvergenceError, SolverConfig, solve_general_ne
from .optima import max_osn_revenue, social_optimum_utility

VIOLATION_TOLERANCE = 1e-9

SWEEP_HEADER = (
    "theta,seed,n_active,malicious_active,"
    "su_mal,su_nom,su_max,sv_mal,sv_nom,sv_max,sw_mal,sw_nom,sw_max,"
    "r1,r2,r3,r4,r5,r6,"
    "lb1,ub1,lb2,ub2_adv,lb3,ub3,lb4,lb5,ub5,lb6,violations"
)

LINEAR = "linear"
LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class SweepConfig:
    """Fully determines one sweep, including its random draws."""

    n: int
    theta_start: float
    theta_stop: float
    theta_step: float
    instances_per_theta: int
    rng_seed: int
    utility_family: str = LINEAR
    targeted_count: int | None = None  # None = every benign agent targeted
    cost: float = 1.0
    output_path: str | None = None

    def __post_init__(self):
        if self.theta_step <= 0:
            raise DomainError("theta_step must be positive")
        if self.instances_per_theta < 1:
            raise DomainError("instances_per_theta must be >= 1")
        if self.utility_family not in (LINEAR, LOGARITHMIC):
            raise UsageError(f"utility_family must be {LINEAR!r} or {LOGARITHMIC!r}")
        if self.targeted_count is not None and not (0 <= self.targeted_count <= self.n):
            raise UsageError("targeted_count must be in [0, n]")

    def thetas(self) -> list[float]:
        count = int(math.floor((self.theta_stop - self.theta_start) / self.theta_step + 1e-9)) + 1
        return [self.theta_start + k * self.theta_step for k in range(max(count, 0))]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "theta_start": self.theta_start,
            "theta_stop": self.theta_stop,
            "theta_step": self.theta_step,
            "instances_per_theta": self.instances_per_theta,
            "rng_seed": self.rng_seed,
            "utility_family": self.utility_family,
            "targeted_count": self.targeted_count,
            "cost": self.cost,
            "output_path": self.output_path,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SweepConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(doc) - known
        if extra:
            raise UsageError(f"unknown sweep config fields: {sorted(extra)}")
        missing = {"n", "theta_start", "theta_stop", "theta_step", "instances_per_theta", "rng_seed"} - set(doc)
        if missing:
            raise UsageError(f"sweep config missing fields: {sorted(missing)}")
        return cls(**doc)


@dataclass
class SweepRecord:
    """One solved cell; None marks quantities undefined for the family."""

    theta: float
    seed: int
    n_active: int
    malicious_active: bool
    su_mal: float | None
    su_nom: float | None
    su_max: float | None
    sv_mal: float | None
    sv_nom: float | None
    sv_max: float | None
    sw_mal: float | None
    sw_nom: float | None
    sw_max: float | None
    r1: float | None
    r2: float | None
    r3: float | None
    r4: float | None
    r5: float | None
    r6: float | None
    lb1: float | None
    ub1: float | None
    lb2: float | None
    ub2_adv: float | None
    lb3: float | None
    ub3: float | None
    lb4: float | None
    lb5: float | None
    ub5: float | None
    lb6: float | None
    violations: tuple[str, ...] = ()
    failed: bool = False

    def to_csv_row(self) -> str:
        f = bnd.format_float
        cells = [
            f(self.theta),
            str(self.seed),
            str(self.n_active),
            "true" if self.malicious_active else "false",
            f(self.su_mal), f(self.su_nom), f(self.su_max),
            f(self.sv_mal), f(self.sv_nom), f(self.sv_max),
            f(self.sw_mal), f(self.sw_nom), f(self.sw_max),
            f(self.r1), f(self.r2), f(self.r3), f(self.r4), f(self.r5), f(self.r6),
            f(self.lb1), f(self.ub1), f(self.lb2), f(self.ub2_adv),
            f(self.lb3), f(self.ub3), f(self.lb4), f(self.lb5), f(self.ub5), f(self.lb6),
            ";".join(self.violations),
        ]
        return ",".join(cells)


@dataclass
class SweepResult:
    config: SweepConfig
    records: list[SweepRecord]
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = [SWEEP_HEADER]
        lines.extend(r.to_csv_row() for r in self.records)
        return "\n".join(lines) + "\n"


def derive_cell_seed(base_seed: int, theta_index: int, instance_index: int) -> int:
    """Deterministic per-cell seed; derivation is independent of worker layout."""
    ss = np.random.SeedSequence([int(base_seed), int(theta_index), int(instance_index)])
    return int(ss.generate_state(1)[0])


def _targeted_flags(n: int, targeted_count: int | None):
    if targeted_count is None:
        return None
    return [i < targeted_count for i in range(n)]


def generate_linear_instance(
    N: int, seed: int, theta: float = 0.0, cost: float = 1.0, targeted_count: int | None = None
) -> ContestInstance:
    """Random linear instance: v_1 = 1, the rest i.i.d. uniform on (0, 1]."""
    if N < 1:
        raise UsageError("N must be >= 1")
    rng = np.random.default_rng(seed)
    draws = 1.0 - rng.random(N - 1)  # uniform on (0, 1]
    agents = [("linear", 1.0)] + [("linear", float(v)) for v in draws]
    return ContestInstance.create(
        agents, theta=theta, cost=cost, targeted=_targeted_flags(N, targeted_count)
    )


def generate_log_instance(
    N: int, seed: int, theta: float = 0.0, cost: float = 1.0, targeted_count: int | None = None
) -> ContestInstance:
    """Random logarithmic instance with a_i, b_i i.i.d. uniform on (0, 1]."""
    if N < 1:
        raise UsageError("N must be >= 1")
    rng = np.random.default_rng(seed)
    a = 1.0 - rng.random(N)
    b = 1.0 - rng.random(N)
    agents = [("log", float(ai), float(bi)) for ai, bi in zip(a, b)]
    return ContestInstance.create(
        agents, theta=theta, cost=cost, targeted=_targeted_flags(N, targeted_count)
    )


def solve_auto(instance: ContestInstance) -> EquilibriumResult:
    """Closed form for all-linear instances, best-response dynamics otherwise."""
    if instance.all_linear:
        return solve_linear_ne(instance)
    return solve_general_ne(instance, SolverConfig())


def _safe_ratio(num, den):
    if den == 0.0:
        return math.inf
    return num / den


def evaluate_record(instance: ContestInstance, report: bnd.BoundReport, seed: int) -> SweepRecord:
    """Solve MAL and NOM games, form ratios, and flag bound violations.

    The ratio envelopes are statements about the fully-targeted game; when the
    instance targets only a subset of agents the bound values are still
    emitted for reference but no violation is flagged (e.g. the utility upper
    bound is provably exceeded under partial targeting).
    """
    linear = instance.all_linear
    full_targeting = instance.targeted_count == instance.n
    theta = instance.theta
    blank = dict(
        su_mal=None, su_nom=None, su_max=None, sv_mal=None, sv_nom=None, sv_max=None,
        sw_mal=None, sw_nom=None, sw_max=None,
        r1=None, r2=None, r3=None, r4=None, r5=None, r6=None,
        lb1=report.b1.lower, ub1=None, lb2=report.b2.lower, ub2_adv=None,
        lb3=report.b3.lower, ub3=None, lb4=report.b4.lower,
        lb5=None, ub5=None, lb6=None,
    )
    try:
        mal = solve_auto(instance)
        nom = solve_auto(instance.without_malicious())
    except ConvergenceError:
        return SweepRecord(
            theta=theta, seed=seed, n_active=0, malicious_active=False,
            violations=("non_convergence",), failed=True, **blank,
        )

    m_mal = compute_measures(instance, mal.profile)
    m_nom = compute_measures(instance.without_malicious(), nom.profile)
    opt = social_optimum_utility(instance)
    su_max = opt.su_max
    sv_max = opt.sv_max

    r1 = m_mal.su / su_max
    r2 = _safe_ratio(m_mal.su, m_nom.su)
    r3 = m_mal.sv / sv_max
    r4 = _safe_ratio(m_mal.sv, m_nom.sv)

    tol = VIOLATION_TOLERANCE
    violations: list[str] = []
    advisory: list[str] = []

    def need(flag, name, bucket):
        if flag and full_targeting:
            bucket.append(name)

    need(r1 < report.b1.lower - tol, "lb1", violations)
    need(r2 < report.b2.lower - tol, "lb2", violations)
    need(r3 < report.b3.lower - tol, "lb3", violations)
    need(r4 < report.b4.lower - tol, "lb4", violations)
    # no equilibrium may beat the social optimum, whatever the family/targeting
    if r1 > 1.0 + tol:
        violations.append("su>max")
    if r3 > 1.0 + tol:
        violations.append("sv>max")

    rec = dict(
        theta=theta, seed=seed,
        n_active=len(mal.participating_benign),
        malicious_active=mal.malicious_active,
        su_mal=m_mal.su, su_nom=m_nom.su, su_max=su_max,
        sv_mal=m_mal.sv, sv_nom=m_nom.sv, sv_max=sv_max,
        sw_mal=m_mal.sw, sw_nom=m_nom.sw, sw_max=None,
        r1=r1, r2=r2, r3=r3, r4=r4, r5=None, r6=None,
        lb1=report.b1.lower, ub1=None, lb2=report.b2.lower, ub2_adv=None,
        lb3=report.b3.lower, ub3=None, lb4=report.b4.lower,
        lb5=None, ub5=None, lb6=None,
    )

    if linear:
        rec["ub1"] = report.b1.upper
        rec["ub2_adv"] = report.b2.upper
        rec["ub3"] = report.b3.upper
        need(r1 > report.b1.upper + tol, "ub1", violations)
        need(r2 > report.b2.upper + tol, "adv:ub2", advisory)
        need(r3 > report.b3.upper + tol, "ub3", violations)
        revenue_max = max_osn_revenue(instance.n)
        if not revenue_max.degenerate:
            rec["sw_max"] = revenue_max.value
            rec["r5"] = m_mal.sw / revenue_max.value
            rec["lb5"], rec["ub5"] = report.b5.lower, report.b5.upper
            need(rec["r5"] < report.b5.lower - tol, "lb5", violations)
            need(rec["r5"] > report.b5.upper + tol, "ub5", violations)
        rec["r6"] = _safe_ratio(m_mal.sw, m_nom.sw)
        rec["lb6"] = report.b6.lower
        if math.isfinite(rec["r6"]):
            need(rec["r6"] < report.b6.lower - tol, "lb6", violations)

    return SweepRecord(violations=tuple(violations + advisory), **rec)


def _generate(config: SweepConfig, theta: float, seed: int) -> ContestInstance:
    if config.utility_family == LINEAR:
        return generate_linear_instance(
            config.n, seed, theta=theta, cost=config.cost, targeted_count=config.targeted_count
        )
    return generate_log_instance(
        config.n, seed, theta=theta, cost=config.cost, targeted_count=config.targeted_count
    )


def _column_job(args) -> list[SweepRecord]:
    config, theta_index, theta = args
    report = bnd.bound_report(config.n, theta)
    out = []
    for k in range(config.instances_per_theta):
        seed = derive_cell_seed(config.rng_seed, theta_index, k)
        instance = _generate(config, theta, seed)
        out.append(evaluate_record(instance, report, seed))
    return out


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepResult:
    """Execute the sweep; records come back in (theta, instance) order.

    Cells are embarrassingly parallel; with workers > 1 the theta columns are
    distributed over processes and merged back in grid order, so the output
    is identical to a serial run.
    """
    jobs = [(config, ti, theta) for ti, theta in enumerate(config.thetas())]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            column_results = list(pool.map(_column_job, jobs))
    else:
        column_results = [_column_job(j) for j in jobs]

    records = [rec for column in column_results for rec in column]
    counts: dict[str, int] = {}
    advisory: dict[str, int] = {}
    failures = 0
    for rec in records:
        if rec.failed:
            failures += 1
            continue
        for v in rec.violations:
            bucket = advisory if v.startswith("adv:") else counts
            bucket[v] = bucket.get(v, 0) + 1
    summary = {
        "records": len(records),
        "violations": counts,
        "violation_total": sum(counts.values()),
        "advisory": advisory,
        "solver_failures": failures,
    }
    result = SweepResult(config=config, records=records, summary=summary)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(result.to_csv())
    return result


def load_sweep_config(path: str) -> SweepConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise UsageError(f"{path}: invalid JSON ({e})") from e
    return SweepConfig.from_dict(doc)


WORST_CASE_KINDS = ("su_max_branch", "su_theta_branch", "sv_nomal")


def worst_case_instance(kind: str, N: int, theta: float) -> ContestInstance:
    """Tightness constructions that achieve the lower bounds when solved.

    su_max_branch: all non-top valuations at sqrt(N(N-1)) - (N-1); achieves the
      pure-competition branch of the B1 bound while the malicious agent stays out.
    su_theta_branch: vanishing non-top valuations (1e-6 surrogate); collapses the
      game to the top agent versus the malicious agent, achieving 1/(1+theta).
    sv_nomal: all non-top valuations at sqrt(N^2-1) - (N-1); achieves the
      no-malicious candidate of the B3 bound.
    """
    if kind not in WORST_CASE_KINDS:
        raise UsageError(f"kind must be one of {WORST_CASE_KINDS}, got {kind!r}")
    if N < 2:
        raise UsageError("tightness constructions need N >= 2")
    if kind == "su_theta_branch":
        cross = bnd.b1_crossover(N)
        if theta < cross:
            raise RegimeError(
                f"su_theta_branch is tight only for theta >= {cross:.6g}; "
                "below the crossover use kind='su_max_branch'"
            )
        vals = [1.0] + [1e-6] * (N - 1)
        return ContestInstance.create([("linear", v) for v in vals], theta=theta)

    if kind == "su_max_branch":
        v = math.sqrt(N * (N - 1.0)) - (N - 1.0)
        other_branch = "su_theta_branch"
    else:
        v = math.sqrt(N * N - 1.0) - (N - 1.0)
        other_branch = None
    vals = [1.0] + [v] * (N - 1)
    limit = participation_threshold(vals)
    if theta > limit:
        hint = f"; for larger theta use kind='{other_branch}'" if other_branch else ""
        raise RegimeError(
            f"{kind} needs the malicious agent inactive, i.e. theta <= {limit:.6g}{hint}"
        )
    return ContestInstance.create([("linear", x) for x in vals], theta=theta)


def b1_regime_features(records, N: int, include_probes: bool = True):
    """Per-theta min/max of the B1 ratio, optionally with tightness probes.

    Random uniform draws almost surely miss the configurations where the B1
    envelope is attained, so the empirical extremes are augmented with the two
    constructions that attain them: the homogeneous instance (upper) and the
    pure-competition worst case (lower), both solved through the regular
    pipeline.  Returns a list of (theta, min_r1, max_r1) sorted by theta.
    """
    columns: dict[float, list[float]] = {}
    for rec in records:
        if rec.failed or rec.r1 is None:
            continue
        columns.setdefault(rec.theta, []).append(rec.r1)

    def probe_r1(instance):
        m = compute_measures(instance, solve_linear_ne(instance).profile)
        return m.su / social_optimum_utility(instance).su_max

    out = []
    for theta in sorted(columns):
        values = columns[theta]
        lo, hi = min(values), max(values)
        if include_probes:
            homog = ContestInstance.create([("linear", 1.0)] * N, theta=theta)
            hi = max(hi, probe_r1(homog))
            for kind in ("su_max_branch", "su_theta_branch"):
                try:
                    lo = min(lo, probe_r1(worst_case_instance(kind, N, theta)))
                except RegimeError:
                    pass
        out.append((theta, lo, hi))
    return out
