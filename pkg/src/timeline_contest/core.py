"""Domain types shared by every solver: utility functions, contest instances,
strategy profiles, performance measures and visibility-metric conversions.

All types are immutable after construction and all operations are pure, so
everything here is safe to use from parallel sweeps without locking.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence


class ContestError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ContestError):
    """A numeric argument is outside its mathematical domain."""


class StructuralError(ContestError):
    """Containers are inconsistent with each other (length mismatch etc.)."""


class UsageError(ContestError):
    """The API was called in a way that has no defined meaning."""


class RegimeError(ContestError):
    """A construction was requested outside the parameter regime it is valid in."""


# Shares may land this far outside [0, 1] from rounding; clamp instead of reject.
SHARE_SLACK = 1e-12


def _check_share(d: float) -> float:
    if not (-SHARE_SLACK <= d <= 1.0 + SHARE_SLACK):
        raise DomainError(f"attention share {d!r} outside [0, 1]")
    return min(max(d, 0.0), 1.0)


@dataclass(frozen=True)
class LinearUtility:
    """Utility proportional to the attention share: value(d) = v * d."""

    v: float

    def __post_init__(self):
        if not (0.0 < self.v <= 1.0) or not math.isfinite(self.v):
            raise DomainError(f"linear valuation must be in (0, 1], got {self.v!r}")

    def value(self, d: float) -> float:
        return self.v * _check_share(d)

    def derivative(self, d: float) -> float:
        _check_share(d)
        return self.v

    def marginal_at_zero(self) -> float:
        return self.v


@dataclass(frozen=True)
class LogUtility:
    """Concave utility value(d) = a * ln(1 + b * d); value(0) = 0."""

    a: float
    b: float

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"log utility needs a >= 0 and b >= 0, got a={self.a!r} b={self.b!r}")

    def value(self, d: float) -> float:
        return self.a * math.log1p(self.b * _check_share(d))

    def derivative(self, d: float) -> float:
        return self.a * self.b / (1.0 + self.b * _check_share(d))

    def marginal_at_zero(self) -> float:
        return self.a * self.b


@dataclass(frozen=True)
class CustomUtility:
    """Extension point: any concave utility given by value/derivative callables.

    Only the generic best-response solver accepts these; closed forms require
    linear utilities.
    """

    value_fn: Callable[[float], float]
    derivative_fn: Callable[[float], float]
    label: str = "custom"

    def value(self, d: float) -> float:
        return self.value_fn(_check_share(d))

    def derivative(self, d: float) -> float:
        return self.derivative_fn(_check_share(d))

    def marginal_at_zero(self) -> float:
        return self.derivative_fn(0.0)


UtilitySpec = LinearUtility | LogUtility | CustomUtility


def evaluate_utility(spec: UtilitySpec, d: float) -> float:
    """Utility of one benign agent at attention share d in [0, 1]."""
    return spec.value(d)


def evaluate_utility_derivative(spec: UtilitySpec, d: float) -> float:
    """Marginal utility dU/dd at share d."""
    return spec.derivative(d)


@dataclass(frozen=True)
class ContestInstance:
    """One contest: N benign agents, a willingness factor and a message price.

    `utilities` holds the benign agents; for all-linear instances they are
    stored sorted by valuation (non-increasing) and rescaled so the top
    valuation is exactly 1.  `order[k]` is the caller's index of stored agent
    k and `scale` the pre-normalization top valuation, so results can be
    mapped back to the input.  Benign agents with zero marginal utility are
    dropped at construction; they never participate and their 1/v terms are
    singular.
    """

    utilities: tuple[UtilitySpec, ...]
    theta: float
    cost: float = 1.0
    targeted: tuple[bool, ...] = ()
    malicious_present: bool = True
    order: tuple[int, ...] = ()
    scale: float = 1.0

    @classmethod
    def create(
        cls,
        agents: Sequence[UtilitySpec | tuple | dict],
        theta: float,
        cost: float = 1.0,
        targeted: Sequence[bool] | None = None,
        malicious_present: bool = True,
    ) -> "ContestInstance":
        """Validate, drop zero-utility agents, and normalize linear valuations.

        `agents` entries may be UtilitySpec objects or raw descriptors:
        ("linear", v) / ("log", a, b) tuples or the JSON dict forms.  Raw
        linear valuations may exceed 1; they are rescaled so v_1 = 1.
        """
        if theta < 0 or not math.isfinite(theta):
            raise DomainError(f"willingness factor must be >= 0, got {theta!r}")
        if cost <= 0 or not math.isfinite(cost):
            raise DomainError(f"message cost must be > 0, got {cost!r}")
        raw = [_coerce_agent(a, i) for i, a in enumerate(agents)]
        if not raw:
            raise UsageError("an instance needs at least one benign agent")
        if targeted is None:
            flags = [True] * len(raw)
        else:
            flags = [bool(t) for t in targeted]
            if len(flags) != len(raw):
                raise StructuralError(
                    f"targeted has length {len(flags)}, expected {len(raw)}"
                )

        keep = [(a, f, i) for i, (a, f) in enumerate(zip(raw, flags)) if _marginal(a) > 0.0]
        if not keep:
            raise DomainError("every benign agent has zero marginal utility")

        all_linear = all(isinstance(a, _RawLinear) for a, _, _ in keep)
        scale = 1.0
        if all_linear:
            # Definition-2 normalization: sort non-increasing, rescale so v_1 = 1.
            keep.sort(key=lambda t: (-t[0].v, t[2]))
            scale = keep[0][0].v
            specs = tuple(LinearUtility(a.v / scale) for a, _, _ in keep)
        else:
            specs = tuple(_realize(a) for a, _, _ in keep)
        return cls(
            utilities=specs,
            theta=float(theta),
            cost=float(cost),
            targeted=tuple(f for _, f, _ in keep),
            malicious_present=bool(malicious_present),
            order=tuple(i for _, _, i in keep),
            scale=scale,
        )

    @property
    def n(self) -> int:
        return len(self.utilities)

    @property
    def has_malicious(self) -> bool:
        # theta == 0 is equivalent to the malicious agent being absent.
        return self.malicious_present and self.theta > 0.0

    @property
    def all_linear(self) -> bool:
        return all(isinstance(u, LinearUtility) for u in self.utilities)

    @property
    def valuations(self) -> tuple[float, ...]:
        if not self.all_linear:
            raise UsageError("valuations are only defined for all-linear instances")
        return tuple(u.v for u in self.utilities)

    @property
    def targeted_count(self) -> int:
        return sum(self.targeted)

    def with_theta(self, theta: float) -> "ContestInstance":
        if theta < 0 or not math.isfinite(theta):
            raise DomainError(f"willingness factor must be >= 0, got {theta!r}")
        return dataclasses.replace(self, theta=float(theta))

    def with_cost(self, cost: float) -> "ContestInstance":
        if cost <= 0 or not math.isfinite(cost):
            raise DomainError(f"message cost must be > 0, got {cost!r}")
        return dataclasses.replace(self, cost=float(cost))

    def without_malicious(self) -> "ContestInstance":
        return dataclasses.replace(self, malicious_present=False)


@dataclass(frozen=True)
class _RawLinear:
    v: float


@dataclass(frozen=True)
class _RawLog:
    a: float
    b: float


def _coerce_agent(a, idx):
    if isinstance(a, (LinearUtility, LogUtility, CustomUtility)):
        if isinstance(a, LinearUtility):
            return _RawLinear(a.v)
        if isinstance(a, LogUtility):
            return _RawLog(a.a, a.b)
        return a
    if isinstance(a, dict):
        kind = a.get("type")
        if kind == "linear":
            return _coerce_agent(("linear", a.get("v")), idx)
        if kind == "log":
            return _coerce_agent(("log", a.get("a"), a.get("b")), idx)
        raise UsageError(f"agents[{idx}].type must be 'linear' or 'log', got {kind!r}")
    if isinstance(a, (tuple, list)):
        if a and a[0] == "linear" and len(a) == 2:
            v = float(a[1])
            if v < 0 or not math.isfinite(v):
                raise DomainError(f"agents[{idx}].v must be >= 0, got {v!r}")
            return _RawLinear(v)
        if a and a[0] == "log" and len(a) == 3:
            aa, bb = float(a[1]), float(a[2])
            if aa < 0 or bb < 0 or not (math.isfinite(aa) and math.isfinite(bb)):
                raise DomainError(f"agents[{idx}] log parameters must be >= 0")
            return _RawLog(aa, bb)
    raise UsageError(f"agents[{idx}] is not a recognized utility descriptor: {a!r}")


def _marginal(raw) -> float:
    if isinstance(raw, _RawLinear):
        return raw.v
    if isinstance(raw, _RawLog):
        return raw.a * raw.b
    return raw.marginal_at_zero()


def _realize(raw) -> UtilitySpec:
    if isinstance(raw, _RawLinear):
        return LinearUtility(raw.v)
    if isinstance(raw, _RawLog):
        return LogUtility(raw.a, raw.b)
    return raw


@dataclass(frozen=True)
class StrategyProfile:
    """Message rates x_0..x_N (index 0 is the malicious agent).

    Shares are always derived from the rates at construction.  A degenerate
    profile is the supremum convention for a lone benign agent: every rate is
    zero, the top benign agent is assigned the whole timeline (d_1 = 1) and no
    payment is made.
    """

    x: tuple[float, ...]
    degenerate: bool = False
    z: float = dataclasses.field(init=False)
    d: tuple[float, ...] = dataclasses.field(init=False)

    def __post_init__(self):
        if len(self.x) < 2:
            raise StructuralError("a profile needs the malicious slot plus >= 1 benign agent")
        for i, xi in enumerate(self.x):
            if xi < 0 or not math.isfinite(xi):
                raise DomainError(f"rate x_{i} must be finite and >= 0, got {xi!r}")
        z = math.fsum(self.x)
        if self.degenerate:
            if z != 0.0:
                raise StructuralError("degenerate profiles must have all-zero rates")
            d = (0.0,) + (1.0,) + (0.0,) * (len(self.x) - 2)
        else:
            if z <= 0.0:
                raise StructuralError("non-degenerate profiles need a positive total rate")
            d = tuple(xi / z for xi in self.x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_rates(cls, rates: Sequence[float], degenerate: bool = False) -> "StrategyProfile":
        return cls(x=tuple(float(r) for r in rates), degenerate=degenerate)


@dataclass(frozen=True)
class Measures:
    """Aggregate outcomes of one profile: SU, SV, SW plus per-agent detail."""

    su: float
    sv: float
    sw: float
    per_agent_u: tuple[float, ...]
    per_agent_v: tuple[float, ...]
    v0: float


def compute_measures(instance: ContestInstance, profile: StrategyProfile) -> Measures:
    """Total utility, total net utility, OSN revenue and the malicious payoff.

    The malicious payoff only counts targeted agents' utilities, which reduces
    to -theta * SU - c * x_0 under full targeting.
    """
    if len(profile.x) != instance.n + 1:
        raise StructuralError(
            f"profile has {len(profile.x)} rates, expected {instance.n + 1}"
        )
    c = instance.cost
    u = tuple(spec.value(profile.d[i + 1]) for i, spec in enumerate(instance.utilities))
    su = math.fsum(u)
    benign_cost = c * math.fsum(profile.x[1:])
    v = tuple(ui - c * xi for ui, xi in zip(u, profile.x[1:]))
    sw = c * math.fsum(profile.x)
    targeted_su = math.fsum(ui for ui, t in zip(u, instance.targeted) if t)
    theta = instance.theta if instance.has_malicious else 0.0
    v0 = -theta * targeted_su - c * profile.x[0]
    return Measures(su=su, sv=su - benign_cost, sw=sw, per_agent_u=u, per_agent_v=v, v0=v0)


@dataclass(frozen=True)
class VisibilityConfig:
    """Timeline geometry: number of simultaneously visible slots."""

    K: int

    def __post_init__(self):
        if not isinstance(self.K, int) or self.K < 1:
            raise DomainError(f"K must be a positive integer, got {self.K!r}")


METRIC_IDS = ("m1", "m2", "m3")


def share_to_metric(metric_id: str, d: float, config: VisibilityConfig) -> float:
    """Convert an attention share into one of the visibility metrics.

    m1: mean number of visible messages, K * d.
    m2: fraction of time at least one message is visible, 1 - (1 - d)^K.
    m3: fraction of viewers reached, d itself.
    """
    d = _check_share(d)
    key = str(metric_id).lower()
    if key == "m1":
        return config.K * d
    if key == "m2":
        return 1.0 - (1.0 - d) ** config.K
    if key == "m3":
        return d
    raise UsageError(f"unknown metric id {metric_id!r}; expected one of {METRIC_IDS}")


def reduce_malicious(willingness_factors: Sequence[float]) -> float:
    """Collapse several malicious agents into the only one that matters.

    When multiple malicious agents coexist, only the largest willingness
    factor participates, so the game reduces to a single opponent.
    """
    factors = list(willingness_factors)
    if not factors:
        raise UsageError("need at least one willingness factor")
    for t in factors:
        if t < 0 or not math.isfinite(t):
            raise DomainError(f"willingness factors must be >= 0, got {t!r}")
    return max(factors)


def load_instance(path: str) -> ContestInstance:
    """Read the instance JSON schema used by the CLI.

    Schema: {"theta": number, "cost": number,
             "agents": [{"type":"linear","v":v} | {"type":"log","a":a,"b":b}, ...],
             "targeted": [bool, ...] (optional, default all true),
             "malicious": bool (default true)}
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise UsageError(f"{path}: invalid JSON ({e})") from e
    return instance_from_dict(doc)


def instance_from_dict(doc) -> ContestInstance:
    if not isinstance(doc, dict):
        raise UsageError("instance document must be a JSON object")
    if "theta" not in doc:
        raise UsageError("missing field: theta")
    if "agents" not in doc or not isinstance(doc["agents"], list) or not doc["agents"]:
        raise UsageError("missing or empty field: agents")
    theta = _number(doc["theta"], "theta")
    cost = _number(doc.get("cost", 1.0), "cost")
    targeted = doc.get("targeted")
    if targeted is not None:
        if not isinstance(targeted, list) or not all(isinstance(t, bool) for t in targeted):
            raise UsageError("field targeted must be a list of booleans")
    malicious = doc.get("malicious", True)
    if not isinstance(malicious, bool):
        raise UsageError("field malicious must be a boolean")
    agents = []
    for i, a in enumerate(doc["agents"]):
        if not isinstance(a, dict):
            raise UsageError(f"agents[{i}] must be an object")
        kind = a.get("type")
        if kind == "linear":
            agents.append(("linear", _number(a.get("v"), f"agents[{i}].v")))
        elif kind == "log":
            agents.append(
                ("log", _number(a.get("a"), f"agents[{i}].a"), _number(a.get("b"), f"agents[{i}].b"))
            )
        else:
            raise UsageError(f"agents[{i}].type must be 'linear' or 'log', got {kind!r}")
    try:
        return ContestInstance.create(
            agents, theta=theta, cost=cost, targeted=targeted, malicious_present=malicious
        )
    except ContestError:
        raise
    except (TypeError, ValueError) as e:
        raise UsageError(str(e)) from e


def _number(value, field: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise UsageError(f"field {field} must be a number, got {value!r}")
    return float(value)
