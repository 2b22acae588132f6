"""Scenario types and validation for pool-infiltration analyses.

All computational powers are fractions of the total network hash power,
which is normalized to 1. The block reward is likewise normalized to 1 per
round, so with everyone honest a miner's expected per-round reward equals
its power fraction. No single miner or pool may hold 0.5 or more (majority
guard), and unintentional forks are ignored throughout.

All types are immutable after construction and safe to share between
concurrent workers.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, asdict
from pathlib import Path

from .errors import (
    BudgetExceeded,
    ConstraintViolated,
    PowerOutOfRange,
    RationalFloorWarning,
    ScenarioFileError,
    TooManyPools,
)

MAX_SINGLE_ACTOR = 0.5  # strict bound: any one miner or pool stays below half the network
MAX_POOLS = 8           # branch-order enumeration grows factorially with pool count


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise PowerOutOfRange(f"{name}={value!r} outside [0, 1]")


def _check_actor_power(name: str, value: float) -> None:
    _check_unit(name, value)
    if value >= MAX_SINGLE_ACTOR:
        raise PowerOutOfRange(
            f"{name}={value!r} reaches the majority guard ({MAX_SINGLE_ACTOR})"
        )


@dataclass(frozen=True)
class SinglePoolScenario:
    """One attacker infiltrating one proportional-payout pool.

    alpha: attacker's total power
    beta:  victim pool's power, excluding the attacker's infiltration part
    tau:   fraction of alpha diverted into the victim pool
    c:     probability the attacker's withheld block wins a two-branch fork
    """

    alpha: float
    beta: float
    tau: float
    c: float


@dataclass(frozen=True)
class MultiPoolScenario:
    """One attacker infiltrating up to MAX_POOLS pools at once.

    A fork with k attacker branches gives each branch win probability c/k,
    so the attacker side never exceeds c in total.
    """

    alpha: float
    betas: tuple[float, ...]
    taus: tuple[float, ...]
    c: float

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "taus", tuple(float(t) for t in self.taus))


@dataclass(frozen=True)
class GameScenario:
    """Two pools infiltrating each other.

    f1, f2 are absolute infiltration powers (f_i = tau_i * alpha_i).
    c1, c2 are two-branch win probabilities for the block found by pool i's
    infiltrator; c1p, c2p are the three-branch analogues and must sum to <= 1.
    """

    alpha1: float
    alpha2: float
    f1: float
    f2: float
    c1: float
    c2: float
    c1p: float
    c2p: float


Scenario = SinglePoolScenario | MultiPoolScenario | GameScenario


def validate_single(s: SinglePoolScenario) -> SinglePoolScenario:
    """Return ``s`` unchanged iff all invariants hold. Idempotent."""
    _check_actor_power("alpha", s.alpha)
    _check_actor_power("beta", s.beta)
    _check_unit("tau", s.tau)
    _check_unit("c", s.c)
    if s.alpha + s.beta > 1.0:
        raise BudgetExceeded(f"alpha + beta = {s.alpha + s.beta!r} exceeds 1")
    return s


def validate_multi(s: MultiPoolScenario) -> MultiPoolScenario:
    """Return ``s`` unchanged iff all invariants hold. Idempotent."""
    n = len(s.betas)
    if n != len(s.taus):
        raise ConstraintViolated(
            f"betas ({n}) and taus ({len(s.taus)}) must have equal length"
        )
    if n < 1:
        raise ConstraintViolated("at least one target pool is required")
    if n > MAX_POOLS:
        raise TooManyPools(f"{n} pools exceeds the enumeration cap of {MAX_POOLS}")
    _check_actor_power("alpha", s.alpha)
    for i, b in enumerate(s.betas):
        _check_actor_power(f"betas[{i}]", b)
    for i, t in enumerate(s.taus):
        _check_unit(f"taus[{i}]", t)
    _check_unit("c", s.c)
    if sum(s.taus) > 1.0 + 1e-15:
        raise BudgetExceeded(f"sum of taus = {sum(s.taus)!r} exceeds 1")
    total = s.alpha + sum(s.betas)
    if total > 1.0 + 1e-15:
        raise BudgetExceeded(f"alpha + sum(betas) = {total!r} exceeds 1")
    return s


def validate_game(s: GameScenario) -> GameScenario:
    """Return ``s`` unchanged iff all invariants hold. Idempotent.

    Branch-win probabilities below the rational-manager floor
    ``alpha1 + alpha2`` are legal (full [0, 1] sweeps stay reproducible)
    but raise a :class:`RationalFloorWarning`.
    """
    _check_actor_power("alpha1", s.alpha1)
    _check_actor_power("alpha2", s.alpha2)
    if s.alpha1 + s.alpha2 > 1.0:
        raise BudgetExceeded(f"alpha1 + alpha2 = {s.alpha1 + s.alpha2!r} exceeds 1")
    for name, f, cap in (("f1", s.f1, s.alpha1), ("f2", s.f2, s.alpha2)):
        if not 0.0 <= f <= cap:
            raise ConstraintViolated(f"{name}={f!r} outside [0, alpha]={cap!r}")
    for name, c in (("c1", s.c1), ("c2", s.c2), ("c1p", s.c1p), ("c2p", s.c2p)):
        _check_unit(name, c)
    if s.c1p + s.c2p > 1.0 + 1e-15:
        raise ConstraintViolated(f"c1p + c2p = {s.c1p + s.c2p!r} exceeds 1")
    if min(s.c1, s.c2) < s.alpha1 + s.alpha2:
        warnings.warn(
            "branch-win probability below the rational-manager floor alpha1 + alpha2",
            RationalFloorWarning,
            stacklevel=2,
        )
    return s


def validate(s: Scenario) -> Scenario:
    if isinstance(s, SinglePoolScenario):
        return validate_single(s)
    if isinstance(s, MultiPoolScenario):
        return validate_multi(s)
    if isinstance(s, GameScenario):
        return validate_game(s)
    raise TypeError(f"not a scenario: {s!r}")


def rer(reward: float, honest_power: float) -> float:
    """Relative extra reward in percent: (reward - honest) / honest * 100.

    ``honest_power`` is the actor's honest per-round reward, i.e. its power
    fraction. Negative values mean a loss versus honest mining.
    """
    if honest_power == 0:
        raise ZeroDivisionError("honest power is zero; RER undefined")
    return (reward - honest_power) / honest_power * 100.0


@dataclass(frozen=True)
class RewardReport:
    """Absolute per-round rewards plus their RER percentages."""

    attacker_reward: float
    pool_reward: float
    attacker_rer_pct: float
    pool_rer_pct: float

    @classmethod
    def from_rewards(cls, attacker_reward, pool_reward, attacker_power, pool_power):
        """Build a report; ``pool_power`` should include the infiltration part
        (beta + tau*alpha), which is what the pool would earn un-attacked."""
        return cls(
            attacker_reward=attacker_reward,
            pool_reward=pool_reward,
            attacker_rer_pct=rer(attacker_reward, attacker_power),
            pool_rer_pct=rer(pool_reward, pool_power),
        )


# --- scenario files ---------------------------------------------------------
#
# A scenario file is a flat JSON object whose keys exactly match the field
# names of one scenario type. Emitted result documents wrap the echo under a
# "scenario" key; load_scenario unwraps that automatically so outputs can be
# fed straight back in.

_FIELD_SETS = {
    frozenset(("alpha", "beta", "tau", "c")): SinglePoolScenario,
    frozenset(("alpha", "betas", "taus", "c")): MultiPoolScenario,
    frozenset(("alpha1", "alpha2", "f1", "f2", "c1", "c2", "c1p", "c2p")): GameScenario,
}

_LIST_FIELDS = ("betas", "taus")


def _coerce_number(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFileError(f"field '{key}': expected a number, got {value!r}")
    return float(value)


def _coerce_number_list(key: str, value) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)):
        raise ScenarioFileError(f"field '{key}': expected a list of numbers, got {value!r}")
    return tuple(_coerce_number(f"{key}[{i}]", v) for i, v in enumerate(value))


def scenario_from_dict(data: dict) -> Scenario:
    """Build and validate a scenario from a flat mapping."""
    if not isinstance(data, dict):
        raise ScenarioFileError(f"expected a JSON object, got {type(data).__name__}")
    if "scenario" in data and isinstance(data["scenario"], dict):
        data = data["scenario"]
    keys = frozenset(data)
    cls = _FIELD_SETS.get(keys)
    if cls is None:
        for fields, candidate in _FIELD_SETS.items():
            if keys >= fields:
                extra = sorted(keys - fields)
                raise ScenarioFileError(f"unknown key '{extra[0]}' for {candidate.__name__}")
            if keys < fields:
                missing = sorted(fields - keys)
                raise ScenarioFileError(f"missing key '{missing[0]}' for {candidate.__name__}")
        raise ScenarioFileError(f"keys {sorted(keys)} match no scenario type")
    kwargs = {}
    for key, value in data.items():
        if key in _LIST_FIELDS:
            kwargs[key] = _coerce_number_list(key, value)
        else:
            kwargs[key] = _coerce_number(key, value)
    return validate(cls(**kwargs))


def load_scenario(source) -> Scenario:
    """Load a scenario from a dict, a JSON string, or a file path."""
    if isinstance(source, dict):
        return scenario_from_dict(source)
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ScenarioFileError(f"cannot read scenario file {source}: {exc}") from exc
    else:
        text = str(source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"invalid JSON in scenario: {exc}") from exc
    return scenario_from_dict(data)


def scenario_to_dict(s: Scenario) -> dict:
    """Flat mapping suitable for JSON echo; inverse of scenario_from_dict."""
    d = asdict(s)
    for key in _LIST_FIELDS:
        if key in d:
            d[key] = list(d[key])
    return d
