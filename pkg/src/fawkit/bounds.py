"""Bounds on the fork-win probability and countermeasure economics.

The fork-win probability c is bracketed by network structure: an external
honest miner who found the competing block always keeps his own, so even
with perfect propagation c is capped by how concentrated external honest
power is, while a rational victim manager who prefers his own pool's block
floors c at alpha + beta.

Several expressions here substitute the infiltration fraction tau where the
source derivations print an undefined gamma; every function doing so says
so in its docstring and carries GAMMA_AS_TAU_NOTE as ``substitution_note``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import (
    ConstraintViolated,
    InconsistentDistribution,
    NegativeEffectiveMinersWarning,
)
from .scenarios import SinglePoolScenario, validate_single

GAMMA_AS_TAU_NOTE = (
    "expelled-identity formulas are evaluated with the infiltration fraction "
    "tau substituted for their printed gamma"
)

_TOTAL_TOL = 1e-9


@dataclass(frozen=True)
class HonestPowerDistribution:
    """External honest power split into named shares plus an atomized rest.

    ``atomized_remainder`` models power spread over arbitrarily many tiny
    miners; it counts toward the total but contributes zero to the
    concentration sum of squares.
    """

    shares: tuple[float, ...]
    atomized_remainder: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "shares", tuple(float(x) for x in self.shares))
        if any(x < 0.0 for x in self.shares) or self.atomized_remainder < 0.0:
            raise ConstraintViolated("honest shares must be nonnegative")

    @property
    def total(self) -> float:
        return sum(self.shares) + self.atomized_remainder

    @property
    def square_sum(self) -> float:
        return sum(x * x for x in self.shares)


def _require_total(dist: HonestPowerDistribution, expected: float, what: str):
    if abs(dist.total - expected) > _TOTAL_TOL:
        raise InconsistentDistribution(
            f"honest shares sum to {dist.total!r}, expected {what} = {expected!r}"
        )


def c_max_single(alpha: float, beta: float, dist: HonestPowerDistribution) -> float:
    """Upper bound on c from external honest power concentration.

        c_max = 1 - sum(o_j^2) / (1 - alpha - beta)

    The honest shares must sum to 1 - alpha - beta. For a two-pool game,
    pass the pool powers as alpha and beta; the denominator is then one
    minus the participants' total. Fully atomized honest power gives 1; a
    single honest node owning everything gives alpha + beta.
    """
    external = 1.0 - alpha - beta
    if external <= 0.0:
        raise ConstraintViolated("no external honest power: alpha + beta >= 1")
    _require_total(dist, external, "1 - alpha - beta")
    return 1.0 - dist.square_sum / external


def c_min_rational(alpha: float, beta: float) -> float:
    """Lower bound on c when the victim manager is rational: alpha + beta."""
    return alpha + beta


def c_from_gamma(gamma: float, alpha: float, beta: float) -> float:
    """Map the honest-split fraction gamma to c: gamma*(1-a-b) + a + b.

    gamma is the fraction of external honest power that ends up mining on
    the withheld branch; gamma = 0 reproduces c_min_rational and gamma = 1
    gives 1.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ConstraintViolated(f"gamma={gamma!r} outside [0, 1]")
    return gamma * (1.0 - alpha - beta) + alpha + beta


def selfish_mining_threshold(gamma: float) -> float:
    """Minimum power for profitable selfish mining: (1-gamma)/(3-2*gamma).

    Strictly decreasing from 1/3 at gamma = 0 to 0 at gamma = 1.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ConstraintViolated(f"gamma={gamma!r} outside [0, 1]")
    return (1.0 - gamma) / (3.0 - 2.0 * gamma)


def gamma_upper_bound(dist: HonestPowerDistribution, alpha: float) -> float:
    """Loose cap on the selfish miner's gamma: 1 - sum(o_i^2).

    This is the weakest link of the chain of inequalities and therefore the
    safest cap; the honest shares must sum to 1 - alpha.
    """
    _require_total(dist, 1.0 - alpha, "1 - alpha")
    return 1.0 - dist.square_sum


def expelled_block_count(alpha, beta, tau, c) -> float:
    """Expected stale withheld blocks per pool win, for expulsion analyses.

        d = (1-c) * ta * (1-a-b) / (b + c * ta * (1-a-b)),  ta = tau*alpha

    Printed with gamma in the source derivation; evaluated with tau.
    """
    ta = tau * alpha
    ext = 1.0 - alpha - beta
    return (1.0 - c) * ta * ext / (beta + c * ta * ext)


expelled_block_count.substitution_note = GAMMA_AS_TAU_NOTE


@dataclass(frozen=True)
class DetectionParams:
    """Expulsion-countermeasure inputs: identity count and stale-block rate."""

    L: int
    d: float
    gamma_tau: float  # the substituted infiltration fraction

    @classmethod
    def for_scenario(cls, alpha, beta, tau, c, L):
        return cls(L=L, d=expelled_block_count(alpha, beta, tau, c), gamma_tau=tau)


def _effective(count: float, what: str) -> float:
    if count < 0.0:
        warnings.warn(
            f"{what} went negative and was floored at 0; expulsions outpace identities",
            NegativeEffectiveMinersWarning,
            stacklevel=3,
        )
        return 0.0
    return count


def detection_resilient_reward(alpha, beta, tau, c, L: int) -> float:
    """Attacker reward floor when stale submissions get identities expelled.

    The attacker splits infiltration across L identities; each pool win
    costs on average d of them their accrued share (and one more in the
    fork-win term, where the winning identity is the expelled one):

        (1-t)a/(1-ta) + b/(1-ta) * (L-d)ta / (Lb + (L-d)ta)
                      + c*ta*(1-a-b)/(1-ta) * (L-d-1)ta / (Lb + (L-d-1)ta)

    Nondecreasing in L and converging to the unguarded reward as L grows.
    Negative effective-identity counts are floored at zero with a warning.
    Evaluated with tau substituted for the printed gamma.
    """
    if L < 1:
        raise ConstraintViolated(f"L={L!r} must be >= 1")
    validate_single(SinglePoolScenario(alpha, beta, tau, c))
    ta = tau * alpha
    ext = 1.0 - alpha - beta
    d = expelled_block_count(alpha, beta, tau, c)
    reward = (1.0 - tau) * alpha / (1.0 - ta)
    eff_share = _effective(L - d, "L - d")
    if beta + ta > 0.0 and L * beta + eff_share * ta > 0.0:
        reward += beta / (1.0 - ta) * (eff_share * ta) / (L * beta + eff_share * ta)
    eff_fork = _effective(L - d - 1.0, "L - d - 1")
    if L * beta + eff_fork * ta > 0.0:
        reward += c * ta * ext / (1.0 - ta) * (eff_fork * ta) / (L * beta + eff_fork * ta)
    return reward


detection_resilient_reward.substitution_note = GAMMA_AS_TAU_NOTE


def honeypot_bwh_bound(alpha, beta, tau, L: int) -> float:
    """Withholding-attacker reward floor under a honeypot trap.

    Same identity-splitting argument with d = ta*(1-ta)/b and no fork term:

        (1-t)a/(1-ta) + b/(1-ta) * (L-d)ta / (Lb + (L-d)ta)

    Converges to the plain withholding reward as L grows; tau = 0 gives
    alpha. Evaluated with tau substituted for the printed gamma.
    """
    if L < 1:
        raise ConstraintViolated(f"L={L!r} must be >= 1")
    validate_single(SinglePoolScenario(alpha, beta, tau, 0.0))
    ta = tau * alpha
    reward = (1.0 - tau) * alpha / (1.0 - ta)
    if ta == 0.0:
        return reward  # == alpha
    d = ta * (1.0 - ta) / beta if beta > 0.0 else math.inf
    eff = _effective(L - d, "L - d")
    if L * beta + eff * ta > 0.0:
        reward += beta / (1.0 - ta) * (eff * ta) / (L * beta + eff * ta)
    return reward


honeypot_bwh_bound.substitution_note = GAMMA_AS_TAU_NOTE


def bonus_scheme_reward(alpha, beta, tau, c, t: float) -> float:
    """Attacker reward when the block finder keeps a bonus fraction t.

    The pool pays t of each block reward to the miner who produced the
    winning block and splits the rest proportionally:

        (1-tau)a/(1-ta) + b/(1-ta) * (1-t) * s
            + c*ta*(1-a-b)/(1-ta) * (t + (1-t) * s),   s = ta/(b+ta)

    At t = 0 this is exactly the unguarded reward. (The final share factor
    is s; an alternative reading with denominator b + tau*b fails that
    collapse and is rejected.)
    """
    if not 0.0 <= t <= 1.0:
        raise ConstraintViolated(f"t={t!r} outside [0, 1]")
    validate_single(SinglePoolScenario(alpha, beta, tau, c))
    ta = tau * alpha
    ext = 1.0 - alpha - beta
    share = ta / (beta + ta) if beta + ta > 0.0 else 0.0
    return (
        (1.0 - tau) * alpha / (1.0 - ta)
        + beta / (1.0 - ta) * (1.0 - t) * share
        + c * ta * ext / (1.0 - ta) * (t + (1.0 - t) * share)
    )


def safe_bonus_threshold(pool_power: float, c_max: float) -> float:
    """Bonus fraction guaranteeing attackers under 0.5 power lose out.

        t = 1 / (2 * (1 - c_max * (1 - P)))

    P is the pool's current observed power (honest part plus infiltration).
    Values above 1 are returned as-is: they mean no feasible bonus fraction
    exists, which is itself the analytical result (large c defeats this
    defense for small pools). c_max = 0 gives 0.5.
    """
    if not 0.0 < pool_power <= 1.0:
        raise ConstraintViolated(f"pool_power={pool_power!r} outside (0, 1]")
    if not 0.0 <= c_max <= 1.0:
        raise ConstraintViolated(f"c_max={c_max!r} outside [0, 1]")
    return 1.0 / (2.0 * (1.0 - c_max * (1.0 - pool_power)))


def bonus_threshold_feasible(t: float) -> bool:
    """A bonus fraction is only implementable when it does not exceed 1."""
    return t <= 1.0
