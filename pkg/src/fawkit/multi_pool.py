"""Rewards for infiltrating several pools at once, and the split optimizer.

The attacker keeps at most one withheld block per target pool, so a round
can end in a fork of up to n+1 branches. The n-pool reward sums, for every
target pool i and every branch count k, over all ordered ways the attacker
could have found blocks in k distinct pools (pool i among them):

    R_a = (1-T)a/(1-Ta)
        + sum_i  ta_i/(b_i+ta_i) * ( b_i/(1-Ta)
            + sum_k (1-a-B) * sum_seq  c/k * prod_t  ta_seq[t] / (1 - cum_ta) )

with T = sum(tau), B = sum(beta), ta_i = tau_i * a, and cum_ta the running
sum of ta over the sequence prefix including position t. Each product term
is exactly the probability of that find order followed by an external find;
c/k is one branch's win probability in a (k+1)-branch fork. Enumeration is
direct (depth-first, reusing prefix products); pool counts are capped at
MAX_POOLS because the sequence count grows factorially.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConstraintViolated, DegenerateInput
from .optimize import grid_golden_max
from .scenarios import MultiPoolScenario, rer, validate_multi

# Approximate network power distribution used throughout the worked examples:
# open pools plus an "Unknown" remainder of closed pools and solo miners.
TABLE2_POWERS = {
    "Unknown": 0.30,
    "F2Pool": 0.20,
    "AntPool": 0.20,
    "BTCC Pool": 0.10,
    "BW.com": 0.10,
    "BitFury": 0.10,
}

POOL_PRESETS = {"table2": TABLE2_POWERS}


def preset_attack(name: str = "table2", attacker: str = "F2Pool"):
    """(attacker power, target pool powers) for a named distribution preset.

    Targets are the open pools other than the attacker; the Unknown share is
    closed pools and solo miners, which cannot be joined.
    """
    try:
        powers = POOL_PRESETS[name]
    except KeyError:
        raise ConstraintViolated(f"unknown pool preset {name!r}") from None
    if attacker not in powers or attacker == "Unknown":
        raise ConstraintViolated(f"{attacker!r} is not an open pool in preset {name!r}")
    targets = tuple(
        p for owner, p in powers.items() if owner not in ("Unknown", attacker)
    )
    return powers[attacker], targets


def reward_two_pools(alpha, beta1, beta2, tau1, tau2,
                     c1_two, c2_two, c1_three, c2_three) -> float:
    """Attacker reward against exactly two pools with free win probabilities.

    ``ci_two`` is the chance pool i's withheld block wins a two-branch fork;
    ``ci_three`` the three-branch analogue (c1_three + c2_three <= 1). The
    c/k model is the special case ci_two = c, ci_three = c/2.
    """
    for name, v in (("tau1", tau1), ("tau2", tau2), ("c1_two", c1_two),
                    ("c2_two", c2_two), ("c1_three", c1_three), ("c2_three", c2_three)):
        if not 0.0 <= v <= 1.0:
            raise ConstraintViolated(f"{name}={v!r} outside [0, 1]")
    if tau1 + tau2 > 1.0 + 1e-15:
        raise ConstraintViolated(f"tau1 + tau2 = {tau1 + tau2!r} exceeds 1")
    if alpha + beta1 + beta2 > 1.0 + 1e-15:
        raise ConstraintViolated("alpha + beta1 + beta2 exceeds 1")
    if c1_three + c2_three > 1.0 + 1e-15:
        raise ConstraintViolated("c1_three + c2_three exceeds 1")

    ta1, ta2 = tau1 * alpha, tau2 * alpha
    total_ta = ta1 + ta2
    ext = 1.0 - alpha - beta1 - beta2
    r = (1.0 - tau1 - tau2) * alpha / (1.0 - total_ta)
    # both-withheld term: find in pool j first, then the other, then external
    cross = 0.0
    if ta1 > 0.0 and ta2 > 0.0:
        cross = (ta1 * ta2 / (1.0 - ta1) + ta2 * ta1 / (1.0 - ta2)) \
            * ext / (1.0 - total_ta)
    for b, ta, c2br, c3br in ((beta1, ta1, c1_two, c1_three),
                              (beta2, ta2, c2_two, c2_three)):
        if b + ta <= 0.0:
            continue
        pool_pot = b / (1.0 - total_ta)
        if ta > 0.0:
            pool_pot += c2br * ta * ext / (1.0 - ta)
        pool_pot += c3br * cross
        r += ta / (b + ta) * pool_pot
    return r


def _fork_pots(alpha, betas, taus, c):
    """Per-pool expected fork income (before the in-pool share factor)."""
    n = len(betas)
    ta = [t * alpha for t in taus]
    ext = 1.0 - alpha - sum(betas)
    pots = [0.0] * n
    seq: list[int] = []
    used = [False] * n

    def descend(prefix_prod, prefix_sum):
        for j in range(n):
            if used[j] or ta[j] <= 0.0:
                continue
            s = prefix_sum + ta[j]
            p = prefix_prod * ta[j] / (1.0 - s)
            seq.append(j)
            used[j] = True
            w = (c / len(seq)) * ext * p
            for i in seq:
                pots[i] += w
            descend(p, s)
            used[j] = False
            seq.pop()

    descend(1.0, 0.0)
    return pots


def reward_npool(s: MultiPoolScenario) -> float:
    """Attacker reward against n pools under the c/k branch-win model.

    Collapses to the single-pool formula at n=1 and to reward_two_pools with
    (c, c/2) at n=2.
    """
    validate_multi(s)
    total_tau = sum(s.taus)
    total_ta = total_tau * s.alpha
    r = (1.0 - total_tau) * s.alpha / (1.0 - total_ta)
    pots = _fork_pots(s.alpha, s.betas, s.taus, s.c)
    for b, t, pot in zip(s.betas, s.taus, pots):
        ta = t * s.alpha
        if b + ta <= 0.0:
            continue
        r += ta / (b + ta) * (b / (1.0 - total_ta) + pot)
    return r


@dataclass(frozen=True)
class AllocationResult:
    """Optimized infiltration split. ``reward`` re-evaluates at ``taus``."""

    taus: tuple[float, ...]
    reward: float
    rer_pct: float
    evaluations: int
    converged: bool


def optimize_allocation(alpha, betas, c, budget: float = 1.0,
                        reward_tol: float = 1e-8, max_sweeps: int = 200,
                        coord_grid: int = 200, xtol: float = 1e-10) -> AllocationResult:
    """Maximize reward_npool over the simplex {tau_i >= 0, sum <= budget}.

    Projected coordinate ascent: pools with equal power are tied to one
    shared variable (the optimum is symmetric across them), each coordinate
    is solved by a coarse scan plus golden-section, and sweeps repeat until
    the reward improves by less than ``reward_tol``. Exhausting
    ``max_sweeps`` returns the best point found with converged=False.
    """
    betas = tuple(float(b) for b in betas)
    if any(b <= 0.0 for b in betas):
        raise DegenerateInput("every target pool needs beta > 0")
    if not 0.0 < budget <= 1.0:
        raise ConstraintViolated(f"budget={budget!r} outside (0, 1]")
    validate_multi(MultiPoolScenario(alpha, betas, (0.0,) * len(betas), c))

    groups: dict[float, list[int]] = {}
    for i, b in enumerate(betas):
        groups.setdefault(b, []).append(i)
    members = list(groups.values())
    shared = [0.0] * len(members)
    evals = 0

    def taus_of(values):
        taus = [0.0] * len(betas)
        for g, idxs in enumerate(members):
            for i in idxs:
                taus[i] = values[g]
        return tuple(taus)

    def objective():
        nonlocal evals
        evals += 1
        return reward_npool(MultiPoolScenario(alpha, betas, taus_of(shared), c))

    current = objective()
    converged = False
    for _ in range(max_sweeps):
        previous = current
        for g, idxs in enumerate(members):
            size = len(idxs)
            others = sum(len(members[h]) * shared[h] for h in range(len(members)) if h != g)
            hi = min(1.0, max((budget - others) / size, 0.0))

            def coord(x, g=g):
                shared[g] = float(x)
                return objective()

            x_star, _ = grid_golden_max(coord, 0.0, hi, n_grid=coord_grid,
                                        xtol=xtol, vectorized=False)
            shared[g] = x_star
            current = objective()
        if abs(current - previous) < reward_tol:
            converged = True
            break

    taus = taus_of(shared)
    reward = reward_npool(MultiPoolScenario(alpha, betas, taus, c))
    return AllocationResult(
        taus=taus,
        reward=reward,
        rer_pct=rer(reward, alpha),
        evaluations=evals,
        converged=converged,
    )


def fixed_tau_reward_mismatched_c(alpha, betas, taus_planned, c_actual) -> float:
    """Reward when the split was planned for one c but another is realized.

    Evaluates the n-pool reward at the planned tau vector with the actual c
    substituted; planning with c_assumed = c_actual reproduces the optimizer
    reward exactly.
    """
    return reward_npool(MultiPoolScenario(alpha, tuple(betas), tuple(taus_planned), c_actual))
