"""Round-level Monte Carlo engine for all three attack scenarios.

Race model: within a round, successive block finders are drawn
categorically in proportion to raw hash power. Infiltration finds are
withheld (the first per target pool is kept, later duplicates discarded)
and do not end the round; any non-infiltration find does. If the ending
find is external while withheld blocks exist, the round ends in a fork,
resolved by one categorical draw: each of the k attacker branches wins
with probability c/k (or the scenario's per-branch probabilities in the
two-pool game), the external branch otherwise. Exactly one unit of reward
is distributed per round.

The attacker's cut of a pool win is credited as the deterministic share
expectation ta/(b+ta) rather than sampling share submissions; submission
counts concentrate tightly around power fractions, so this removes
variance without bias.

Reproducibility: rounds are partitioned into fixed-size blocks and block
``i`` draws from ``Philox`` seeded with ``SeedSequence((seed, i))``. The
worker count only distributes whole blocks across threads and merging is
done in block order, so outcomes are bitwise identical for any worker
count given the same (seed, rounds, scenario).
"""

from __future__ import annotations

import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InsufficientSamples
from .scenarios import (
    GameScenario,
    MultiPoolScenario,
    Scenario,
    SinglePoolScenario,
    scenario_to_dict,
    validate,
)

SCHEMA_VERSION = 1
BLOCK_ROUNDS = 1 << 18
RNG_ALGORITHM = "philox4x64"

CASE_TAGS = (
    "A_innocent_win",
    "B_pool_honest_win",
    "C_fork_from_withheld",
    "D_multi_branch_fork",
    "E_external_win_no_withheld",
)

_FORK_TAGS = ("C_fork_from_withheld", "D_multi_branch_fork")


@dataclass(frozen=True)
class RoundCase:
    """How one round ended: the per-round vocabulary behind ``case_counts``.

    The engine aggregates counts instead of materializing one of these per
    round; the type pins the classification rules down for consumers. Fork
    cases carry the total branch count (withheld blocks plus the external
    one); the other cases have none.
    """

    tag: str
    fork_branches: int = 0
    winner: str = ""

    def __post_init__(self):
        if self.tag not in CASE_TAGS:
            raise ValueError(f"unknown case tag {self.tag!r}")
        if self.tag in _FORK_TAGS:
            if self.fork_branches < 2:
                raise ValueError(f"{self.tag} needs at least 2 fork branches")
        elif self.fork_branches != 0:
            raise ValueError(f"{self.tag} cannot carry fork branches")


@dataclass(frozen=True)
class SimConfig:
    """One simulation request; per-worker substreams derive from the seed."""

    rounds: int
    seed: int
    scenario: Scenario
    workers: int = 1
    block_rounds: int = BLOCK_ROUNDS

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.block_rounds < 1:
            raise ValueError("block_rounds must be >= 1")


@dataclass
class SimOutcome:
    """Accumulated per-actor rewards, case counts, and error estimates.

    ``reward_sums``/``reward_sumsq`` hold per-round sums, so means are
    sums/rounds and standard errors follow from the usual sample variance.
    For game runs the pool actors are net takes (they sum with external to
    one per round); the mutually-recursive pot payoffs appear under
    ``gross_reward_sums``.
    """

    kind: str
    rounds_run: int
    case_counts: dict
    reward_sums: dict
    reward_sumsq: dict
    std_error: dict
    rng: dict
    config: dict
    extras: dict = field(default_factory=dict)
    gross_reward_sums: dict | None = None
    gross_std_error: dict | None = None

    @property
    def reward_means(self) -> dict:
        return {k: v / self.rounds_run for k, v in self.reward_sums.items()}

    def to_json_dict(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "config": self.config,
            "rng": self.rng,
            "rounds_run": self.rounds_run,
            "case_counts": self.case_counts,
            "reward_sums": self.reward_sums,
            "reward_means": self.reward_means,
            "std_error": self.std_error,
            "extras": self.extras,
        }
        if self.gross_reward_sums is not None:
            doc["gross_reward_means"] = {
                k: v / self.rounds_run for k, v in self.gross_reward_sums.items()
            }
            doc["gross_std_error"] = self.gross_std_error
        return doc

    def to_json(self, dest=None, indent=2) -> str:
        text = json.dumps(self.to_json_dict(), indent=indent, sort_keys=False)
        if dest is not None:
            Path(dest).write_text(text + "\n")
        return text

    def csv_row(self):
        """Flat summary row for sweep aggregation: (header, values)."""
        header = ["kind", "rounds", "seed"]
        values = [self.kind, self.rounds_run, self.config.get("seed")]
        for actor in sorted(self.reward_sums):
            header += [f"{actor}_mean", f"{actor}_se"]
            values += [self.reward_sums[actor] / self.rounds_run, self.std_error[actor]]
        for tag in CASE_TAGS:
            header.append(tag)
            values.append(self.case_counts.get(tag, 0))
        return header, values


def _stderr(total: float, total_sq: float, n: int) -> float:
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / (n - 1)
    return float(np.sqrt(var / n))


def estimate_error(outcome: SimOutcome) -> dict:
    """Per-actor standard error of the mean, treating rounds as i.i.d."""
    if outcome.rounds_run < 2:
        raise InsufficientSamples("need at least 2 rounds for a standard error")
    n = outcome.rounds_run
    return {
        actor: _stderr(outcome.reward_sums[actor], outcome.reward_sumsq[actor], n)
        for actor in outcome.reward_sums
    }


def _block_rng(seed: int, block_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, block_index))))


def _run_blocks(cfg: SimConfig, block_fn):
    """Run block_fn(rng, n) over all blocks, merging results in block order."""
    sizes = []
    remaining = cfg.rounds
    while remaining > 0:
        n = min(cfg.block_rounds, remaining)
        sizes.append(n)
        remaining -= n

    def one(i):
        return block_fn(_block_rng(cfg.seed, i), sizes[i])

    if cfg.workers == 1 or len(sizes) == 1:
        return [one(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(one, range(len(sizes))))


def _race(rng, n, cum, n_infil):
    """Vectorized draw-until-ending-find loop for one block of n rounds.

    ``cum`` is the inclusive cumulative power over categories ordered as
    [infiltration_0..n_infil-1, enders...], with cum[-1] forced to 1.
    Returns (terminal category index offset past infiltration, withheld
    boolean matrix of shape (n, n_infil)).
    """
    withheld = np.zeros((n, n_infil), dtype=bool)
    terminal = np.full(n, -1, dtype=np.int8)
    active = np.arange(n)
    while active.size:
        cat = np.searchsorted(cum, rng.random(active.size), side="right")
        infil = cat < n_infil
        idx_inf = active[infil]
        withheld[idx_inf, cat[infil]] = True
        ended = active[~infil]
        terminal[ended] = (cat[~infil] - n_infil).astype(np.int8)
        active = idx_inf
    return terminal, withheld


def _power_cum(powers) -> np.ndarray:
    cum = np.cumsum(np.asarray(powers, dtype=float))
    cum[-1] = 1.0  # guard against cumulative rounding at the top boundary
    return cum


def simulate_single(cfg: SimConfig) -> SimOutcome:
    """Attack on one pool. Ending finds: innocent, pool-honest, external."""
    s = cfg.scenario
    if not isinstance(s, SinglePoolScenario):
        raise TypeError("simulate_single needs a SinglePoolScenario")
    validate(s)
    _warn_small(cfg.rounds)
    ta = s.tau * s.alpha
    share = ta / (s.beta + ta) if s.beta + ta > 0.0 else 0.0
    cum = _power_cum([ta, (1.0 - s.tau) * s.alpha, s.beta, 1.0 - s.alpha - s.beta])

    def block(rng, n):
        terminal, withheld = _race(rng, n, cum, 1)
        wh = withheld[:, 0]
        n_a = int((terminal == 0).sum())
        n_b = int((terminal == 1).sum())
        ext = terminal == 2
        n_c = int((ext & wh).sum())
        n_e = int((ext & ~wh).sum())
        fork_wins = int((rng.random(n_c) < s.c).sum()) if n_c else 0
        return n_a, n_b, n_c, n_e, fork_wins

    parts = _run_blocks(cfg, block)
    n_a = sum(p[0] for p in parts)
    n_b = sum(p[1] for p in parts)
    n_c = sum(p[2] for p in parts)
    n_e = sum(p[3] for p in parts)
    fork_wins = sum(p[4] for p in parts)

    pool_wins = n_b + fork_wins
    n = cfg.rounds
    sums = {
        "attacker": n_a + pool_wins * share,
        "pool": pool_wins * (1.0 - share),
        "external": float(n - n_a - pool_wins),
    }
    sumsq = {
        "attacker": n_a + pool_wins * share * share,
        "pool": pool_wins * (1.0 - share) ** 2,
        "external": float(n - n_a - pool_wins),
    }
    cases = {
        "A_innocent_win": n_a,
        "B_pool_honest_win": n_b,
        "C_fork_from_withheld": n_c,
        "D_multi_branch_fork": 0,
        "E_external_win_no_withheld": n_e,
    }
    return _finish(cfg, "single", cases, sums, sumsq, extras={"fork_wins": fork_wins})


def simulate_multi(cfg: SimConfig) -> SimOutcome:
    """Attack on n pools; a k-branch fork gives each branch c/k."""
    s = cfg.scenario
    if not isinstance(s, MultiPoolScenario):
        raise TypeError("simulate_multi needs a MultiPoolScenario")
    validate(s)
    _warn_small(cfg.rounds)
    n_pools = len(s.betas)
    ta = np.array([t * s.alpha for t in s.taus])
    betas = np.asarray(s.betas, dtype=float)
    total_tau = float(sum(s.taus))
    ext_power = 1.0 - s.alpha - float(betas.sum())
    cum = _power_cum(list(ta) + [(1.0 - total_tau) * s.alpha] + list(betas) + [ext_power])
    denom = betas + ta
    shares = np.where(denom > 0.0, ta / np.where(denom > 0.0, denom, 1.0), 0.0)

    def block(rng, n):
        terminal, withheld = _race(rng, n, cum, n_pools)
        n_a = int((terminal == 0).sum())
        n_b = np.array([int((terminal == 1 + i).sum()) for i in range(n_pools)])
        ext_rows = np.nonzero(terminal == n_pools + 1)[0]
        k = withheld[ext_rows].sum(axis=1)
        n_e = int((k == 0).sum())
        n_c = int((k == 1).sum())
        n_d = int((k >= 2).sum())
        fork_wins = np.zeros(n_pools, dtype=np.int64)
        fork_rows = ext_rows[k >= 1]
        kf = k[k >= 1]
        if fork_rows.size:
            u = rng.random(fork_rows.size)
            won = u < s.c if s.c > 0.0 else np.zeros(fork_rows.size, dtype=bool)
            if won.any():
                # u < c uniform, so u/c picks one of the k branches uniformly
                j = np.minimum((u[won] / s.c * kf[won]).astype(np.int64), kf[won] - 1)
                wh = withheld[fork_rows[won]]
                rank = np.cumsum(wh, axis=1) - 1
                winner_pool = (wh & (rank == j[:, None])).argmax(axis=1)
                fork_wins += np.bincount(winner_pool, minlength=n_pools)
        return n_a, n_b, n_c, n_d, n_e, fork_wins

    parts = _run_blocks(cfg, block)
    n_a = sum(p[0] for p in parts)
    n_b = sum((p[1] for p in parts), np.zeros(n_pools, dtype=np.int64))
    n_c = sum(p[2] for p in parts)
    n_d = sum(p[3] for p in parts)
    n_e = sum(p[4] for p in parts)
    fork_wins = sum((p[5] for p in parts), np.zeros(n_pools, dtype=np.int64))

    wins = n_b + fork_wins
    n = cfg.rounds
    sums = {"attacker": n_a + float((wins * shares).sum())}
    sumsq = {"attacker": n_a + float((wins * shares * shares).sum())}
    for i in range(n_pools):
        sums[f"pool_{i + 1}"] = float(wins[i] * (1.0 - shares[i]))
        sumsq[f"pool_{i + 1}"] = float(wins[i] * (1.0 - shares[i]) ** 2)
    ext_total = float(n - n_a - int(wins.sum()))
    sums["external"] = ext_total
    sumsq["external"] = ext_total
    cases = {
        "A_innocent_win": n_a,
        "B_pool_honest_win": int(n_b.sum()),
        "C_fork_from_withheld": n_c,
        "D_multi_branch_fork": n_d,
        "E_external_win_no_withheld": n_e,
    }
    extras = {"fork_wins_per_pool": fork_wins.tolist(),
              "honest_wins_per_pool": n_b.tolist()}
    return _finish(cfg, "multi", cases, sums, sumsq, extras=extras)


def simulate_game(cfg: SimConfig) -> SimOutcome:
    """Two pools infiltrating each other.

    Hosting wins are tallied per round; each round's pot then follows the
    exact payout circuit (the infiltrator's share of the host pool's pot,
    which includes the share flowing back the other way), and the pool
    actors record net takes so one reward unit is distributed per round.
    """
    s = cfg.scenario
    if not isinstance(s, GameScenario):
        raise TypeError("simulate_game needs a GameScenario")
    validate(s)
    _warn_small(cfg.rounds)
    ext_power = 1.0 - s.alpha1 - s.alpha2
    cum = _power_cum([s.f1, s.f2, s.alpha1 - s.f1, s.alpha2 - s.f2, ext_power])

    def block(rng, n):
        # infiltration categories: 0 = pool1's miner inside pool2, 1 = vice versa
        terminal, withheld = _race(rng, n, cum, 2)
        w1 = withheld[:, 0]
        w2 = withheld[:, 1]
        n_a1 = int((terminal == 0).sum())
        n_a2 = int((terminal == 1).sum())
        ext = terminal == 2
        host1_fork = host2_fork = 0
        only1 = np.nonzero(ext & w1 & ~w2)[0]
        if only1.size:
            host2_fork += int((rng.random(only1.size) < s.c1).sum())
        only2 = np.nonzero(ext & ~w1 & w2)[0]
        if only2.size:
            host1_fork += int((rng.random(only2.size) < s.c2).sum())
        both = np.nonzero(ext & w1 & w2)[0]
        if both.size:
            u = rng.random(both.size)
            host2_fork += int((u < s.c1p).sum())
            host1_fork += int(((u >= s.c1p) & (u < s.c1p + s.c2p)).sum())
        n_c = int(only1.size + only2.size)
        n_d = int(both.size)
        n_e = int((ext & ~w1 & ~w2).sum())
        return n_a1, n_a2, n_c, n_d, n_e, host1_fork, host2_fork

    parts = _run_blocks(cfg, block)
    n_a1 = sum(p[0] for p in parts)
    n_a2 = sum(p[1] for p in parts)
    n_c = sum(p[2] for p in parts)
    n_d = sum(p[3] for p in parts)
    n_e = sum(p[4] for p in parts)
    host1 = n_a1 + sum(p[5] for p in parts)
    host2 = n_a2 + sum(p[6] for p in parts)

    k1 = s.f1 / (s.alpha2 + s.f1)
    k2 = s.f2 / (s.alpha1 + s.f2)
    det = 1.0 - k1 * k2
    # per-round pots and nets by hosting outcome
    pot1_h1, pot2_h1 = 1.0 / det, k2 / det
    pot1_h2, pot2_h2 = k1 / det, 1.0 / det
    net1_h1, net2_h1 = pot1_h1 * (1.0 - k2), pot2_h1 * (1.0 - k1)
    net1_h2, net2_h2 = pot1_h2 * (1.0 - k2), pot2_h2 * (1.0 - k1)

    n = cfg.rounds
    ext_wins = n - host1 - host2
    sums = {
        "pool1": host1 * net1_h1 + host2 * net1_h2,
        "pool2": host1 * net2_h1 + host2 * net2_h2,
        "external": float(ext_wins),
    }
    sumsq = {
        "pool1": host1 * net1_h1 ** 2 + host2 * net1_h2 ** 2,
        "pool2": host1 * net2_h1 ** 2 + host2 * net2_h2 ** 2,
        "external": float(ext_wins),
    }
    gross_sums = {
        "pool1": host1 * pot1_h1 + host2 * pot1_h2,
        "pool2": host1 * pot2_h1 + host2 * pot2_h2,
    }
    gross_sumsq = {
        "pool1": host1 * pot1_h1 ** 2 + host2 * pot1_h2 ** 2,
        "pool2": host1 * pot2_h1 ** 2 + host2 * pot2_h2 ** 2,
    }
    cases = {
        "A_innocent_win": n_a1 + n_a2,
        "B_pool_honest_win": 0,
        "C_fork_from_withheld": n_c,
        "D_multi_branch_fork": n_d,
        "E_external_win_no_withheld": n_e,
    }
    extras = {"hosting_wins": {"pool1": host1, "pool2": host2},
              "innocent_wins": {"pool1": n_a1, "pool2": n_a2}}
    out = _finish(cfg, "game", cases, sums, sumsq, extras=extras)
    out.gross_reward_sums = gross_sums
    out.gross_std_error = {
        actor: _stderr(gross_sums[actor], gross_sumsq[actor], n) if n > 1 else 0.0
        for actor in gross_sums
    }
    return out


def simulate(cfg: SimConfig) -> SimOutcome:
    """Dispatch on the scenario type."""
    if isinstance(cfg.scenario, SinglePoolScenario):
        return simulate_single(cfg)
    if isinstance(cfg.scenario, MultiPoolScenario):
        return simulate_multi(cfg)
    if isinstance(cfg.scenario, GameScenario):
        return simulate_game(cfg)
    raise TypeError(f"not a scenario: {cfg.scenario!r}")


def _warn_small(rounds: int):
    if rounds < 100:
        warnings.warn("fewer than 100 rounds; statistics will be degenerate",
                      UserWarning, stacklevel=3)


def _finish(cfg, kind, cases, sums, sumsq, extras) -> SimOutcome:
    n = cfg.rounds
    std_error = {
        actor: _stderr(sums[actor], sumsq[actor], n) if n > 1 else 0.0
        for actor in sums
    }
    return SimOutcome(
        kind=kind,
        rounds_run=n,
        case_counts=cases,
        reward_sums=sums,
        reward_sumsq=sumsq,
        std_error=std_error,
        rng={
            "algorithm": RNG_ALGORITHM,
            "seed": int(cfg.seed),
            "block_rounds": cfg.block_rounds,
            "substream": "SeedSequence((seed, block_index))",
        },
        config={
            "rounds": cfg.rounds,
            "seed": int(cfg.seed),
            "workers": cfg.workers,
            "scenario": scenario_to_dict(cfg.scenario),
        },
        extras=extras,
    )
