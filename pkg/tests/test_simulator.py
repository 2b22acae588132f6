import math
import warnings

import numpy as np
import pytest

from fawkit.errors import InsufficientSamples, RationalFloorWarning
from fawkit.game import game_payoffs, solve_equilibrium
from fawkit.multi_pool import optimize_allocation, preset_attack
from fawkit.scenarios import GameScenario, MultiPoolScenario, SinglePoolScenario
from fawkit.simulator import (
    RoundCase,
    SimConfig,
    SimOutcome,
    estimate_error,
    simulate,
    simulate_game,
    simulate_multi,
    simulate_single,
)
from fawkit.single_pool import reward_single

warnings.simplefilter("ignore", RationalFloorWarning)

SINGLE = SinglePoolScenario(0.2, 0.2, 0.44151844, 1.0)


def test_bitwise_reproducible():
    cfg = SimConfig(rounds=200_000, seed=99, scenario=SINGLE)
    a = simulate(cfg).to_json_dict()
    b = simulate(cfg).to_json_dict()
    assert a == b


def test_worker_count_only_partitions():
    base = SimConfig(rounds=600_000, seed=7, scenario=SINGLE, workers=1,
                     block_rounds=1 << 16)
    threaded = SimConfig(rounds=600_000, seed=7, scenario=SINGLE, workers=4,
                         block_rounds=1 << 16)
    a = simulate(base)
    b = simulate(threaded)
    assert a.case_counts == b.case_counts
    assert a.reward_sums == b.reward_sums


def test_different_seeds_differ():
    a = simulate(SimConfig(rounds=100_000, seed=1, scenario=SINGLE))
    b = simulate(SimConfig(rounds=100_000, seed=2, scenario=SINGLE))
    assert a.case_counts != b.case_counts


def test_zero_infiltration_earns_power():
    scenario = SinglePoolScenario(0.2, 0.2, 0.0, 0.5)
    out = simulate(SimConfig(rounds=1_000_000, seed=5, scenario=scenario))
    se = out.std_error["attacker"]
    assert abs(out.reward_means["attacker"] - 0.2) <= 3 * se
    assert out.case_counts["C_fork_from_withheld"] == 0


def test_single_matches_analytic():
    out = simulate(SimConfig(rounds=2_000_000, seed=11, scenario=SINGLE))
    analytic = reward_single(SINGLE)
    assert abs(out.reward_means["attacker"] - analytic) <= 3 * out.std_error["attacker"]


def test_case_frequencies_match_closed_form():
    s = SINGLE
    n = 2_000_000
    out = simulate(SimConfig(rounds=n, seed=13, scenario=s))
    ta = s.tau * s.alpha
    probs = {
        "A_innocent_win": (1 - s.tau) * s.alpha / (1 - ta),
        "B_pool_honest_win": s.beta / (1 - ta),
        "C_fork_from_withheld": ta * (1 - s.alpha - s.beta) / (1 - ta),
        "E_external_win_no_withheld": 1 - s.alpha - s.beta,
    }
    assert abs(sum(probs.values()) - 1.0) < 1e-12
    for tag, p in probs.items():
        se = math.sqrt(p * (1 - p) / n)
        assert abs(out.case_counts[tag] / n - p) <= 3 * se, tag


def test_case_counts_partition_rounds():
    out = simulate(SimConfig(rounds=500_000, seed=17, scenario=SINGLE))
    assert sum(out.case_counts.values()) == out.rounds_run


def test_one_reward_unit_per_round():
    out = simulate(SimConfig(rounds=500_000, seed=19, scenario=SINGLE))
    assert sum(out.reward_sums.values()) == pytest.approx(out.rounds_run, rel=1e-12)


def test_multi_single_pool_agrees_with_single_engine():
    single = simulate(SimConfig(rounds=1_000_000, seed=23, scenario=SINGLE))
    multi_scn = MultiPoolScenario(0.2, (0.2,), (0.44151844,), 1.0)
    multi = simulate(SimConfig(rounds=1_000_000, seed=23, scenario=multi_scn))
    analytic = reward_single(SINGLE)
    for out in (single, multi):
        assert abs(out.reward_means["attacker"] - analytic) <= 3 * out.std_error["attacker"]


def test_multi_matches_analytic_and_conserves():
    # four-pool preset at the optimal split, the heaviest published scenario
    alpha, betas = preset_attack()
    alloc = optimize_allocation(alpha, betas, 1.0)
    scenario = MultiPoolScenario(alpha, betas, alloc.taus, 1.0)
    out = simulate(SimConfig(rounds=10_000_000, seed=29, scenario=scenario, workers=2))
    assert abs(out.reward_means["attacker"] - alloc.reward) <= 3 * out.std_error["attacker"]
    assert sum(out.reward_sums.values()) == pytest.approx(out.rounds_run, rel=1e-12)
    assert sum(out.case_counts.values()) == out.rounds_run
    assert out.case_counts["D_multi_branch_fork"] > 0


def test_two_equal_pools_match_analytic_at_high_rounds():
    # two 0.1 pools, optimal symmetric split, full fork success
    alloc = optimize_allocation(0.2, (0.1, 0.1), 1.0)
    scenario = MultiPoolScenario(0.2, (0.1, 0.1), alloc.taus, 1.0)
    out = simulate(SimConfig(rounds=10_000_000, seed=59, scenario=scenario, workers=2))
    assert abs(out.reward_means["attacker"] - alloc.reward) <= 3 * out.std_error["attacker"]


def test_game_zero_infiltration():
    g = GameScenario(0.2, 0.1, 0.0, 0.0, 1.0, 1.0, 0.5, 0.5)
    out = simulate(SimConfig(rounds=1_000_000, seed=31, scenario=g))
    assert abs(out.reward_means["pool1"] - 0.2) <= 3 * out.std_error["pool1"]
    assert abs(out.reward_means["pool2"] - 0.1) <= 3 * out.std_error["pool2"]
    assert out.case_counts["C_fork_from_withheld"] == 0
    assert out.case_counts["D_multi_branch_fork"] == 0


def test_game_at_equilibrium_matches_payoffs():
    eq = solve_equilibrium(0.2, 0.15, 0.8, 0.8, 0.4, 0.4)
    g = GameScenario(0.2, 0.15, eq.f1_star, eq.f2_star, 0.8, 0.8, 0.4, 0.4)
    out = simulate(SimConfig(rounds=2_000_000, seed=37, scenario=g))
    r1, r2 = game_payoffs(g)
    gross_mean_1 = out.gross_reward_sums["pool1"] / out.rounds_run
    gross_mean_2 = out.gross_reward_sums["pool2"] / out.rounds_run
    assert abs(gross_mean_1 - r1) <= 3 * out.gross_std_error["pool1"]
    assert abs(gross_mean_2 - r2) <= 3 * out.gross_std_error["pool2"]


def test_game_symmetric_scenario():
    g = GameScenario(0.2, 0.2, 0.08, 0.08, 0.9, 0.9, 0.45, 0.45)
    out = simulate(SimConfig(rounds=1_000_000, seed=41, scenario=g))
    spread = abs(out.reward_means["pool1"] - out.reward_means["pool2"])
    assert spread <= 3 * (out.std_error["pool1"] + out.std_error["pool2"])


def test_game_conserves_reward():
    g = GameScenario(0.2, 0.15, 0.1, 0.07, 0.8, 0.6, 0.4, 0.3)
    out = simulate(SimConfig(rounds=500_000, seed=43, scenario=g))
    assert sum(out.reward_sums.values()) == pytest.approx(out.rounds_run, rel=1e-9)
    assert sum(out.case_counts.values()) == out.rounds_run


def test_estimate_error_constant_rewards():
    out = SimOutcome(kind="single", rounds_run=1000,
                     case_counts={}, reward_sums={"x": 500.0},
                     reward_sumsq={"x": 250.0}, std_error={}, rng={}, config={})
    # every round paid exactly 0.5: sumsq = n * 0.25
    assert estimate_error(out)["x"] == 0.0


def test_estimate_error_bernoulli():
    n = 10_000
    out = SimOutcome(kind="single", rounds_run=n,
                     case_counts={}, reward_sums={"x": n / 2},
                     reward_sumsq={"x": n / 2}, std_error={}, rng={}, config={})
    assert estimate_error(out)["x"] == pytest.approx(0.005, rel=1e-3)


def test_estimate_error_needs_samples():
    out = SimOutcome(kind="single", rounds_run=1, case_counts={},
                     reward_sums={"x": 1.0}, reward_sumsq={"x": 1.0},
                     std_error={}, rng={}, config={})
    with pytest.raises(InsufficientSamples):
        estimate_error(out)


def test_error_scales_as_inverse_sqrt_rounds():
    ses = []
    sizes = [10_000, 100_000, 1_000_000]
    for n in sizes:
        out = simulate(SimConfig(rounds=n, seed=47, scenario=SINGLE))
        ses.append(out.std_error["attacker"])
    slope = np.polyfit(np.log(sizes), np.log(ses), 1)[0]
    assert abs(slope + 0.5) < 0.05


def test_small_run_warns():
    with pytest.warns(UserWarning, match="100 rounds"):
        simulate(SimConfig(rounds=50, seed=1, scenario=SINGLE))


def test_outcome_export_shapes():
    out = simulate(SimConfig(rounds=1000, seed=53, scenario=SINGLE))
    doc = out.to_json_dict()
    assert doc["schema_version"] == 1
    assert doc["rng"]["algorithm"] == "philox4x64"
    assert doc["config"]["scenario"]["alpha"] == 0.2
    header, values = out.csv_row()
    assert len(header) == len(values)
    assert "attacker_mean" in header


def test_round_case_branch_invariants():
    assert RoundCase("C_fork_from_withheld", fork_branches=2).fork_branches == 2
    assert RoundCase("D_multi_branch_fork", fork_branches=3, winner="external").winner
    RoundCase("A_innocent_win")
    with pytest.raises(ValueError):
        RoundCase("C_fork_from_withheld", fork_branches=1)
    with pytest.raises(ValueError):
        RoundCase("B_pool_honest_win", fork_branches=2)
    with pytest.raises(ValueError):
        RoundCase("F_no_such_case")


def test_typed_entry_points_reject_wrong_scenarios():
    cfg = SimConfig(rounds=10, seed=1, scenario=SINGLE)
    with pytest.raises(TypeError):
        simulate_multi(cfg)
    with pytest.raises(TypeError):
        simulate_game(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert simulate_single(cfg).rounds_run == 10
