"""Fork-after-withholding mining attack analysis toolkit.

Closed-form reward calculators for infiltrating one or many proportional
pools, a two-pool mutual-attack game solver with region sweeps, network
bounds and countermeasure economics, and a round-level Monte Carlo engine
that independently cross-checks every closed form.
"""

from .bounds import (
    DetectionParams,
    HonestPowerDistribution,
    bonus_scheme_reward,
    bonus_threshold_feasible,
    c_from_gamma,
    c_max_single,
    c_min_rational,
    detection_resilient_reward,
    expelled_block_count,
    gamma_upper_bound,
    honeypot_bwh_bound,
    safe_bonus_threshold,
    selfish_mining_threshold,
)
from .errors import (
    BudgetExceeded,
    ConstraintViolated,
    DegenerateInput,
    FawError,
    InconsistentDistribution,
    InsufficientSamples,
    NegativeEffectiveMinersWarning,
    PowerOutOfRange,
    RationalFloorWarning,
    ScenarioFileError,
    SingularSystem,
    TooManyPools,
    UnknownFixture,
)
from .game import (
    EquilibriumResult,
    RegionCell,
    best_response,
    classify_winner,
    game_payoffs,
    net_payoffs,
    solve_equilibrium,
    sweep_regions,
    sweep_regions_assumed_c,
    write_sweep_csv,
)
from .multi_pool import (
    AllocationResult,
    POOL_PRESETS,
    TABLE2_POWERS,
    fixed_tau_reward_mismatched_c,
    optimize_allocation,
    preset_attack,
    reward_npool,
    reward_two_pools,
)
from .scenarios import (
    GameScenario,
    MultiPoolScenario,
    RewardReport,
    SinglePoolScenario,
    load_scenario,
    rer,
    scenario_to_dict,
    validate,
    validate_game,
    validate_multi,
    validate_single,
)
from .simulator import (
    RoundCase,
    SimConfig,
    SimOutcome,
    estimate_error,
    simulate,
    simulate_game,
    simulate_multi,
    simulate_single,
)
from .single_pool import (
    OptimalTauResult,
    optimal_tau,
    optimal_tau_closed_form,
    reward_bwh,
    reward_single,
    victim_reward,
)

__version__ = "0.1.0"
