from .loads import (
    apply_schedule,
    charge_count_bounds,
    check_spec,
    load_profiles,
    load_tariff,
    soc_trajectory,
)
from .optimizer import brute_force_oracle, solve_admm_step, solve_individual
