"""EV charging schedulers.

Aggregate charging via a sorting-based conditional-gradient protocol, a
projected-gradient baseline, and network-constrained dispatch over an
unbalanced radial feeder via consensus ADMM. The heavy lifting lives in the
C++ extension `evsched._core`.
"""

from ._core import (
    ChargingRequest,
    CostModel,
    EvschedError,
    common_gradient,
    energy_need_from_soc,
    fw_step,
    generate_instance,
    lmo_greedy,
    oracle_aggregate,
    project_capped_simplex,
    project_line_disk,
    project_substation_capacity,
    schedule_fw,
    schedule_pgd,
    slot_caps,
    solve_network,
    sort_prices,
    total_cost,
    validate_feeder,
    validate_request,
    zbar,
)

__all__ = [
    "ChargingRequest",
    "CostModel",
    "EvschedError",
    "common_gradient",
    "energy_need_from_soc",
    "fw_step",
    "generate_instance",
    "lmo_greedy",
    "oracle_aggregate",
    "project_capped_simplex",
    "project_line_disk",
    "project_substation_capacity",
    "schedule_fw",
    "schedule_pgd",
    "slot_caps",
    "solve_network",
    "sort_prices",
    "total_cost",
    "validate_feeder",
    "validate_request",
    "zbar",
]
