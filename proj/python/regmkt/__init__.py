"""Regulation market clearing with state-of-charge dependent storage bids."""

from ._regmkt import (
    StorageBid,
    analytical_worst_cost,
    brute_force_worst_cost,
    clear_file,
    edcr_cost,
    reg_down_cost,
    reg_up_cost,
    two_route_cost,
)

__all__ = [
    "StorageBid",
    "analytical_worst_cost",
    "brute_force_worst_cost",
    "clear_file",
    "edcr_cost",
    "reg_down_cost",
    "reg_up_cost",
    "two_route_cost",
]
