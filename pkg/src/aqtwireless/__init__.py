"""Adversarial queuing in collision-free wireless networks.

Slot-stepped fluid simulator for a (b, r)-bounded adversary that controls
both injections and per-slot link rates, plus exact-rational checks of
admissibility and of the work-conserving stability/latency bounds.
"""

from aqtwireless.core import Network, Packet, HopRecord, validate_path, max_degree
from aqtwireless.adversary import (
    AdversaryBudget,
    RateSchedule,
    Witness,
    InjectionEvent,
    InjectionTrace,
    Verdict,
    aggregate_link_load,
    verify_witness,
    verify_witness_bruteforce,
    find_witness,
    generate_admissible_trace,
    generate_rate_schedule,
)
from aqtwireless.policies import PolicyKind, SelectorKind, order_queue, select_link
from aqtwireless.engine import SimConfig, EventLog, run, step, compare_logs
from aqtwireless.metrics import (
    BoundError,
    BoundReport,
    DelayStats,
    delay_stats,
    theorem_bounds,
    epsilon_gap,
    per_hop_delay,
    max_queueing,
    busy_period_start,
    stability_report,
)
from aqtwireless.scenarios import (
    GadgetParams,
    GadgetNetwork,
    build_gadget,
    fact1_check,
    wireless_simulation_bundle,
    equivalence_check,
    random_scenario,
    search_adversary,
)

__version__ = "0.1.0"

__all__ = [
    "Network",
    "Packet",
    "HopRecord",
    "validate_path",
    "max_degree",
    "AdversaryBudget",
    "RateSchedule",
    "Witness",
    "InjectionEvent",
    "InjectionTrace",
    "Verdict",
    "aggregate_link_load",
    "verify_witness",
    "verify_witness_bruteforce",
    "find_witness",
    "generate_admissible_trace",
    "generate_rate_schedule",
    "PolicyKind",
    "SelectorKind",
    "order_queue",
    "select_link",
    "SimConfig",
    "EventLog",
    "run",
    "step",
    "compare_logs",
    "BoundError",
    "BoundReport",
    "DelayStats",
    "delay_stats",
    "theorem_bounds",
    "epsilon_gap",
    "per_hop_delay",
    "max_queueing",
    "busy_period_start",
    "stability_report",
    "GadgetParams",
    "GadgetNetwork",
    "build_gadget",
    "fact1_check",
    "wireless_simulation_bundle",
    "equivalence_check",
    "random_scenario",
    "search_adversary",
]
