"""
Gadget networks: one transmission per slot costs nothing
========================================================

In the tree gadget every node forwards to exactly one neighbour, so a
wireless node (one link per slot) never has to choose. Simulating the same
traffic in both modes gives identical logs. A hub with two outputs breaks
this at the first slot where both queues are non-empty.
"""

from fractions import Fraction as F

from aqtwireless.adversary import (
    AdversaryBudget,
    InjectionEvent,
    InjectionTrace,
    generate_rate_schedule,
)
from aqtwireless.core import Path, star_network
from aqtwireless.metrics import max_queueing
from aqtwireless.scenarios import (
    GadgetParams,
    ScenarioBundle,
    build_gadget,
    equivalence_check,
    fact1_check,
    gadget_trace,
    wireless_simulation_bundle,
)

g = build_gadget(GadgetParams(h=3, k=1, J=1))
print(g.manifest(), end="")
print("nodes:", g.network.num_nodes, " one out-link each:", bool(fact1_check(g.network)))

# %%
budget = AdversaryBudget(2, F(1, 3))
horizon = 300
trace, witness = gadget_trace(g, budget, seed=5, horizon=horizon, paths=20)
bundle = wireless_simulation_bundle(g, budget, trace, witness)
verdict = equivalence_check(bundle, horizon)
print(len(trace.events), "injections; logs identical:", verdict.equal)
print("Q wireless =", max_queueing(verdict.wireless)[0],
      " Q wireline =", max_queueing(verdict.wireline)[0])

# %%
# Same check on a 2-leaf star: the hub holds data for both leaves at slot 0.
net = star_network(2)
events = [InjectionEvent(0, Path.from_nodes([0, 1]), F(1)),
          InjectionEvent(0, Path.from_nodes([0, 2]), F(1))]
T = 4
star = ScenarioBundle(net, generate_rate_schedule(net, 0, T), InjectionTrace(events, T),
                      None, AdversaryBudget(2, 0), 1)
verdict = equivalence_check(star, T)
print("star logs identical:", verdict.equal, " first difference:", verdict.diff)
