"""
Checking a trace against a (b, r) budget
========================================

A node splits its injection allowance among its outgoing links through
per-slot fractions (the witness). A trace is admissible when some witness
keeps every link inside b + r * (window) * fraction over every window.
"""

from fractions import Fraction as F

from aqtwireless.adversary import (
    AdversaryBudget,
    InjectionEvent,
    InjectionTrace,
    find_witness,
    generate_rate_schedule,
    uniform_witness,
    verify_witness,
    verify_witness_bruteforce,
)
from aqtwireless.core import Path, star_network

# a hub (node 0) with two leaves; all link rates 1
net = star_network(2, max_path_hops=1)
T = 6
schedule = generate_rate_schedule(net, seed=0, horizon=T)
budget = AdversaryBudget(1, F(1, 2))

# the hub sends 1 unit towards leaf 1 at slot 0 and 1 unit towards leaf 2 at slot 1
events = [InjectionEvent(0, Path.from_nodes([0, 1]), F(1)),
          InjectionEvent(1, Path.from_nodes([0, 2]), F(1))]
trace = InjectionTrace(events, T)

# %%
# Splitting the hub's rate evenly gives each link b + r * w / 2 per window,
# which is enough here.
even = uniform_witness(net, T)
print("even split:", verify_witness(net, trace, schedule, budget, even).admissible)

# %%
# Add a third unit towards leaf 1 in slot 2: link 0->1 now carries 2 units
# over a 3-slot window, more than 1 + 3/4 under the even split.
events.append(InjectionEvent(2, Path.from_nodes([0, 1]), F(1)))
trace = InjectionTrace(events, T)
verdict = verify_witness(net, trace, schedule, budget, even)
print("even split:", verdict.admissible, "-", verdict.violation)

# the all-window enumeration lands on the same first violation
assert verify_witness_bruteforce(net, trace, schedule, budget, even).violation == verdict.violation

# %%
# An exact LP search for some other split. Giving 0->1 the whole allowance
# early covers it; the burst b alone carries the single unit on 0->2.
witness = find_witness(net, trace, schedule, budget)
if witness is None:
    print("no witness exists")
else:
    for t in range(T):
        print(t, witness.frac(0, 1, t), witness.frac(0, 2, t))
    print("found split:", verify_witness(net, trace, schedule, budget, witness).admissible)
