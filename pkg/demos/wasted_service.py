"""
Small fragments and one link per slot
=====================================

The delay bound assumes a busy node moves a full unit every slot. A wireless
node serves only one link per slot, so when the chosen queue holds 1/8 of a
unit the other 7/8 of that slot is lost. A selector that keeps picking a
trickle-fed link then starves its other queues past the bound.
"""

import random
from fractions import Fraction as F

from aqtwireless.adversary import AdversaryBudget
from aqtwireless.core import max_degree
from aqtwireless.engine import QLEN, SEND, run
from aqtwireless.metrics import stability_report, theorem_bounds, timelines
from aqtwireless.policies import SelectorKind
from aqtwireless.scenarios import random_scenario

# draw parameters the way the acceptance run does for seed 2
seed = 2
rng = random.Random(seed)
d, b, n = rng.randint(2, 6), rng.randint(1, 5), rng.randint(3, 12)
r = F(9, 10 * d) * F(rng.randint(0, 4), 4)
budget = AdversaryBudget(b, r)
net = random_scenario(n, d, 0.4, budget, seed, 1, max_degree=4).network
q_bound, lat_bound = theorem_bounds(d, b, max_degree(net), r)
T = int(20 * lat_bound) + 1
print(f"n={n} d={d} b={b} r={r} delta={max_degree(net)}: Q bound {float(q_bound):.2f}")


def scenario(**kw):
    return random_scenario(n, d, 0.4, budget, seed, T, max_degree=4,
                           inject_until=T - int(lat_bound) - 1, **kw)


sc = scenario()
log, _ = run(sc.config())
rep = stability_report(log, sc.network, budget, d)
print("sizes in 1/8 units:  Q =", rep.q_emp, " compliant:", rep.compliant)

# %%
# Where it happens: the worst hop waits at node 2, whose selector always
# prefers its lowest-numbered non-empty link.
node = 2
arg = rep.argmax
start = timelines(log)[arg.packet].arrivals[arg.hop - 1]
print(f"node {node}: {sc.selectors[node].value}, neighbours {sorted(sc.network.neighbors[node])}")
for t in range(start, start + arg.delay + 1):
    sent = [f"->{rec.peer} {rec.amount}" for rec in log.records
            if rec.slot == t and rec.node == node and rec.kind == SEND]
    held = [f"{rec.peer}:{rec.amount}" for rec in log.records
            if rec.slot == t and rec.node == node and rec.kind == QLEN]
    print(f"  slot {t}: sent {', '.join(sent) or '-'}   left {' '.join(held) or '-'}")

# %%
# Same seed with whole-unit sizes, then with round-robin selection everywhere.
for label, kw in [("unit sizes", dict(granularity=1)),
                  ("round robin", dict(selectors=[SelectorKind.ROUND_ROBIN_NON_EMPTY]))]:
    other = scenario(**kw)
    rep = stability_report(run(other.config())[0], other.network, budget, d)
    print(f"{label + ':':<20} Q = {rep.q_emp}  compliant: {rep.compliant}")
