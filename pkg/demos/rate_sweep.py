"""
Queueing delay against the injection rate
=========================================

Same random network and seed, rising r. Below 1/d the report carries the
closed-form bounds on Q and on latency; at and above 1/d no bound applies,
and Q on growing prefixes of the run is listed instead.
"""

from fractions import Fraction as F

from aqtwireless.adversary import AdversaryBudget
from aqtwireless.engine import run
from aqtwireless.metrics import stability_report
from aqtwireless.scenarios import random_scenario

d, b, horizon = 3, 2, 400
print(f"{'r':>6} {'Q':>4} {'Q bound':>9} {'latency':>8} {'lat bound':>10}  growth")
for r in [F(0), F(1, 12), F(1, 6), F(1, 4), F(3, 10), F(1, 3), F(1, 2)]:
    budget = AdversaryBudget(b, r)
    sc = random_scenario(8, d, 0.4, budget, seed=11, horizon=horizon, max_degree=3, intensity=0.9)
    log, _ = run(sc.config())
    rep = stability_report(log, sc.network, budget, d)
    qb = "-" if rep.q_bound is None else f"{float(rep.q_bound):.1f}"
    lb = "-" if rep.latency_bound is None else f"{float(rep.latency_bound):.1f}"
    growth = " ".join(f"Q({t})={q}" for t, q in rep.growth)
    print(f"{str(r):>6} {rep.q_emp:>4} {qb:>9} {rep.lat_emp:>8} {lb:>10}  {growth}")
