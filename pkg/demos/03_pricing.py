"""Reduced costs from master duals: plain and quantity-weighted estimates versus exact pricing."""

import warnings

from ftlcg.heuristics import simple_init
from ftlcg.instance import worked_example
from ftlcg.lp import solve_lp
from ftlcg.master import build_rmp, extract_duals
from ftlcg.pricing import P1, P2, Estimator, price_by_enumeration, price_by_estimate
from ftlcg.routing import enumerate_routes

inst = worked_example()
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    pool = simple_init(inst)
mm = build_rmp(pool, inst, fleet_active=False)
lp = solve_lp(mm.model)
duals = extract_duals(lp, mm)
print(f"dedicated routes only: relaxed objective {lp.objective:g}")
print("commodity prices:", {k: round(v, 2) for k, v in duals.pi.items()})

routes = enumerate_routes(inst)
for mode in (P1, P2):
    est = Estimator(inst, duals, mode)
    best = price_by_estimate(routes, est, 3, exclude=pool)
    print(f"{mode}: " + ", ".join(f"{r} ({v:+.1f})" for r, v in best))

for col in price_by_enumeration(routes, duals, 3, inst, exclude=pool):
    loads = ", ".join(f"{i}:{c}" for i, c in col.assignment if c)
    print(f"exact: {col.route} loads [{loads}] reduced cost {col.value:+.1f}")
