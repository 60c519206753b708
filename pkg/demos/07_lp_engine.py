"""The bundled LP/MIP engine on a small set-cover model, cross-checked with HiGHS."""

from ftlcg.lp import GE, LinearModel, model_to_mps, solve_lp, solve_mip

sets = [{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 1, 2, 3}]
costs = [3, 3, 3, 3, 7]
model = LinearModel("cover")
for j, c in enumerate(costs):
    model.add_variable(f"z{j}", 0, 1, c, integer=True)
for e in range(4):
    model.add_constraint(f"e{e}", {j: 1.0 for j, s in enumerate(sets) if e in s}, GE, 1)

lp = solve_lp(model)
print(f"LP bound {lp.objective:g}, duals {[round(float(y), 3) for y in lp.duals]}")
for backend in ("native", "highs"):
    mip = solve_mip(model, backend=backend)
    print(f"{backend}: integer optimum {mip.objective:g} using {[j for j, v in enumerate(mip.x) if v > 0.5]}")
print(model_to_mps(model).splitlines()[0])
