"""
Entropy-style lower bound by linear programming
===============================================

The decoding requirements force certain increments of any entropy-like
rank function. Minimizing the relevant increment over all polymatroids
consistent with them gives a second lower bound on leakage.
"""

import numpy as np

from leakage_lab.greedy import run_algorithm1
from leakage_lab.polymatroid import build_program, entropy_witness, lam, solve, theorem2
from leakage_lab.prob import ProductDistribution, SourceDistribution
from leakage_lab.system import SystemSpec, UserSpec

src = ProductDistribution(tuple(SourceDistribution.bernoulli(p) for p in (0.5, 0.3, 0.2)))
spec = SystemSpec(
    src,
    (UserSpec({1}, {0}, 0.1), UserSpec({0}, {1}), UserSpec(set(), {2})),
    adversary_side_info=set(),
)

prog = build_program(spec, spec.Q, spec.P)
print(f"{prog.n_variables} variables, {len(prog.b_eq)} equalities, {len(prog.A_ge)} inequalities")
sol = solve(prog)
print("status", sol.status, "optimum", round(sol.optimal_value, 6))
print("rank function:", np.round(sol.g_values, 4).tolist())

res = theorem2(spec)
print("bound:", res.to_dict())

# the rank function of an actual decodable release satisfies every constraint
design = run_algorithm1(spec)
g = entropy_witness(spec, design.mechanism)
print(f"witness residual {prog.residual(g):.1e}, objective at witness {prog.objective @ g:.4f}")
print(f"greedy leakage {design.leakage:.4f} >= {res.bound:.4f}")

# the full Shannon description gives the same optimum
print("full vs elemental:", lam(spec, spec.Q, spec.P, elemental=False), res.lambda_QP)
print(prog.to_text().splitlines()[0])
