"""
Greedy merging
==============

Start from the release that reveals everything and keep merging the two
outputs whose union lowers leakage the most, as long as every user can
still decode and keeps its guessing gain.
"""

from leakage_lab.confusion import theorem1_bound
from leakage_lab.greedy import run_algorithm1, theta
from leakage_lab.mechanism import identity_mechanism, satisfies_constraints
from leakage_lab.polymatroid import theorem2_bound
from leakage_lab.prob import ProductDistribution, SourceDistribution
from leakage_lab.system import SystemSpec, UserSpec

coin = SourceDistribution.uniform(2)
spec = SystemSpec(ProductDistribution((coin, coin)), (UserSpec({1}, {0}),), adversary_side_info=set())

print("admissible first merges:", sorted(theta(spec, identity_mechanism(spec)).pairs))
result = run_algorithm1(spec)
for step in result.trace:
    print(step.to_dict())
print("cells:", result.mechanism.cells)
print("leakage path:", [round(v, 4) for v in result.leakage_path])

lower = max(theorem1_bound(spec), theorem2_bound(spec))
print(f"ratio to best bound: {result.leakage / lower:.4f}")
print(satisfies_constraints(spec, result.mechanism))
