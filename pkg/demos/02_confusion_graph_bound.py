"""
Clique lower bound
==================

Three fair bits in a ring: user i knows the next bit and must decode bit i.
Realizations that some user could mix up are joined in the confusion graph;
every release that lets all users decode has to separate them.
"""

from leakage_lab.confusion import build, clique_number, induced, theorem1_bound
from leakage_lab.mechanism import identity_mechanism, max_leakage
from leakage_lab.prob import ProductDistribution, SourceDistribution
from leakage_lab.system import SystemSpec, UserSpec

coin = SourceDistribution.uniform(2)
users = tuple(UserSpec({(i + 1) % 3}, {i}) for i in range(3))
spec = SystemSpec(ProductDistribution((coin,) * 3), users, adversary_side_info={2})

graph = build(spec)
print(f"{graph.vertex_count} vertices, {len(graph.edges())} edges")
print("clique number of the whole graph:", clique_number(graph))

# fix what the adversary knows; the answer does not depend on the value
for x3 in (0, 1):
    sub = induced(spec, graph, {2}, (x3,))
    print(f"x3={x3}: vertices {sub.vertices.tolist()}, clique number {clique_number(sub)}")

print(f"bound {theorem1_bound(spec, graph):.4f} bits, "
      f"identity leaks {max_leakage(spec, identity_mechanism(spec)):.4f}")

print(graph.to_dot(spec))
