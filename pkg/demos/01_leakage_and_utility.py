"""
Leakage and utility of a release
================================

Two independent fair bits. The adversary already knows x1; one user has
no side information, must recover x1 exactly and wants at least half a
bit of guessing gain on x2.
"""

import math

import numpy as np

from leakage_lab.mechanism import (
    Mechanism,
    PartitionMechanism,
    constant_mechanism,
    guessing_gain,
    identity_mechanism,
    lemma2_lower_expression,
    max_leakage,
    satisfies_constraints,
    sibson_infinity,
    utility_D,
)
from leakage_lab.prob import ProductDistribution, SourceDistribution
from leakage_lab.system import SystemSpec, UserSpec, validate

coin = SourceDistribution.uniform(2)
spec = SystemSpec(
    ProductDistribution((coin, coin)),
    (UserSpec(side_info=set(), must_decode={0}, gain_threshold=0.5),),
    adversary_side_info={0},
)
print("violations:", validate(spec))

# realizations are packed with x1 as the high digit: 00, 01, 10, 11 -> 0..3
for name, mech in [("identity", identity_mechanism(spec)),
                   ("constant", constant_mechanism(spec))]:
    print(f"{name:9s} leakage {max_leakage(spec, mech):.4f} bits")

# Hide x2 only when x1 = 0.
mech = PartitionMechanism(((0, 1), (2,), (3,)), 4)
L = max_leakage(spec, mech)
print(f"partition leakage {L:.6f} bits (log2 1.5 = {math.log2(1.5):.6f})")
print(f"Sibson order-infinity information {sibson_infinity(spec, mech):.6f}")

# seeing the cell {10} doubles the chance of guessing x2
print("gain on x2 from output {10}:", guessing_gain(spec, mech, {1}, set(), 1))
print("utility D =", utility_D(spec, mech, 0))
print("constraints met:", bool(satisfies_constraints(spec, mech)))
print(f"mutual-information lower expression {lemma2_lower_expression(spec, mech):.4f} <= {L:.4f}")

# a random soft mechanism on the same system
rng = np.random.default_rng(0)
K = rng.dirichlet(np.ones(3), size=4)
soft = Mechanism(K)
print(f"soft mechanism: leakage {max_leakage(spec, soft):.4f}, utility {utility_D(spec, soft, 0):.4f}")
