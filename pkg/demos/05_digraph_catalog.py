"""
Side-information digraphs up to relabeling
==========================================

Each simple digraph on n vertices is coded by its n(n-1) arc bits; the
smallest code over all vertex relabelings names its isomorphism class.
"""

import time

from leakage_lab.digraphs import catalog_codes, decode, generate_digraph_catalog, in_neighborhoods

for n in range(1, 5):
    print(n, len(catalog_codes(n)))

t = time.perf_counter()
catalog = generate_digraph_catalog(5)
print(f"5 {len(catalog)}  ({time.perf_counter() - t:.1f} s)")

arcs = decode(catalog_codes(3)[5], 3)
print("arcs:", sorted(arcs), "side information:", [sorted(s) for s in in_neighborhoods(arcs, 3)])
