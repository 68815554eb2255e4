"""Tour of a genuine branch point versus a decomposable two-valued graph.

The branched fixture stores the two values of z -> +/- z^(3/2); the sheets
cannot be separated near the origin, and every small loop around it swaps
the two values.  The holomorphic-pair fixture looks similar at a glance
but decomposes into two honest single-valued graphs.
"""

import numpy as np

from mintwo.decompose import monodromy_test, propagate_labels, ring_loop
from mintwo.fixtures import FixtureSpec, generate
from mintwo.varifold import density_ratio, sample_graph

h = 1 / 64
branched = generate(FixtureSpec("branched_w32", h, radius=1.0))
holo = generate(FixtureSpec("holo_pair_curved", h, radius=1.0,
                            params={"a": 1.0, "b": 1.0}))
center = tuple((np.array(branched.dims) - 1) // 2)

print("monodromy around the origin (lattice rings of growing radius):")
for r in (12, 20, 28, 36):
    mb = monodromy_test(branched, ring_loop(branched, center, r))
    mh = monodromy_test(holo, ring_loop(holo, center, r))
    print("  ring %2d:  branched -> %-7s  holo pair -> %s" % (r, mb, mh))

print()
print("greedy sheet labelling:")
for name, g in (("branched_w32", branched), ("holo_pair_curved", holo)):
    lab = propagate_labels(g)
    print("  %-16s decomposed=%-5s conflicts=%-4d exclusion volume %.2e"
          % (name, lab.decomposed, len(lab.conflicts),
             lab.exclusion_volume()))
    if len(lab.branch_points):
        d = np.linalg.norm(lab.branch_points, axis=1).max()
        print("  %-16s branch-point witnesses within %.3f of the origin"
              % ("", d))

print()
print("density at the branch point (multiplicity shows up as the ratio):")
Vb = sample_graph(branched, with_tangents=False)
for rho in (0.5, 0.25, 0.125):
    print("  rho = %-6g ratio = %.4f"
          % (rho, density_ratio(Vb, np.zeros(4), rho)))
print("(a two-valued graph with a single branch point has density 2")
print(" at the branch and density -> 2 as rho -> 0 along these balls)")
