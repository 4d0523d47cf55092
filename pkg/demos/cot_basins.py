"""Basins of the cotangent-contraction map on [0, pi].

The map sends x to 2*arccot(cot(x/2)/sqrt(2)): in the half-angle chart
t = cot(x/2) it is plain scaling t -> t/sqrt(2). The chart squashes t toward
0, which is x = pi, so pi attracts every interior orbit and 0 is the
repeller. Both endpoints are fixed exactly (the branch arccot(+inf) = 0,
arccot(-inf) = pi is chosen so the iterator never wraps).

The attractor's domain of attraction is (0, pi] -- open at the repelling
end. That means it is NOT closed: basin points accumulate on 0, but 0
itself stays put forever. The closedness probe below finds an explicit
witness sequence for this.

Bonus: cos conjugates this map onto the rational line map restricted to
[-1, 1], which is how the whole example reduces to one already solved.
"""

import numpy as np

from limitlab.catalog import exact_immersion, get_system
from limitlab.immersion import conjugacy_residual
from limitlab.limits import basin_closedness_witness, catalog_from_seeds, compute_basins

f = get_system("cot-map")

# seed both fixed points: interior orbits all drain to pi, so the repeller
# at 0 only enters the catalog if we start exactly on it
catalog, skipped = catalog_from_seeds(f, [[0.0], [1.5]])
print("catalog members:")
for m in catalog.members:
    print(f"  {m.label}: {m.shape} at {np.round(m.points.mean(axis=0), 9)}")
print("skipped seeds:", len(skipped))

basins = compute_basins(f, catalog, resolution=201)
codes, counts = np.unique(basins.codes, return_counts=True)
print("\ngrid labels over", basins.codes.size, "nodes:")
for c, n in zip(codes, counts):
    print(f"  {basins.label_of_code(int(c)):>12s}: {n}")

witnesses = basin_closedness_witness(f, basins)
print("\nclosedness probe found", len(witnesses), "witness(es)")
for w in witnesses:
    print(f"  sequence settling on {w.sequence_label}"
          f" accumulates at x = {w.limit_point[0]:.6f},"
          f" which settles on {w.limit_label}")
    print("  first few sequence points:", np.round(w.sequence[:4].ravel(), 6))

# the chart behind all of this
ent = exact_immersion("cot-map")
samples = f.domain.sample(500, np.random.default_rng(1))
rep = conjugacy_residual(ent.immersion, f, ent.target, samples)
print(f"\nchart: {ent.note}")
print(f"conjugacy residual on {rep.samples_used} samples: {rep.max_residual:.3e}")
