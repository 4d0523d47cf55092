"""Can a regression learn the chart that linearizes a map -- and when it
can't, does it at least fail loudly?

The rational line map has an exact one-dimensional chart h(x) = (x+1)/(x-1),
but h is not a polynomial, so a polynomial dictionary can only fake it.
Fitting x -> f(x) through dictionaries of growing size shows the obstruction
directly: monomials never get the held-out residual below ~0.15, and the
bigger the basis the harder the lifted dynamics squeezes the two fixed
points together (falling collapse ratio). The pole-shaped dictionary fits
to 5e-13 with two functions -- and then its own row reports an error,
because its pole sits exactly on the repelling fixed point, so the chart
cannot represent that limit set at all. Accuracy and a faithful picture of
the limit sets pull in opposite directions; the sweep keeps every row,
errors included, so the frontier is visible instead of curated.

The detailed fit at the end sidesteps the obstruction by working on a region
around the attractor only, where the learned spectrum comes out as exact
powers of 1/2.
"""

import numpy as np

from limitlab.catalog import default_seeds, get_system
from limitlab.dynamics import DomainRegion
from limitlab.lifting import build_dictionary, fit_lift, obstruction_sweep
from limitlab.limits import catalog_from_seeds

f = get_system("mobius")
region = DomainRegion.interval(-1.2, 1.2)
catalog, _ = catalog_from_seeds(f, default_seeds("mobius"))
print("catalog:", ", ".join(f"{m.label}={m.points.mean():+.0f}" for m in catalog.members))

specs = [("monomial", k) for k in (1, 2, 4, 8, 12)] + [("rational-pole", 1)]
report = obstruction_sweep(f, catalog, specs, ridges=(0.0,), region=region, seed=42)

print(f"\n{'dictionary':>16s} {'size':>4s} {'heldout':>10s} {'collapse':>9s} {'sep':>7s}  error")
for r in report.rows:
    res = "-" if r.residual_heldout is None else f"{r.residual_heldout:.2e}"
    col = "-" if r.collapse_ratio is None else f"{r.collapse_ratio:.4f}"
    sep = "-" if r.min_sep_ratio is None else f"{r.min_sep_ratio:.3f}"
    print(f"{r.dict_kind:>16s} {r.dict_size:4d} {res:>10s} {col:>9s} {sep:>7s}"
          f"  {r.error or ''}")

# the detailed fit, on the attractor side only: the transfer matrix picks up
# the halving multiplier of the exact chart, plus its powers from the higher
# pole orders
safe = DomainRegion.interval(-0.9, 0.5)
lift = fit_lift(f, build_dictionary("rational-pole", 1, 3), region=safe, seed=42)
print("\nrational-pole lift on the attractor side:")
print("  train rms:", f"{lift.report.rms_residual:.3e}")
print("  eigenvalues:", np.round(lift.eigenvalues.real, 12))

# round-trip through the lifted linear system: advance the lift, not the map
x = np.array([0.2])
z = lift.dictionary(x)
z_next = lift.K @ z
direct = lift.dictionary(f.forward(x))
print("  one-step mismatch |K z - (z of f(x))|:", f"{np.abs(z_next - direct).max():.3e}")
