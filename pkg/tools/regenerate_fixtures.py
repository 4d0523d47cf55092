#!/usr/bin/env python3
"""Regenerate the pinned regression fixtures under tests/fixtures/.

The obstruction-sweep acceptance test compares a fresh sweep against the
values pinned here, so a genuine behaviour change shows up as an explicit
fixture diff instead of silent drift. Run from the repository root after an
intentional change, then review the diff:

    python3 tools/regenerate_fixtures.py
"""

import pathlib
import sys

import numpy as np

from limitlab import (DomainRegion, build_dictionary, catalog_from_seeds,
                      conjugacy_residual, default_seeds, fit_lift, get_system,
                      injectivity_probe, obstruction_sweep)
from limitlab.serialize import dump

FIXTURE_DIR = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SWEEP_SEED = 42
SWEEP_RIDGES = (0.0, 1e-8, 1e-4)
# fourier orders 0..3 give dictionary sizes 1, 3, 5, 7 — every size such a
# dictionary can take below 8 features
SWEEP_ORDERS = (0, 1, 2, 3)

CONTROL_REGION = (-0.9, 0.5)
CONTROL_ORDER = 3
CONTROL_SAMPLES = 1000


def sweep_fixture() -> dict:
    system = get_system("cot-map")
    catalog, skipped = catalog_from_seeds(system, default_seeds("cot-map"))
    report = obstruction_sweep(system, catalog,
                               specs=[("fourier", o) for o in SWEEP_ORDERS],
                               ridges=SWEEP_RIDGES, seed=SWEEP_SEED)
    return {
        "system": "cot-map",
        "seed": SWEEP_SEED,
        "orders": list(SWEEP_ORDERS),
        "ridges": list(SWEEP_RIDGES),
        "catalog_members": len(catalog),
        "seeds_skipped": len(skipped),
        "rows": [
            {
                "dict_kind": r.dict_kind,
                "dict_size": r.dict_size,
                "ridge": r.ridge,
                "residual_heldout": r.residual_heldout,
                "collapse_ratio": r.collapse_ratio,
                "min_sep_ratio": r.min_sep_ratio,
                "error": r.error,
            }
            for r in report.rows
        ],
    }


def control_fixture() -> dict:
    system = get_system("mobius")
    lo, hi = CONTROL_REGION
    region = DomainRegion.interval(lo, hi)
    dictionary = build_dictionary("rational-pole", 1, CONTROL_ORDER)
    lift = fit_lift(system, dictionary, region=region, seed=SWEEP_SEED)
    F = lift.as_immersion()
    g = lift.lifted_map()
    heldout = region.sample(CONTROL_SAMPLES, np.random.default_rng(SWEEP_SEED + 1))
    conj = conjugacy_residual(F, system, g, heldout)
    inj = injectivity_probe(F, heldout)
    eigs = lift.eigenvalues
    return {
        "system": "mobius",
        "region": list(CONTROL_REGION),
        "dictionary": ["rational-pole", CONTROL_ORDER],
        "seed": SWEEP_SEED,
        "n_heldout": CONTROL_SAMPLES,
        "train_rms": lift.report.rms_residual,
        "train_max": lift.report.max_residual,
        "heldout_max": conj.max_residual,
        "heldout_mean": conj.mean_residual,
        "n_collisions": inj.n_collisions,
        "min_sep_ratio": inj.min_separation_ratio,
        "eigenvalues_real": [float(e.real) for e in eigs],
        "eigenvalues_imag": [float(e.imag) for e in eigs],
    }


def main() -> int:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    payload = {
        "kind": "sweep-regression-fixture",
        "schema_version": 1,
        "sweep": sweep_fixture(),
        "control": control_fixture(),
    }
    out = FIXTURE_DIR / "obstruction_sweep.json"
    dump(payload, out)
    print(f"wrote {out}")
    for row in payload["sweep"]["rows"]:
        print("  sweep row:", row)
    print("  control:", {k: payload["control"][k]
                         for k in ("train_rms", "heldout_max", "n_collisions")})
    return 0


if __name__ == "__main__":
    sys.exit(main())
