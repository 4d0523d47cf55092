"""The worked-systems catalog: registry, golden behaviour, exact conjugacies."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limitlab import (DomainRegion, catalog_from_seeds, conjugacy_residual,
                      default_seeds, estimate_omega, exact_immersion,
                      exact_immersions, get_system, list_systems, manifest)
from limitlab.errors import (InvalidParamError, NoExactImmersionError,
                             UnknownSystemError)
from limitlab.serialize import validate

ALL_NAMES = ["cot-map", "jordan", "mobius", "mobius-inverse", "negation",
             "rotation-scaling", "scalar-linear"]


# sample boxes sit inside each chart, clear of poles and branch points
SAMPLE_BOXES = {
    ("mobius", 0): [[-5.0, 0.5]],
    ("mobius", 1): [[-0.5, 2.5]],
    ("mobius-inverse", 0): [[-0.5, 10.0]],
    ("mobius-inverse", 1): [[-2.0, 0.5]],
    ("cot-map", 0): None,
    ("scalar-linear", 0): [[-2.0, 2.0]],
    ("jordan", 0): [[-2.0, 2.0], [-2.0, 2.0]],
}


def conjugacy_samples(name, system, variant, rng):
    if name == "rotation-scaling":
        return DomainRegion.annulus(0.1, 3.0).sample(1000, rng)
    box = SAMPLE_BOXES[(name, variant)]
    return system.domain.sample(1000, rng, box=box)


# -- registry ----------------------------------------------------------------

def test_listing_is_complete_and_sorted():
    rows = list_systems()
    assert [r["name"] for r in rows] == ALL_NAMES
    assert all(set(r) == {"name", "dim", "summary", "params",
                          "has_exact_immersion"} for r in rows)
    flags = {r["name"]: r["has_exact_immersion"] for r in rows}
    assert flags["negation"] is False
    assert all(flags[n] for n in ALL_NAMES if n != "negation")


def test_unknown_system_raises():
    with pytest.raises(UnknownSystemError):
        get_system("henon")


def test_param_validation():
    with pytest.raises(InvalidParamError):
        get_system("mobius", pole=4.0)
    with pytest.raises(InvalidParamError):
        get_system("jordan", m=5)
    with pytest.raises(InvalidParamError):
        get_system("rotation-scaling", theta=0.0)
    assert get_system("jordan", lam=0.3, m=4).dim == 4
    assert get_system("scalar-linear", a=-0.5).forward([2.0])[0] == -1.0


def test_default_seeds_match_dimensions():
    for name in ALL_NAMES:
        system = get_system(name)
        seeds = default_seeds(name)
        assert len(seeds) >= 3
        assert all(s.shape == (system.dim,) for s in seeds)
        assert all(system.domain.contains(s) for s in seeds)


def test_immersion_variant_counts():
    counts = {n: len(exact_immersions(n))
              for n in ALL_NAMES if n != "negation"}
    assert counts == {"mobius": 2, "mobius-inverse": 2, "cot-map": 1,
                      "rotation-scaling": 1, "scalar-linear": 1, "jordan": 1}
    with pytest.raises(InvalidParamError):
        exact_immersion("cot-map", 1)


def test_negation_has_no_exact_immersion():
    with pytest.raises(NoExactImmersionError):
        exact_immersions("negation")


def test_manifest_lists_every_system():
    doc = manifest()
    assert doc["kind"] == "system-manifest"
    assert doc["schema_version"] == 1
    assert [s["name"] for s in doc["systems"]] == ALL_NAMES


# -- golden conjugacies --------------------------------------------------------

@pytest.mark.parametrize("name,variant", [
    ("mobius", 0), ("mobius", 1),
    ("mobius-inverse", 0), ("mobius-inverse", 1),
    ("cot-map", 0), ("rotation-scaling", 0),
    ("scalar-linear", 0), ("jordan", 0),
])
def test_catalog_conjugacies_hold_everywhere(name, variant, rng):
    system = get_system(name)
    ent = exact_immersion(name, variant)
    samples = conjugacy_samples(name, system, variant, rng)
    report = conjugacy_residual(ent.immersion, system, ent.target, samples)
    assert report.samples_used == 1000
    assert report.max_residual < 1e-13, (name, variant, report.max_residual)
    validate(report.to_dict(), "conjugacy-report")


def test_mobius_variants_straddle_the_pole():
    low = exact_immersion("mobius", 0)
    up = exact_immersion("mobius", 1)
    assert low.immersion.domain.contains([-5.0])
    assert not low.immersion.domain.contains([2.0])
    assert up.immersion.domain.contains([2.0])
    assert not up.immersion.domain.contains([-5.0])
    # the two charts linearize to reciprocal rates
    lam_low = low.target.forward([1.0])[0]
    lam_up = up.target.forward([1.0])[0]
    assert lam_low == pytest.approx(0.5)
    assert lam_up == pytest.approx(2.0)


# -- golden limit sets ----------------------------------------------------------

def test_default_seed_catalogs_recover_known_limit_sets():
    expected = {
        "mobius": [(-1.0,), (1.0,)],
        "mobius-inverse": [(-1.0,), (1.0,)],
        "cot-map": [(0.0,), (np.pi,)],
        "scalar-linear": [(0.0,)],
    }
    for name, members in expected.items():
        system = get_system(name)
        catalog, skipped = catalog_from_seeds(system, default_seeds(name))
        assert skipped == [], name
        got = sorted(tuple(m.points.mean(axis=0)) for m in catalog.members)
        assert len(got) == len(members), name
        for g, e in zip(got, sorted(members)):
            assert np.allclose(g, e, atol=1e-6), (name, g, e)


def test_rotation_catalog_splits_origin_from_circle():
    catalog, skipped = catalog_from_seeds(get_system("rotation-scaling"),
                                          default_seeds("rotation-scaling"))
    assert skipped == []
    shapes = sorted((m.shape, len(m.points)) for m in catalog.members)
    assert shapes[0][0] == "curve"
    radii = {round(float(np.linalg.norm(m.points, axis=1).mean()), 6)
             for m in catalog.members}
    assert radii == {0.0, 1.0}


def test_negation_default_catalog_is_all_period_two():
    catalog, skipped = catalog_from_seeds(get_system("negation"),
                                          default_seeds("negation"))
    assert skipped == []
    assert all(m.shape in ("fixed-point", "periodic-orbit")
               for m in catalog.members)
    for m in catalog.members:
        if m.shape == "periodic-orbit":
            a = abs(m.first_seed[0])
            assert np.allclose(np.unique(m.points[:, 0]), [-a, a])


def test_jordan_default_seeds_mostly_diverge():
    catalog, skipped = catalog_from_seeds(get_system("jordan"),
                                          default_seeds("jordan"))
    assert len(catalog) == 1
    assert np.allclose(catalog.members[0].points, [[1.0, 0.0]], atol=1e-6)
    assert len(skipped) == 2


# -- exactness at the anchors ---------------------------------------------------

def test_fixed_points_are_exact_in_floating_point():
    cot = get_system("cot-map")
    assert cot.forward([0.0])[0] == 0.0
    assert cot.forward([np.pi])[0] == np.pi
    mob = get_system("mobius")
    assert mob.forward([1.0])[0] == 1.0
    assert mob.forward([-1.0])[0] == -1.0


def test_mobius_inverse_is_the_reversed_system():
    mob = get_system("mobius")
    inv = get_system("mobius-inverse")
    xs = np.linspace(-0.9, 0.9, 17)
    for x in xs:
        assert inv.forward([x])[0] == pytest.approx(mob.inverse([x])[0], abs=1e-15)


@settings(max_examples=120, deadline=None)
@given(st.floats(min_value=1e-12, max_value=np.pi - 1e-12))
def test_cot_map_stays_on_the_principal_branch(x):
    y = get_system("cot-map").forward([x])[0]
    assert 0.0 < y < np.pi


@settings(max_examples=120, deadline=None)
@given(st.floats(min_value=-0.95, max_value=0.95))
def test_mobius_round_trip(x):
    f = get_system("mobius")
    y = f.forward([x])
    assert f.inverse(y)[0] == pytest.approx(x, abs=1e-10)


@settings(max_examples=80, deadline=None)
@given(st.floats(min_value=0.1, max_value=1.9),
       st.floats(min_value=-np.pi, max_value=np.pi))
def test_rotation_round_trip(r, phi):
    f = get_system("rotation-scaling")
    x = np.array([r * np.cos(phi), r * np.sin(phi)])
    y = f.forward(x)
    assert np.allclose(f.inverse(y), x, atol=1e-10)


def test_omega_from_both_sides_of_the_pole():
    f = get_system("mobius")
    for x0 in (-4.0, 0.0, 0.5, 10.0):
        est = estimate_omega(f, [x0])
        assert est.status == "converged"
        assert abs(est.points.mean() - (-1.0)) < 1e-6, x0
