"""Limit-set estimation, clustering, boundedness, basins, and witnesses."""

import dataclasses

import numpy as np
import pytest

from limitlab import (BasinConfig, EstimatorConfig, LimitSetEstimate,
                      basin_closedness_witness, catalog_from_seeds,
                      catalog_to_dict, classify_boundedness, cluster_limit_sets,
                      compute_basins, estimate_alpha, estimate_omega,
                      get_system, hausdorff, write_basin_csv, DomainRegion,
                      LinearSystem)
from limitlab.errors import UnconvergedError
from limitlab.serialize import validate

FAST = EstimatorConfig(burn=200, tail=200, max_rounds=6)


# -- estimates -------------------------------------------------------------------

def test_omega_mobius_attracting_fixed_point():
    est = estimate_omega(get_system("mobius"), [0.0])
    assert est.converged and est.status == "converged"
    assert est.shape == "fixed-point" and est.period == 1
    assert hausdorff(est.points, [[-1.0]]) < 1e-12
    assert est.settle_gap <= est.settle_tol


def test_omega_at_exact_fixed_point():
    est = estimate_omega(get_system("mobius"), [1.0])
    assert est.converged
    assert (est.points == 1.0).all()        # the repelling point is exactly fixed


def test_omega_escape_is_a_status_not_an_error():
    est = estimate_omega(get_system("scalar-linear", a=1.1), [1.0])
    assert not est.converged
    assert est.status == "escaped"


def test_omega_singular_status():
    est = estimate_omega(get_system("mobius"), [5.0 / 3.0])
    assert est.status == "singular"
    assert not est.converged


def test_omega_unconverged_status():
    # defective unit eigenvalue: the orbit drifts forever without escaping fast
    est = estimate_omega(get_system("jordan", lam=1.0, m=2), [0.0, 1.0], FAST)
    assert est.status == "unconverged"
    assert not est.converged


def test_alpha_mobius_repelling_fixed_point():
    est = estimate_alpha(get_system("mobius"), [0.0])
    assert est.converged and est.source == "alpha"
    assert hausdorff(est.points, [[1.0]]) < 1e-6


def test_omega_rotation_invariant_circle():
    est = estimate_omega(get_system("rotation-scaling"), [2.0, 0.0])
    assert est.converged
    assert est.shape == "curve" and est.period is None
    radii = np.linalg.norm(est.points, axis=1)
    assert np.abs(radii - 1.0).max() < 1e-9


def test_omega_negation_period_two():
    est = estimate_omega(get_system("negation"), [0.7])
    assert est.converged
    assert est.shape == "periodic-orbit" and est.period == 2
    assert est.diameter == pytest.approx(1.4)


def test_omega_burn_invariance():
    # pushing the whole sampling window forward in time moves a converged
    # estimate by less than its own settle tolerance (limit sets map into
    # themselves)
    for name, x0 in [("mobius", [0.0]), ("cot-map", [1.0]),
                     ("rotation-scaling", [2.0, 0.0])]:
        system = get_system(name)
        e1 = estimate_omega(system, x0)
        e2 = estimate_omega(system, x0,
                            dataclasses.replace(EstimatorConfig(),
                                                burn=EstimatorConfig().burn + EstimatorConfig().tail))
        assert e1.converged and e2.converged
        tol = max(e1.settle_tol, e2.settle_tol)
        assert hausdorff(e1.points, e2.points) <= tol, name


# -- boundedness ------------------------------------------------------------------

def test_classify_boundedness_verdicts():
    assert classify_boundedness(get_system("scalar-linear", a=0.5), [1.0]).verdict == "bounded"
    assert classify_boundedness(get_system("negation"), [0.7]).verdict == "bounded"
    verdict = classify_boundedness(get_system("scalar-linear", a=1.1), [1.0])
    assert verdict.verdict == "unbounded"
    assert verdict.max_norm > verdict.escape_radius


def test_omega_convergence_matches_boundedness_on_linear_maps():
    # bounded linear orbits settle; unbounded ones escape
    cases = [(np.diag([0.5, 0.5]), [1.0, 1.0], True),
             (np.diag([1.1, 0.5]), [1.0, 1.0], False),
             (0.9 * np.array([[np.cos(1), np.sin(1)], [-np.sin(1), np.cos(1)]]),
              [1.0, 1.0], True)]
    for A, xi, bounded in cases:
        system = LinearSystem(A).as_map()
        est = estimate_omega(system, xi)
        assert est.converged == bounded
        assert (classify_boundedness(system, xi).verdict == "bounded") == bounded


# -- clustering -------------------------------------------------------------------

def test_cluster_rejects_unconverged_estimates():
    good = estimate_omega(get_system("mobius"), [0.0])
    bad = estimate_omega(get_system("scalar-linear", a=1.1), [1.0])
    with pytest.raises(UnconvergedError):
        cluster_limit_sets([good, bad])


def test_cluster_negation_families_stay_distinct():
    system = get_system("negation")
    ests = [estimate_omega(system, [s]) for s in (0.7, 1.3, 0.0, -0.4)]
    catalog = cluster_limit_sets(ests)
    assert catalog.labels == ["S0", "S1", "S2", "S3"]
    # members are ordered by first-seen seed: -0.4, 0.0, 0.7, 1.3
    assert [m.diameter for m in catalog.members] == pytest.approx([0.8, 0.0, 1.4, 2.6], abs=1e-9)
    assert [m.shape for m in catalog.members] == [
        "periodic-orbit", "fixed-point", "periodic-orbit", "periodic-orbit"]


def test_cluster_merges_phase_shifted_curve_samples(rotation_catalog):
    # three circle estimates sampled at different orbit phases sit ~half a
    # sampling gap apart; the merge tolerance adapts and keeps them together
    system = get_system("rotation-scaling")
    ests = [estimate_omega(system, s) for s in ([2.0, 0.0], [0.5, 0.5], [-1.5, 0.25])]
    catalog = cluster_limit_sets(ests)
    assert len(catalog) == 1
    assert catalog.members[0].n_estimates == 3
    assert catalog.members[0].shape == "curve"


def test_cluster_is_idempotent(rotation_catalog):
    synthetic = [
        LimitSetEstimate(points=m.points, source="omega", seed=m.first_seed,
                         diameter=m.diameter, shape=m.shape, period=m.period,
                         converged=True, status="converged",
                         settle_gap=0.0, settle_tol=1e-7)
        for m in rotation_catalog.members
    ]
    again = cluster_limit_sets(synthetic)
    assert len(again) == len(rotation_catalog)
    for a, b in zip(again.members, rotation_catalog.members):
        assert hausdorff(a.points, b.points) == 0.0


def test_catalog_from_seeds_reports_skips():
    catalog, skipped = catalog_from_seeds(get_system("jordan"),  # lam=1, defective
                                          [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
                                          cfg=FAST)
    assert len(catalog) == 1                     # only the fixed ray converges
    assert hausdorff(catalog.members[0].points, [[1.0, 0.0]]) < 1e-9
    assert len(skipped) == 2
    assert {status for _, status in skipped} == {"unconverged"}


def test_catalog_lookup_and_separation(mobius_unit_catalog, rotation_catalog):
    cat = mobius_unit_catalog
    assert cat.labels == ["S0", "S1"]
    assert hausdorff(cat.member("S0").points, [[-1.0]]) < 1e-9
    assert hausdorff(cat.member("S1").points, [[1.0]]) < 1e-9
    assert cat.min_separation() == pytest.approx(2.0, rel=1e-9)
    assert rotation_catalog.min_separation() == pytest.approx(1.0, rel=1e-6)
    with pytest.raises(KeyError):
        cat.member("S9")


def test_catalog_match_and_tolerance(mobius_unit_catalog):
    cat = mobius_unit_catalog
    assert cat.match(np.array([[-1.0 + 1e-9]])) == "S0"
    assert cat.match(np.array([[1.0 - 1e-9]])) == "S1"
    assert cat.match(np.array([[0.3]])) is None
    for m in cat.members:
        assert 0.0 < cat.match_tolerance(m) < cat.min_separation()


def test_catalog_to_dict_validates(rotation_catalog, mobius_unit_catalog):
    for cat in (rotation_catalog, mobius_unit_catalog):
        doc = catalog_to_dict(cat)
        validate(doc, "limit-set-catalog")
        assert len(doc["members"]) == len(cat)


# -- basins -----------------------------------------------------------------------

def test_basins_mobius_unit_interval(mobius_unit, mobius_unit_catalog):
    basins = compute_basins(mobius_unit, mobius_unit_catalog, resolution=401)
    codes = basins.codes
    assert codes.shape == (401,)
    labels = [basins.label_of_code(c) for c in np.unique(codes)]
    counts = {lab: int((codes == c).sum())
              for c, lab in zip(np.unique(codes), labels)}
    # everything attracts to -1 except the repelling endpoint node at exactly 1.0
    assert counts == {"S0": 400, "S1": 1}
    assert basins.node((400,))[0] == 1.0
    assert basins.label_at((400,)) == "S1"


def test_basins_are_thread_count_independent(mobius_unit, mobius_unit_catalog):
    a = compute_basins(mobius_unit, mobius_unit_catalog, resolution=101, threads=1)
    b = compute_basins(mobius_unit, mobius_unit_catalog, resolution=101, threads=4)
    assert np.array_equal(a.codes, b.codes)


def test_basin_escape_and_singular_codes():
    doubler = get_system("scalar-linear", a=2.0)
    catalog, _ = catalog_from_seeds(doubler, [0.0], cfg=FAST)
    region = DomainRegion.interval(-1.0, 1.0, excluded=[0.5], eps_excl=0.015)
    basins = compute_basins(doubler.restrict(region), catalog,
                            region=region, resolution=101)
    labels = [basins.label_at((i,)) for i in range(101)]
    assert labels[50] == "S0"                   # the node at exactly 0.0
    assert labels[75] == "singular"             # the node inside the excluded ball
    assert labels.count("escaped") >= 90
    assert set(labels) == {"S0", "singular", "escaped"}


def test_basin_csv_golden(tmp_path):
    half = get_system("scalar-linear", a=0.5)
    catalog, _ = catalog_from_seeds(half, [1.0], cfg=FAST)
    basins = compute_basins(half, catalog,
                            region=DomainRegion.interval(-1.0, 1.0), resolution=3)
    path = tmp_path / "basins.csv"
    write_basin_csv(basins, path)
    assert path.read_text() == "i,label\n0,S0\n1,S0\n2,S0\n"


def test_basin_params_record_the_settling_policy(mobius_unit, mobius_unit_catalog):
    basins = compute_basins(mobius_unit, mobius_unit_catalog, resolution=11)
    assert basins.params["tol_cluster"] == mobius_unit_catalog.tol_cluster
    assert set(basins.params["match_tolerances"]) == {"S0", "S1"}


# -- closedness witnesses ------------------------------------------------------------

def test_witness_found_on_the_open_basin(mobius_unit, mobius_unit_catalog):
    basins = compute_basins(mobius_unit, mobius_unit_catalog, resolution=101)
    witnesses = basin_closedness_witness(mobius_unit, basins)
    assert witnesses
    w = witnesses[0]
    # a sequence inside the attracting basin shrinks onto the repelling point
    assert w.sequence_label == "S0"
    assert w.limit_label == "S1"
    assert w.limit_point[0] == pytest.approx(1.0)
    gaps = np.abs(w.sequence[:, 0] - w.limit_point[0])
    assert (np.diff(gaps) < 0).all()            # strictly shrinking toward the limit


def test_no_witness_on_linear_system():
    A = np.diag([0.5, 2.0])
    system = LinearSystem(A).as_map()
    catalog, _ = catalog_from_seeds(system, [[1.0, 0.0]], cfg=FAST)
    basins = compute_basins(system, catalog,
                            region=DomainRegion.box([[-2.0, 2.0], [-2.0, 2.0]]),
                            resolution=101)
    assert basin_closedness_witness(system, basins) == []
