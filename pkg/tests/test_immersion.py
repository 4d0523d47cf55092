"""Conjugacy residuals, limit-set pushforwards, collapse, and injectivity."""

import numpy as np
import pytest

from limitlab import (DiscreteMap, DomainRegion, EstimatorConfig, ImmersionMap,
                      LimitSetCatalog, LinearSystem, collapse_report,
                      conjugacy_residual, exact_immersion, get_system,
                      injectivity_probe, omega_alpha_consistency,
                      pushforward_check)
from limitlab.errors import DomainError, UnconvergedError
from limitlab.serialize import validate


def cos_map(lo, hi):
    return ImmersionMap(1, 1, lambda X: np.cos(np.asarray(X, dtype=float)),
                        DomainRegion.interval(lo, hi), name="cos")


def rotation_block_map(theta=1.0):
    A = np.zeros((3, 3))
    c, s = np.cos(theta), np.sin(theta)
    A[:2, :2] = [[c, s], [-s, c]]
    A[2, 2] = 0.5
    return LinearSystem(A, name="rotation-block").as_map()


# -- ImmersionMap ------------------------------------------------------------------

def test_immersion_domain_checks():
    F = exact_immersion("mobius", 0).immersion     # (x+1)/(x-1) on x < 1
    assert F([0.0])[0] == -1.0
    with pytest.raises(DomainError) as exc:
        F([1.0])
    assert exc.value.reason == "excluded-point"
    with pytest.raises(DomainError) as exc:
        F([2.0])
    assert exc.value.reason == "out-of-bounds"


def test_immersion_apply_raises_on_first_offender():
    F = exact_immersion("mobius", 0).immersion
    with pytest.raises(DomainError):
        F.apply(np.array([[0.0], [0.5], [1.5]]))
    out = F.apply(np.array([[0.0], [0.5]]))
    assert out.shape == (2, 1)


def test_immersion_restriction_narrows_the_domain():
    F = cos_map(-np.pi, np.pi)
    G = F.restricted(DomainRegion.interval(0.0, np.pi))
    assert G([1.0]) == pytest.approx(F([1.0]))
    with pytest.raises(DomainError):
        G([-1.0])


# -- conjugacy residual ----------------------------------------------------------------

def test_conjugacy_residual_matches_handrolled_oracle():
    # brute-force the defining expression point by point and compare
    ent = exact_immersion("cot-map", 0)
    f = get_system("cot-map")
    samples = np.linspace(0.1, np.pi - 0.1, 57)[:, None]
    expected = []
    for x in samples:
        lhs = ent.immersion(np.asarray(f.forward(x), dtype=float))
        rhs = ent.target.forward(ent.immersion(x))
        expected.append(float(np.abs(lhs - rhs).max()))
    report = conjugacy_residual(ent.immersion, f, ent.target, samples)
    assert report.samples_used == 57 and report.samples_skipped == 0
    assert report.max_residual == pytest.approx(max(expected), abs=1e-18)
    assert report.mean_residual == pytest.approx(np.mean(expected), abs=1e-18)
    assert report.max_residual < 1e-14


def test_conjugacy_residual_detects_a_non_immersion():
    # x^2 does not intertwine the rational map with halving: at x=0 the
    # defect is exactly |f(0)^2 - 0| = 1/9
    F = ImmersionMap(1, 1, lambda X: np.asarray(X, dtype=float) ** 2,
                     DomainRegion.full_space(1), name="square")
    f = get_system("mobius")
    g = LinearSystem(np.array([[0.5]])).as_map()
    report = conjugacy_residual(F, f, g, np.array([[0.0]]))
    assert report.max_residual == pytest.approx(1.0 / 9.0, rel=1e-12)
    assert report.worst_point[0] == 0.0


def test_conjugacy_residual_skip_accounting():
    ent = exact_immersion("mobius", 0)
    f = get_system("mobius")
    samples = np.array([[0.5], [3.0], [2.0], [np.nan]])
    # 3.0 is excluded from f's domain, 2.0 is outside the immersion's domain,
    # nan is never usable; only 0.5 contributes
    report = conjugacy_residual(ent.immersion, f, ent.target, samples)
    assert report.samples_used == 1
    assert report.samples_skipped == 3


def test_conjugacy_residual_needs_at_least_one_sample():
    ent = exact_immersion("mobius", 0)
    with pytest.raises(DomainError):
        conjugacy_residual(ent.immersion, get_system("mobius"), ent.target,
                           np.array([[2.0], [5.0]]))
    with pytest.raises(ValueError):
        conjugacy_residual(ent.immersion, get_system("mobius"), ent.target,
                           np.array([[0.0, 0.0]]))


def test_conjugacy_report_validates():
    ent = exact_immersion("mobius", 0)
    report = conjugacy_residual(ent.immersion, get_system("mobius"), ent.target,
                                np.linspace(-2, 0.5, 40)[:, None])
    validate(report.to_dict(), "conjugacy-report")


# -- pushforward -------------------------------------------------------------------------

def test_pushforward_mobius_alpha_is_vacuous():
    ent = exact_immersion("mobius", 0)
    report = pushforward_check(ent.immersion, get_system("mobius"), ent.target, [0.0])
    assert report.hausdorff_omega < 1e-12
    assert report.one_sided_omega <= report.hausdorff_omega
    # the halved target has no backward limit set from a nonzero start
    assert report.alpha_status == "escape-vacuous"
    assert report.hausdorff_alpha is None
    validate(report.to_dict(), "pushforward-report")


def test_pushforward_cot_checks_alpha():
    ent = exact_immersion("cot-map", 0)
    report = pushforward_check(ent.immersion, get_system("cot-map"), ent.target, [1.0])
    assert report.hausdorff_omega < 1e-12
    assert report.alpha_status == "checked"
    assert report.hausdorff_alpha < 1e-12
    assert report.one_sided_alpha <= report.hausdorff_alpha


def test_pushforward_rotation_scaling():
    ent = exact_immersion("rotation-scaling", 0)
    report = pushforward_check(ent.immersion, get_system("rotation-scaling"),
                               ent.target, [2.0, 0.0])
    assert report.hausdorff_omega < 1e-10
    assert report.omega_source.shape == "curve"
    # backward iteration leaves the annulus on the source side
    assert report.alpha_status == "escape-vacuous"


def test_pushforward_requires_converged_omega():
    ent = exact_immersion("jordan", 0)        # identity lift of the defective block
    with pytest.raises(UnconvergedError):
        pushforward_check(ent.immersion, get_system("jordan"), ent.target,
                          [0.0, 1.0], EstimatorConfig(burn=100, tail=100, max_rounds=3))


def test_pushforward_without_inverse_reports_no_inverse():
    half_domain = DomainRegion.full_space(1)
    f = DiscreteMap(dim=1, forward=lambda x: 0.5 * np.asarray(x, dtype=float),
                    domain=half_domain, name="half-one-way")
    F = ImmersionMap(1, 1, lambda X: np.asarray(X, dtype=float), half_domain)
    report = pushforward_check(F, f, f, [1.0])
    assert report.alpha_status == "no-inverse"


# -- collapse ---------------------------------------------------------------------------

def test_collapse_raises_at_unrepresentable_member(rotation_catalog):
    ent = exact_immersion("rotation-scaling", 0)
    with pytest.raises(DomainError) as exc:
        collapse_report(ent.immersion, rotation_catalog, seed=42)
    assert exc.value.reason == "excluded-point"
    assert np.linalg.norm(np.asarray(exc.value.point)) < 1e-9


def test_collapse_separated_members(cot_catalog):
    F = cos_map(0.0, np.pi)
    report = collapse_report(F, cot_catalog, seed=42)
    assert report.labels == ("S0", "S1")
    assert report.pairwise[0, 1] == pytest.approx(2.0, rel=1e-9)   # cos{0} vs cos{pi}
    assert report.maximal_member is None
    assert report.collapse_ratio == pytest.approx(1.0, rel=1e-3)
    validate(report.to_dict(), "collapse-report")


def test_collapse_constant_map_is_total(cot_catalog):
    F = ImmersionMap(1, 1, lambda X: np.ones_like(np.asarray(X, dtype=float)),
                     DomainRegion.interval(0.0, np.pi), name="one")
    report = collapse_report(F, cot_catalog, seed=42)
    assert report.collapse_ratio == 0.0
    assert report.image_diameter == 0.0
    assert report.maximal_member == "S0"


def test_collapse_single_member_has_no_ratio():
    member_points = np.array([[0.0]])
    catalog_one, _ = __import__("limitlab").catalog_from_seeds(
        get_system("scalar-linear", a=0.5), [0.5])
    F = ImmersionMap(1, 1, lambda X: np.asarray(X, dtype=float),
                     DomainRegion.interval(-1.0, 1.0))
    report = collapse_report(F, catalog_one, seed=42)
    assert len(catalog_one) == 1
    assert report.collapse_ratio is None
    assert member_points.shape == (1, 1)


def test_collapse_is_permutation_equivariant(cot_catalog):
    F = cos_map(0.0, np.pi)
    flipped = LimitSetCatalog(members=tuple(reversed(cot_catalog.members)),
                              tol_cluster=cot_catalog.tol_cluster,
                              gap_factor=cot_catalog.gap_factor)
    samples = np.linspace(0.0, np.pi, 64)[:, None]
    a = collapse_report(F, cot_catalog, samples=samples)
    b = collapse_report(F, flipped, samples=samples)
    assert b.labels == tuple(reversed(a.labels))
    perm = [1, 0]
    assert np.array_equal(b.pairwise, a.pairwise[np.ix_(perm, perm)])
    assert a.collapse_ratio == b.collapse_ratio


# -- injectivity -------------------------------------------------------------------------

def test_injectivity_cos_is_injective_on_half_period(rng):
    F = cos_map(0.0, np.pi)
    samples = rng.uniform(0.0, np.pi, size=(600, 1))
    report = injectivity_probe(F, samples)
    assert report.n_collisions == 0
    assert report.collisions == ()
    assert report.min_separation_ratio > 0.0
    validate(report.to_dict(), "injectivity-report")


def test_injectivity_cos_folds_on_full_period():
    F = cos_map(-np.pi, np.pi)
    grid = np.linspace(-np.pi, np.pi, 401)[:, None]
    report = injectivity_probe(F, grid)
    # every mirror pair (x, -x) lands on the same image
    assert report.n_collisions == 200
    assert report.min_separation_ratio == 0.0
    worst = report.collisions[0]
    assert worst[0][0] == pytest.approx(-worst[1][0])


def test_injectivity_recording_is_capped_but_counting_is_not():
    F = ImmersionMap(1, 1, lambda X: np.ones_like(np.asarray(X, dtype=float)),
                     DomainRegion.interval(0.0, 1.0))
    pts = np.linspace(0.0, 1.0, 80)[:, None]
    report = injectivity_probe(F, pts)
    assert report.pairs_checked == 80 * 79 // 2
    assert report.n_collisions == report.pairs_checked
    assert len(report.collisions) == 256


def test_injectivity_needs_two_samples():
    F = cos_map(0.0, np.pi)
    with pytest.raises(ValueError):
        injectivity_probe(F, np.array([[1.0]]))


# -- forward/backward consistency -----------------------------------------------------------

def test_consistency_flags_the_open_basin(mobius_unit):
    report = omega_alpha_consistency(mobius_unit, [0.0])
    assert not report.consistent
    assert report.hausdorff_distance == pytest.approx(2.0, rel=1e-9)
    assert "inconsistent" in report.detail
    validate(report.to_dict(), "consistency-report")


def test_consistency_flags_cot_interior_point():
    report = omega_alpha_consistency(get_system("cot-map"), [2.0])
    assert not report.consistent
    assert report.hausdorff_distance == pytest.approx(np.pi, rel=1e-9)


def test_consistency_vacuous_on_escape():
    report = omega_alpha_consistency(get_system("scalar-linear", a=0.5), [0.7])
    assert report.consistent
    assert report.detail == "escape (vacuous)"
    assert report.hausdorff_distance is None


def test_consistency_matched_on_linear_invariant_circle():
    report = omega_alpha_consistency(rotation_block_map(), [1.0, 0.0, 0.0])
    assert report.consistent
    assert report.detail == "matched"
    assert report.hausdorff_distance < report.tolerance


def test_consistency_never_flags_linear_targets():
    # closed basins forward and backward: any mismatch would be estimator noise
    cases = [
        (LinearSystem(np.array([[0.5]])).as_map(), [[0.0], [0.7], [-2.0]]),
        (LinearSystem(np.array([[2.0]])).as_map(), [[0.0], [0.3]]),
        (rotation_block_map(), [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.4, 0.3, 0.2]]),
        (get_system("jordan", lam=0.5, m=2), [[1.0, 1.0], [0.0, 0.0]]),
    ]
    for g, points in cases:
        for z0 in points:
            report = omega_alpha_consistency(g, z0)
            assert report.consistent, (g.name, z0)


def test_consistency_unconverged_raises():
    with pytest.raises(UnconvergedError):
        omega_alpha_consistency(get_system("jordan"), [0.0, 1.0],
                                EstimatorConfig(burn=100, tail=100, max_rounds=3))
