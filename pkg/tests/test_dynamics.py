"""Guarded domains, map evaluation, and finite-orbit iteration."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limitlab import (DiscreteMap, DomainRegion, evaluate, get_system, iterate,
                      iterate_back, list_systems, orbit_tail,
                      read_trajectory_csv, write_trajectory_csv)
from limitlab.dynamics import as_state
from limitlab.errors import DomainError, NoInverseError


# -- states ----------------------------------------------------------------------

def test_as_state_promotes_scalars():
    assert as_state(0.5).shape == (1,)
    assert as_state([1.0, 2.0], dim=2).shape == (2,)


def test_as_state_rejects_bad_input():
    with pytest.raises(ValueError):
        as_state([[1.0, 2.0]])
    with pytest.raises(ValueError):
        as_state([1.0], dim=2)
    with pytest.raises(ValueError):
        as_state([np.nan])
    with pytest.raises(ValueError):
        as_state([np.inf])


# -- regions -----------------------------------------------------------------------

def test_interval_bounds_are_closed():
    region = DomainRegion.interval(-1.0, 1.0)
    assert region.contains([-1.0]) and region.contains([1.0])
    assert not region.contains([1.0 + 1e-12])
    assert region.violation([2.0]) == "out-of-bounds"


def test_excluded_points_carry_a_protective_ball():
    region = DomainRegion.full_space(1, excluded=[3.0])
    assert region.violation([3.0]) == "excluded-point"
    assert region.violation([3.0 + 1e-12]) == "excluded-point"
    assert region.contains([3.1])


def test_annulus_membership_is_radial():
    region = DomainRegion.annulus(1.0, 2.0)
    assert region.contains([1.5, 0.0])
    assert region.contains([0.0, 2.0])
    assert not region.contains([0.5, 0.0])
    assert not region.contains([2.0, 1.0])


def test_region_validation_errors():
    with pytest.raises(ValueError):
        DomainRegion("blob", 1)
    with pytest.raises(ValueError):
        DomainRegion.interval(1.0, 1.0)          # needs lo < hi
    with pytest.raises(ValueError):
        DomainRegion.annulus(-0.5, 1.0)
    with pytest.raises(ValueError):
        DomainRegion("interval", 1, np.array([[0.0, np.nan]]))


def test_grid_includes_endpoints_and_exact_interior_nodes():
    region = DomainRegion.box([[-2.0, 2.0]])
    (axis,) = region.grid(401)
    assert axis[0] == -2.0 and axis[-1] == 2.0
    assert axis[300] == 1.0                      # exactly representable node
    with pytest.raises(ValueError):
        DomainRegion.full_space(1).grid(11)


def test_sample_stays_in_region_and_respects_exclusions(rng):
    region = DomainRegion.interval(-1.0, 1.0, excluded=[0.0], eps_excl=0.2)
    pts = region.sample(256, rng)
    assert pts.shape == (256, 1)
    assert region.contains_batch(pts).all()
    assert (np.abs(pts[:, 0]) > 0.2).all()


def test_sample_unbounded_needs_a_box(rng):
    region = DomainRegion.full_space(2)
    with pytest.raises(ValueError):
        region.sample(8, rng)
    pts = region.sample(8, rng, box=[[-1.0, 1.0], [-1.0, 1.0]])
    assert (np.abs(pts) <= 1.0).all()


def test_contains_batch_matches_pointwise(rng):
    region = DomainRegion.annulus(0.5, 2.0)
    pts = rng.uniform(-3, 3, size=(128, 2))
    mask = region.contains_batch(pts)
    assert mask.tolist() == [region.contains(p) for p in pts]


# -- maps --------------------------------------------------------------------------

def test_map_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        DiscreteMap(dim=2, forward=lambda x: x,
                    domain=DomainRegion.interval(0.0, 1.0))


def test_reversed_swaps_directions():
    mob = get_system("mobius")
    rev = mob.reversed()
    x = np.array([0.5])
    assert rev.forward(x) == pytest.approx(mob.inverse(x))
    assert rev.domain is mob.inverse_domain
    twice = rev.reversed()
    assert twice.forward(x) == pytest.approx(mob.forward(x))


def test_evaluate_checks_domain_and_image():
    mob = get_system("mobius")
    with pytest.raises(DomainError) as exc:
        evaluate(mob, [3.0])
    assert exc.value.reason == "excluded-point"

    blower = DiscreteMap(dim=1, forward=lambda x: x * np.inf,
                         domain=DomainRegion.full_space(1))
    with pytest.raises(DomainError) as exc:
        evaluate(blower, [1.0])
    assert exc.value.reason == "non-finite-image"


# -- iteration ----------------------------------------------------------------------

def test_iterate_mobius_matches_closed_form():
    mob = get_system("mobius")
    traj = iterate(mob, [0.0], 40)
    k = np.arange(41)
    closed = -(2.0 ** k - 1.0) / (2.0 ** k + 1.0)
    assert traj.termination == "completed"
    assert np.abs(traj.points[:, 0] - closed).max() < 1e-12


def test_iterate_is_deterministic_bitwise():
    cot = get_system("cot-map")
    a = iterate(cot, [1.3], 200)
    b = iterate(cot, [1.3], 200)
    assert np.array_equal(a.points, b.points)


def test_iterate_semigroup_property():
    # running a+b steps equals running a then b: same float ops in same order
    cot = get_system("cot-map")
    for a, b in [(0, 10), (7, 3), (25, 75)]:
        whole = iterate(cot, [1.3], a + b)
        part = iterate(cot, iterate(cot, [1.3], a).last, b)
        assert whole.last == part.last


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=40), st.integers(min_value=0, max_value=40),
       st.floats(min_value=-0.99, max_value=0.99))
def test_iterate_semigroup_property_random_splits(a, b, x0):
    mob = get_system("mobius")
    whole = iterate(mob, [x0], a + b)
    part = iterate(mob, iterate(mob, [x0], a).last, b)
    assert whole.last == part.last


def test_singular_termination_keeps_the_offending_point():
    mob = get_system("mobius")
    traj = iterate(mob, [5.0 / 3.0], 10)  # maps straight onto the excluded pole
    assert traj.termination == "singular"
    assert traj.steps_taken == 1
    assert traj.last[0] == pytest.approx(3.0, abs=1e-12)


def test_diverged_termination_exceeds_guard_radius():
    doubler = get_system("scalar-linear", a=2.0)
    traj = iterate(doubler, [1.0], 10_000, r_div=1e6)
    assert traj.termination == "diverged"
    assert np.abs(traj.last).max() > 1e6


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.1, max_value=10.0), st.floats(min_value=1.5, max_value=3.0))
def test_diverged_guard_property(x0, a):
    sys = get_system("scalar-linear", a=a)
    traj = iterate(sys, [x0], 5000, r_div=1e8)
    assert traj.termination == "diverged"
    assert np.abs(traj.last).max() > 1e8


def test_left_domain_termination():
    mob = get_system("mobius").restrict(DomainRegion.interval(0.0, 0.5))
    traj = iterate(mob, [0.4], 10)
    assert traj.termination == "left-domain"


def test_iterate_back_runs_the_inverse():
    mob = get_system("mobius")
    back = iterate_back(mob, [0.0], 5)
    fwd = iterate(mob, back.last, 5)
    assert fwd.last[0] == pytest.approx(0.0, abs=1e-12)


def test_iterate_back_without_inverse_raises():
    one_way = DiscreteMap(dim=1, forward=lambda x: 0.5 * x,
                          domain=DomainRegion.full_space(1))
    with pytest.raises(NoInverseError):
        iterate_back(one_way, [1.0], 3)
    with pytest.raises(NoInverseError):
        one_way.reversed()


def test_orbit_tail_window():
    half = get_system("scalar-linear", a=0.5)
    tail = orbit_tail(half, [1.0], burn=3, n=4)
    assert tail.termination == "completed"
    assert tail.points[:, 0] == pytest.approx([0.125, 0.0625, 0.03125, 0.015625])
    with pytest.raises(ValueError):
        orbit_tail(half, [1.0], burn=-1, n=4)


# -- catalog-wide inverse consistency ------------------------------------------------

def test_inverse_consistency_across_catalog(rng):
    # f(f^-1(x)) ~ x for every catalogued map with an inverse
    box_by_dim = {1: [[-2.0, 2.0]], 2: [[-1.8, 1.8]] * 2}
    for entry in list_systems():
        system = get_system(entry["name"])
        if system.inverse is None:
            continue
        region = system.inverse_domain or system.domain
        pts = region.sample(1000, rng, box=box_by_dim[system.dim])
        with np.errstate(all="ignore"):
            back = np.asarray(system.inverse(pts), dtype=float).reshape(pts.shape)
            ok = np.isfinite(back).all(axis=1) & system.domain.contains_batch(
                np.where(np.isfinite(back), back, 0.0))
            fwd = np.asarray(system.forward(back[ok]), dtype=float).reshape(-1, system.dim)
        assert ok.sum() > 900, entry["name"]
        rel = np.linalg.norm(fwd - pts[ok], axis=1) / (1.0 + np.linalg.norm(pts[ok], axis=1))
        assert rel.max() < 1e-9, entry["name"]


# -- trajectory CSV -------------------------------------------------------------------

def test_trajectory_csv_round_trip(tmp_path):
    rot = get_system("rotation-scaling")
    traj = iterate(rot, [2.0, 0.0], 25)
    path = tmp_path / "orbit.csv"
    write_trajectory_csv(traj, path)
    loaded = read_trajectory_csv(path)
    assert loaded.termination == traj.termination
    assert np.array_equal(loaded.points, traj.points)   # repr round-trips floats

    singular = iterate(get_system("mobius"), [5.0 / 3.0], 10)
    write_trajectory_csv(singular, path)
    assert read_trajectory_csv(path).termination == "singular"
