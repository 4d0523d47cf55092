"""Shared fixtures: catalogs that several test modules reuse.

Building a limit-set catalog costs a few thousand map iterations, so the ones
used across files are session-scoped.
"""

import numpy as np
import pytest

from limitlab import DomainRegion, catalog_from_seeds, default_seeds, get_system


@pytest.fixture(scope="session")
def cot_catalog():
    system = get_system("cot-map")
    catalog, skipped = catalog_from_seeds(system, default_seeds("cot-map"))
    assert skipped == []
    return catalog


@pytest.fixture(scope="session")
def rotation_catalog():
    system = get_system("rotation-scaling")
    catalog, skipped = catalog_from_seeds(system, [[0.0, 0.0], [2.0, 0.0]])
    assert skipped == []
    return catalog


@pytest.fixture(scope="session")
def mobius_unit():
    """The rational map restricted to its invariant interval [-1, 1]."""
    return get_system("mobius").restrict(DomainRegion.interval(-1.0, 1.0))


@pytest.fixture(scope="session")
def mobius_unit_catalog(mobius_unit):
    catalog, skipped = catalog_from_seeds(mobius_unit, [[0.0], [1.0]])
    assert skipped == []
    return catalog


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
