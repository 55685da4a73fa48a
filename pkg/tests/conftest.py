import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260813)


def make_field(data, h_x=1.0, h_y=1.0, unit=None):
    """Shorthand for building a ScalarField from a nested list/array."""
    from rmkit.grids import ScalarField, UnitTag

    if unit is None:
        unit = UnitTag.LINEAR_POWER
    return ScalarField(np.asarray(data, dtype=np.float64), h_x=h_x, h_y=h_y, unit=unit)
