import numpy as np
import pytest

from propnet import synth_gis_map
from tests.test_utils import _check_values

SYNTHETIC_CLUTTER_CODES = {1, 2, 5, 13, 14, 15}


@pytest.mark.parametrize(
    argnames="width, height, resolution_m, seed",
    argvalues=[(32, 32, 10.0, 0), (48, 24, 5.0, 1), (20, 40, 25.0, 7)],
    ids=["32x32 at 10 m", "48x24 at 5 m", "20x40 at 25 m"],
)
def test_synth_gis_map(width, height, resolution_m, seed) -> None:
    """Tests for the method `synth_gis_map()`."""
    gis_map = synth_gis_map(name="demo", width=width, height=height, resolution_m=resolution_m, seed=seed)
    _check_values(expression="gis_map.width", evaluation=gis_map.width, expected=width)
    _check_values(expression="gis_map.height", evaluation=gis_map.height, expected=height)
    _check_values(
        expression="gis_map.bounds()",
        evaluation=gis_map.bounds(),
        expected=(0.0, 0.0, width * resolution_m, height * resolution_m),
    )
    codes = set(np.unique(gis_map.clutter.values).astype(int).tolist())
    assert codes <= SYNTHETIC_CLUTTER_CODES, f"unexpected clutter codes {codes - SYNTHETIC_CLUTTER_CODES}"
    buildings = gis_map.building.values[gis_map.building.values > 0]
    assert np.all((buildings >= 5.0) & (buildings <= 60.0))
    assert np.all(gis_map.building.values[gis_map.clutter.values == 2] == 0.0)


def test_synth_gis_map_determinism() -> None:
    """Tests that the method `synth_gis_map()` only depends on its seed."""
    first = synth_gis_map(name="a", width=32, height=32, resolution_m=10.0, seed=5)
    second = synth_gis_map(name="a", width=32, height=32, resolution_m=10.0, seed=5)
    third = synth_gis_map(name="a", width=32, height=32, resolution_m=10.0, seed=6)
    _check_values(expression="same seed", evaluation=first.terrain == second.terrain, expected=True)
    _check_values(expression="same seed", evaluation=first.building == second.building, expected=True)
    _check_values(expression="other seed", evaluation=first.terrain == third.terrain, expected=False)
