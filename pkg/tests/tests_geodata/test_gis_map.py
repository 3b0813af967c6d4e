import numpy as np
import pytest

from propnet import (
    GisMap,
    GisPatch,
    RasterGrid,
    load_gis_map,
    save_gis_map,
    extract_patch,
    synth_gis_map,
    normalize_terrain,
)
from propnet import exceptions
from tests.test_utils import _check_values
from tests.tests_geodata.test_cases import TEST_CONTAINS, TEST_EXTRACT_PATCH, TEST_EXTRACT_PATCH_ERROR


def _toy_map() -> GisMap:
    """Return a 10x10 map of open land at 10 m, whose terrain rises by 1 m per row towards the south."""
    rows = np.repeat(np.arange(10.0)[:, None], 10, axis=1)
    origin = (0.0, 100.0)
    return GisMap(
        clutter=RasterGrid(values=np.ones((10, 10)), resolution_m=10.0, origin=origin),
        building=RasterGrid(values=np.zeros((10, 10)), resolution_m=10.0, origin=origin),
        terrain=RasterGrid(values=100.0 + rows, resolution_m=10.0, origin=origin),
        name="toy",
    )


def test_gis_map_constructor_error() -> None:
    """Tests for exceptions to the constructor of the class `GisMap`."""
    grid = RasterGrid(values=np.ones((4, 4)), resolution_m=10.0)
    with pytest.raises(exceptions.DimensionMismatch, match="Expected the building layer to match"):
        _ = GisMap(clutter=grid, building=RasterGrid(np.ones((4, 5)), 10.0), terrain=grid)
    with pytest.raises(exceptions.DimensionMismatch, match="Expected the terrain layer to match"):
        _ = GisMap(clutter=grid, building=grid, terrain=RasterGrid(np.ones((4, 4)), 5.0))
    with pytest.raises(exceptions.DimensionMismatch, match="Expected the terrain layer origin"):
        _ = GisMap(clutter=grid, building=grid, terrain=RasterGrid(np.ones((4, 4)), 10.0, origin=(1.0, 0.0)))
    with pytest.raises(exceptions.ParseError, match="Expected clutter codes to be integers"):
        _ = GisMap(clutter=RasterGrid(np.full((4, 4), 30.0), 10.0), building=grid, terrain=grid)


def test_gis_map_properties() -> None:
    """Tests for the properties of the class `GisMap`."""
    gis_map = _toy_map()
    _check_values(expression="gis_map.bounds()", evaluation=gis_map.bounds(), expected=(0.0, 0.0, 100.0, 100.0))
    _check_values(expression="gis_map.resolution_m", evaluation=gis_map.resolution_m, expected=10.0)
    _check_values(
        expression="repr(gis_map)", evaluation=repr(gis_map), expected="GisMap(name='toy', width=10, height=10)"
    )
    assert "terrain range" in gis_map.describe()


@pytest.mark.parametrize(
    argnames="coordinates, expected_value",
    argvalues=TEST_CONTAINS,
    ids=[f"contains{c} = {b}" for c, b in TEST_CONTAINS],
)
def test_contains(coordinates, expected_value) -> None:
    """Tests for the method `contains()`."""
    _check_values(
        expression=f"gis_map.contains{coordinates}",
        evaluation=_toy_map().contains(*coordinates),
        expected=expected_value,
    )


@pytest.mark.parametrize(
    argnames="antenna_xy, origin, padded",
    argvalues=TEST_EXTRACT_PATCH,
    ids=[f"extract_patch({a})" for a, _, _ in TEST_EXTRACT_PATCH],
)
def test_extract_patch(antenna_xy, origin, padded) -> None:
    """Tests for the method `extract_patch()`."""
    patch = extract_patch(_toy_map(), antenna_xy=antenna_xy, width=8, height=8)
    _check_values(expression="patch.center_pixel", evaluation=patch.center_pixel, expected=(4, 4))
    _check_values(expression="patch.clutter.origin", evaluation=patch.clutter.origin, expected=origin)
    _check_values(expression="padded clutter cells", evaluation=int((patch.clutter.values == 0).sum()), expected=padded)
    _check_values(expression="padded building cells", evaluation=int(patch.building.values.sum()), expected=0)
    _check_values(expression="min(patch.terrain)", evaluation=float(patch.terrain.values.min()), expected=0.0)


def test_extract_patch_replicates_terrain() -> None:
    """Tests that the terrain outside the map replicates the nearest edge of the map."""
    patch = extract_patch(_toy_map(), antenna_xy=(5.0, 95.0), width=8, height=8)
    _check_values(
        expression="patch.terrain[:, 0]",
        evaluation=patch.terrain.values[:, 0].tolist(),
        expected=[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0],
    )
    _check_values(
        expression="patch.clutter[4]",
        evaluation=patch.clutter.values[4].tolist(),
        expected=[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0],
    )


@pytest.mark.parametrize(
    argnames="antenna_xy, width, height, error, msg",
    argvalues=TEST_EXTRACT_PATCH_ERROR,
    ids=[f"{error}: {msg}" for _, _, _, error, msg in TEST_EXTRACT_PATCH_ERROR],
)
def test_extract_patch_error(antenna_xy, width, height, error, msg) -> None:
    """Tests for exceptions to the method `extract_patch()`."""
    error = TypeError if error == "TypeError" else getattr(exceptions, error)
    with pytest.raises(error, match=msg):
        _ = extract_patch(_toy_map(), antenna_xy=antenna_xy, width=width, height=height)


def test_offsets_m() -> None:
    """Tests for the method `offsets_m()`."""
    patch = extract_patch(_toy_map(), antenna_xy=(55.0, 45.0), width=8, height=8)
    east, north = patch.offsets_m()
    _check_values(expression="east[4, 7]", evaluation=float(east[4, 7]), expected=30.0)
    _check_values(expression="north[0, 4]", evaluation=float(north[0, 4]), expected=40.0)
    _check_values(expression="east[4, 4]", evaluation=float(east[4, 4]), expected=0.0)
    _check_values(expression="north[4, 4]", evaluation=float(north[4, 4]), expected=0.0)


def test_gis_patch_constructor_error() -> None:
    """Tests for exceptions to the constructor of the class `GisPatch`."""
    grid = RasterGrid(values=np.zeros((8, 8)), resolution_m=10.0)
    with pytest.raises(exceptions.DimensionMismatch, match="Expected the antenna pixel inside the patch"):
        _ = GisPatch(clutter=grid, building=grid, terrain=grid, center_pixel=(8, 0))


def test_normalize_terrain() -> None:
    """Tests for the method `normalize_terrain()`."""
    terrain = RasterGrid(values=np.array([[12.0, -9999.0], [10.0, 15.0]]), resolution_m=10.0)
    zeros = RasterGrid(values=np.zeros((2, 2)), resolution_m=10.0)
    patch = normalize_terrain(GisPatch(clutter=zeros, building=zeros, terrain=terrain))
    _check_values(
        expression="normalize_terrain(patch).terrain",
        evaluation=patch.terrain.values.tolist(),
        expected=[[2.0, -9999.0], [0.0, 5.0]],
    )
    nodata = RasterGrid(values=np.full((2, 2), -9999.0), resolution_m=10.0)
    with pytest.raises(exceptions.AllNoData, match="Expected at least one valid terrain cell"):
        _ = normalize_terrain(GisPatch(clutter=zeros, building=zeros, terrain=nodata))


def test_save_and_load_gis_map(tmp_path) -> None:
    """Tests for the methods `save_gis_map()` and `load_gis_map()`."""
    gis_map = synth_gis_map(name="city", width=24, height=16, resolution_m=10.0, seed=3)
    save_gis_map(gis_map, tmp_path / "city")
    loaded = load_gis_map(tmp_path / "city")
    _check_values(expression="loaded.name", evaluation=loaded.name, expected="city")
    _check_values(expression="loaded.clutter", evaluation=loaded.clutter, expected=gis_map.clutter)
    _check_values(expression="loaded.building", evaluation=loaded.building, expected=gis_map.building)
    _check_values(expression="loaded.terrain", evaluation=loaded.terrain, expected=gis_map.terrain)
