from typing import Optional

import numpy as np
import pytest

from propnet import (
    GisPatch,
    Profile,
    RasterGrid,
    MobileConfig,
    AntennaConfig,
    knife_edge_v,
    extract_profile,
    free_space_loss,
    knife_edge_loss,
    diffraction_loss,
)
from tests.test_utils import _check_values
from propnet.exceptions import SamePixel, NonPositiveInput
from tests.tests_raysim.test_cases import TEST_KNIFE_EDGE_V, TEST_KNIFE_EDGE_LOSS, TEST_FREE_SPACE_LOSS


@pytest.mark.parametrize(
    argnames="d_m, f_mhz, expected_value",
    argvalues=TEST_FREE_SPACE_LOSS,
    ids=[f"free_space_loss({d}, {f})" for d, f, _ in TEST_FREE_SPACE_LOSS],
)
def test_free_space_loss(d_m, f_mhz, expected_value) -> None:
    """Tests for the method `free_space_loss()`."""
    assert free_space_loss(d_m=d_m, f_mhz=f_mhz) == pytest.approx(expected_value, abs=1e-9)


def test_free_space_loss_scaling() -> None:
    """Tests that scaling the distance by `k` adds ``20 log k`` to the loss."""
    distances = np.array([12.5, 140.0, 999.0, 8000.0])
    for k in (2.0, 3.5, 10.0):
        np.testing.assert_allclose(
            free_space_loss(k * distances, 1800.0),
            free_space_loss(distances, 1800.0) + 20.0 * np.log10(k),
            atol=1e-9,
        )


@pytest.mark.parametrize(argnames="d_m, f_mhz", argvalues=[(0.0, 900.0), (100.0, -1.0)], ids=["distance", "frequency"])
def test_free_space_loss_error(d_m, f_mhz) -> None:
    """Tests for exceptions to the method `free_space_loss()`."""
    with pytest.raises(NonPositiveInput, match="Expected strictly positive distances and frequencies."):
        _ = free_space_loss(d_m=d_m, f_mhz=f_mhz)


@pytest.mark.parametrize(
    argnames="v, expected_value, tolerance",
    argvalues=TEST_KNIFE_EDGE_LOSS,
    ids=[f"knife_edge_loss({v})" for v, _, _ in TEST_KNIFE_EDGE_LOSS],
)
def test_knife_edge_loss(v, expected_value, tolerance) -> None:
    """Tests for the method `knife_edge_loss()`."""
    assert knife_edge_loss(v) == pytest.approx(expected_value, abs=tolerance)


def test_knife_edge_loss_is_non_decreasing() -> None:
    """Tests that the knife-edge loss never decreases with the Fresnel parameter and is never negative."""
    losses = knife_edge_loss(np.linspace(-2.0, 10.0, 6001))
    assert np.all(np.diff(losses) >= 0)
    assert np.all(losses >= 0)


@pytest.mark.parametrize(
    argnames="profile, edge_index, f_mhz, expected_value, tolerance",
    argvalues=TEST_KNIFE_EDGE_V,
    ids=["obstructing edge", "edge on the line", "edge on a sloped line", "edge below the line"],
)
def test_knife_edge_v(profile, edge_index, f_mhz, expected_value, tolerance) -> None:
    """Tests for the method `knife_edge_v()`."""
    assert knife_edge_v(profile, edge_index=edge_index, f_mhz=f_mhz) == pytest.approx(expected_value, abs=tolerance)


def test_knife_edge_v_error() -> None:
    """Tests for exceptions to the method `knife_edge_v()`."""
    with pytest.raises(IndexError, match="The profile has 1 samples, but got the edge index 1."):
        _ = knife_edge_v(Profile([500.0], [10.0], 0.0, 0.0, 1000.0), edge_index=1, f_mhz=900.0)


@pytest.mark.parametrize(
    argnames="distances, heights, msg",
    argvalues=[
        ([100.0, 100.0], [0.0, 0.0], "Expected strictly increasing and strictly positive distances."),
        ([0.0], [0.0], "Expected strictly increasing and strictly positive distances."),
        ([1000.0], [0.0], "Expected every sample before the receiver at 1000.0 m."),
        ([100.0], [0.0, 1.0], "Expected one obstruction height per distance."),
    ],
    ids=["repeated", "at the antenna", "at the receiver", "sizes"],
)
def test_profile_error(distances, heights, msg) -> None:
    """Tests for exceptions to the constructor of the class `Profile`."""
    with pytest.raises(ValueError, match=msg):
        _ = Profile(distances, heights, 30.0, 1.5, 1000.0)


def _patch(building: np.ndarray, terrain: Optional[np.ndarray] = None, resolution_m: float = 10.0) -> GisPatch:
    terrain = np.zeros(building.shape) if terrain is None else terrain
    layer = RasterGrid(values=np.zeros(building.shape), resolution_m=resolution_m)
    return GisPatch(clutter=layer, building=layer.with_values(building), terrain=layer.with_values(terrain))


_ANTENNA = AntennaConfig(easting_m=0.0, northing_m=0.0, height_m=30.0)


@pytest.mark.parametrize(
    argnames="target, expected_samples",
    argvalues=[((4, 5), 0), ((5, 5), 0), ((3, 4), 0), ((4, 6), 1), ((4, 8), 3), ((6, 6), 1), ((0, 0), 3)],
    ids=["east", "diagonal", "north", "two east", "four east", "two diagonal", "corner"],
)
def test_extract_profile_samples(target, expected_samples) -> None:
    """Tests that the method `extract_profile()` samples each pixel crossed strictly between the end points."""
    profile = extract_profile(_patch(np.zeros((9, 9))), _ANTENNA, target, MobileConfig())
    _check_values(expression=f"len(profile to {target})", evaluation=len(profile), expected=expected_samples)
    np.testing.assert_array_equal(profile.obstruction_heights_m, 0.0)


def test_extract_profile_building_midway() -> None:
    """Tests that a building midway appears once, at the distance of its crossing."""
    building = np.zeros((9, 9))
    building[4, 6] = 30.0
    profile = extract_profile(_patch(building), _ANTENNA, (4, 8), MobileConfig(height_m=2.0))
    _check_values(expression="profile.distances_m", evaluation=profile.distances_m.tolist(), expected=[10.0, 20.0, 30.0])
    _check_values(
        expression="profile.obstruction_heights_m",
        evaluation=profile.obstruction_heights_m.tolist(),
        expected=[0.0, 30.0, 0.0],
    )
    _check_values(expression="profile.total_distance_m", evaluation=profile.total_distance_m, expected=40.0)
    _check_values(expression="profile.antenna_altitude_m", evaluation=profile.antenna_altitude_m, expected=30.0)
    _check_values(expression="profile.receiver_altitude_m", evaluation=profile.receiver_altitude_m, expected=2.0)


def test_extract_profile_matches_supersampled_line() -> None:
    """Tests that the crossed pixels are the ones met by a finely supersampled straight line."""
    rng = np.random.default_rng(11)
    building = np.round(rng.uniform(0.0, 40.0, size=(15, 15)), 1)
    terrain = np.round(rng.uniform(0.0, 10.0, size=(15, 15)), 2)
    patch = _patch(building, terrain)
    heights = building + terrain
    for target in ((0, 3), (14, 11), (2, 13), (9, 0)):
        profile = extract_profile(patch, _ANTENNA, target, MobileConfig())
        total = np.hypot(target[0] - 7, target[1] - 7) * 10.0
        ts = np.arange(0.05, total, 0.1) / total
        rows = np.floor(7.5 + ts * (target[0] - 7)).astype(int)
        cols = np.floor(7.5 + ts * (target[1] - 7)).astype(int)
        crossed = [(r, c) for r, c in dict.fromkeys(zip(rows, cols)) if (r, c) not in ((7, 7), target)]
        _check_values(
            expression=f"obstructions to {target}",
            evaluation=profile.obstruction_heights_m.tolist(),
            expected=[heights[pixel] for pixel in crossed],
        )
        _check_values(
            expression=f"antenna altitude to {target}",
            evaluation=profile.antenna_altitude_m,
            expected=terrain[7, 7] + 30.0,
        )
        _check_values(
            expression=f"receiver altitude to {target}",
            evaluation=profile.receiver_altitude_m,
            expected=terrain[target] + 1.5,
        )


def test_extract_profile_error() -> None:
    """Tests for exceptions to the method `extract_profile()`."""
    with pytest.raises(SamePixel, match=r"The target pixel \(4, 4\) is the antenna pixel."):
        _ = extract_profile(_patch(np.zeros((9, 9))), _ANTENNA, (4, 4), MobileConfig())


def test_diffraction_loss_unobstructed() -> None:
    """Tests that a clear flat profile has no diffraction loss."""
    profile = Profile(np.arange(100.0, 1000.0, 100.0), np.zeros(9), 30.0, 1.5, 1000.0)
    _check_values(
        expression="diffraction_loss(profile)",
        evaluation=diffraction_loss(profile, f_mhz=900.0),
        expected=0.0,
    )


def test_diffraction_loss_single_edge() -> None:
    """Tests that a single obstructing edge costs its knife-edge loss."""
    profile = Profile([500.0], [10.0], 0.0, 0.0, 1000.0)
    expected = knife_edge_loss(knife_edge_v(profile, edge_index=0, f_mhz=1000.0))
    assert diffraction_loss(profile, f_mhz=1000.0) == pytest.approx(expected)
    assert diffraction_loss(profile, f_mhz=1000.0) == pytest.approx(17.44, abs=0.01)


def test_diffraction_loss_two_edges() -> None:
    """Tests the construction on two equal edges symmetric about the midpoint."""
    wavelength = 299.792458 / 1000.0
    profile = Profile([300.0, 700.0], [10.0, 10.0], 0.0, 0.0, 1000.0)
    single = Profile([300.0], [10.0], 0.0, 0.0, 1000.0)

    principal = 10.0 * np.sqrt(2.0 * 1000.0 / (wavelength * 300.0 * 700.0))
    clearance = 10.0 - 10.0 * 400.0 / 700.0
    secondary = clearance * np.sqrt(2.0 * 700.0 / (wavelength * 400.0 * 300.0))
    expected = knife_edge_loss(principal) + knife_edge_loss(secondary)

    assert diffraction_loss(profile, f_mhz=1000.0) == pytest.approx(expected, abs=1e-9)
    assert diffraction_loss(profile, f_mhz=1000.0) > diffraction_loss(single, f_mhz=1000.0)


def test_diffraction_loss_considers_at_most_three_edges() -> None:
    """Tests that the edges beyond the principal one and one per side are ignored."""
    distances = np.array([100.0, 200.0, 500.0, 800.0, 900.0])
    low = Profile(distances, np.array([0.0, 0.0, 20.0, 0.0, 0.0]), 0.0, 0.0, 1000.0)
    wall = Profile(distances, np.array([0.0, 8.0, 20.0, 8.0, 0.0]), 0.0, 0.0, 1000.0)
    crowded = Profile(distances, np.array([3.5, 8.0, 20.0, 8.0, 3.5]), 0.0, 0.0, 1000.0)
    assert diffraction_loss(wall, f_mhz=1000.0) > diffraction_loss(low, f_mhz=1000.0)
    assert diffraction_loss(crowded, f_mhz=1000.0) == pytest.approx(diffraction_loss(wall, f_mhz=1000.0))
