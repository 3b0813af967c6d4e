from typing import Optional

import numpy as np
import pytest

from propnet import (
    RadiationPattern,
    load_pattern,
    save_pattern,
    pattern_gain,
    sector_pattern,
    omnidirectional_pattern,
)
from tests.test_utils import _check_values
from propnet.exceptions import ParseError, MissingCut, AngleOutOfRange
from tests.tests_antenna.test_cases import TEST_PATTERN_GAIN, TEST_PATTERN_ERROR


@pytest.mark.parametrize(
    argnames="pattern, az_off, el_off, expected_value",
    argvalues=TEST_PATTERN_GAIN,
    ids=[f"{p.rep()}.gain({a}, {e}) = {g}" for p, a, e, g in TEST_PATTERN_GAIN],
)
def test_pattern_gain(pattern, az_off, el_off, expected_value) -> None:
    """Tests for the method `pattern_gain()`."""
    assert pattern_gain(pattern, az_off_deg=az_off, el_off_deg=el_off) == pytest.approx(expected_value, abs=1e-12)


def test_pattern_gain_is_continuous_across_the_seam() -> None:
    """Tests that the horizontal interpolation wraps around 0 degrees."""
    pattern = sector_pattern(h_beamwidth_deg=60.0)
    _check_values(
        expression="gain(0.5) == gain(-0.5)",
        evaluation=pattern.gain(0.5, 0.0) == pattern.gain(-0.5, 0.0),
        expected=True,
    )
    assert pattern.gain(359.75, 0.0) == pytest.approx(pattern.gain(-0.25, 0.0))


def test_pattern_gain_vectorized() -> None:
    """Tests for the method `pattern_gain()` on arrays."""
    pattern = sector_pattern(h_beamwidth_deg=60.0, v_beamwidth_deg=10.0)
    gains = pattern_gain(pattern, az_off_deg=np.array([[0.0, 30.0]]), el_off_deg=np.array([[0.0, -5.0]]))
    _check_values(expression="gains.shape", evaluation=gains.shape, expected=(1, 2))
    np.testing.assert_allclose(gains, [[17.0, 11.0]])


@pytest.mark.parametrize(
    argnames="el_off",
    argvalues=[90.5, -91.0, np.array([0.0, 100.0])],
    ids=["90.5", "-91", "array"],
)
def test_pattern_gain_error(el_off) -> None:
    """Tests for exceptions to the method `pattern_gain()`."""
    with pytest.raises(AngleOutOfRange, match=r"Expected elevation offsets in \[-90, 90\]"):
        _ = pattern_gain(omnidirectional_pattern(), az_off_deg=0.0, el_off_deg=el_off)


@pytest.mark.parametrize(
    argnames="horizontal_cut, vertical_cut, peak_gain_dbi, error, msg",
    argvalues=TEST_PATTERN_ERROR,
    ids=[msg for _, _, _, _, msg in TEST_PATTERN_ERROR],
)
def test_constructor_error(horizontal_cut, vertical_cut, peak_gain_dbi, error, msg) -> None:
    """Tests for exceptions to the constructor of the class `RadiationPattern`."""
    with pytest.raises(error, match=msg):
        _ = RadiationPattern(horizontal_cut=horizontal_cut, vertical_cut=vertical_cut, peak_gain_dbi=peak_gain_dbi)


def test_sector_pattern() -> None:
    """Tests for the method `sector_pattern()`."""
    pattern = sector_pattern(peak_gain_dbi=15.0, h_beamwidth_deg=90.0, v_beamwidth_deg=12.0, front_to_back_db=20.0)
    _check_values(expression="pattern.peak_gain_dbi", evaluation=pattern.peak_gain_dbi, expected=15.0)
    _check_values(expression="pattern.horizontal_cut[45]", evaluation=pattern.horizontal_cut[45], expected=-3.0)
    _check_values(expression="pattern.horizontal_cut[315]", evaluation=pattern.horizontal_cut[315], expected=-3.0)
    _check_values(expression="pattern.horizontal_cut[180]", evaluation=pattern.horizontal_cut[180], expected=-20.0)
    _check_values(expression="pattern.vertical_cut[96]", evaluation=pattern.vertical_cut[96], expected=-3.0)
    _check_values(expression="pattern.vertical_cut[0]", evaluation=pattern.vertical_cut[0], expected=-20.0)
    assert "front-to-back" in pattern.describe()
    with pytest.raises(ValueError, match="The parameter `h_beamwidth_deg` must be strictly positive"):
        _ = sector_pattern(h_beamwidth_deg=0.0)
    with pytest.raises(ValueError, match="The parameter `front_to_back_db` must be non-negative"):
        _ = sector_pattern(front_to_back_db=-1.0)


def test_save_and_load_pattern(tmp_path) -> None:
    """Tests for the methods `save_pattern()` and `load_pattern()`."""
    pattern = sector_pattern(peak_gain_dbi=17.0, h_beamwidth_deg=65.0, v_beamwidth_deg=10.0)
    save_pattern(pattern, tmp_path / "sector.pat")
    loaded = load_pattern(tmp_path / "sector.pat")
    _check_values(expression="loaded.peak_gain_dbi", evaluation=loaded.peak_gain_dbi, expected=17.0)
    np.testing.assert_allclose(loaded.horizontal_cut, pattern.horizontal_cut, atol=1e-8)
    np.testing.assert_allclose(loaded.vertical_cut, pattern.vertical_cut, atol=1e-8)


def _pattern_file(horizontal: Optional[str] = None, vertical: Optional[str] = None, gain: str = "GAIN 10") -> str:
    """Return the content of a pattern file made of the given sections."""
    lines = [gain]
    if horizontal is not None:
        lines += ["HORIZONTAL 360"] + [f"{deg} {horizontal}" for deg in range(360)]
    if vertical is not None:
        lines += ["VERTICAL 181"] + [f"{deg} {vertical}" for deg in range(-90, 91)]
    return "\n".join(lines) + "\n"


@pytest.mark.parametrize(
    argnames="horizontal, vertical, expected_peak",
    argvalues=[("-2", "-2", 8.0), ("-1.5", "-0.5", 9.5), ("0", "-3", 10.0), ("0", "0", 10.0)],
    ids=["both cuts at -2", "cuts at -1.5 and -0.5", "vertical cut at -3", "normalized cuts"],
)
def test_load_pattern_renormalizes(tmp_path, horizontal, vertical, expected_peak) -> None:
    """Tests that the method `load_pattern()` renormalizes both cuts and folds the largest maximum into the peak."""
    path = tmp_path / "flat.pat"
    path.write_text(_pattern_file(horizontal=horizontal, vertical=vertical))
    pattern = load_pattern(path)
    _check_values(expression="pattern.peak_gain_dbi", evaluation=pattern.peak_gain_dbi, expected=expected_peak)
    _check_values(expression="max(H)", evaluation=float(pattern.horizontal_cut.max()), expected=0.0)
    _check_values(expression="max(V)", evaluation=float(pattern.vertical_cut.max()), expected=0.0)
    _check_values(expression="boresight gain", evaluation=pattern.gain(0.0, 0.0), expected=expected_peak)


def test_load_pattern_off_boresight_peak(tmp_path) -> None:
    """Tests that a vertical cut peaking away from boresight is rejected as malformed."""
    vertical = ["VERTICAL 181"] + [f"{deg} {-1 - abs(deg + 6) / 10:g}" for deg in range(-90, 91)]
    lines = ["GAIN 10", "HORIZONTAL 360"] + [f"{deg} 0" for deg in range(360)] + vertical
    path = tmp_path / "downtilt.pat"
    path.write_text("\n".join(lines) + "\n")
    msg = "Expected the vertical cut of .* to peak at boresight, but its maximum -1 dB lies at -6 degrees."
    with pytest.raises(ParseError, match=msg):
        _ = load_pattern(path)


@pytest.mark.parametrize(
    argnames="content, error, msg",
    argvalues=[
        (_pattern_file(horizontal="0"), MissingCut, "The vertical cut is missing"),
        (_pattern_file(vertical="0"), MissingCut, "The horizontal cut is missing"),
        (_pattern_file(horizontal="0", vertical="0", gain="PEAK 10"), ParseError, "to be `GAIN <dBi>`"),
        (_pattern_file(horizontal="0", vertical="0", gain="GAIN x"), ParseError, "Expected a number after `GAIN`"),
        (_pattern_file(horizontal="zero", vertical="0"), ParseError, "Malformed line"),
        ("GAIN 10\nHORIZONTAL 36\n", ParseError, "Expected the header `HORIZONTAL 360`"),
        ("GAIN 10\nDIAGONAL 3\n", ParseError, "Unexpected line `DIAGONAL 3`"),
    ],
    ids=["no vertical cut", "no horizontal cut", "no gain", "gain not a number", "bad value", "bad size", "bad cut"],
)
def test_load_pattern_error(tmp_path, content, error, msg) -> None:
    """Tests for exceptions to the method `load_pattern()`."""
    path = tmp_path / "bad.pat"
    path.write_text(content)
    with pytest.raises(error, match=msg):
        _ = load_pattern(path)
