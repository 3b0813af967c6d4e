from itertools import product

import numpy as np
import pytest

from propnet import (
    GisPatch,
    RasterGrid,
    InputTensor,
    AntennaConfig,
    PathLossMatrix,
    AugmentTransform,
    augment,
    sector_pattern,
    build_input_tensor,
    dihedral_transforms,
)
from tests.test_utils import _check_values
from propnet.exceptions import NonSquare
from tests.tests_tensor.test_cases import (
    TEST_MUL,
    TEST_ORDER,
    TEST_AZIMUTH,
    TEST_CALL_ON_ARRAY,
    TEST_CONSTRUCTOR_ERROR,
)


@pytest.mark.parametrize(
    argnames="rotation, error, msg",
    argvalues=TEST_CONSTRUCTOR_ERROR,
    ids=[f"rotation={r}" for r, _, _ in TEST_CONSTRUCTOR_ERROR],
)
def test_constructor_error(rotation, error, msg) -> None:
    """Tests for exceptions to the constructor of the class `AugmentTransform`."""
    with pytest.raises(error, match=msg):
        _ = AugmentTransform(rotation=rotation)


@pytest.mark.parametrize(
    argnames="transform, array, expected_value",
    argvalues=TEST_CALL_ON_ARRAY,
    ids=[t.rep() for t, _, _ in TEST_CALL_ON_ARRAY],
)
def test_call_on_array(transform, array, expected_value) -> None:
    """Tests for the method `__call__()` on arrays."""
    _check_values(expression=f"{transform.rep()}(array)", evaluation=transform(array).tolist(), expected=expected_value)


@pytest.mark.parametrize(
    argnames="left, right, expected_value",
    argvalues=TEST_MUL,
    ids=[f"{a.rep()}*{b.rep()}" for a, b, _ in TEST_MUL],
)
def test_mul(left, right, expected_value) -> None:
    """Tests for the method `__mul__()`."""
    _check_values(expression=f"{left.rep()} * {right.rep()}", evaluation=left * right, expected=expected_value)


def test_mul_matches_composition() -> None:
    """Tests that the product of two transforms acts as their composition, the right one first."""
    array = np.arange(9).reshape(3, 3)
    for left, right in product(dihedral_transforms(), repeat=2):
        np.testing.assert_array_equal((left * right)(array), left(right(array)), err_msg=f"{left} * {right}")


def test_mul_error() -> None:
    """Tests for exceptions to the method `__mul__()`."""
    with pytest.raises(TypeError, match="Product between types `AugmentTransform` and"):
        _ = AugmentTransform() * 2


@pytest.mark.parametrize(
    argnames="transform, expected_value",
    argvalues=TEST_ORDER,
    ids=[t.rep() for t, _ in TEST_ORDER],
)
def test_order(transform, expected_value) -> None:
    """Tests for the method `order()`."""
    _check_values(expression=f"{transform.rep()}.order()", evaluation=transform.order(), expected=expected_value)
    _check_values(
        expression=f"{transform.rep()} ** order",
        evaluation=transform**expected_value,
        expected=AugmentTransform(),
    )


def test_inverse() -> None:
    """Tests for the methods `inverse()` and `__pow__()`."""
    for transform in dihedral_transforms():
        _check_values(
            expression=f"{transform} * inverse",
            evaluation=transform * transform.inverse(),
            expected=AugmentTransform(),
        )
        _check_values(expression=f"{transform} ** -1", evaluation=transform**-1, expected=transform.inverse())
    with pytest.raises(TypeError, match="Power operation for type"):
        _ = AugmentTransform(rotation=90) ** 1.5


def test_dihedral_transforms() -> None:
    """Tests for the method `dihedral_transforms()`."""
    transforms = list(dihedral_transforms())
    _check_values(expression="len(transforms)", evaluation=len(transforms), expected=8)
    _check_values(expression="transforms[0]", evaluation=transforms[0], expected=AugmentTransform())
    _check_values(expression="len(set(transforms))", evaluation=len(set(transforms)), expected=8)
    for left, right in product(transforms, repeat=2):
        assert left * right in transforms


@pytest.mark.parametrize(
    argnames="transform, deg, expected_value",
    argvalues=TEST_AZIMUTH,
    ids=[f"{t.rep()}.azimuth({d})" for t, d, _ in TEST_AZIMUTH],
)
def test_azimuth(transform, deg, expected_value) -> None:
    """Tests for the method `azimuth()`."""
    _check_values(
        expression=f"{transform.rep()}.azimuth({deg})",
        evaluation=transform.azimuth(deg),
        expected=expected_value,
    )


def test_call_on_non_square() -> None:
    """Tests that only the half turns apply to non-square arrays."""
    array = np.arange(6).reshape(2, 3)
    _check_values(
        expression="AugmentTransform(rotation=180)(array)",
        evaluation=AugmentTransform(rotation=180)(array).tolist(),
        expected=[[5, 4, 3], [2, 1, 0]],
    )
    with pytest.raises(NonSquare, match=r"Cannot rotate by 90 degrees a non-square shape \(2, 3\)."):
        _ = AugmentTransform(rotation=90)(array)
    with pytest.raises(TypeError, match="Calling an augmentation transform on"):
        _ = AugmentTransform()([[1, 2], [3, 4]])


def test_augment() -> None:
    """Tests for the method `augment()`."""
    data = np.zeros((8, 2, 2))
    data[3] = [[0.25, -0.5], [1.0, 0.0]]
    tensor = InputTensor(data=data)
    label = PathLossMatrix(
        values=np.array([[100.0, 110.0], [120.0, 130.0]]),
        mask=np.array([[True, False], [True, True]]),
    )

    mirrored_tensor, mirrored_label = augment(tensor, label, AugmentTransform(mirror=True))
    _check_values(
        expression="mirrored azimuth",
        evaluation=mirrored_tensor.channel("azimuth").tolist(),
        expected=[[0.5, -0.25], [0.0, -1.0]],
    )
    _check_values(
        expression="mirrored values",
        evaluation=mirrored_label.values.tolist(),
        expected=[[0.0, 100.0], [130.0, 120.0]],
    )
    _check_values(
        expression="mirrored mask",
        evaluation=mirrored_label.mask.tolist(),
        expected=[[False, True], [True, True]],
    )

    rotated_tensor, rotated_label = augment(tensor, label, AugmentTransform(rotation=90))
    _check_values(
        expression="rotated azimuth",
        evaluation=rotated_tensor.channel("azimuth").tolist(),
        expected=[[-0.5, 0.0], [0.25, 1.0]],
    )
    _check_values(
        expression="rotated mask",
        evaluation=rotated_label.mask.tolist(),
        expected=[[False, True], [True, True]],
    )

    with pytest.raises(ValueError, match=r"Expected a label of shape \(2, 2\)"):
        _ = augment(tensor, PathLossMatrix(values=np.zeros((3, 3))), AugmentTransform())


def test_call_on_patch_moves_the_antenna() -> None:
    """Tests that transforming a patch carries the antenna pixel along."""
    layer = RasterGrid(values=np.zeros((6, 6)), resolution_m=10.0)
    patch = GisPatch(clutter=layer, building=layer, terrain=layer)
    _check_values(expression="patch.center_pixel", evaluation=patch.center_pixel, expected=(3, 3))
    _check_values(
        expression="rotated center",
        evaluation=AugmentTransform(rotation=90)(patch).center_pixel,
        expected=(2, 3),
    )
    _check_values(
        expression="mirrored center",
        evaluation=AugmentTransform(mirror=True)(patch).center_pixel,
        expected=(3, 2),
    )
    _check_values(
        expression="half turn center",
        evaluation=AugmentTransform(rotation=180)(patch).center_pixel,
        expected=(2, 2),
    )


@pytest.mark.parametrize(
    argnames="transform",
    argvalues=list(dihedral_transforms()),
    ids=[t.rep() for t in dihedral_transforms()],
)
def test_build_input_tensor_is_equivariant(transform) -> None:
    """Tests that building the tensor of a transformed patch equals transforming the tensor of the patch."""
    rng = np.random.default_rng(7)
    terrain = np.round(rng.uniform(0.0, 30.0, size=(6, 6)), 2)
    building = np.round(rng.uniform(0.0, 20.0, size=(6, 6)), 1)
    clutter = rng.integers(1, 22, size=(6, 6)).astype(float)
    patch = GisPatch(
        clutter=RasterGrid(values=clutter, resolution_m=25.0),
        building=RasterGrid(values=building, resolution_m=25.0),
        terrain=RasterGrid(values=terrain, resolution_m=25.0),
    )
    pattern = sector_pattern(peak_gain_dbi=17.0, h_beamwidth_deg=65.0)

    def antenna(azimuth_deg: float) -> AntennaConfig:
        return AntennaConfig(
            easting_m=0.0,
            northing_m=0.0,
            height_m=35.0,
            azimuth_deg=azimuth_deg,
            tilt_deg=4.0,
            pattern=pattern,
            pattern_name="sector65",
        )

    expected = transform(build_input_tensor(patch, antenna(30.0)))
    evaluation = build_input_tensor(transform(patch), antenna(transform.azimuth(30.0)))
    np.testing.assert_allclose(evaluation.data, expected.data, atol=1e-9)
