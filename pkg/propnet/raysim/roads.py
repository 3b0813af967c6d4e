import numpy as np

from propnet._utils import _rng

__all__ = ["road_mask"]

MIN_COVERAGE: float = 0.01
MAX_COVERAGE: float = 0.5
# the walk gives up after this many steps per pixel of the image
MAX_STEPS_PER_PIXEL: int = 50

_DIRECTIONS = np.array([(-1, 0), (0, 1), (1, 0), (0, -1)])


def road_mask(W: int, H: int, seed: int, coverage_target: float = 0.075) -> np.ndarray:
    """Return a drive-test mask: the pixels visited by a random walk along straight road segments.

    The walk starts at a random pixel and repeatedly drives a straight segment of random length before turning
    left or right by 90 degrees; at the border of the image it turns back inside. It stops as soon as
    ``round(coverage_target * W * H)`` distinct pixels are visited, so the visited pixels form one connected road
    network.

    :param W: Width of the mask.
    :type W: int
    :param H: Height of the mask.
    :type H: int
    :param seed: Seed of the PCG64 generator.
    :type seed: int
    :param coverage_target: Fraction of the pixels to visit, in [0.01, 0.5].
    :type coverage_target: float

    :return: Boolean mask of shape (H, W).
    :rtype: np.ndarray

    :raises ValueError: If the coverage target lies outside [0.01, 0.5].

    :example:
        >>> from propnet import road_mask
        ...
        >>> int(road_mask(W=40, H=40, seed=3, coverage_target=0.1).sum())
        160
    """
    if not MIN_COVERAGE <= coverage_target <= MAX_COVERAGE:
        raise ValueError(f"Expected a coverage target in [{MIN_COVERAGE}, {MAX_COVERAGE}], but got {coverage_target}.")
    rng = _rng(seed)
    mask = np.zeros((H, W), dtype=bool)
    target = max(1, int(round(coverage_target * W * H)))

    row, col = int(rng.integers(H)), int(rng.integers(W))
    heading = int(rng.integers(4))
    mask[row, col] = True
    visited, steps = 1, 0
    while visited < target and steps < MAX_STEPS_PER_PIXEL * W * H:
        length = int(rng.integers(3, max(4, max(W, H) // 2)))
        steps += 1
        for _ in range(length):
            d_row, d_col = _DIRECTIONS[heading]
            if not (0 <= row + d_row < H and 0 <= col + d_col < W):
                heading = (heading + 2) % 4
                break
            row, col = row + d_row, col + d_col
            steps += 1
            if not mask[row, col]:
                mask[row, col] = True
                visited += 1
                if visited == target:
                    break
        heading = (heading + (1 if rng.random() < 0.5 else -1)) % 4
    return mask
