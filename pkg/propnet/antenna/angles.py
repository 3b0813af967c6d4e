from typing import Union

import numpy as np

__all__ = ["wrap_angle"]


def wrap_angle(deg: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Wrap an angle, or an array of angles, in degrees into the interval (-180, 180].

    :param deg: The angle(s) in degrees.
    :type deg: Union[float, np.ndarray]

    :return: The angle(s) congruent to `deg` modulo 360 lying in (-180, 180].
    :rtype: Union[float, np.ndarray]

    :example:
        >>> from propnet import wrap_angle
        ...
        >>> wrap_angle(540)
        180.0
        >>> wrap_angle(-190)
        170.0
    """
    wrapped = 180.0 - np.mod(180.0 - np.asarray(deg, dtype=float), 360.0)
    # np.mod may round up to 360 for tiny negative arguments
    wrapped = np.where(wrapped <= -180.0, wrapped + 360.0, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped
