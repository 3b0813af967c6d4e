import csv
from typing import Tuple, Union, Optional
from pathlib import Path
from collections import OrderedDict

import numpy as np

from propnet._base import _Record
from propnet._utils import _freeze, _pretty_print_table
from propnet.exceptions import ParseError
from propnet.geodata._validators import MAX_CLUTTER_CODE

__all__ = ["ClutterLossTable", "default_clutter_table", "load_clutter_table", "save_clutter_table"]

# synthetic land-use classes and their additive losses in dB, not calibrated against measurements
DEFAULT_CLUTTER_LOSSES: "OrderedDict[str, float]" = OrderedDict(
    {
        "unknown": 0.0,
        "open": 0.0,
        "water": -2.0,
        "wetland": 1.0,
        "grassland": 1.0,
        "forest": 8.0,
        "sparse forest": 5.0,
        "agriculture": 2.0,
        "orchard": 4.0,
        "park": 3.0,
        "industrial": 7.0,
        "airport": 1.0,
        "village": 4.0,
        "suburban": 5.0,
        "urban": 6.0,
        "dense urban": 9.0,
        "high-rise": 12.0,
        "commercial": 8.0,
        "low-rise residential": 5.0,
        "high-rise residential": 10.0,
        "transport": 2.0,
        "bare soil": 0.0,
    }
)


class ClutterLossTable(_Record):
    """The ``ClutterLossTable`` class maps every clutter code to an additive loss in dB.

    :param losses: The 22 losses, indexed by clutter code; code 0 (unknown) must map to 0.
    :type losses: np.ndarray
    :param names: Optional names of the 22 land-use classes.
    :type names: Optional[Tuple[str, ...]]

    :raises ValueError: If there are not 22 finite losses or the unknown code has a loss.

    :example:
        >>> from propnet import default_clutter_table
        ...
        >>> table = default_clutter_table()
        >>> table[5], table.names[5]
        (8.0, 'forest')
    """

    __slots__ = ["_losses", "_names"]

    def __new__(cls, losses: np.ndarray, names: Optional[Tuple[str, ...]] = None) -> "ClutterLossTable":
        losses = np.asarray(losses, dtype=float)
        if losses.shape != (MAX_CLUTTER_CODE + 1,):
            raise ValueError(f"Expected {MAX_CLUTTER_CODE + 1} clutter losses, but got shape {losses.shape}.")
        if not np.all(np.isfinite(losses)):
            raise ValueError("Expected every clutter loss to be finite.")
        if losses[0] != 0:
            raise ValueError(f"Expected the unknown clutter code 0 to map to 0 dB, but got {losses[0]}.")
        if names is not None and len(names) != len(losses):
            raise ValueError(f"Expected {len(losses)} class names, but got {len(names)}.")
        return super().__new__(cls)

    def __init__(self, losses: np.ndarray, names: Optional[Tuple[str, ...]] = None) -> None:
        self._losses: np.ndarray = _freeze(np.asarray(losses, dtype=float))
        if names is None:
            names = tuple(f"class {code}" for code in range(len(self._losses)))
        self._names: Tuple[str, ...] = tuple(names)

    def __eq__(self, other: object) -> bool:
        """Check if the table is equal to `another` object; the class names are ignored."""
        if isinstance(other, ClutterLossTable):
            return bool(np.array_equal(self._losses, other._losses))
        return False

    def __getitem__(self, code: int) -> float:
        """Return the loss of the clutter code `code`."""
        return float(self._losses[code])

    def __repr__(self) -> str:
        return f"ClutterLossTable(max_loss_db={self._losses.max():g})"

    def describe(self) -> str:
        """Return a table listing the loss of every clutter class."""
        return _pretty_print_table(
            title=self.rep(),
            body=OrderedDict(
                {f"{code:2d} {name}": f"{loss:g} dB" for code, (name, loss) in enumerate(zip(self._names, self._losses))}
            ),
        )

    def lookup(self, codes: np.ndarray) -> np.ndarray:
        """Return the losses of an array of clutter codes; codes are rounded to the nearest integer."""
        return self._losses[np.clip(np.rint(np.asarray(codes, dtype=float)), 0, MAX_CLUTTER_CODE).astype(int)]

    @property
    def losses(self) -> np.ndarray:
        """Return the (read-only) losses indexed by clutter code."""
        return self._losses

    @property
    def names(self) -> Tuple[str, ...]:
        """Return the names of the land-use classes."""
        return self._names


def default_clutter_table() -> ClutterLossTable:
    """Return the synthetic table shipped with the package."""
    return ClutterLossTable(
        losses=np.array(list(DEFAULT_CLUTTER_LOSSES.values())),
        names=tuple(DEFAULT_CLUTTER_LOSSES.keys()),
    )


def load_clutter_table(path: Union[str, Path]) -> ClutterLossTable:
    """Load a clutter loss table from a CSV file with header ``code,loss_db`` and one row per code.

    :raises ParseError: If the header is wrong, a row is malformed, or a code is missing or repeated.
    """
    losses = {}
    with Path(path).open(newline="") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != ("code", "loss_db"):
            raise ParseError(f"Expected the header code,loss_db in {path}, but got {reader.fieldnames}.")
        for row in reader:
            try:
                code, loss = int(row["code"]), float(row["loss_db"])
            except (TypeError, ValueError):
                raise ParseError(f"Malformed row at line {reader.line_num} of {path}.") from None
            if code in losses or not 0 <= code <= MAX_CLUTTER_CODE:
                raise ParseError(f"Unexpected or repeated clutter code {code} in {path}.")
            losses[code] = loss
    if len(losses) != MAX_CLUTTER_CODE + 1:
        raise ParseError(f"Expected {MAX_CLUTTER_CODE + 1} clutter codes in {path}, but got {len(losses)}.")
    return ClutterLossTable(losses=np.array([losses[code] for code in range(MAX_CLUTTER_CODE + 1)]))


def save_clutter_table(table: ClutterLossTable, path: Union[str, Path]) -> None:
    """Write a clutter loss table in the CSV format read by :func:`load_clutter_table`."""
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["code", "loss_db"])
        writer.writerows([code, f"{loss:.10g}"] for code, loss in enumerate(table.losses))
