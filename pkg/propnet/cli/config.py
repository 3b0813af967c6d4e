import json
from typing import Any, Dict, Union, Optional
from pathlib import Path
from dataclasses import field, fields, dataclass

from propnet.exceptions import ConfigError

__all__ = ["RunConfig", "load_run_config"]


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by the commands, read from a JSON file.

    :param maps_dir: Directory holding one sub-directory per map.
    :param patterns_dir: Directory of ``*.pat`` radiation pattern files.
    :param output_dir: Default output directory.
    :param clutter_table: CSV file of clutter losses.
    :param arch: Overrides of the architecture (``base_channels``, ``depth``).
    :param train: Overrides of the training settings (``epochs``, ``batch_size``, ``loss_mode``, ``lr``, ...).
    :param seed: Seed of every random draw.
    """

    maps_dir: Optional[str] = None
    patterns_dir: Optional[str] = None
    output_dir: Optional[str] = None
    clutter_table: Optional[str] = None
    arch: Dict[str, Any] = field(default_factory=dict)
    train: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None

    def check_paths(self) -> None:
        """Check that every input path of the configuration exists.

        :raises ConfigError: If a path does not exist.
        """
        for name in ("maps_dir", "patterns_dir", "clutter_table"):
            value = getattr(self, name)
            if value is not None and not Path(value).exists():
                raise ConfigError(f"Expected an existing path for `{name}`, but got {value}")

    def merged(self, **flags: Any) -> "RunConfig":
        """Return the configuration with every flag that is not None written over it."""
        values = {item.name: getattr(self, item.name) for item in fields(self)}
        values.update({name: value for name, value in flags.items() if value is not None})
        return RunConfig(**values)


def load_run_config(path: Union[str, Path, None]) -> RunConfig:
    """Read a run configuration from a JSON file; no path gives the empty configuration.

    :raises ConfigError: If the file is missing, malformed or has unknown keys.
    """
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Expected an existing configuration file, but got {path}")
    try:
        content = json.loads(path.read_text())
    except json.JSONDecodeError as error:
        raise ConfigError(f"Malformed configuration file {path}: {error}") from None
    if not isinstance(content, dict):
        raise ConfigError(f"Expected a JSON object in {path}, but got {type(content).__name__}")
    unknown = set(content) - {item.name for item in fields(RunConfig)}
    if unknown:
        raise ConfigError(f"Unknown configuration keys {sorted(unknown)} in {path}")
    return RunConfig(**content)
