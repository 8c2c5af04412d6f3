"""Experiment config loading: JSON file, CLI overrides, seed resolution, resolved echo."""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError

from pafm.config import VERSION, settings
from pafm.errors import ConfigError
from pafm.schemas.experiment import ExperimentConfig

logger = logging.getLogger(__name__)

RESOLVED_CONFIG_FILE = "config.resolved.json"
VERSION_FILE = "VERSION"


def _apply_override(document: Dict[str, Any], dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = document
    for key in keys[:-1]:
        child = node.setdefault(key, {})
        if not isinstance(child, dict):
            raise ConfigError(f"cannot override {dotted}: {key} is not a section")
        node = child
    node[keys[-1]] = value


def load_experiment_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> ExperimentConfig:
    """Parse the config file (if any), apply ``section.key`` overrides and resolve the seed.

    A seed written in the file beats PAFM_SEED; PAFM_SEED beats the default.
    """
    document: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            document = json.loads(path.read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(document, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")

    seed_in_file = "seed" in document
    for dotted, value in (overrides or {}).items():
        if value is not None:
            _apply_override(document, dotted, value)

    if settings.seed_override is not None:
        if seed_in_file or (overrides or {}).get("seed") is not None:
            logger.warning(f"⚠️ PAFM_SEED={settings.seed_override} ignored: the config sets seed={document['seed']}")
        else:
            document["seed"] = settings.seed_override

    try:
        config = ExperimentConfig.model_validate(document)
    except ValidationError as exc:
        raise ConfigError(f"invalid experiment config: {exc}") from exc
    return config.resolved()


def output_dir(config: ExperimentConfig, override: Optional[str] = None) -> Path:
    directory = Path(override or config.output_dir or settings.output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def write_resolved_config(config: ExperimentConfig, out_dir: Union[str, Path]) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / RESOLVED_CONFIG_FILE
    path.write_text(json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True) + "\n")
    (out_dir / VERSION_FILE).write_text(VERSION + "\n")
    return path
