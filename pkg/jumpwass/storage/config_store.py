import json
import logging
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from jumpwass.core.errors import ConfigError
from jumpwass.schemas.config import AnalysisConfig

logger = logging.getLogger(__name__)


def _field_path(loc) -> str:
    # Drop discriminator tags pydantic inserts for tagged unions
    parts = [str(p) for p in loc if p not in ("iid", "schedule", "markov")]
    return ".".join(parts)


def load_config(path: Union[str, Path]) -> AnalysisConfig:
    """Read and validate an analysis config; raise ConfigError with the location of the problem"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config: {e.strerror or e}")

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}", line=e.lineno, column=e.colno)

    try:
        config = AnalysisConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field_path = _field_path(first.get("loc", ())) or None
        messages = []
        for err in e.errors():
            where = _field_path(err.get("loc", ())) or "<root>"
            messages.append(f"{where}: {err.get('msg')}")
        raise ConfigError(f"{path}: invalid config: " + "; ".join(messages), field_path=field_path)

    logger.info(
        f"Loaded config {path} (m={config.system.num_modes}, n={config.system.dim}, "
        f"{config.switching.kind} law, horizon {config.horizon})"
    )
    return config
