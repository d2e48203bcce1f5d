import json
from pathlib import Path

from loguru import logger

from icnet.models.data_models import ModelSpec


def load_model_spec(path: str | Path) -> ModelSpec:
    """Load and validate a JSON model spec.

    Args:
        path: Path to the JSON document (schema in ``configs/models/README.md``).

    Returns:
        ModelSpec Pydantic model; unknown fields raise ``pydantic.ValidationError``.
    """
    path = Path(path)
    logger.info(f"Loading model spec from {path}")
    with open(path) as f:
        data = json.load(f)
    spec = ModelSpec(**data)
    logger.info(f"Loaded {spec.name}: {len(spec.layers)} layers, input {list(spec.input_shape)}")
    return spec
