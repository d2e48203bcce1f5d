import hashlib
import json
import platform
from pathlib import Path

import numpy as np
from loguru import logger
from omegaconf import DictConfig, OmegaConf
from pydantic import BaseModel, Field

import icnet


class RunManifest(BaseModel):
    """Everything needed to repeat a run: the resolved config plus provenance."""

    command: str
    config: dict = Field(description="Resolved Hydra config of the run")
    output_dir: str
    model_spec_sha256: str | None = None
    versions: dict[str, str]

    @classmethod
    def from_config(cls, command: str, cfg: DictConfig, output_dir: Path) -> "RunManifest":
        config = OmegaConf.to_container(cfg, resolve=True)
        config.pop("manifest", None)
        spec_path = config.get("model")
        digest = None
        if spec_path and Path(spec_path).exists():
            digest = hashlib.sha256(Path(spec_path).read_bytes()).hexdigest()
        return cls(
            command=command,
            config=config,
            output_dir=str(output_dir),
            model_spec_sha256=digest,
            versions={
                "icnet": icnet.__version__,
                "numpy": np.__version__,
                "python": platform.python_version(),
            },
        )

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.model_dump(), indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        with open(path) as f:
            manifest = cls(**json.load(f))
        logger.info(f"Replaying {manifest.command} from {path}")
        return manifest

    def replay_config(self, out: str | None = None) -> DictConfig:
        """The recorded config, optionally redirected to a new output directory."""
        config = dict(self.config)
        if out is not None:
            config["out"] = out
        return OmegaConf.create(config)
