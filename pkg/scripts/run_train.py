# Load environment variables from .env file BEFORE importing loguru
# This ensures LOGURU_LEVEL and DATA_DIR are available when the config is composed
from dotenv import load_dotenv

load_dotenv()

# ruff: noqa: E402 - imports after load_dotenv() are intentional
import sys

import hydra
from omegaconf import DictConfig

from icnet.cli import cmd_train


@hydra.main(version_base=None, config_path="../configs/train", config_name="train")
def main(cfg: DictConfig):
    """Train one paired variant of a model spec and write its run artifacts.

    ``manifest=outputs/train/<run>/manifest.json`` replays a previous run from its
    recorded config (add ``out=...`` to write somewhere else).
    """
    sys.exit(cmd_train(cfg))


if __name__ == "__main__":
    main()
