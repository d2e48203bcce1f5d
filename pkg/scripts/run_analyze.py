# Load environment variables from .env file BEFORE importing loguru
# This ensures LOGURU_LEVEL is available when logger is initialized
from dotenv import load_dotenv

load_dotenv()

# ruff: noqa: E402 - imports after load_dotenv() are intentional
import sys

import hydra
from omegaconf import DictConfig

from icnet.cli import cmd_analyze


@hydra.main(version_base=None, config_path="../configs/analyze", config_name="analyze")
def main(cfg: DictConfig):
    """Side-by-side parameter / MAC table of a model spec's three paired variants."""
    sys.exit(cmd_analyze(cfg))


if __name__ == "__main__":
    main()
