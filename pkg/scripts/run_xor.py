# Load environment variables from .env file BEFORE importing loguru
# This ensures LOGURU_LEVEL is available when logger is initialized
from dotenv import load_dotenv

load_dotenv()

# ruff: noqa: E402 - imports after load_dotenv() are intentional
import sys

import hydra
from omegaconf import DictConfig

from icnet.cli import cmd_xor


@hydra.main(version_base=None, config_path="../configs/xor", config_name="xor")
def main(cfg: DictConfig):
    """Train a single standard neuron and a single IC neuron on XOR for every seed."""
    sys.exit(cmd_xor(cfg))


if __name__ == "__main__":
    main()
