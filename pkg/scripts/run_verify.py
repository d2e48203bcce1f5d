# Load environment variables from .env file BEFORE importing loguru
# This ensures LOGURU_LEVEL is available when logger is initialized
from dotenv import load_dotenv

load_dotenv()

# ruff: noqa: E402 - imports after load_dotenv() are intentional
import sys

import hydra
from omegaconf import DictConfig

from icnet.cli import cmd_verify


@hydra.main(version_base=None, config_path="../configs/verify", config_name="verify")
def main(cfg: DictConfig):
    """Run the numerical property suite and print a pass/fail table.

    Exits 0 when every check passes and 1 when any property is violated, e.g.
    ``python scripts/run_verify.py check=theorem31 dim=8 trials=100``.
    """
    sys.exit(cmd_verify(cfg))


if __name__ == "__main__":
    main()
