# Load environment variables from .env file BEFORE importing loguru
# This ensures LOGURU_LEVEL is available when logger is initialized
from dotenv import load_dotenv

load_dotenv()

# ruff: noqa: E402 - imports after load_dotenv() are intentional
from pathlib import Path

import hydra
from loguru import logger
from omegaconf import DictConfig

from icnet.reporting import plot_cos_theta, plot_region_map, plot_training_curves


@hydra.main(version_base=None, config_path="../configs/plots", config_name="plots")
def main(cfg: DictConfig):
    """Render metrics CSVs of paired runs, and optionally region-map and sweep CSVs."""
    runs = {label: path for label, path in cfg.runs.items() if Path(path).exists()}
    if runs:
        plot_training_curves(runs, title=cfg.title, save_path=cfg.curves_path)
        logger.success(f"Training curves saved to: {cfg.curves_path}")
    else:
        logger.warning("None of the configured metrics files exist; skipping training curves")
    if cfg.regions:
        plot_region_map(cfg.regions, tuple(cfg.bounds), save_path=cfg.regions_path)
        logger.success(f"Region map saved to: {cfg.regions_path}")
    if cfg.sweep:
        plot_cos_theta(cfg.sweep, save_path=cfg.sweep_path)
        logger.success(f"cos theta sweep saved to: {cfg.sweep_path}")


if __name__ == "__main__":
    main()
