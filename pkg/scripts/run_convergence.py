# Load environment variables from .env file BEFORE importing loguru
# This ensures LOGURU_LEVEL and DATA_DIR are available when the config is composed
from dotenv import load_dotenv

load_dotenv()

# ruff: noqa: E402 - imports after load_dotenv() are intentional
import sys
from pathlib import Path

import hydra
from loguru import logger
from omegaconf import DictConfig

from icnet.cli.commands import exit_code_for, load_datasets, train_config
from icnet.data.transforms import Augmenter
from icnet.models.utils import load_model_spec
from icnet.training.experiments import run_paired_convergence, summarize_convergence


def run_convergence(cfg: DictConfig) -> int:
    spec = load_model_spec(cfg.model)
    train_ds, eval_ds = load_datasets(cfg)
    tcfg = train_config(cfg)
    augment = None
    if cfg.augment.enabled:
        augment = Augmenter(seed=tcfg.seed, pad=cfg.augment.pad, flip_prob=cfg.augment.flip_prob)

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    curves = run_paired_convergence(spec, train_ds, eval_ds, tcfg, list(cfg.seeds), augment)
    curves.to_csv(out / "curves.csv", index=False)
    summary = summarize_convergence(curves)
    summary.to_csv(out / "summary.csv", index=False)
    print(summary.to_string(index=False))
    logger.success(f"Convergence curves and summary saved to: {out}")
    return 0


@hydra.main(version_base=None, config_path="../configs/train", config_name="convergence")
def main(cfg: DictConfig):
    """Train baseline, B version and IC-block version of one spec over several seeds.

    Variants of the same seed start from identical weights wherever their layer shapes
    coincide; the summary counts epoch-1 loss wins and final accuracy deltas.
    """
    try:
        code = run_convergence(cfg)
    except Exception as e:
        logger.error(f"Convergence run failed ({type(e).__name__}): {e}")
        code = exit_code_for(e)
    sys.exit(code)


if __name__ == "__main__":
    main()
