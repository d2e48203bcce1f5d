"""Command implementations behind the Hydra entry points in ``scripts/``.

Each command takes the composed config and returns a process exit code:
0 success, 1 property violation, 2 usage / config / spec / format error,
3 numeric failure.
"""

import functools
import hashlib
import json
from collections.abc import Callable
from pathlib import Path

import pandas as pd
from loguru import logger
from omegaconf import DictConfig
from omegaconf.errors import OmegaConfBaseException
from pydantic import ValidationError

from icnet.checks import AVAILABLE_CHECKS, CheckOptions, run_check
from icnet.cli.manifest import RunManifest
from icnet.data.data_models import LabeledDataset
from icnet.data.loaders import DATASET_LOADERS, DEFAULT_SUBSETS
from icnet.data.synthetic import xor_dataset
from icnet.data.transforms import Augmenter, channel_stats, normalize
from icnet.errors import (
    ContractError,
    DimensionError,
    FormatError,
    NumericError,
    PropertyViolation,
    SpecError,
)
from icnet.geometry.analysis import region_map, write_region_csv
from icnet.models.accounting import compare_costs, cost_table, count_flops
from icnet.models.network import build_model
from icnet.models.serialization import save_params
from icnet.models.utils import load_model_spec
from icnet.models.variants import paired_variants, variant_for
from icnet.training.data_models import MetricsRecord, RunSummary, TrainConfig, XORConfig
from icnet.training.loop import train_epochs
from icnet.training.xor import run_xor_experiment

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

USAGE_ERRORS = (
    ValidationError,
    SpecError,
    FormatError,
    ContractError,
    DimensionError,
    FileNotFoundError,
    OmegaConfBaseException,
    KeyError,
)


def exit_code_for(error: Exception) -> int:
    if isinstance(error, NumericError):
        return EXIT_NUMERIC
    if isinstance(error, PropertyViolation):
        return EXIT_PROPERTY
    if isinstance(error, USAGE_ERRORS):
        return EXIT_USAGE
    raise error


def handles_errors(command: Callable[[DictConfig], int]) -> Callable[[DictConfig], int]:
    """Turn the error taxonomy into exit codes, logging the message."""

    @functools.wraps(command)
    def wrapper(cfg: DictConfig) -> int:
        try:
            return command(cfg)
        except Exception as e:
            code = exit_code_for(e)
            logger.error(f"{command.__name__} failed ({type(e).__name__}): {e}")
            return code

    return wrapper


def load_datasets(cfg: DictConfig) -> tuple[LabeledDataset, LabeledDataset]:
    """Train and eval splits named by ``cfg.data``, optionally normalized."""
    if cfg.data == "xor":
        ds = xor_dataset()
        return ds, ds
    loader = DATASET_LOADERS.get(cfg.data)
    if loader is None:
        raise ContractError(f"unknown dataset {cfg.data!r}; choose xor, mnist or cifar10")
    if not cfg.get("data_dir"):
        raise ContractError(f"{cfg.data} needs data_dir (or the DATA_DIR environment variable)")
    subset = cfg.get("subset") or DEFAULT_SUBSETS["train"]
    eval_subset = cfg.get("eval_subset") or DEFAULT_SUBSETS["test"]
    if cfg.get("full"):
        subset = eval_subset = None
    train_ds = loader(cfg.data_dir, "train", subset)
    eval_ds = loader(cfg.data_dir, "test", eval_subset)
    if cfg.get("normalize", True):
        mean, std = channel_stats(train_ds)
        train_ds, eval_ds = normalize(train_ds, mean, std), normalize(eval_ds, mean, std)
    return train_ds, eval_ds


def train_config(cfg: DictConfig) -> TrainConfig:
    milestones = cfg.get("lr_milestones")
    return TrainConfig(
        lr0=cfg.lr,
        momentum=cfg.momentum,
        weight_decay=cfg.weight_decay,
        epochs=cfg.epochs,
        batch_size=cfg.batch,
        lr_drop_every=cfg.lr_drop_every,
        lr_drop_factor=cfg.lr_drop_factor,
        lr_milestones=list(milestones) if milestones is not None else None,
        final_stage_epochs=cfg.final_stage_epochs,
        final_stage_lr=cfg.final_stage_lr,
        decay_exempt=cfg.decay_exempt,
        seed=cfg.seed,
        timing=cfg.timing,
    )


class MetricsWriter:
    """Epoch hook appending one row per record to ``metrics.csv``."""

    def __init__(self, path: Path):
        self.path = path
        columns = list(MetricsRecord.model_fields)
        pd.DataFrame(columns=columns).to_csv(path, index=False)

    def __call__(self, record: MetricsRecord) -> None:
        pd.DataFrame([record.model_dump()]).to_csv(self.path, mode="a", header=False, index=False)


@handles_errors
def cmd_train(cfg: DictConfig) -> int:
    """Train one variant of a model spec and write manifest, metrics, summary and params."""
    if cfg.get("manifest"):
        manifest = RunManifest.load(cfg.manifest)
        cfg = manifest.replay_config(cfg.get("out"))
        if manifest.model_spec_sha256 and Path(cfg.model).exists():
            digest = hashlib.sha256(Path(cfg.model).read_bytes()).hexdigest()
            if digest != manifest.model_spec_sha256:
                logger.warning(f"{cfg.model} changed since the manifest was written")

    spec = variant_for(load_model_spec(cfg.model), cfg.ic)
    train_ds, eval_ds = load_datasets(cfg)
    if train_ds.example_shape != tuple(spec.input_shape):
        raise SpecError(
            f"{spec.name} expects inputs {list(spec.input_shape)}, "
            f"{cfg.data} provides {list(train_ds.example_shape)}"
        )
    tcfg = train_config(cfg)
    augment = None
    if cfg.get("augment") and cfg.augment.enabled:
        augment = Augmenter(seed=tcfg.seed, pad=cfg.augment.pad, flip_prob=cfg.augment.flip_prob)

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    RunManifest.from_config("train", cfg, out).write(out / "manifest.json")
    logger.info(f"Training {spec.name} on {cfg.data} ({len(train_ds)} examples) into {out}")

    network = build_model(spec, tcfg.seed)
    writer = MetricsWriter(out / "metrics.csv")
    metrics = train_epochs(network, train_ds, eval_ds, tcfg, hooks=[writer], augment=augment)
    summary = RunSummary.from_metrics(spec.name, metrics, sum(p.size for p in network.parameters()))
    (out / "summary.json").write_text(json.dumps(summary.model_dump(), indent=2) + "\n")
    save_params(network, out / "params.bin")
    logger.success(f"Run complete: artifacts in {out}")
    return EXIT_OK


@handles_errors
def cmd_verify(cfg: DictConfig) -> int:
    """Run the property suite (or the checks in ``cfg.check``) and print a pass/fail table."""
    names = cfg.get("check") or list(AVAILABLE_CHECKS)
    names = [names] if isinstance(names, str) else list(names)
    unknown = [n for n in names if n not in AVAILABLE_CHECKS]
    if unknown:
        raise ContractError(f"unknown checks {unknown}; available: {list(AVAILABLE_CHECKS)}")
    opts = CheckOptions(
        trials=cfg.get("trials"),
        dim=cfg.get("dim"),
        k=cfg.get("k"),
        cin=cfg.get("cin"),
        cout=cfg.get("cout"),
        seed=cfg.get("seed", 0),
    )
    results = [run_check(name, opts) for name in names]
    table = pd.DataFrame(
        [
            {
                "check": r.name,
                "status": "PASS" if r.passed else "FAIL",
                "seconds": round(r.seconds, 2),
                "detail": r.detail,
            }
            for r in results
        ]
    )
    print(table.to_string(index=False))
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.error(f"Property violations in: {', '.join(failed)}")
        return EXIT_PROPERTY
    logger.success(f"All {len(results)} checks passed")
    return EXIT_OK


@handles_errors
def cmd_xor(cfg: DictConfig) -> int:
    """Train single standard and IC neurons on XOR; optionally dump the IC region map."""
    xor_cfg = XORConfig(
        seeds=cfg.seeds,
        first_seed=cfg.first_seed,
        steps=cfg.steps,
        lr=cfg.lr,
        momentum=cfg.momentum,
    )
    report, ic_model = run_xor_experiment(xor_cfg)
    print(
        pd.DataFrame([r.model_dump() for r in report.runs]).to_string(index=False)
        + f"\nIC neuron: {report.ic_successes}/{report.seeds} solved, "
        f"standard neuron: {report.standard_successes}/{report.seeds} solved"
    )
    if cfg.get("report"):
        path = Path(cfg.report)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(report.model_dump(), indent=2) + "\n")
    if cfg.get("dump_regions") and ic_model is not None:
        regions = region_map(ic_model.as_two_input(), tuple(cfg.bounds), cfg.resolution)
        write_region_csv(regions, cfg.dump_regions)
    return EXIT_OK


@handles_errors
def cmd_analyze(cfg: DictConfig) -> int:
    """Per-layer parameter / MAC table of the three paired variants, plus a JSON report."""
    spec = load_model_spec(cfg.model)
    input_shape = tuple(cfg.input_shape) if cfg.get("input_shape") else None
    reports = [count_flops(build_model(v), input_shape) for v in paired_variants(spec)]
    table = cost_table(reports)
    print(table.to_string(index=False))
    comparisons = [compare_costs(reports[0], r) for r in reports[1:]]
    for c in comparisons:
        print(
            f"{c.variant}: +{c.added_params} params ({c.param_overhead:.2%}), "
            f"+{c.added_macs} MACs ({c.mac_overhead:.2%})"
        )
    if cfg.get("out"):
        path = Path(cfg.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "reports": [r.model_dump() for r in reports],
            "comparisons": [c.model_dump() for c in comparisons],
        }
        path.write_text(json.dumps(payload, indent=2) + "\n")
        logger.success(f"Cost report written to {path}")
    return EXIT_OK
