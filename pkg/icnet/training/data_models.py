from enum import StrEnum

from pydantic import BaseModel, Field, model_validator


class DecayExempt(StrEnum):
    NONE = "none"
    BN = "bn"
    W_PRIME = "w_prime"
    BN_AND_W_PRIME = "bn_and_w_prime"


class TrainConfig(BaseModel):
    """SGD with classical momentum and a step (or milestone) learning-rate schedule."""

    lr0: float = Field(default=0.1, gt=0.0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    weight_decay: float = Field(default=1e-4, ge=0.0)
    epochs: int = Field(default=5, ge=0)
    batch_size: int = Field(default=128, ge=1)
    lr_drop_every: int = Field(default=30, ge=1)
    lr_drop_factor: float = Field(default=0.1, gt=0.0, le=1.0)
    lr_milestones: list[int] | None = Field(
        default=None, description="Epochs at which the rate drops; overrides lr_drop_every"
    )
    final_stage_epochs: int = Field(default=0, ge=0)
    final_stage_lr: float = Field(default=1e-4, gt=0.0)
    decay_exempt: DecayExempt = DecayExempt.NONE
    seed: int = 0
    timing: bool = False

    @model_validator(mode="after")
    def check_milestones(self) -> "TrainConfig":
        if self.lr_milestones is not None and sorted(self.lr_milestones) != self.lr_milestones:
            raise ValueError("lr_milestones must be increasing")
        return self

    @property
    def total_epochs(self) -> int:
        return self.epochs + self.final_stage_epochs


class MetricsRecord(BaseModel):
    epoch: int = Field(ge=0)
    lr: float
    train_loss: float
    train_acc: float = Field(ge=0.0, le=1.0)
    eval_loss: float
    eval_acc: float = Field(ge=0.0, le=1.0)
    wall_seconds: float = Field(ge=0.0)


class RunSummary(BaseModel):
    """End-of-run figures written to ``summary.json``."""

    model_name: str
    epochs: int
    final_train_loss: float | None = None
    final_train_acc: float | None = None
    final_eval_loss: float | None = None
    final_eval_acc: float | None = None
    generalization_gap: float | None = Field(
        default=None, description="final_train_acc - final_eval_acc"
    )
    best_eval_acc: float | None = None
    best_eval_epoch: int | None = None
    num_params: int

    @classmethod
    def from_metrics(
        cls, model_name: str, metrics: list[MetricsRecord], num_params: int
    ) -> "RunSummary":
        if not metrics:
            return cls(model_name=model_name, epochs=0, num_params=num_params)
        last = metrics[-1]
        best = max(metrics, key=lambda m: m.eval_acc)
        return cls(
            model_name=model_name,
            epochs=len(metrics),
            final_train_loss=last.train_loss,
            final_train_acc=last.train_acc,
            final_eval_loss=last.eval_loss,
            final_eval_acc=last.eval_acc,
            generalization_gap=last.train_acc - last.eval_acc,
            best_eval_acc=best.eval_acc,
            best_eval_epoch=best.epoch,
            num_params=num_params,
        )


class XORConfig(BaseModel):
    seeds: int = Field(default=10, ge=1)
    first_seed: int = 0
    steps: int = Field(default=5000, ge=1)
    lr: float = Field(default=0.1, gt=0.0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)


class XORRun(BaseModel):
    seed: int
    neuron: str
    accuracy: float
    final_loss: float
    solved: bool


class XORReport(BaseModel):
    runs: list[XORRun]
    ic_successes: int
    standard_successes: int
    seeds: int
