from pydantic import BaseModel, Field


class CheckOptions(BaseModel):
    """Knobs shared by the property checks; None selects each check's default grid."""

    trials: int | None = Field(default=None, ge=1)
    dim: int | None = Field(default=None, ge=2)
    k: int | None = Field(default=None, ge=2)
    cin: int | None = Field(default=None, ge=1)
    cout: int | None = Field(default=None, ge=1)
    seed: int = 0


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str
    seconds: float
