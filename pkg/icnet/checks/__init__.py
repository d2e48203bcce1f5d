import time
from collections.abc import Callable

from loguru import logger

from icnet.checks.accounting import check_overhead, check_shapes, random_model_spec
from icnet.checks.data_models import CheckOptions, CheckResult
from icnet.checks.gradients import GRADIENT_CASES, check_gradients, gradient_error
from icnet.checks.properties import (
    check_collision,
    check_equivalence,
    check_reduction,
    check_theorem31,
)
from icnet.errors import PropertyViolation

AVAILABLE_CHECKS: dict[str, Callable[[CheckOptions], str]] = {
    "equivalence": check_equivalence,
    "reduction": check_reduction,
    "gradients": check_gradients,
    "overhead": check_overhead,
    "theorem31": check_theorem31,
    "collision": check_collision,
    "shapes": check_shapes,
}


def run_check(name: str, opts: CheckOptions | None = None) -> CheckResult:
    """Run one registered check; a property violation becomes a failed result."""
    check = AVAILABLE_CHECKS.get(name)
    if check is None:
        raise ValueError(f"Unknown check {name!r}; available: {', '.join(AVAILABLE_CHECKS)}")
    opts = opts or CheckOptions()
    start = time.perf_counter()
    try:
        detail, passed = check(opts), True
    except PropertyViolation as e:
        detail, passed = str(e), False
        logger.error(f"Check {name} failed: {e}")
    return CheckResult(
        name=name, passed=passed, detail=detail, seconds=time.perf_counter() - start
    )


__all__ = [
    "AVAILABLE_CHECKS",
    "GRADIENT_CASES",
    "CheckOptions",
    "CheckResult",
    "gradient_error",
    "random_model_spec",
    "run_check",
]
