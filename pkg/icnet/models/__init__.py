from icnet.models.accounting import (
    compare_costs,
    cost_table,
    count_flops,
    count_params,
    predicted_ic_overhead,
)
from icnet.models.data_models import CostComparison, CostReport, LayerCost, LayerSpec, ModelSpec
from icnet.models.network import Network, build_model
from icnet.models.serialization import load_params, save_params
from icnet.models.utils import load_model_spec
from icnet.models.variants import paired_variants, variant_for

__all__ = [
    "CostComparison",
    "CostReport",
    "LayerCost",
    "LayerSpec",
    "ModelSpec",
    "Network",
    "build_model",
    "compare_costs",
    "cost_table",
    "count_flops",
    "count_params",
    "load_model_spec",
    "load_params",
    "paired_variants",
    "predicted_ic_overhead",
    "save_params",
    "variant_for",
]
