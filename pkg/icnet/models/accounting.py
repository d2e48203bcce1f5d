"""Analytic parameter and multiply-accumulate counts of built networks."""

import pandas as pd

from icnet.errors import DimensionError, SpecError
from icnet.models.data_models import CostComparison, CostReport, LayerDelta
from icnet.models.network import Network


def predicted_ic_overhead(kernel: int, out_channels: int) -> float:
    """MAC overhead of a grouped IC layer over its convolution: 1/C + 1/(k*k)."""
    return 1.0 / out_channels + 1.0 / (kernel * kernel)


def count_flops(network: Network, input_shape: tuple[int, ...] | None = None) -> CostReport:
    """Per-layer costs for one example of ``input_shape`` (default: the spec's input shape).

    Spatial extents may differ from the spec; the channel count (or vector width) may not.
    """
    shape = tuple(network.spec.input_shape if input_shape is None else input_shape)
    if len(shape) != len(network.spec.input_shape) or shape[0] != network.spec.input_shape[0]:
        raise DimensionError(
            f"{network.spec.name}: input shape {list(shape)} incompatible with "
            f"{list(network.spec.input_shape)}"
        )
    costs = []
    for layer in network.layers:
        cost = layer.cost(shape)
        costs.append(cost)
        shape = cost.output_shape
    return CostReport.from_layers(network.spec.name, tuple(network.spec.input_shape), costs)


def count_params(network: Network) -> CostReport:
    """Cost report at the spec's input shape; parameter counts do not depend on it."""
    return count_flops(network)


def compare_costs(baseline: CostReport, variant: CostReport) -> CostComparison:
    """Added parameters and MACs of ``variant`` over ``baseline``, layer by layer."""
    if len(baseline.layers) != len(variant.layers):
        raise SpecError(
            f"{variant.model_name} has {len(variant.layers)} layers, "
            f"{baseline.model_name} has {len(baseline.layers)}"
        )
    deltas = [
        LayerDelta(
            index=b.index,
            baseline_kind=b.kind,
            variant_kind=v.kind,
            added_params=v.params - b.params,
            added_macs=v.macs - b.macs,
        )
        for b, v in zip(baseline.layers, variant.layers, strict=True)
    ]
    added_params = variant.total_params - baseline.total_params
    added_macs = variant.total_macs - baseline.total_macs
    return CostComparison(
        baseline=baseline.model_name,
        variant=variant.model_name,
        added_params=added_params,
        added_macs=added_macs,
        param_overhead=added_params / baseline.total_params if baseline.total_params else 0.0,
        mac_overhead=added_macs / baseline.total_macs if baseline.total_macs else 0.0,
        layers=deltas,
    )


def cost_table(reports: list[CostReport]) -> pd.DataFrame:
    """Side-by-side per-layer params / MACs, one column pair per report."""
    frame = pd.DataFrame({"index": [c.index for c in reports[0].layers]})
    for report in reports:
        frame[f"{report.model_name}.kind"] = [c.kind for c in report.layers]
        frame[f"{report.model_name}.params"] = [c.params for c in report.layers]
        frame[f"{report.model_name}.macs"] = [c.macs for c in report.layers]
    frame["output_shape"] = ["x".join(map(str, c.output_shape)) for c in reports[0].layers]
    totals = {"index": "total", "output_shape": ""}
    for report in reports:
        totals[f"{report.model_name}.kind"] = ""
        totals[f"{report.model_name}.params"] = report.total_params
        totals[f"{report.model_name}.macs"] = report.total_macs
    return pd.concat([frame, pd.DataFrame([totals])], ignore_index=True)
