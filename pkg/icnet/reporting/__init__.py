from icnet.reporting.graphing_utils import (
    plot_cos_theta,
    plot_region_map,
    plot_training_curves,
    read_metrics,
)

__all__ = ["plot_cos_theta", "plot_region_map", "plot_training_curves", "read_metrics"]
