from icnet.geometry.analysis import (
    collision_transmit,
    collision_velocities,
    collision_weight,
    cos_theta_curve,
    default_sweep_grid,
    hyperplane_cos_theta,
    ic_neuron,
    neuron_value,
    region_labels,
    region_map,
    theorem31_sweep,
    write_region_csv,
    write_sweep_csv,
    zero_crossing,
)
from icnet.geometry.data_models import (
    CollisionInput,
    HyperplaneQuery,
    RegionMap,
    SweepReport,
    TwoInputNeuron,
)

__all__ = [
    "CollisionInput",
    "HyperplaneQuery",
    "RegionMap",
    "SweepReport",
    "TwoInputNeuron",
    "collision_transmit",
    "collision_velocities",
    "collision_weight",
    "cos_theta_curve",
    "default_sweep_grid",
    "hyperplane_cos_theta",
    "ic_neuron",
    "neuron_value",
    "region_labels",
    "region_map",
    "theorem31_sweep",
    "write_region_csv",
    "write_sweep_csv",
    "zero_crossing",
]
