"""boxreach: box-union reachability analysis and safety verification for
feedforward-network controllers and the discrete-time systems they close."""

__version__ = "0.1.0"

from .closed_loop import (ReachTube, SafetySpec, Scenario, TubeStep, Verdict,
                          VerdictValue, Witness, reach_nncs, verify_nncs)
from .geometry import (BoxUnion, HyperBox, Interval, PartitionSpec,
                       boxes_intersect, cartesian_product, interval_hull,
                       partition_box, partition_union, sampled_hausdorff_gap)
from .kernels import active_backend
from .network import (Activation, Layer, NetworkModel, affine_bounds,
                      eval_activation, eval_network, eval_network_batch,
                      layer_output_box, reach_mlp)
from .plant import (LinearPlant, NonlinearPlant, named_plant, reach_ode_x,
                    reach_ode_y, step_plant)
from .sampling import (SampleConfig, sample_network_outputs,
                       sample_union_points, simulate_trajectories)

__all__ = [
    "__version__",
    "active_backend",
    "Interval", "HyperBox", "BoxUnion", "PartitionSpec",
    "partition_box", "partition_union", "boxes_intersect", "interval_hull",
    "cartesian_product", "sampled_hausdorff_gap",
    "Activation", "Layer", "NetworkModel",
    "eval_activation", "eval_network", "eval_network_batch",
    "affine_bounds", "layer_output_box", "reach_mlp",
    "LinearPlant", "NonlinearPlant", "named_plant",
    "reach_ode_x", "reach_ode_y", "step_plant",
    "Scenario", "ReachTube", "TubeStep", "SafetySpec",
    "Verdict", "VerdictValue", "Witness",
    "reach_nncs", "verify_nncs",
    "SampleConfig", "sample_network_outputs", "sample_union_points",
    "simulate_trajectories",
]
