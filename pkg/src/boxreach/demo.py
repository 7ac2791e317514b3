"""Bundled demo systems used by the README walkthrough, tests, and benchmarks."""

from __future__ import annotations

import numpy as np

from .closed_loop import SafetySpec, Scenario
from .geometry import BoxUnion, HyperBox, PartitionSpec
from .network import Activation, Layer, NetworkModel
from .plant import LinearPlant

# 2-input, 2-output MLP with a 7-neuron tanh hidden layer and linear output.
DEMO_MLP_W1 = np.array([
    [-1.0927, -0.9738],
    [0.0974, -1.6347],
    [-1.3900, 1.3535],
    [0.2311, 3.2967],
    [0.1067, -0.4837],
    [-0.1264, 0.3281],
    [0.8038, 0.5583],
])
DEMO_MLP_B1 = np.array([0.7752, -0.7823, -0.5119, 0.3074, -0.7417, 0.7618, 1.2038])
DEMO_MLP_W2 = np.array([
    [1.5441, 1.4009, -0.9595, -0.4089, 0.3599, 0.0068, -0.2026],
    [-1.0941, -0.7114, 0.5236, -0.7377, -0.7392, 0.1388, 0.0655],
])
DEMO_MLP_B2 = np.array([0.2315, -0.3555])


def demo_mlp() -> NetworkModel:
    """The demo network analyzed over the unit input box."""
    return NetworkModel([
        Layer(DEMO_MLP_W1, DEMO_MLP_B1, Activation.TANH),
        Layer(DEMO_MLP_W2, DEMO_MLP_B2, Activation.LINEAR),
    ])


def demo_mlp_input_box() -> HyperBox:
    return HyperBox([-1.0, -1.0], [1.0, 1.0])


# Stable 2-state linear plant with scalar input and scalar output, closed
# under a 5-neuron tanh controller u = net(y, v).
DEMO_PLANT_A = np.array([
    [-0.6722, 0.0935],
    [-0.4011, 0.4969],
])
DEMO_PLANT_B = np.array([[0.4805], [-0.3911]])
DEMO_PLANT_C = np.array([[-0.4625, 1.4874]])

DEMO_CTRL_W1 = np.array([
    [0.8530, -1.0127],
    [-1.1751, -1.2403],
    [-0.4544, 0.2666],
    [-0.5061, -1.2078],
    [1.8037, -1.0501],
])
DEMO_CTRL_B1 = np.array([0.7996, 1.6286, 0.1291, -2.0848, -0.6471])
DEMO_CTRL_W2 = np.array([[0.4687, 0.2829, 1.3412, 0.3806, 1.4354]])
DEMO_CTRL_B2 = np.array([-0.2517])


def demo_plant() -> LinearPlant:
    return LinearPlant(DEMO_PLANT_A, DEMO_PLANT_B, DEMO_PLANT_C)


def demo_controller() -> NetworkModel:
    return NetworkModel([
        Layer(DEMO_CTRL_W1, DEMO_CTRL_B1, Activation.TANH),
        Layer(DEMO_CTRL_W2, DEMO_CTRL_B2, Activation.LINEAR),
    ])


def demo_scenario(partition: int = 5, horizon: int = 10,
                  epsilon: float = 0.0) -> Scenario:
    """Closed loop: initial states within 0.5 of (2.5, 2.5), |v| <= 0.5."""
    return Scenario(
        plant=demo_plant(),
        controller=demo_controller(),
        x0=HyperBox.from_center_radius([2.5, 2.5], 0.5),
        v_set=HyperBox.from_center_radius([0.0], 0.5),
        horizon=horizon,
        partition=PartitionSpec.uniform(partition, 2),
        epsilon=epsilon,
    )


def demo_unsafe_region() -> SafetySpec:
    """Unsafe states: within 0.5 of (-2.5, 2.5) in the infinity norm."""
    box = HyperBox.from_center_radius([-2.5, 2.5], 0.5)
    return SafetySpec(BoxUnion(box.lo[None, :], box.hi[None, :]))
