"""Reach-tube construction and safety verification for the closed loop.

The per-step reachable-set estimate is a union of boxes, not a single
box. Each state cell is paired with its own controller bounds (its
output box, stacked with the reference box, partitioned and pushed
through the network), then stepped through the plant; the resulting
image union is re-gridded over its interval hull before the next step.
Pairing cells with their own control intervals keeps the output-input
correlation that a single hulled step discards; with one global box the
recursion inflates without bound on feedback loops that are in fact
well behaved, and no partition fineness can recover it.

The verdict is SAFE only when no step's state union touches any unsafe
box, so SAFE is sound while UNCERTAIN is merely inconclusive.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .geometry import (BoxUnion, HyperBox, PartitionSpec, as_union,
                       boxes_intersect, cartesian_product, interval_hull,
                       partition_box, partition_union)
from .network import NetworkModel, reach_mlp
from .plant import reach_ode_x, reach_ode_y


@dataclass(frozen=True)
class Scenario:
    """Closed-loop analysis instance: plant, controller, sets, horizon.

    `partition` splits each controller-input dimension (plant output
    stacked with the reference input). `state_grid` controls the box
    union representing the state set between steps; by default every
    state dimension uses the largest controller partition count, so one
    knob refines the whole analysis.
    """

    plant: object
    controller: NetworkModel
    x0: HyperBox
    v_set: HyperBox
    horizon: int
    partition: PartitionSpec
    state_grid: Optional[PartitionSpec] = None
    epsilon: float = 0.0

    def __post_init__(self):
        plant, net = self.plant, self.controller
        if self.x0.dim != plant.n_x:
            raise ValueError(
                f"initial box dimension {self.x0.dim} != plant state {plant.n_x}")
        expected_in = plant.n_y + self.v_set.dim
        if net.input_dim != expected_in:
            raise ValueError(
                f"controller input {net.input_dim} != plant output + reference "
                f"input {plant.n_y}+{self.v_set.dim}")
        if net.output_dim != plant.n_u:
            raise ValueError(
                f"controller output {net.output_dim} != plant input {plant.n_u}")
        if self.horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")
        if len(self.partition.counts) != net.input_dim:
            raise ValueError(
                f"partition has {len(self.partition.counts)} dimensions, "
                f"controller input has {net.input_dim}")
        if self.state_grid is not None and len(self.state_grid.counts) != plant.n_x:
            raise ValueError(
                f"state grid has {len(self.state_grid.counts)} dimensions, "
                f"plant state has {plant.n_x}")
        if self.epsilon < 0.0:
            raise ValueError("epsilon padding must be non-negative")

    def resolved_state_grid(self) -> PartitionSpec:
        if self.state_grid is not None:
            return self.state_grid
        return PartitionSpec.uniform(max(self.partition.counts), self.plant.n_x)


class TubeStep(NamedTuple):
    t: int
    state: HyperBox                  # interval hull of state_cells
    state_cells: BoxUnion            # the actual per-step estimate
    output: Optional[HyperBox]       # None at the final step
    controller: Optional[BoxUnion]   # controller output union, None at final step
    control_hull: Optional[HyperBox]


@dataclass(frozen=True)
class ReachTube:
    """Per-step reachable-set estimates for t = 0 .. horizon."""

    steps: tuple[TubeStep, ...]

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def horizon(self) -> int:
        return len(self.steps) - 1

    def state_box(self, t: int) -> HyperBox:
        return self.steps[t].state


@dataclass(frozen=True)
class SafetySpec:
    """Unsafe region as a union of state-space boxes (may be empty)."""

    unsafe: BoxUnion


class VerdictValue(enum.Enum):
    SAFE = "SAFE"
    UNCERTAIN = "UNCERTAIN"


class Witness(NamedTuple):
    t: int
    state: HyperBox
    unsafe: HyperBox


@dataclass(frozen=True)
class Verdict:
    value: VerdictValue
    witnesses: tuple[Witness, ...] = field(default=())
    tube: Optional[ReachTube] = None

    def __post_init__(self):
        if self.value is VerdictValue.UNCERTAIN and not self.witnesses:
            raise ValueError("UNCERTAIN verdict requires at least one witness")


def _step_cells(scenario: Scenario, cells: BoxUnion, lo_slice, hi_slice):
    """Propagate a slice of state cells one step; pure per-cell work."""
    plant, net = scenario.plant, scenario.controller
    n = lo_slice.shape[0]
    y_los = np.empty((n, plant.n_y))
    y_his = np.empty((n, plant.n_y))
    u_los = np.empty((n, plant.n_u))
    u_his = np.empty((n, plant.n_u))
    next_los = np.empty((n, plant.n_x))
    next_his = np.empty((n, plant.n_x))
    unions = []
    for k in range(n):
        cell = HyperBox(lo_slice[k], hi_slice[k])
        y_box = reach_ode_y(plant, cell)
        h = cartesian_product(y_box, scenario.v_set)
        union = reach_mlp(net, h, scenario.partition, epsilon=scenario.epsilon)
        u_hull = interval_hull(union)
        image = reach_ode_x(plant, u_hull, cell).inflate(scenario.epsilon)
        y_los[k], y_his[k] = y_box.lo, y_box.hi
        u_los[k], u_his[k] = u_hull.lo, u_hull.hi
        next_los[k], next_his[k] = image.lo, image.hi
        unions.append(union)
    return y_los, y_his, u_los, u_his, next_los, next_his, unions


def reach_nncs(scenario: Scenario, *, workers: int = 1,
               step_times: Optional[list] = None) -> ReachTube:
    """Estimate the closed-loop reach tube over t = 0 .. horizon.

    The initial box is gridded once; each step pairs every state cell
    with its own controller-output hull, steps the plant per cell, and
    re-grids the image union over its hull. The final entry carries only
    the state estimate. Results are identical for any `workers` because
    cells are independent and reassembled in index order.

    When `step_times` is a list, per-step wall-clock seconds are appended
    to it (horizon entries), for reporting only.
    """
    import time

    state_grid = scenario.resolved_state_grid()
    cells = partition_box(scenario.x0, state_grid)
    estimate = as_union(scenario.x0)
    steps = []
    for t in range(scenario.horizon):
        started = time.perf_counter()
        n = len(cells)
        if workers <= 1 or n < 2:
            parts = [_step_cells(scenario, cells, cells.los, cells.his)]
        else:
            bounds = np.linspace(0, n, workers + 1, dtype=int)
            spans = [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_step_cells, scenario, cells,
                                       cells.los[a:b], cells.his[a:b])
                           for a, b in spans]
                parts = [f.result() for f in futures]
        y_los = np.vstack([p[0] for p in parts])
        y_his = np.vstack([p[1] for p in parts])
        u_los = np.vstack([p[2] for p in parts])
        u_his = np.vstack([p[3] for p in parts])
        next_los = np.vstack([p[4] for p in parts])
        next_his = np.vstack([p[5] for p in parts])
        ctrl_los = np.vstack([u.los for p in parts for u in p[6]])
        ctrl_his = np.vstack([u.his for p in parts for u in p[6]])
        steps.append(TubeStep(
            t,
            state=interval_hull(estimate),
            state_cells=estimate,
            output=HyperBox(y_los.min(axis=0), y_his.max(axis=0)),
            controller=BoxUnion(ctrl_los, ctrl_his),
            control_hull=HyperBox(u_los.min(axis=0), u_his.max(axis=0)),
        ))
        estimate = BoxUnion(next_los, next_his)
        cells = partition_union(estimate, interval_hull(estimate), state_grid)
        if step_times is not None:
            step_times.append(time.perf_counter() - started)
    steps.append(TubeStep(scenario.horizon, interval_hull(estimate), estimate,
                          None, None, None))
    return ReachTube(tuple(steps))


def verify_nncs(scenario: Scenario, spec: SafetySpec, *, workers: int = 1,
                step_times: Optional[list] = None) -> Verdict:
    """SAFE iff no step's state estimate meets any unsafe box (closed sets).

    Intersection is tested against every box of the per-step state union.
    SAFE is sound for the true system; UNCERTAIN reports every
    (step, state box, unsafe box) contact of the over-approximation as a
    witness and proves nothing about the true system.
    """
    if len(spec.unsafe) and spec.unsafe.dim != scenario.plant.n_x:
        raise ValueError(
            f"unsafe region dimension {spec.unsafe.dim} != plant state "
            f"{scenario.plant.n_x}")
    tube = reach_nncs(scenario, workers=workers, step_times=step_times)
    witnesses = []
    for step in tube.steps:
        for unsafe_box in spec.unsafe:
            hits = ((step.state_cells.los <= unsafe_box.hi)
                    & (unsafe_box.lo <= step.state_cells.his)).all(axis=1)
            for k in np.flatnonzero(hits):
                witnesses.append(Witness(step.t, step.state_cells.box(int(k)),
                                         unsafe_box))
    if witnesses:
        return Verdict(VerdictValue.UNCERTAIN, tuple(witnesses), tube)
    return Verdict(VerdictValue.SAFE, (), tube)
