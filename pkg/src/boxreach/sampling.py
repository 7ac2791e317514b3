"""Seeded Monte Carlo oracles: forward-pass samples and trajectory rollouts.

Every sampled point must land inside the corresponding over-approximation;
an escapee is a soundness bug in the engine, never in the oracle. Each
sample index derives its own generator from (seed, index), so results
are identical regardless of how samples might be batched or parallelized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closed_loop import Scenario
from .geometry import BoxUnion, HyperBox, as_union
from .network import NetworkModel, eval_network_batch

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SampleConfig:
    count: int
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"sample count must be >= 1, got {self.count}")


def _rng_for(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed & _MASK64, index)))


def _draw_in_box(rng: np.random.Generator, box: HyperBox) -> np.ndarray:
    return box.lo + rng.random(box.dim) * (box.hi - box.lo)


def sample_union_points(h, cfg: SampleConfig) -> np.ndarray:
    """Uniform samples from a box union, shape (count, dim).

    A box is chosen with probability proportional to its volume, then the
    point uniformly within it. If every box is degenerate (zero volume),
    boxes are chosen uniformly instead.
    """
    h = as_union(h)
    if len(h) == 0:
        raise ValueError("cannot sample from an empty union")
    volumes = h.volumes()
    total = volumes.sum()
    if total > 0.0:
        cdf = np.cumsum(volumes / total)
    else:
        cdf = np.cumsum(np.full(len(h), 1.0 / len(h)))
    points = np.empty((cfg.count, h.dim), dtype=np.float64)
    for i in range(cfg.count):
        rng = _rng_for(cfg.seed, i)
        k = int(np.searchsorted(cdf, rng.random(), side="right"))
        k = min(k, len(h) - 1)
        points[i] = h.los[k] + rng.random(h.dim) * (h.his[k] - h.los[k])
    return points


def sample_network_outputs(net: NetworkModel, h, cfg: SampleConfig) -> np.ndarray:
    """Forward-pass outputs of uniform input samples, shape (count, n_out)."""
    h = as_union(h)
    if h.dim != net.input_dim:
        raise ValueError(
            f"input set dimension {h.dim} != network input {net.input_dim}")
    return eval_network_batch(net, sample_union_points(h, cfg))


def simulate_trajectories(scenario: Scenario, cfg: SampleConfig) -> np.ndarray:
    """Closed-loop rollouts, shape (count, horizon + 1, n_x).

    Per sample: the initial state is drawn uniformly from the initial box
    and a fresh reference input is drawn from its box at every step; the
    controller then closes the loop. Each sample consumes its own
    (seed, index) stream, drawing x0 first and then v(0), v(1), ...
    """
    plant, net = scenario.plant, scenario.controller
    n_v = scenario.v_set.dim
    horizon = scenario.horizon
    x = np.empty((cfg.count, plant.n_x), dtype=np.float64)
    v_draws = np.empty((horizon, cfg.count, n_v), dtype=np.float64)
    for i in range(cfg.count):
        rng = _rng_for(cfg.seed, i)
        x[i] = _draw_in_box(rng, scenario.x0)
        for t in range(horizon):
            v_draws[t, i] = _draw_in_box(rng, scenario.v_set)
    states = np.empty((cfg.count, horizon + 1, plant.n_x), dtype=np.float64)
    states[:, 0] = x
    for t in range(horizon):
        y = plant.output_batch(x)
        u = eval_network_batch(net, np.hstack([y, v_draws[t]]))
        x = plant.step_batch(x, u)
        states[:, t + 1] = x
    return states


def trajectories_in_tube(states: np.ndarray, tube) -> bool:
    """True iff every trajectory state lies in the tube's box at its step."""
    for t, step in enumerate(tube.steps):
        pts = states[:, t, :]
        if np.any(pts < step.state.lo) or np.any(pts > step.state.hi):
            return False
    return True
