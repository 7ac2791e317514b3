"""JSON file formats for networks, scenarios, and result reports.

All formats carry a `format` tag and explicit dimension fields so a
mismatch fails at parse time with a message naming the file and field.
Floats serialize at full precision (shortest round-tripping decimal),
so parse -> serialize -> parse is value-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .closed_loop import ReachTube, SafetySpec, Scenario, Verdict
from .errors import InputError, InternalError
from .geometry import BoxUnion, HyperBox, PartitionSpec
from .network import Activation, Layer, NetworkModel
from .plant import LinearPlant, named_plant

NETWORK_FORMAT = "boxreach/network-v1"
SCENARIO_FORMAT = "boxreach/scenario-v1"
REPORT_FORMAT = "boxreach/report-v1"


def _fail(source: str, message: str):
    raise InputError(f"{source}: {message}")


def _require(doc: dict, key: str, source: str):
    if key not in doc:
        _fail(source, f"missing required field {key!r}")
    return doc[key]


def _as_matrix(value, rows: int, cols: int, source: str, field: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=np.float64)
    except (TypeError, ValueError):
        _fail(source, f"{field} is not a numeric matrix")
    if arr.ndim != 2 or arr.shape != (rows, cols):
        _fail(source, f"{field} must be {rows}x{cols}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        _fail(source, f"{field} contains non-finite entries")
    return arr


def _as_vector(value, length: int, source: str, field: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=np.float64)
    except (TypeError, ValueError):
        _fail(source, f"{field} is not a numeric vector")
    if arr.ndim != 1 or arr.shape != (length,):
        _fail(source, f"{field} must have length {length}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        _fail(source, f"{field} contains non-finite entries")
    return arr


# ---------------------------------------------------------------------------
# Boxes


def box_to_doc(box: HyperBox) -> dict:
    return {"lo": box.lo.tolist(), "hi": box.hi.tolist()}


def box_from_doc(doc, source: str, field: str) -> HyperBox:
    if not isinstance(doc, dict) or "lo" not in doc or "hi" not in doc:
        _fail(source, f"{field} must be an object with 'lo' and 'hi' arrays")
    try:
        return HyperBox(doc["lo"], doc["hi"])
    except (TypeError, ValueError) as exc:
        _fail(source, f"{field}: {exc}")


# ---------------------------------------------------------------------------
# Networks


def network_to_doc(net: NetworkModel, name: str | None = None) -> dict:
    doc = {"format": NETWORK_FORMAT}
    if name:
        doc["name"] = name
    doc["input_dim"] = net.input_dim
    doc["layers"] = [{
        "activation": layer.activation.value,
        "rows": layer.output_dim,
        "cols": layer.input_dim,
        "weights": layer.weights.tolist(),
        "bias": layer.bias.tolist(),
    } for layer in net.layers]
    return doc


def network_from_doc(doc: dict, source: str = "<network>") -> NetworkModel:
    if not isinstance(doc, dict):
        _fail(source, "network document must be a JSON object")
    fmt = doc.get("format")
    if fmt != NETWORK_FORMAT:
        _fail(source, f"expected format {NETWORK_FORMAT!r}, got {fmt!r}")
    input_dim = _require(doc, "input_dim", source)
    layer_docs = _require(doc, "layers", source)
    if not isinstance(layer_docs, list) or not layer_docs:
        _fail(source, "layers must be a non-empty list")
    layers = []
    prev = input_dim
    for idx, ld in enumerate(layer_docs):
        where = f"layers[{idx}]"
        if not isinstance(ld, dict):
            _fail(source, f"{where} must be an object")
        try:
            activation = Activation.from_tag(_require(ld, "activation", source))
        except ValueError as exc:
            _fail(source, f"{where}: {exc}")
        rows = _require(ld, "rows", source)
        cols = _require(ld, "cols", source)
        if cols != prev:
            _fail(source, f"{where}: cols {cols} does not chain from previous "
                          f"dimension {prev}")
        weights = _as_matrix(_require(ld, "weights", source), rows, cols,
                             source, f"{where}.weights")
        bias = _as_vector(_require(ld, "bias", source), rows,
                          source, f"{where}.bias")
        layers.append(Layer(weights, bias, activation))
        prev = rows
    return NetworkModel(layers)


# ---------------------------------------------------------------------------
# Scenarios


def plant_to_doc(plant) -> dict:
    if isinstance(plant, LinearPlant):
        return {"kind": "linear", "A": plant.A.tolist(), "B": plant.B.tolist(),
                "C": plant.C.tolist()}
    name = getattr(plant, "registry_name", None)
    if name is None:
        raise InputError("only linear and named plants can be serialized")
    return {"kind": "named", "name": name,
            "params": dict(getattr(plant, "registry_params", {}))}


def plant_from_doc(doc: dict, source: str):
    if not isinstance(doc, dict):
        _fail(source, "plant must be an object")
    kind = _require(doc, "kind", source)
    if kind == "linear":
        a = doc.get("A"), doc.get("B"), doc.get("C")
        if any(m is None for m in a):
            _fail(source, "linear plant needs A, B, and C")
        try:
            A = np.array(doc["A"], dtype=np.float64)
            B = np.array(doc["B"], dtype=np.float64)
            C = np.array(doc["C"], dtype=np.float64)
            return LinearPlant(A, B, C)
        except (TypeError, ValueError) as exc:
            _fail(source, f"plant: {exc}")
    elif kind == "named":
        name = _require(doc, "name", source)
        params = doc.get("params", {})
        try:
            plant = named_plant(name, params)
        except ValueError as exc:
            _fail(source, f"plant: {exc}")
        plant.registry_name = name
        plant.registry_params = dict(params)
        return plant
    _fail(source, f"unknown plant kind {kind!r} (expected 'linear' or 'named')")


def scenario_to_doc(scenario: Scenario, safety: SafetySpec | None = None,
                    name: str | None = None) -> dict:
    doc = {"format": SCENARIO_FORMAT}
    if name:
        doc["name"] = name
    doc["plant"] = plant_to_doc(scenario.plant)
    doc["controller"] = network_to_doc(scenario.controller)
    doc["initial_box"] = box_to_doc(scenario.x0)
    doc["input_box"] = box_to_doc(scenario.v_set)
    doc["horizon"] = scenario.horizon
    doc["partition"] = list(scenario.partition.counts)
    doc["state_grid"] = list(scenario.resolved_state_grid().counts)
    doc["epsilon"] = scenario.epsilon
    if safety is not None and len(safety.unsafe):
        doc["unsafe"] = [box_to_doc(b) for b in safety.unsafe]
    return doc


def scenario_from_doc(doc: dict, source: str = "<scenario>",
                      base_dir: Path | None = None) -> tuple[Scenario, SafetySpec]:
    if not isinstance(doc, dict):
        _fail(source, "scenario document must be a JSON object")
    fmt = doc.get("format")
    if fmt != SCENARIO_FORMAT:
        _fail(source, f"expected format {SCENARIO_FORMAT!r}, got {fmt!r}")
    plant = plant_from_doc(_require(doc, "plant", source), source)
    ctrl = _require(doc, "controller", source)
    if isinstance(ctrl, str):
        path = Path(ctrl)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        controller = load_network(path)
    else:
        controller = network_from_doc(ctrl, f"{source}:controller")
    x0 = box_from_doc(_require(doc, "initial_box", source), source, "initial_box")
    v_set = box_from_doc(_require(doc, "input_box", source), source, "input_box")
    horizon = _require(doc, "horizon", source)
    if not isinstance(horizon, int) or horizon < 0:
        _fail(source, f"horizon must be a non-negative integer, got {horizon!r}")
    partition = _partition_from_doc(_require(doc, "partition", source),
                                    source, "partition")
    state_grid = None
    if doc.get("state_grid") is not None:
        state_grid = _partition_from_doc(doc["state_grid"], source, "state_grid")
    epsilon = doc.get("epsilon", 0.0)
    if not isinstance(epsilon, (int, float)) or epsilon < 0:
        _fail(source, f"epsilon must be a non-negative number, got {epsilon!r}")
    unsafe_docs = doc.get("unsafe", [])
    if not isinstance(unsafe_docs, list):
        _fail(source, "unsafe must be a list of boxes")
    boxes = [box_from_doc(b, source, f"unsafe[{i}]")
             for i, b in enumerate(unsafe_docs)]
    if boxes:
        unsafe = BoxUnion.from_boxes(boxes)
    else:
        unsafe = BoxUnion.empty(plant.n_x)
    try:
        scenario = Scenario(plant=plant, controller=controller, x0=x0,
                            v_set=v_set, horizon=horizon, partition=partition,
                            state_grid=state_grid, epsilon=float(epsilon))
    except ValueError as exc:
        _fail(source, str(exc))
    return scenario, SafetySpec(unsafe)


def _partition_from_doc(value, source: str, field: str) -> PartitionSpec:
    if not isinstance(value, list) or not value:
        _fail(source, f"{field} must be a non-empty list of positive integers")
    try:
        return PartitionSpec(tuple(value))
    except (TypeError, ValueError) as exc:
        _fail(source, f"{field}: {exc}")


# ---------------------------------------------------------------------------
# Reports


def union_to_docs(union: BoxUnion) -> list[dict]:
    docs = []
    for i in range(len(union)):
        d = {"lo": union.los[i].tolist(), "hi": union.his[i].tolist()}
        if union.cell_index is not None:
            d["cell"] = int(union.cell_index[i])
        docs.append(d)
    return docs


def network_report(config: dict, union: BoxUnion, wall_time_s: float) -> dict:
    from . import __version__
    return {
        "format": REPORT_FORMAT,
        "kind": "network-output",
        "tool": "boxreach",
        "version": __version__,
        "config": config,
        "cell_count": len(union),
        "boxes": union_to_docs(union),
        "wall_time_s": wall_time_s,
    }


def tube_report(config: dict, tube: ReachTube, step_times: list[float],
                verdict: Verdict | None = None) -> dict:
    from . import __version__
    steps = []
    for step in tube.steps:
        entry = {
            "t": step.t,
            "state": box_to_doc(step.state),
            "state_cells": union_to_docs(step.state_cells),
            "state_cell_count": len(step.state_cells),
            "output": box_to_doc(step.output) if step.output is not None else None,
            "control_hull": (box_to_doc(step.control_hull)
                             if step.control_hull is not None else None),
            "controller_cell_count": (len(step.controller)
                                      if step.controller is not None else None),
            "wall_time_s": step_times[step.t] if step.t < len(step_times) else 0.0,
        }
        steps.append(entry)
    doc = {
        "format": REPORT_FORMAT,
        "kind": "verification" if verdict is not None else "closed-loop",
        "tool": "boxreach",
        "version": __version__,
        "config": config,
        "steps": steps,
        "total_wall_time_s": float(sum(step_times)),
    }
    if verdict is not None:
        doc["verdict"] = verdict.value.value
        doc["witnesses"] = [{
            "t": w.t,
            "state": box_to_doc(w.state),
            "unsafe": box_to_doc(w.unsafe),
        } for w in verdict.witnesses]
    return doc


def validate_tube_report(doc: dict, horizon: int):
    """Internal sanity gate run before a report is written."""
    steps = doc.get("steps", [])
    if len(steps) != horizon + 1:
        raise InternalError(
            f"report has {len(steps)} steps, expected {horizon + 1}")
    for entry in steps:
        for key in ("state", "output", "control_hull"):
            box = entry.get(key)
            if box is None:
                continue
            lo, hi = box["lo"], box["hi"]
            if len(lo) != len(hi) or any(a > b for a, b in zip(lo, hi)):
                raise InternalError(f"malformed {key} box in report step {entry['t']}")


# ---------------------------------------------------------------------------
# File-level helpers


def _load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc


def load_network(path) -> NetworkModel:
    path = Path(path)
    return network_from_doc(_load_json(path), str(path))


def load_scenario(path) -> tuple[Scenario, SafetySpec]:
    path = Path(path)
    return scenario_from_doc(_load_json(path), str(path), base_dir=path.parent)


def save_json(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def detect_format(path) -> str:
    """Return the format tag of a boxreach JSON file."""
    doc = _load_json(path)
    fmt = doc.get("format")
    if fmt not in (NETWORK_FORMAT, SCENARIO_FORMAT, REPORT_FORMAT):
        raise InputError(f"{path}: unrecognized format tag {fmt!r}")
    return fmt
