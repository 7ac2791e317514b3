"""Discrete-time plant models and their set-valued step/output maps.

Linear plants propagate boxes exactly (interval hull of the affine
image). Nonlinear plants carry user-supplied sound interval extensions;
`Expr` builds natural interval extensions for compositions of +, -, *,
and the activation-style elementary functions.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .geometry import HyperBox
from .network import Activation, eval_activation


def _act_interval(kind: Activation, lo: float, hi: float) -> tuple[float, float]:
    out_lo, out_hi = kernels.interval_activation_batch(
        np.array([[lo]], dtype=np.float64), np.array([[hi]], dtype=np.float64),
        kind.code)
    return float(out_lo[0, 0]), float(out_hi[0, 0])


# ---------------------------------------------------------------------------
# Expression nodes for natural interval extensions.


class Expr:
    """Scalar expression over a variable vector, with sound box bounds."""

    def eval(self, values: np.ndarray) -> float:
        raise NotImplementedError

    def bounds(self, lo: np.ndarray, hi: np.ndarray) -> tuple[float, float]:
        raise NotImplementedError

    def __add__(self, other):
        return Add(self, _as_expr(other))

    def __radd__(self, other):
        return Add(_as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, _as_expr(other))

    def __rsub__(self, other):
        return Sub(_as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, _as_expr(other))

    def __rmul__(self, other):
        return Mul(_as_expr(other), self)

    def __neg__(self):
        return Sub(Const(0.0), self)


def _as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(float(value))


class Var(Expr):
    def __init__(self, index: int):
        self.index = int(index)

    def eval(self, values):
        return float(values[self.index])

    def bounds(self, lo, hi):
        return float(lo[self.index]), float(hi[self.index])


class Const(Expr):
    def __init__(self, value: float):
        self.value = float(value)

    def eval(self, values):
        return self.value

    def bounds(self, lo, hi):
        return self.value, self.value


class Add(Expr):
    def __init__(self, a: Expr, b: Expr):
        self.a, self.b = a, b

    def eval(self, values):
        return self.a.eval(values) + self.b.eval(values)

    def bounds(self, lo, hi):
        alo, ahi = self.a.bounds(lo, hi)
        blo, bhi = self.b.bounds(lo, hi)
        return alo + blo, ahi + bhi


class Sub(Expr):
    def __init__(self, a: Expr, b: Expr):
        self.a, self.b = a, b

    def eval(self, values):
        return self.a.eval(values) - self.b.eval(values)

    def bounds(self, lo, hi):
        alo, ahi = self.a.bounds(lo, hi)
        blo, bhi = self.b.bounds(lo, hi)
        return alo - bhi, ahi - blo


class Mul(Expr):
    def __init__(self, a: Expr, b: Expr):
        self.a, self.b = a, b

    def eval(self, values):
        return self.a.eval(values) * self.b.eval(values)

    def bounds(self, lo, hi):
        alo, ahi = self.a.bounds(lo, hi)
        blo, bhi = self.b.bounds(lo, hi)
        products = (alo * blo, alo * bhi, ahi * blo, ahi * bhi)
        return min(products), max(products)


class Act(Expr):
    def __init__(self, kind: Activation, arg: Expr):
        self.kind = kind
        self.arg = _as_expr(arg)

    def eval(self, values):
        return float(eval_activation(self.kind, self.arg.eval(values)))

    def bounds(self, lo, hi):
        alo, ahi = self.arg.bounds(lo, hi)
        return _act_interval(self.kind, alo, ahi)


def tanh(arg) -> Expr:
    return Act(Activation.TANH, arg)


def relu(arg) -> Expr:
    return Act(Activation.RELU, arg)


def logistic(arg) -> Expr:
    return Act(Activation.LOGISTIC, arg)


def gaussian(arg) -> Expr:
    return Act(Activation.GAUSSIAN, arg)


# ---------------------------------------------------------------------------
# Plant models.


class LinearPlant:
    """x(t+1) = A x(t) + B u(t), y(t) = C x(t)."""

    __slots__ = ("A", "B", "C")

    def __init__(self, A, B, C):
        A = np.ascontiguousarray(A, dtype=np.float64)
        B = np.ascontiguousarray(B, dtype=np.float64)
        C = np.ascontiguousarray(C, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        n_x = A.shape[0]
        if B.ndim != 2 or B.shape[0] != n_x:
            raise ValueError(f"B must have {n_x} rows, got shape {B.shape}")
        if C.ndim != 2 or C.shape[1] != n_x:
            raise ValueError(f"C must have {n_x} columns, got shape {C.shape}")
        for name, m in (("A", A), ("B", B), ("C", C)):
            if not np.all(np.isfinite(m)):
                raise ValueError(f"{name} must be finite")
            m.flags.writeable = False
        self.A, self.B, self.C = A, B, C

    @property
    def n_x(self) -> int:
        return self.A.shape[0]

    @property
    def n_u(self) -> int:
        return self.B.shape[1]

    @property
    def n_y(self) -> int:
        return self.C.shape[0]

    def step(self, x, u) -> np.ndarray:
        return self.A @ x + self.B @ u

    def output(self, x) -> np.ndarray:
        return self.C @ x

    def step_batch(self, xs, us) -> np.ndarray:
        return xs @ self.A.T + us @ self.B.T

    def output_batch(self, xs) -> np.ndarray:
        return xs @ self.C.T

    def step_set(self, x_set: HyperBox, u_set: HyperBox) -> HyperBox:
        # Exact interval hull of [A B] applied to the stacked box.
        w = np.hstack([self.A, self.B])
        lo = np.concatenate([x_set.lo, u_set.lo])[None, :]
        hi = np.concatenate([x_set.hi, u_set.hi])[None, :]
        zlo, zhi = kernels.affine_bounds_batch(
            np.ascontiguousarray(lo), np.ascontiguousarray(hi),
            np.ascontiguousarray(w), np.zeros(self.n_x))
        return HyperBox(zlo[0], zhi[0])

    def output_set(self, x_set: HyperBox) -> HyperBox:
        zlo, zhi = kernels.affine_bounds_batch(
            x_set.lo[None, :], x_set.hi[None, :], self.C, np.zeros(self.n_y))
        return HyperBox(zlo[0], zhi[0])

    def __repr__(self):
        return f"LinearPlant(n_x={self.n_x}, n_u={self.n_u}, n_y={self.n_y})"


class NonlinearPlant:
    """Plant defined by componentwise expressions with interval extensions.

    State expressions read the stacked vector [x, u]; output expressions
    read x alone. Soundness of the box maps follows from the natural
    interval extension of each expression.
    """

    __slots__ = ("state_exprs", "output_exprs", "n_x", "n_u")

    def __init__(self, state_exprs, output_exprs, n_x: int, n_u: int):
        self.state_exprs = tuple(state_exprs)
        self.output_exprs = tuple(output_exprs)
        if len(self.state_exprs) != n_x:
            raise ValueError(
                f"need {n_x} state expressions, got {len(self.state_exprs)}")
        if not self.output_exprs:
            raise ValueError("need at least one output expression")
        self.n_x = int(n_x)
        self.n_u = int(n_u)

    @property
    def n_y(self) -> int:
        return len(self.output_exprs)

    def step(self, x, u) -> np.ndarray:
        xu = np.concatenate([np.asarray(x, dtype=np.float64),
                             np.asarray(u, dtype=np.float64)])
        return np.array([e.eval(xu) for e in self.state_exprs])

    def output(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return np.array([e.eval(x) for e in self.output_exprs])

    def step_batch(self, xs, us) -> np.ndarray:
        return np.stack([self.step(x, u) for x, u in zip(xs, us)])

    def output_batch(self, xs) -> np.ndarray:
        return np.stack([self.output(x) for x in xs])

    def step_set(self, x_set: HyperBox, u_set: HyperBox) -> HyperBox:
        lo = np.concatenate([x_set.lo, u_set.lo])
        hi = np.concatenate([x_set.hi, u_set.hi])
        bounds = [e.bounds(lo, hi) for e in self.state_exprs]
        return HyperBox([b[0] for b in bounds], [b[1] for b in bounds])

    def output_set(self, x_set: HyperBox) -> HyperBox:
        bounds = [e.bounds(x_set.lo, x_set.hi) for e in self.output_exprs]
        return HyperBox([b[0] for b in bounds], [b[1] for b in bounds])

    def __repr__(self):
        return f"NonlinearPlant(n_x={self.n_x}, n_u={self.n_u}, n_y={self.n_y})"


def _check_plant_dims(plant, x_set: HyperBox | None, u_set: HyperBox | None):
    if x_set is not None and x_set.dim != plant.n_x:
        raise ValueError(f"state set dimension {x_set.dim} != n_x {plant.n_x}")
    if u_set is not None and u_set.dim != plant.n_u:
        raise ValueError(f"input set dimension {u_set.dim} != n_u {plant.n_u}")


def reach_ode_x(plant, u_set: HyperBox, x_set: HyperBox) -> HyperBox:
    """Box containing f(x, u) for all x in x_set, u in u_set."""
    _check_plant_dims(plant, x_set, u_set)
    return plant.step_set(x_set, u_set)


def reach_ode_y(plant, x_set: HyperBox) -> HyperBox:
    """Box containing h(x) for all x in x_set."""
    _check_plant_dims(plant, x_set, None)
    return plant.output_set(x_set)


def step_plant(plant, x, u) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise simulation step: returns (f(x, u), h(x))."""
    x = np.asarray(x, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if x.shape != (plant.n_x,):
        raise ValueError(f"state must have shape ({plant.n_x},), got {x.shape}")
    if u.shape != (plant.n_u,):
        raise ValueError(f"input must have shape ({plant.n_u},), got {u.shape}")
    return plant.step(x, u), plant.output(x)


def _build_tanh_oscillator(params: dict) -> NonlinearPlant:
    tau = float(params.get("tau", 0.1))
    stiffness = float(params.get("stiffness", 0.5))
    damping = float(params.get("damping", 0.9))
    gain = float(params.get("gain", 0.1))
    x1, x2, u1 = Var(0), Var(1), Var(2)
    state = [x1 + tau * x2,
             damping * x2 - stiffness * tanh(x1) + gain * u1]
    return NonlinearPlant(state, [Var(0)], n_x=2, n_u=1)


# Builders for nonlinear plants addressable by name in scenario files.
NAMED_PLANTS = {
    "tanh_oscillator": _build_tanh_oscillator,
}


def named_plant(name: str, params: dict | None = None) -> NonlinearPlant:
    try:
        builder = NAMED_PLANTS[name]
    except KeyError:
        known = ", ".join(sorted(NAMED_PLANTS))
        raise ValueError(f"unknown plant {name!r} (known: {known})") from None
    return builder(params or {})
