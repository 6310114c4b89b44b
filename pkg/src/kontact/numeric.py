"""Floating-point checks: fixed-step RK4 flows, conserved quantities,
Riccati superposition and finite-difference validation of derivatives.

These are verification aids for the exact results computed elsewhere in the
package.  Every stage evaluation goes through a pole guard so that a run that
wanders onto a singular set stops with :class:`PoleEncountered` instead of
returning garbage.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import DegenerateSeeds, InputError, PoleAtPoint, PoleEncountered
from .exterior import KFunction, VectorField, VectorForm, DiffForm
from .expr import POLE_TOL, Chart, Expr

SYMBOLIC_TOL = 1e-9
CONSERVATION_TOL = 1e-6
FD_STEP = 1e-5
FD_TOL = 1e-6


@dataclass(frozen=True)
class Profile:
    """One time-dependent coefficient b(t).

    ``kind`` is ``constant`` (data = value), ``polynomial`` (data = ascending
    coefficients) or ``table`` (data = (times, values), piecewise linear).
    """

    kind: str
    data: tuple

    @classmethod
    def constant(cls, value: float) -> "Profile":
        return cls("constant", (float(value),))

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]) -> "Profile":
        return cls("polynomial", tuple(float(c) for c in coeffs))

    @classmethod
    def table(cls, times: Sequence[float], values: Sequence[float]) -> "Profile":
        t = tuple(float(x) for x in times)
        v = tuple(float(x) for x in values)
        if len(t) != len(v) or len(t) < 2:
            raise InputError("a table profile needs at least two (time, value) pairs of equal length")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise InputError("table times must be strictly increasing")
        return cls("table", (t, v))

    @classmethod
    def sin_table(cls, amplitude: float, frequency: float, t_span: tuple[float, float],
                  samples: int = 2001, phase: float = 0.0) -> "Profile":
        ts = np.linspace(t_span[0], t_span[1], samples)
        return cls.table(ts, amplitude * np.sin(frequency * ts + phase))

    @classmethod
    def from_json(cls, spec) -> "Profile":
        if isinstance(spec, (int, float)):
            return cls.constant(spec)
        if isinstance(spec, Mapping):
            if "constant" in spec:
                return cls.constant(spec["constant"])
            if "polynomial" in spec:
                return cls.polynomial(spec["polynomial"])
            if "table" in spec:
                tab = spec["table"]
                return cls.table(tab["t"], tab["v"])
            if "sin" in spec:
                s = spec["sin"]
                return cls.sin_table(s.get("amplitude", 1.0), s.get("frequency", 1.0),
                                     tuple(s.get("t_span", (0.0, 1.0))), s.get("samples", 2001),
                                     s.get("phase", 0.0))
        raise InputError(f"cannot read coefficient profile {spec!r}")

    def __call__(self, t: float) -> float:
        if self.kind == "constant":
            return self.data[0]
        if self.kind == "polynomial":
            acc = 0.0
            for c in reversed(self.data):
                acc = acc * t + c
            return acc
        times, values = self.data
        if t < times[0] - 1e-12 or t > times[-1] + 1e-12:
            raise InputError(f"time {t} outside the tabulated range [{times[0]}, {times[-1]}]")
        return float(np.interp(t, times, values))


CoeffProfile = Mapping[str, Profile]


def _compile_field(X: VectorField, names: Sequence[str]):
    return [X[i].compile(names) if not X[i].is_zero() else None for i in range(X.chart.dim)]


@dataclass
class TDepSystem:
    """dx/dt = sum_i b_i(t) X_i(x)."""

    fields: Sequence[VectorField]
    coefficients: Sequence[str]

    def __post_init__(self):
        if len(self.fields) != len(self.coefficients):
            raise InputError("one coefficient name per field")
        if not self.fields:
            raise InputError("empty system")
        self.chart: Chart = self.fields[0].chart
        names = list(self.chart.vars)
        self._compiled = [_compile_field(X, names) for X in self.fields]

    @property
    def dim(self) -> int:
        return self.chart.dim

    def field_values(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        """Array (fields, dim, ...) of the component values at ``x``; guards poles."""
        args = [x[..., i] for i in range(self.dim)]
        out = np.zeros((len(self.fields), self.dim) + x.shape[:-1])
        for a, comps in enumerate(self._compiled):
            for i, fn in enumerate(comps):
                if fn is None:
                    continue
                num, den = fn(*args)
                if np.any(np.abs(den) < POLE_TOL):
                    raise PoleEncountered(
                        f"field {a + 1} component {self.chart.vars[i]} is singular at t={t}",
                        time=t, state=np.asarray(x).tolist(),
                    )
                out[a, i] = num / den
        return out

    def rhs(self, t: float, x: np.ndarray, profile: CoeffProfile) -> np.ndarray:
        b = np.array([profile[c](t) for c in self.coefficients])
        vals = self.field_values(x, t)
        return np.moveaxis(np.tensordot(b, vals, axes=(0, 0)), 0, -1)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    step: float
    integrals: dict[str, np.ndarray] = field(default_factory=dict)
    names: tuple[str, ...] = ()
    method: str = "RK4"

    def at(self, k: int) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.names, self.states[k])}


def _grid(t_span: tuple[float, float], step: float) -> tuple[int, float]:
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not step > 0 or not t1 > t0:
        raise InputError("need t1 > t0 and a positive step")
    n = max(1, int(math.ceil((t1 - t0) / step - 1e-9)))
    return n, (t1 - t0) / n


def integrate(
    system: TDepSystem,
    profile: CoeffProfile,
    x0: Union[Sequence[float], Mapping[str, float]],
    t_span: tuple[float, float],
    step: float,
) -> Trajectory:
    """Classical RK4 on a uniform grid; the step is shrunk so it divides the span.

    The running integrals of every coefficient are carried as extra state so that
    quadrature and flow share the same grid.
    """
    missing = [c for c in system.coefficients if c not in profile]
    if missing:
        raise InputError(f"no profile for coefficient(s) {missing}")
    if isinstance(x0, Mapping):
        x0 = [x0[v] for v in system.chart.vars]
    x = np.asarray(x0, dtype=float)
    if x.shape[-1] != system.dim:
        raise InputError(f"initial state has {x.shape[-1]} entries, chart has {system.dim}")
    n, h = _grid(t_span, step)
    t0 = float(t_span[0])
    coeffs = list(dict.fromkeys(system.coefficients))
    q = np.zeros((len(coeffs),) + x.shape[:-1])

    def f(t, y):
        return system.rhs(t, y, profile)

    def g(t):
        return np.array([profile[c](t) for c in coeffs]).reshape((len(coeffs),) + (1,) * (x.ndim - 1)) \
            * np.ones(q.shape)

    times = np.empty(n + 1)
    states = np.empty((n + 1,) + x.shape)
    ints = np.empty((n + 1,) + q.shape)
    times[0], states[0], ints[0] = t0, x, q
    for k in range(n):
        t = t0 + k * h
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = f(t, x)
            k2 = f(t + h / 2, x + h / 2 * k1)
            k3 = f(t + h / 2, x + h / 2 * k2)
            k4 = f(t + h, x + h * k3)
            x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        # quadrature is RK4 with a state-independent right-hand side, i.e. Simpson
        q = q + h / 6 * (g(t) + 4 * g(t + h / 2) + g(t + h))
        if not np.all(np.isfinite(x)):
            raise PoleEncountered(f"state blew up at t={t + h}", time=t + h, state=x.tolist())
        times[k + 1] = t0 + (k + 1) * h
        states[k + 1] = x
        ints[k + 1] = q
    integrals = {c: ints[:, i] for i, c in enumerate(coeffs)}
    return Trajectory(times, states, h, integrals, names=tuple(system.chart.vars))


@dataclass(frozen=True)
class ConstantReport:
    ok: bool
    max_drift: float
    tol: float
    initial: float

    def as_dict(self) -> dict:
        return {"ok": self.ok, "max_drift": self.max_drift, "tol": self.tol, "initial": self.initial}


def integral_name(coefficient: str) -> str:
    return f"int_{coefficient}"


def trajectory_symbols(coefficients: Sequence[str], constants: Sequence[str] = ()) -> tuple[str, ...]:
    """Extra names a quantity may use along a run besides the chart variables."""
    return tuple(constants) + ("t",) + tuple(integral_name(b) for b in coefficients)


def _trajectory_columns(traj: Trajectory) -> dict[str, np.ndarray]:
    cols = {n: traj.states[..., i] for i, n in enumerate(traj.names)}
    cols["t"] = traj.times.reshape((-1,) + (1,) * (traj.states.ndim - 2))
    for c, v in traj.integrals.items():
        cols[integral_name(c)] = v
    return cols


def evaluate_along(traj: Trajectory, quantity: Expr) -> np.ndarray:
    """Values of ``quantity`` (in chart variables, ``t`` and ``int_<b>``) along the run."""
    cols = _trajectory_columns(traj)
    free = sorted(quantity.free_symbols())
    unknown = [n for n in free if n not in cols]
    if unknown:
        raise InputError(f"quantity uses {unknown}, not available along the trajectory")
    fn = quantity.compile(free)
    num, den = fn(*[cols[n] for n in free])
    num = np.broadcast_to(num, traj.states.shape[:-1])
    den = np.broadcast_to(den, traj.states.shape[:-1])
    bad = np.abs(den) < POLE_TOL
    if np.any(bad):
        k = int(np.argwhere(bad)[0][0])
        raise PoleEncountered(f"quantity is singular at t={traj.times[k]}",
                              time=float(traj.times[k]), state=traj.states[k].tolist())
    return num / den


def check_constant(traj: Trajectory, quantity: Union[Expr, float], tol: float = CONSERVATION_TOL) -> ConstantReport:
    """Max |I(t, x(t)) - I(t0, x(t0))| over the grid."""
    if not isinstance(quantity, Expr):
        return ConstantReport(True, 0.0, tol, float(quantity))
    vals = evaluate_along(traj, quantity)
    drift = float(np.max(np.abs(vals - vals[0]))) if vals.size else 0.0
    return ConstantReport(drift < tol, drift, tol, float(np.ravel(vals[0])[0]))


def finite_differences(values: np.ndarray, step: float, order: int) -> np.ndarray:
    """Forward differences of the given order divided by step**order."""
    return np.diff(np.asarray(values, dtype=float), n=order, axis=0) / step ** order


# ---- Riccati superposition ------------------------------------------------


def riccati_combine(x1, x2, x3, k):
    """General solution from three particular ones and the constant k."""
    den = (x3 - x2) - k * (x3 - x1)
    return (x1 * (x3 - x2) - k * x2 * (x3 - x1)) / den


@dataclass(frozen=True)
class SuperpositionReport:
    ok: bool
    max_deviation: float
    tol: float
    k: float
    min_denominator: float

    def as_dict(self) -> dict:
        return {"ok": self.ok, "max_deviation": self.max_deviation, "tol": self.tol,
                "k": self.k, "min_denominator": self.min_denominator}


def riccati_system() -> TDepSystem:
    chart = Chart(["x"])
    fields = [VectorField.parse(chart, [t]) for t in ("1", "x", "x^2")]
    return TDepSystem(fields, ["b1", "b2", "b3"])


def riccati_superposition_check(
    profile: CoeffProfile,
    seeds: Sequence[float],
    k: float,
    t_span: tuple[float, float] = (0.0, 1.0),
    step: float = 1e-3,
    tol: float = CONSERVATION_TOL,
) -> SuperpositionReport:
    """Integrate three seeds and the solution they predict for ``k``; compare the fourth."""
    if len(seeds) != 3:
        raise InputError("three seed initial conditions are required")
    s = [float(v) for v in seeds]
    if min(abs(s[0] - s[1]), abs(s[0] - s[2]), abs(s[1] - s[2])) < 1e-12:
        raise DegenerateSeeds(f"seeds {s} are not pairwise distinct")
    den0 = (s[2] - s[1]) - k * (s[2] - s[0])
    if abs(den0) < 1e-12:
        raise DegenerateSeeds(f"k={k} puts the reconstructed solution at infinity")
    x4 = riccati_combine(s[0], s[1], s[2], k)
    traj = integrate(riccati_system(), profile, np.array(s + [x4]).reshape(4, 1), t_span, step)
    X = traj.states[..., 0]
    den = (X[:, 2] - X[:, 1]) - k * (X[:, 2] - X[:, 0])
    min_den = float(np.min(np.abs(den)))
    if min_den < 1e-9:
        raise DegenerateSeeds("reconstruction denominator vanishes along the run")
    rec = riccati_combine(X[:, 0], X[:, 1], X[:, 2], k)
    dev = float(np.max(np.abs(rec - X[:, 3])))
    return SuperpositionReport(dev < tol, dev, tol, float(k), min_den)


# ---- finite differences -----------------------------------------------------


@dataclass(frozen=True)
class FDReport:
    ok: bool
    numeric: float
    symbolic: float
    rel_error: float
    step: float

    def as_dict(self) -> dict:
        return {"ok": self.ok, "numeric": self.numeric, "symbolic": self.symbolic,
                "rel_error": self.rel_error, "step": self.step}


def fd_validate(
    e: Expr,
    var: str,
    point: Mapping[str, float],
    h_fd: float = FD_STEP,
    tol: float = FD_TOL,
) -> FDReport:
    """Central difference of ``e`` in ``var`` against the exact derivative."""
    free = sorted(set(e.free_symbols()) | {var})
    missing = [n for n in free if n not in point]
    if missing:
        raise InputError(f"point does not bind {missing}")
    fn = e.compile(free)
    base = [float(point[n]) for n in free]
    j = free.index(var)
    dens = []
    nums = []
    for shift in (-h_fd, 0.0, h_fd):
        vals = list(base)
        vals[j] += shift
        num, den = fn(*vals)
        nums.append(num)
        dens.append(den)
    if any(abs(d) < POLE_TOL for d in dens) or len({math.copysign(1.0, d) for d in dens}) > 1:
        raise PoleEncountered(f"{e} has a pole within {h_fd} of the point", time=None,
                              state=dict(point))
    numeric = (nums[2] / dens[2] - nums[0] / dens[0]) / (2 * h_fd)
    try:
        symbolic = e.diff(var).eval(dict(point))
    except PoleAtPoint as exc:
        raise PoleEncountered(str(exc), time=None, state=dict(point)) from exc
    rel = abs(numeric - symbolic) / max(1.0, abs(symbolic))
    return FDReport(rel < tol, numeric, symbolic, rel, h_fd)


# ---- spot checks of symbolic identities ---------------------------------------


def _entries(obj) -> list[Expr]:
    if isinstance(obj, Expr):
        return [obj]
    if isinstance(obj, KFunction):
        return list(obj)
    if isinstance(obj, VectorField):
        return [obj[i] for i in range(obj.chart.dim)]
    if isinstance(obj, DiffForm):
        return list(obj.as_dict().values())
    if isinstance(obj, VectorForm):
        return [e for w in obj for e in w.as_dict().values()]
    if isinstance(obj, (list, tuple)):
        return [e for item in obj for e in _entries(item)]
    raise TypeError(f"cannot spot-check {type(obj).__name__}")


def spot_check(residual, chart: Chart, points: int = 10, seed: int = 0xC0FFEE,
               tol: float = SYMBOLIC_TOL, scale: float = 2.0) -> float:
    """Max |entry| of a residual object at seeded random float points off the pole set.

    Returns the maximum; raises ``AssertionError`` when it exceeds ``tol``.
    """
    rng = random.Random(seed)
    entries = _entries(residual)
    worst = 0.0
    done = 0
    attempts = 0
    while done < points:
        attempts += 1
        if attempts > 100 * points:
            raise PoleEncountered("no regular sample points found", time=None, state=None)
        pt = {v: rng.uniform(-scale, scale) for v in chart.vars}
        try:
            vals = [abs(e.eval(pt)) for e in entries]
        except PoleAtPoint:
            continue
        worst = max([worst] + vals)
        done += 1
    if worst >= tol:
        raise AssertionError(f"residual reaches {worst:.3e} at sample points")
    return worst
