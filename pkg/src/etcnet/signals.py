"""Command signal generation.

The default command is a square wave passed through a first-order low
pass, which keeps the signal continuously differentiable with a bounded
derivative.  The filter is integrated with the same fixed step as the
simulation, so a command value is deterministic in (spec, t, dt).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("filtered_square", "step", "constant", "sinusoid")


@dataclass(frozen=True)
class CommandSpec:
    kind: str = "filtered_square"
    amplitude: float = 1.0
    period: float = 60.0
    tau: float = 0.5  # low-pass time constant, seconds
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown command kind {self.kind!r}")
        if self.kind in ("filtered_square", "sinusoid") and self.period <= 0:
            raise ValueError("period must be > 0")
        if self.kind == "filtered_square" and self.tau <= 0:
            raise ValueError("filter time constant must be > 0")


def square_wave(spec: CommandSpec, t: np.ndarray | float) -> np.ndarray | float:
    """Raw +/- amplitude square wave (the filter input), without offset."""
    phase = np.mod(t, spec.period)
    return np.where(phase < 0.5 * spec.period, spec.amplitude, -spec.amplitude)


def command_trace(spec: CommandSpec, dt: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Sample c(t) and dc/dt at t = 0, dt, ..., (m-1)*dt.

    For ``filtered_square`` the filter state starts at rest (= offset) and
    is advanced by explicit Euler: c += dt/tau * (u - c).
    """
    if m < 1:
        raise ValueError("need at least one sample")
    t = np.arange(m) * dt
    if spec.kind == "constant":
        return np.full(m, spec.offset), np.zeros(m)
    if spec.kind == "step":
        # jumps from offset to offset+amplitude at t = period
        c = spec.offset + spec.amplitude * (t >= spec.period)
        return c.astype(float), np.zeros(m)
    if spec.kind == "sinusoid":
        w = 2.0 * np.pi / spec.period
        return spec.offset + spec.amplitude * np.sin(w * t), spec.amplitude * w * np.cos(w * t)
    # filtered_square
    u = spec.offset + np.asarray(square_wave(spec, t))
    c = np.empty(m)
    cdot = np.empty(m)
    state = spec.offset
    alpha = dt / spec.tau
    for k in range(m):
        c[k] = state
        cdot[k] = (u[k] - state) / spec.tau
        state = state + alpha * (u[k] - state)
    return c, cdot


def command_value(spec: CommandSpec, t: float, dt: float = 1e-3) -> float:
    """c(t), integrating the filter from 0 with step dt where needed."""
    m = int(round(t / dt)) + 1
    c, _ = command_trace(spec, dt, m)
    return float(c[-1])


def command_derivative(spec: CommandSpec, t: float, dt: float = 1e-3) -> float:
    m = int(round(t / dt)) + 1
    _, cdot = command_trace(spec, dt, m)
    return float(cdot[-1])


def derivative_bound(spec: CommandSpec) -> float:
    """Upper bound on |dc/dt| for the generated command."""
    if spec.kind in ("constant", "step"):
        return 0.0
    if spec.kind == "sinusoid":
        return abs(spec.amplitude) * 2.0 * np.pi / spec.period
    return 2.0 * abs(spec.amplitude) / spec.tau
