"""Classical limit of the collective spin model in rescaled variables.

The equations of motion for q_tilde = cos(theta) and the shifted phase
p_tilde depend on g and N only through the product G = g*N, which is what
makes the charging curves collapse when plotted against G.  Integration is
plain fixed-step RK4; the classical ground state q_tilde = -1 is a fixed
point, so charging runs start from a small seed displacement (the quantum
dynamics needs no such seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ClassicalState",
    "ClassicalTrajectory",
    "classical_rhs",
    "classical_energy",
    "integrate_classical",
    "DEFAULT_SEED_DISPLACEMENT",
]

DEFAULT_SEED_DISPLACEMENT = 1e-3
_Q_BOUND = 1.0 + 1e-6


@dataclass(frozen=True)
class ClassicalState:
    q_tilde: float
    p_tilde: float


@dataclass
class ClassicalTrajectory:
    times: np.ndarray
    q_tilde: np.ndarray
    p_tilde: np.ndarray
    h_cl: np.ndarray


def _rhs(q: float, p: float, t: float, big_g: float, omega_z: float) -> tuple[float, float]:
    # big_g is formed once by the caller so equal floating-point products g*N
    # give bitwise-identical derivatives
    dq = 0.25 * big_g * (1.0 - q * q) * math.sin(2.0 * p - omega_z * t)
    dp = -0.5 * big_g * q * math.cos(p - 0.5 * omega_z * t) ** 2
    return dq, dp


def classical_rhs(
    state: ClassicalState, t: float, g: float, n_tls: int, omega_z: float
) -> tuple[float, float]:
    """(dq_tilde/dt, dp_tilde/dt); depends on g and N only through G = g*N."""
    return _rhs(state.q_tilde, state.p_tilde, t, g * n_tls, omega_z)


def classical_energy(
    q_tilde: np.ndarray, p_tilde: np.ndarray, times: np.ndarray,
    g: float, n_tls: int, omega_z: float,
) -> np.ndarray:
    """Classical Hamiltonian evaluated in the original (q, p) variables.

    H_cl = (omega_z/2)*q - (g/4)*N^2*cos^2(p) + (g/4)*q^2*cos^2(p) with
    q = N*q_tilde and p = p_tilde - omega_z*t/2.
    """
    q = n_tls * np.asarray(q_tilde)
    p = np.asarray(p_tilde) - 0.5 * omega_z * np.asarray(times)
    cos2 = np.cos(p) ** 2
    return 0.5 * omega_z * q - 0.25 * g * n_tls**2 * cos2 + 0.25 * g * q**2 * cos2


def integrate_classical(
    initial: ClassicalState,
    g: float,
    n_tls: int,
    omega_z: float,
    horizon: float,
    dt: float | None = None,
) -> ClassicalTrajectory:
    """Fixed-step 4th-order Runge-Kutta trajectory of (q_tilde, p_tilde).

    The horizon is covered by whole steps (rounded to the nearest count).
    Aborts when |q_tilde| leaves [-1, 1] beyond 1e-6, which signals a step
    size too large for the requested coupling.
    """
    if dt is not None and dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    big_g = g * n_tls
    if dt is None:
        dt = 1e-3 / max(omega_z, big_g)
    n_steps = max(1, int(round(horizon / dt)))

    qs = np.empty(n_steps + 1)
    ps = np.empty(n_steps + 1)
    q, p = float(initial.q_tilde), float(initial.p_tilde)
    qs[0], ps[0] = q, p
    for k in range(n_steps):
        t = k * dt
        k1q, k1p = _rhs(q, p, t, big_g, omega_z)
        k2q, k2p = _rhs(q + 0.5 * dt * k1q, p + 0.5 * dt * k1p, t + 0.5 * dt, big_g, omega_z)
        k3q, k3p = _rhs(q + 0.5 * dt * k2q, p + 0.5 * dt * k2p, t + 0.5 * dt, big_g, omega_z)
        k4q, k4p = _rhs(q + dt * k3q, p + dt * k3p, t + dt, big_g, omega_z)
        q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        if abs(q) > _Q_BOUND:
            raise ValueError(
                f"|q_tilde|={abs(q):.6f} left the unit interval at t={t + dt:.6g}; "
                f"reduce the step size (dt={dt:.3g})"
            )
        qs[k + 1], ps[k + 1] = q, p

    times = dt * np.arange(n_steps + 1)
    return ClassicalTrajectory(
        times=times,
        q_tilde=qs,
        p_tilde=ps,
        h_cl=classical_energy(qs, ps, times, g, n_tls, omega_z),
    )
