"""Closed-form weak-coupling predictions for stored energy and power.

Second order in the coupling: E(t) = (g^2/8)*(1 - cos 2*omega_z*t)/omega_z*(N^2 - N),
P(t) = E(t)/t.  The energy peaks at omega_z*t = pi/2; the power peaks where
tan x = 2x, a root that is computed once by bisection and cached rather than
hard-coded (the commonly quoted decimal constant is slightly off).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import bisect

__all__ = [
    "WeakCouplingPrediction",
    "e_weak",
    "p_weak",
    "power_peak_root",
    "weak_maxima",
]


@dataclass(frozen=True)
class WeakCouplingPrediction:
    e_of_t: Callable[[np.ndarray], np.ndarray]
    p_of_t: Callable[[np.ndarray], np.ndarray]
    e_max: float
    t_e: float
    p_max: float
    t_p: float


def e_weak(t, g: float, omega_z: float, n_tls: int):
    """Perturbative stored energy; vanishes identically for a single TLS."""
    t = np.asarray(t, dtype=float)
    amp = g**2 / (8.0 * omega_z) * (n_tls**2 - n_tls)
    out = amp * (1.0 - np.cos(2.0 * omega_z * t))
    return float(out) if out.ndim == 0 else out


def p_weak(t, g: float, omega_z: float, n_tls: int):
    """Perturbative averaged power e_weak(t)/t, 0 at t = 0 by the limit."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros_like(t)
    nz = t > 0
    out[nz] = e_weak(t[nz], g, omega_z, n_tls) / t[nz]
    return float(out[0]) if out.size == 1 else out


@lru_cache(maxsize=1)
def power_peak_root() -> float:
    """Root of tan x = 2x in (1, 1.5), located by bisection to 1e-12."""
    return float(bisect(lambda x: math.tan(x) - 2.0 * x, 1.0, 1.5, xtol=1e-12))


def weak_maxima(g: float, omega_z: float, n_tls: int) -> WeakCouplingPrediction:
    """First maxima of the perturbative energy and power curves.

    The energy maximum is analytic; the power maximum is evaluated at the
    cached tan x = 2x root.
    """
    t_e = math.pi / (2.0 * omega_z)
    e_max = g**2 / (4.0 * omega_z) * (n_tls**2 - n_tls)
    t_p = power_peak_root() / omega_z
    p_max = float(p_weak(t_p, g, omega_z, n_tls))
    return WeakCouplingPrediction(
        e_of_t=lambda t: e_weak(t, g, omega_z, n_tls),
        p_of_t=lambda t: p_weak(t, g, omega_z, n_tls),
        e_max=e_max,
        t_e=t_e,
        p_max=p_max,
        t_p=t_p,
    )
