"""Hamiltonian assembly, exact diagonalization and spectral time evolution.

The charging protocol is a step quench: evolve the collective ground state
under H = omega_z*S_z - g*S_x^2 up to the switch-off time tau_c, then under
the bare battery Hamiltonian omega_z*S_z alone.  Propagation is spectral
(diagonalize once, evaluate at arbitrary t), so the time grid controls only
where observables are sampled, never the accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .spin import (
    ParitySector,
    SpinSector,
    SpinState,
    ground_state,
    ladder_elements,
    op_sx2,
    op_sz,
)

__all__ = [
    "NegativeCouplingError",
    "ProtocolConfig",
    "EigenSystem",
    "Trajectory",
    "build_hamiltonian",
    "diagonalize",
    "diagonalize_tridiagonal",
    "propagate",
    "run_protocol",
    "run_protocol_parity",
    "default_time_grid",
    "effective_frequency",
]

EIG_TOL = 1e-10


class NegativeCouplingError(ValueError):
    """Raised for g < 0; only non-negative couplings map back to a cavity."""


@dataclass(frozen=True)
class ProtocolConfig:
    """Step-protocol parameters: quench on at t=0, off at tau_c (inf = never off)."""

    omega_z: float
    g: float
    t_grid: np.ndarray
    tau_c: float = math.inf

    def __post_init__(self):
        if self.omega_z <= 0:
            raise ValueError(f"omega_z must be positive, got {self.omega_z}")
        if self.g < 0:
            raise NegativeCouplingError(f"coupling g must be >= 0, got {self.g}")
        grid = np.asarray(self.t_grid, dtype=float)
        if grid.size == 0:
            raise ValueError("empty time grid")
        if np.any(grid < 0):
            raise ValueError("sample times must be >= 0")
        if grid.size > 1 and np.any(np.diff(grid) <= 0):
            raise ValueError("time grid must be strictly increasing")
        object.__setattr__(self, "t_grid", grid)


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and orthonormal eigenvector columns of a real symmetric matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass
class Trajectory:
    """Collective expectation values sampled on a time grid.

    ``states`` holds the (n_times, dim) complex snapshots when retention was
    requested, else None.
    """

    n_tls: int
    times: np.ndarray
    sz: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    states: np.ndarray | None = None


def effective_frequency(omega_z: float, g: float, n_tls: int) -> float:
    """Fast scale of the charging dynamics, max(omega_z, g*N)."""
    return max(omega_z, g * n_tls)


def default_time_grid(
    omega_z: float, g: float, n_tls: int, periods: float = 10.0, samples: int = 2000
) -> np.ndarray:
    """Uniform grid over ``periods`` periods of the effective fast frequency."""
    horizon = periods * 2.0 * math.pi / effective_frequency(omega_z, g, n_tls)
    return np.linspace(0.0, horizon, samples)


def build_hamiltonian(sector: SpinSector, omega_z: float, g: float) -> np.ndarray:
    """H = omega_z * S_z - g * S_x^2 as a dense real symmetric matrix."""
    if g < 0:
        raise NegativeCouplingError(f"coupling g must be >= 0, got {g}")
    return omega_z * op_sz(sector) - g * op_sx2(sector)


def _check_eigensystem(matrix: np.ndarray, vals: np.ndarray, vecs: np.ndarray) -> None:
    scale = max(np.abs(vals).max(), 1e-300)
    resid = matrix @ vecs - vecs * vals
    if np.abs(resid).max() > EIG_TOL * scale:
        raise RuntimeError(
            f"eigensystem residual {np.abs(resid).max():.3e} exceeds "
            f"{EIG_TOL:.0e} * ||H|| (dim={matrix.shape[0]})"
        )
    gram = vecs.T @ vecs
    ortho = np.abs(gram - np.eye(len(vals))).max()
    if ortho > EIG_TOL:
        raise RuntimeError(f"eigenvectors not orthonormal: max deviation {ortho:.3e}")


def diagonalize(op: np.ndarray) -> EigenSystem:
    """Full eigensystem of a real symmetric matrix, eigenvalues ascending."""
    op = np.asarray(op, dtype=float)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {op.shape}")
    if not np.array_equal(op, op.T):
        raise ValueError("matrix is not exactly symmetric")
    try:
        vals, vecs = np.linalg.eigh(op)
    except np.linalg.LinAlgError as err:
        raise RuntimeError(
            f"eigensolver failed to converge on a {op.shape[0]}x{op.shape[0]} "
            f"matrix with max|H|={np.abs(op).max():.3e}: {err}"
        ) from err
    _check_eigensystem(op, vals, vecs)
    return EigenSystem(vals, vecs)


def diagonalize_tridiagonal(diag: np.ndarray, off: np.ndarray) -> EigenSystem:
    """Eigensystem of a symmetric tridiagonal matrix given its two bands."""
    try:
        vals, vecs = scipy.linalg.eigh_tridiagonal(diag, off)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as err:
        raise RuntimeError(
            f"tridiagonal eigensolver failed (dim={len(diag)}): {err}"
        ) from err
    matrix = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    _check_eigensystem(matrix, vals, vecs)
    return EigenSystem(vals, vecs)


def _evolve_grid(eig: EigenSystem, amp0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Spectral propagation of one amplitude vector to every grid time, (nt, dim)."""
    coeff = eig.eigenvectors.T @ amp0
    phases = np.exp(-1j * np.outer(times, eig.eigenvalues))
    return (phases * coeff) @ eig.eigenvectors.T


def propagate(eig: EigenSystem, psi0: SpinState, t: float) -> SpinState:
    """psi(t) = sum_k exp(-i*lambda_k*t) v_k (v_k . psi0); exact for any t."""
    amp = _evolve_grid(eig, psi0.amplitudes, np.array([float(t)]))[0]
    return SpinState(psi0.sector, amp)


def _series_expectations(states: np.ndarray, m_values: np.ndarray, lad: np.ndarray):
    prob = np.abs(states) ** 2
    sz = prob @ m_values
    splus = np.sum(np.conj(states[:, 1:]) * lad * states[:, :-1], axis=1)
    return sz, splus.real, splus.imag


def run_protocol(
    config: ProtocolConfig, sector: SpinSector, with_states: bool = False
) -> Trajectory:
    """Evolve |N/2,-N/2> through the step protocol and record <S_z>, <S_x>, <S_y>.

    For t <= tau_c the state evolves under the full charging Hamiltonian; for
    t > tau_c under omega_z*S_z alone, which commutes with S_z and therefore
    freezes the stored charge.
    """
    psi0 = ground_state(sector)
    return _run_from(config, sector, psi0.amplitudes, with_states)


def _run_from(
    config: ProtocolConfig, sector: SpinSector, amp0: np.ndarray, with_states: bool
) -> Trajectory:
    times = config.t_grid
    ham = build_hamiltonian(sector, config.omega_z, config.g)
    eig = diagonalize(ham)

    charging = times <= config.tau_c
    states = np.empty((len(times), sector.dim), dtype=complex)
    states[charging] = _evolve_grid(eig, amp0, times[charging])
    if not np.all(charging):
        amp_off = _evolve_grid(eig, amp0, np.array([config.tau_c]))[0]
        dt = times[~charging] - config.tau_c
        free = np.exp(-1j * config.omega_z * np.outer(dt, sector.m_values))
        states[~charging] = free * amp_off

    sz, sx, sy = _series_expectations(states, sector.m_values, ladder_elements(sector))
    return Trajectory(
        n_tls=sector.n_tls,
        times=times,
        sz=sz,
        sx=sx,
        sy=sy,
        states=states if with_states else None,
    )


def run_protocol_parity(
    config: ProtocolConfig,
    parity: ParitySector,
    psi0: SpinState | None = None,
    with_states: bool = False,
) -> Trajectory:
    """Same trajectory as :func:`run_protocol`, computed on one tridiagonal parity block.

    The initial state (default: the collective ground state) must lie entirely
    in the given sector.  S_x and S_y are parity-odd, so their expectations
    vanish identically for any state confined to one block.
    """
    sector = parity.parent
    if psi0 is None:
        psi0 = ground_state(sector)
    full_amp = np.asarray(psi0.amplitudes, dtype=complex)
    outside = np.delete(full_amp, parity.indices)
    if np.any(outside != 0):
        raise ValueError("initial state has support outside the parity sector")

    ham = build_hamiltonian(sector, config.omega_z, config.g)
    block = ham[np.ix_(parity.indices, parity.indices)]
    eig = diagonalize_tridiagonal(np.diag(block).copy(), np.diag(block, 1).copy())

    times = config.t_grid
    amp0 = full_amp[parity.indices]
    m_block = sector.m_values[parity.indices]

    charging = times <= config.tau_c
    states = np.empty((len(times), parity.dim), dtype=complex)
    states[charging] = _evolve_grid(eig, amp0, times[charging])
    if not np.all(charging):
        amp_off = _evolve_grid(eig, amp0, np.array([config.tau_c]))[0]
        dt = times[~charging] - config.tau_c
        states[~charging] = np.exp(-1j * config.omega_z * np.outer(dt, m_block)) * amp_off

    prob = np.abs(states) ** 2
    sz = prob @ m_block
    zeros = np.zeros_like(sz)

    embedded = None
    if with_states:
        embedded = np.zeros((len(times), sector.dim), dtype=complex)
        embedded[:, parity.indices] = states
    return Trajectory(
        n_tls=sector.n_tls, times=times, sz=sz, sx=zeros, sy=zeros.copy(), states=embedded
    )
