"""Collective pseudo-spin basis, operators and canonical states for N two-level systems.

Everything lives in the maximal-spin sector s = N/2, so the Hilbert space is
(N+1)-dimensional and operators are small dense real symmetric matrices.
Basis ordering is ascending m throughout; half-integer quantum numbers are
carried as integers 2m to keep quantum-number arithmetic exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpinSector",
    "ParitySector",
    "SpinState",
    "build_sector",
    "op_sz",
    "op_sx",
    "op_sx2",
    "ladder_elements",
    "parity_split",
    "ground_state",
    "max_state",
    "expectation_sz",
    "expectation_sx",
    "expectation_sy",
]

NORM_TOL = 1e-12


@dataclass(frozen=True)
class SpinSector:
    """Maximal collective-spin sector for ``n_tls`` two-level systems."""

    n_tls: int

    def __post_init__(self):
        if self.n_tls < 1:
            raise ValueError(f"need at least one TLS, got n_tls={self.n_tls}")

    @property
    def dim(self) -> int:
        return self.n_tls + 1

    @property
    def s(self) -> float:
        return self.n_tls / 2.0

    @property
    def two_m(self) -> np.ndarray:
        """Integers 2m in ascending order, from -n_tls to +n_tls in steps of 2."""
        return np.arange(-self.n_tls, self.n_tls + 1, 2)

    @property
    def m_values(self) -> np.ndarray:
        return self.two_m / 2.0


@dataclass(frozen=True)
class ParitySector:
    """Indices of one spin-parity class of a parent sector.

    Members share the parity of (m - m_min); consecutive members differ by 2
    in m, so m-conserving-mod-2 operators restricted here are tridiagonal.
    """

    parent: SpinSector
    indices: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.indices)


@dataclass
class SpinState:
    """Normalized complex amplitude vector over a sector's ascending-m basis."""

    sector: SpinSector
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.sector.dim,):
            raise ValueError(
                f"amplitude vector has shape {self.amplitudes.shape}, "
                f"sector dimension is {self.sector.dim}"
            )
        nrm = np.linalg.norm(self.amplitudes)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {nrm!r} deviates from 1 beyond {NORM_TOL}")


def build_sector(n_tls: int) -> SpinSector:
    """Sector with dimension n_tls + 1 and m running from -n_tls/2 to +n_tls/2."""
    return SpinSector(int(n_tls))


def ladder_elements(sector: SpinSector) -> np.ndarray:
    """Raising-operator matrix elements <m+1|S+|m> for ascending m (length dim-1).

    s(s+1) - m(m+1) is evaluated from integer 2m arithmetic:
    4*(s(s+1) - m(m+1)) = n(n+2) - 2m(2m+2).
    """
    n = sector.n_tls
    tm = sector.two_m[:-1].astype(np.int64)
    num = n * (n + 2) - tm * (tm + 2)
    return np.sqrt(num.astype(float)) / 2.0


def op_sz(sector: SpinSector) -> np.ndarray:
    """Diagonal matrix of m values."""
    return np.diag(sector.m_values)


def op_sx(sector: SpinSector) -> np.ndarray:
    """S_x = (S+ + S-)/2: symmetric, nonzero only on the first off-diagonals."""
    half = ladder_elements(sector) / 2.0
    return np.diag(half, 1) + np.diag(half, -1)


def op_sx2(sector: SpinSector) -> np.ndarray:
    """S_x^2 built directly from ladder algebra: pentadiagonal, couples m to m+-2.

    Diagonal entry at m is (s(s+1) - m^2)/2; the m <-> m+2 entry is the product
    of the two intervening ladder amplitudes divided by 4.
    """
    n = sector.n_tls
    tm = sector.two_m.astype(np.int64)
    # 4*(s(s+1) - m^2) = n(n+2) - (2m)^2
    diag = (n * (n + 2) - tm * tm).astype(float) / 8.0
    lad = ladder_elements(sector)
    off2 = lad[:-1] * lad[1:] / 4.0
    return np.diag(diag) + np.diag(off2, 2) + np.diag(off2, -2)


def parity_split(sector: SpinSector) -> tuple[ParitySector, ParitySector]:
    """Split the basis by parity of (m - m_min).

    The first sector contains the ground state m = -N/2.
    """
    k = np.arange(sector.dim)
    even = ParitySector(sector, k[k % 2 == 0])
    odd = ParitySector(sector, k[k % 2 == 1])
    return even, odd


def ground_state(sector: SpinSector) -> SpinState:
    """All amplitude on m = -N/2 (ground state of the battery Hamiltonian)."""
    amp = np.zeros(sector.dim, dtype=complex)
    amp[0] = 1.0
    return SpinState(sector, amp)


def max_state(sector: SpinSector) -> SpinState:
    """All amplitude on m = +N/2 (maximally charged state)."""
    amp = np.zeros(sector.dim, dtype=complex)
    amp[-1] = 1.0
    return SpinState(sector, amp)


def expectation_sz(state: SpinState) -> float:
    return float(np.real(np.vdot(state.amplitudes, state.sector.m_values * state.amplitudes)))


def _expectation_splus(state: SpinState) -> complex:
    # <S+> = sum_m conj(psi_{m+1}) L_m psi_m
    psi = state.amplitudes
    lad = ladder_elements(state.sector)
    return complex(np.sum(np.conj(psi[1:]) * lad * psi[:-1]))


def expectation_sx(state: SpinState) -> float:
    """<S_x> = Re<S+>."""
    return _expectation_splus(state).real


def expectation_sy(state: SpinState) -> float:
    """<S_y> = (<S+> - <S->)/(2i) = Im<S+>, real by construction."""
    return _expectation_splus(state).imag
