"""Periodic grids, the spectral Poisson solve and velocity moments.

All solver-facing quantities are in normalized units: x in Fermi screening
lengths, v in Fermi velocities, t in inverse plasma frequencies, potential
in m v_F^2 / e.  In these units Poisson's equation for the electron gas on
a neutralizing background reads  phi'' = n - 1  and the acceleration in the
kinetic equations is +phi'.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid of length `length` with `n_x` points."""

    length: float
    n_x: int

    def __post_init__(self):
        if self.n_x < 8:
            raise ValueError("n_x must be at least 8")
        if self.length <= 0:
            raise ValueError("length must be positive")

    @property
    def dx(self) -> float:
        return self.length / self.n_x

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n_x) * self.dx

    @property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers matching numpy's FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_x, d=self.dx)


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Tensor grid: periodic in x, uniform and truncated in v.

    Velocity nodes are v_j = -v_max + j dv (n_v even), the FFT-dual layout
    required by the Wigner transform: the node at +v_max is omitted and the
    grid contains v = 0 exactly.  Quadrature over v is the rectangle rule
    with weight dv, spectrally consistent with the dual lambda grid.
    """

    spatial: SpatialGrid
    v_max: float
    n_v: int

    def __post_init__(self):
        if self.n_v % 2 != 0 or self.n_v < 8:
            raise ValueError("n_v must be even and at least 8")
        if self.v_max <= 0:
            raise ValueError("v_max must be positive")

    @property
    def dv(self) -> float:
        return 2.0 * self.v_max / self.n_v

    @property
    def v(self) -> np.ndarray:
        return -self.v_max + np.arange(self.n_v) * self.dv


def spectral_derivative(values: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """d/dx of a periodic field, exact for band-limited data."""
    return np.fft.irfft(
        1j * 2.0 * np.pi * np.fft.rfftfreq(grid.n_x, d=grid.dx) * np.fft.rfft(values),
        n=grid.n_x,
    )


def poisson_periodic(density: np.ndarray, grid: SpatialGrid,
                     n0: float = 1.0, tol: float = 1e-10) -> np.ndarray:
    """Solve phi'' = density - n0 on the periodic box; returns zero-mean phi.

    The box must be quasineutral: mean(density) == n0 to `tol`.
    """
    excess = float(np.mean(density)) - n0
    if abs(excess) > tol:
        raise ValueError(
            f"non-neutral box: mean density deviates from n0 by {excess:.3e}"
        )
    rho_hat = np.fft.rfft(density - n0)
    k = 2.0 * np.pi * np.fft.rfftfreq(grid.n_x, d=grid.dx)
    phi_hat = np.zeros_like(rho_hat)
    phi_hat[1:] = -rho_hat[1:] / k[1:] ** 2
    return np.fft.irfft(phi_hat, n=grid.n_x)


def moments(f: np.ndarray, grid: PhaseSpaceGrid):
    """Density, flux and pressure profiles of f(x, v) by midpoint quadrature.

    f is indexed [i_v, i_x].  The pressure is the centered second moment,
    n * (<v^2> - <v>^2) (unit mass).  Density positivity is not assumed:
    Wigner fields may integrate to locally negative pressure contributions.
    """
    v = grid.v[:, None]
    dv = grid.dv
    n = np.sum(f, axis=0) * dv
    flux = np.sum(f * v, axis=0) * dv
    m2 = np.sum(f * v**2, axis=0) * dv
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(n != 0.0, flux / np.where(n != 0.0, n, 1.0), 0.0)
    pressure = m2 - n * u**2
    return n, flux, pressure
