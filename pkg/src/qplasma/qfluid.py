"""Reduced quantum fluid model integrated in its effective-wavefunction
form: a nonlinear Schrodinger equation whose nonlinearity is the enthalpy
of a polytropic equation of state.

    i hbar_eff Psi_t = -(hbar_eff^2/2) Psi_xx + [-phi + W_eff(|Psi|^2)] Psi

with hbar_eff = H/2.  The default closure is the 1D degenerate one,
P = n^3/3 in units of n0 m v_F^2, for which W_eff(n) = (n^2 - 1)/2; the
constant is a gauge choice making the kick vanish at equilibrium density.
Integrating the wavefunction form keeps n = |Psi|^2 nonnegative and the
mass exactly conserved, unlike a direct discretization of the density and
velocity equations; the Madelung fields are kept as diagnostics only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .equilibria import Perturbation, hbar_eff
from .fields import SpatialGrid, poisson_periodic, spectral_derivative


@dataclass
class FluidState:
    """Effective wavefunction with a polytropic closure (gamma, p0)."""

    psi: np.ndarray
    grid: SpatialGrid
    H: float
    gamma: float = 3.0
    p0: float = 1.0 / 3.0
    time: float = 0.0

    def copy(self) -> "FluidState":
        return FluidState(self.psi.copy(), self.grid, self.H, self.gamma,
                          self.p0, self.time)

    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2


def initial_state(grid: SpatialGrid, H: float,
                  perturbation: Perturbation | None = None,
                  gamma: float = 3.0, p0: float = 1.0 / 3.0) -> FluidState:
    """Uniform unit-density state, optionally with a cosine density
    perturbation carried by the amplitude (zero initial velocity)."""
    if H <= 0:
        raise ValueError("the effective wavefunction form requires H > 0")
    n = np.ones(grid.n_x)
    if perturbation is not None:
        mode = perturbation.k * grid.length / (2.0 * np.pi)
        if abs(mode - round(mode)) > 1e-9:
            raise ValueError(
                f"k={perturbation.k} is not commensurate with the box")
        n = n + perturbation.alpha * np.cos(perturbation.k * grid.x)
    return FluidState(np.sqrt(n).astype(complex), grid, H, gamma, p0)


def enthalpy(n: np.ndarray, gamma: float, p0: float) -> np.ndarray:
    """W_eff(n) = gamma p0 (n^(gamma-1) - 1)/(gamma - 1), zero at n = 1."""
    if gamma == 1.0:
        return p0 * np.log(n)
    return gamma * p0 * (n ** (gamma - 1.0) - 1.0) / (gamma - 1.0)


def internal_energy(n: np.ndarray, gamma: float, p0: float) -> np.ndarray:
    """Antiderivative of the enthalpy from n = 1 (per unit length)."""
    if gamma == 1.0:
        return p0 * (n * np.log(n) - n + 1.0)
    return (gamma * p0 / (gamma - 1.0)) * ((n**gamma - 1.0) / gamma - (n - 1.0))


def check_splitstep_resonance(grid: SpatialGrid, H: float, dt: float) -> float:
    """Largest kinetic phase advance per step, in units of pi.

    When hbar_eff k_max^2 dt / 2 reaches pi the split-step scheme has a
    parametric resonance that pumps energy into the matching grid modes
    (visible as growth at k with hbar_eff k^2 dt/2 = m pi).  Keep the
    returned value below 1.
    """
    k_max = np.pi / grid.dx
    return float(0.5 * hbar_eff(H) * k_max**2 * dt / np.pi)


def step(state: FluidState, dt: float) -> FluidState:
    """Unitary split-step: half kinetic, field solve, kick, half kinetic."""
    grid = state.grid
    hb = hbar_eff(state.H)
    if check_splitstep_resonance(grid, state.H, dt) >= 1.0:
        warnings.warn(
            "kinetic phase per step exceeds pi at the grid cutoff; "
            "split-step resonance can pump grid modes, reduce dt",
            RuntimeWarning)
    half = np.exp(-0.5j * hb * grid.wavenumbers**2 * (0.5 * dt))
    psi = np.fft.ifft(np.fft.fft(state.psi) * half)
    n = np.abs(psi) ** 2
    phi = poisson_periodic(n, grid)
    potential = -phi + enthalpy(n, state.gamma, state.p0)
    psi = psi * np.exp(-1j * (dt / hb) * potential)
    psi = np.fft.ifft(np.fft.fft(psi) * half)
    if not np.all(np.isfinite(psi.view(float))):
        raise FloatingPointError(
            f"non-finite wavefunction at t={state.time + dt:.3f}")
    return FluidState(psi, grid, state.H, state.gamma, state.p0,
                      state.time + dt)


def diagnostics(state: FluidState):
    """Box-averaged (field energy, transport energy, mass, momentum).

    The transport energy is (hbar_eff^2/2)|Psi_x|^2 plus the internal
    energy of the closure, so that field + transport is the conserved
    functional of the model.
    """
    grid = state.grid
    hb = hbar_eff(state.H)
    n = state.density()
    phi = poisson_periodic(n, grid)
    efield = spectral_derivative(phi, grid)
    field_energy = 0.5 * float(np.mean(efield**2))
    dpsi = np.fft.ifft(1j * grid.wavenumbers * np.fft.fft(state.psi))
    kinetic = 0.5 * hb**2 * float(np.mean(np.abs(dpsi) ** 2))
    internal = float(np.mean(internal_energy(n, state.gamma, state.p0)))
    momentum = hb * float(np.mean(np.imag(np.conj(state.psi) * dpsi)))
    return field_energy, kinetic + internal, float(np.mean(n)), momentum


def madelung_fields(state: FluidState, vacuum_fraction: float = 1e-8):
    """Density and flow velocity (n, u) with a vacuum mask.

    u comes from the local phase increment over two cells, needing no
    global unwrapping; cells with negligible density are flagged True in
    the mask and their u zeroed.
    """
    psi = state.psi
    hb = hbar_eff(state.H)
    n = np.abs(psi) ** 2
    u = hb * np.angle(np.roll(psi, -1) * np.conj(np.roll(psi, 1))) / (
        2.0 * state.grid.dx)
    mask = n < vacuum_fraction * n.max()
    u = np.where(mask, 0.0, u)
    return n, u, mask
