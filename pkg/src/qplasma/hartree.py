"""Self-consistent mean-field evolution of a mixture of N wavefunctions
coupled through the shared periodic Poisson equation, plus the per-stream
amplitude/phase (density and velocity) decomposition.

Each stream obeys  i hbar_eff psi_t = -(hbar_eff^2/2) psi_xx - phi psi
with hbar_eff = H/2, integrated by unitary split-step Fourier: half
kinetic, one shared field solve from the mixture density, full potential
kick, half kinetic.  Streams advance independently except for the field
solve (fork-join per step).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibria import Perturbation, StreamSet, hbar_eff
from .fields import SpatialGrid, poisson_periodic, spectral_derivative


@dataclass
class MadelungFields:
    """Per-stream density and flow velocity with a vacuum mask.

    u is meaningless where |psi|^2 is negligible; those cells are flagged
    in `mask` (True = unreliable) and u is set to 0 there.
    """

    n: np.ndarray      # (N, n_x)
    u: np.ndarray      # (N, n_x)
    mask: np.ndarray   # (N, n_x) bool


def perturb_streams(streams: StreamSet, pert: Perturbation) -> StreamSet:
    """Scale every stream by sqrt(1 + alpha cos kx) so the mixture density
    is (1 + alpha cos kx) times the unperturbed one."""
    L = streams.grid.length
    mode = pert.k * L / (2.0 * np.pi)
    if abs(mode - round(mode)) > 1e-9:
        raise ValueError(f"k={pert.k} is not commensurate with the box L={L}")
    envelope = np.sqrt(1.0 + pert.alpha * np.cos(pert.k * streams.grid.x))
    return StreamSet(streams.grid, streams.psi * envelope[None, :],
                     streams.probabilities, streams.H)


def _kinetic_phase(grid: SpatialGrid, H: float, dt: float) -> np.ndarray:
    k = grid.wavenumbers
    return np.exp(-0.5j * hbar_eff(H) * k**2 * dt)


def step(streams: StreamSet, dt: float) -> StreamSet:
    """One Strang-split step; unitary per stream."""
    half = _kinetic_phase(streams.grid, streams.H, 0.5 * dt)
    psi = np.fft.ifft(np.fft.fft(streams.psi, axis=1) * half[None, :], axis=1)
    n = np.einsum("a,ax->x", streams.probabilities, np.abs(psi) ** 2)
    phi = poisson_periodic(n, streams.grid)
    psi = psi * np.exp(1j * (dt / hbar_eff(streams.H)) * phi)[None, :]
    psi = np.fft.ifft(np.fft.fft(psi, axis=1) * half[None, :], axis=1)
    if not np.all(np.isfinite(psi.view(float))):
        raise FloatingPointError("non-finite wavefunction values")
    return StreamSet(streams.grid, psi, streams.probabilities, streams.H)


def diagnostics(streams: StreamSet):
    """Box-averaged (field energy, kinetic energy, mass, momentum).

    Kinetic energy is the occupation-weighted (hbar_eff^2/2)|psi_x|^2
    average; momentum the weighted hbar_eff Im(psi* psi_x) average.
    """
    grid = streams.grid
    hb = hbar_eff(streams.H)
    n = streams.density()
    phi = poisson_periodic(n, grid)
    efield = spectral_derivative(phi, grid)
    field_energy = 0.5 * float(np.mean(efield**2))
    k = grid.wavenumbers
    dpsi = np.fft.ifft(1j * k[None, :] * np.fft.fft(streams.psi, axis=1),
                       axis=1)
    kin_per = 0.5 * hb**2 * np.mean(np.abs(dpsi) ** 2, axis=1)
    mom_per = hb * np.mean(np.imag(np.conj(streams.psi) * dpsi), axis=1)
    kinetic = float(np.dot(streams.probabilities, kin_per))
    momentum = float(np.dot(streams.probabilities, mom_per))
    return field_energy, kinetic, float(np.mean(n)), momentum


def stream_norms(streams: StreamSet) -> np.ndarray:
    """Box-averaged |psi_a|^2 per stream (conserved, 1 for unit streams)."""
    return np.mean(np.abs(streams.psi) ** 2, axis=1)


def madelung_decompose(streams: StreamSet,
                       vacuum_fraction: float = 1e-8) -> MadelungFields:
    """Density n_a = |psi_a|^2 and velocity u_a from the local phase
    increment hbar_eff * arg(psi(x+dx) conj(psi(x-dx))) / (2 dx), which
    needs no global phase unwrapping."""
    psi = streams.psi
    hb = hbar_eff(streams.H)
    dx = streams.grid.dx
    n = np.abs(psi) ** 2
    fwd = np.roll(psi, -1, axis=1)
    bwd = np.roll(psi, 1, axis=1)
    u = hb * np.angle(fwd * np.conj(bwd)) / (2.0 * dx)
    mask = n < vacuum_fraction * n.max(axis=1, keepdims=True)
    u = np.where(mask, 0.0, u)
    return MadelungFields(n=n, u=u, mask=mask)
