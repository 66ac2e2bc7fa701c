"""Dielectric functions of the four model families and complex-frequency
root finding with the Landau contour prescription.

Normalized units throughout: omega in omega_p, k in 1/lambda_F, velocities
in v_F, equilibrium densities in n0.  In these units the pole shift of the
quantum kinetic dielectric is hbar k / 2m -> H K / 4 and the recoil term
hbar^2 k^4 / 4 m^2 -> H^2 K^4 / 16.

The Landau rule: the velocity integrals are evaluated on the real axis for
Im(omega) > 0 and analytically continued downwards by adding the pole
residue (full residue below the axis, half on it).  For equilibria given
in closed form the continuation of f0 to complex v is exact; the result is
trusted only for |Im omega| <= 0.5 |Re omega| and flagged otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .equilibria import WATERBAG, Equilibrium1D, StreamSpec

VLASOV_KINETIC = "vlasov"
WIGNER_KINETIC = "wigner"
MULTISTREAM = "multistream"
QUANTUM_FLUID = "fluid"

_IM_TINY = 1e-7  # |Im v0| below which the principal-value branch is used


@dataclass(frozen=True)
class DielectricModel:
    """A tagged choice of dielectric function epsilon(K, omega).

    kind: vlasov | wigner | multistream | fluid.
    Kinetic kinds carry an Equilibrium1D, the multistream kind a StreamSpec,
    the fluid kind a polytropic exponent gamma and squared reference sound
    speed v0_sq = P0 / (n0 m v_F^2).
    """

    kind: str
    equilibrium: Optional[Equilibrium1D] = None
    streams: Optional[StreamSpec] = None
    H: float = 0.0
    gamma: float = 3.0
    v0_sq: float = 1.0 / 3.0

    def __post_init__(self):
        if self.H < 0:
            raise ValueError("H must be nonnegative")
        if self.kind in (VLASOV_KINETIC, WIGNER_KINETIC) and self.equilibrium is None:
            raise ValueError(f"{self.kind} model requires an equilibrium")
        if self.kind == MULTISTREAM and self.streams is None:
            raise ValueError("multistream model requires a StreamSpec")

    def eps(self, k: float, omega: complex) -> complex:
        if self.kind == VLASOV_KINETIC:
            return eps_vlasov(k, omega, self.equilibrium)
        if self.kind == WIGNER_KINETIC:
            if self.H == 0.0:
                return eps_vlasov(k, omega, self.equilibrium)
            return eps_wigner(k, omega, self.equilibrium, self.H)
        if self.kind == MULTISTREAM:
            return eps_multistream(k, omega, self.streams, self.H)
        if self.kind == QUANTUM_FLUID:
            return eps_fluid(k, omega, self.gamma, self.v0_sq, self.H)
        raise ValueError(f"unknown dielectric kind {self.kind!r}")


@dataclass(frozen=True)
class DispersionRoot:
    k: float
    omega: complex
    residual: float
    iterations: int
    ordering_ok: bool = True
    continuation_trusted: bool = True


def _pole_integral(g, w: complex, k: float, v_lo: float, v_hi: float) -> complex:
    """Landau-continued integral of g(v) / (w - k v) over [v_lo, v_hi].

    g must be callable on complex arguments (analytic continuation of the
    real-axis profile).  The pole sits at v0 = w / k.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    v0 = w / k
    v0r, v0i = float(np.real(v0)), float(np.imag(v0))
    inside = v_lo < v0r < v_hi

    def quad_cc(func, a, b, **kw):
        re, _ = quad(lambda v: float(np.real(func(v))), a, b,
                     limit=200, epsabs=1e-13, epsrel=1e-11, **kw)
        im, _ = quad(lambda v: float(np.imag(func(v))), a, b,
                     limit=200, epsabs=1e-13, epsrel=1e-11, **kw)
        return re + 1j * im

    if abs(v0i) <= _IM_TINY and inside:
        # Principal value plus the half/full-residue limit: the two one-sided
        # limits of the continued integral coincide with PV - (i pi / k) g(v0).
        pv = quad_cc(lambda v: g(v), v_lo, v_hi, weight="cauchy", wvar=v0r)
        return -pv / k - 1j * math.pi / k * complex(g(complex(v0r, v0i)))

    integrand = lambda v: g(v) / (w - k * v)
    if inside:
        val = quad_cc(integrand, v_lo, v0r) + quad_cc(integrand, v0r, v_hi)
    else:
        val = quad_cc(integrand, v_lo, v_hi)
    if v0i < 0.0:
        val -= 2j * math.pi / k * complex(g(v0))
    return val


def eps_vlasov(k: float, omega: complex, eq: Equilibrium1D) -> complex:
    """Semiclassical kinetic dielectric, 1 + (1/K) int f0'(v) / (omega - K v) dv."""
    if k <= 0:
        raise ValueError("k must be positive")
    if eq.kind == WATERBAG:
        # Distributional derivative evaluates in closed form.
        return 1.0 - 1.0 / (omega**2 - (k * eq.v_f) ** 2)
    edge = eq.support
    return 1.0 + _pole_integral(eq.df0, omega, k, -edge, edge) / k


def _waterbag_wigner(k: float, omega: complex, v_f: float, H: float) -> complex:
    a = H * k**2 / 4.0
    kv = k * v_f
    return 1.0 - (np.log((omega + kv - a) / (omega - kv - a))
                  - np.log((omega + kv + a) / (omega - kv + a))) / (4.0 * a * k * v_f)


def eps_wigner(k: float, omega: complex, eq: Equilibrium1D, H: float,
               form: str = "pole") -> complex:
    """Quantum kinetic dielectric with recoil-shifted poles.

    form="pole": 1 - int f0 / [(omega - K v)^2 - (H K^2 / 4)^2] dv, split
    in partial fractions so the Landau rule applies per shifted frequency.
    form="shifted": the equivalent finite-difference-in-v form,
    1 + (2 / H K^2) int [f0(v + HK/4) - f0(v - HK/4)] / (omega - K v) dv.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if H == 0.0:
        return eps_vlasov(k, omega, eq)
    a = H * k**2 / 4.0
    if eq.kind == WATERBAG and form == "pole":
        return _waterbag_wigner(k, omega, eq.v_f, H)
    edge = eq.support
    s = H * k / 4.0
    if form == "shifted":
        g = lambda v: eq.f0(v + s) - eq.f0(v - s)
        return 1.0 + 2.0 / (H * k**2) * _pole_integral(g, omega, k,
                                                       -edge - s, edge + s)
    if form != "pole":
        raise ValueError(f"unknown form {form!r}")
    i_minus = _pole_integral(eq.f0, omega - a, k, -edge, edge)
    i_plus = _pole_integral(eq.f0, omega + a, k, -edge, edge)
    return 1.0 - (i_minus - i_plus) / (2.0 * a)


def eps_multistream(k: float, omega: complex, spec: StreamSpec,
                    H: float) -> complex:
    """Cold-stream mixture dielectric,
    1 - sum_a p_a / [(omega - K u_a)^2 - H^2 K^4 / 16]."""
    if k <= 0:
        raise ValueError("k must be positive")
    p = np.asarray(spec.probabilities)
    u = np.asarray(spec.velocities)
    denom = (omega - k * u) ** 2 - (H * k**2 / 4.0) ** 2
    if np.any(denom == 0.0):
        raise ZeroDivisionError("evaluation point sits on a stream pole")
    return complex(1.0 - np.sum(p / denom))


def eps_wigner_delta(k: float, omega: complex, spec: StreamSpec,
                     H: float) -> complex:
    """Kinetic dielectric evaluated for a delta-comb equilibrium via the
    shifted-pole difference form; analytically identical to eps_multistream
    but assembled from the two displaced poles separately."""
    if k <= 0 or H <= 0:
        raise ValueError("k and H must be positive")
    s = H * k / 4.0
    p = np.asarray(spec.probabilities)
    u = np.asarray(spec.velocities)
    terms = 1.0 / (omega - k * (u - s)) - 1.0 / (omega - k * (u + s))
    return complex(1.0 + 2.0 / (H * k**2) * np.sum(p * terms))


def eps_fluid(k: float, omega: complex, gamma: float = 3.0,
              v0_sq: float = 1.0 / 3.0, H: float = 0.0) -> complex:
    """Polytropic fluid dielectric,
    1 - 1 / (omega^2 - gamma K^2 v0^2 - H^2 K^4 / 16)."""
    if k <= 0:
        raise ValueError("k must be positive")
    return 1.0 - 1.0 / (omega**2 - gamma * k**2 * v0_sq - (H * k**2 / 4.0) ** 2)


def fluid_omega_sq(k: float, gamma: float = 3.0, v0_sq: float = 1.0 / 3.0,
                   H: float = 0.0) -> float:
    """Closed-form root of the fluid dielectric:
    omega^2 = 1 + gamma K^2 v0^2 + H^2 K^4 / 16."""
    return 1.0 + gamma * k**2 * v0_sq + (H * k**2 / 4.0) ** 2


def _ordering_ok(model: DielectricModel, k: float, omega: complex) -> bool:
    """Long-wavelength ordering hbar k / m << v_F << omega / k, with unit
    margins; outside it the small-k expansions are not asserted."""
    v_f = model.equilibrium.v_f if model.equilibrium is not None else 1.0
    return (model.H / 2.0) * k < v_f < abs(omega) / k


def solve_root(model: DielectricModel, k: float,
               guess: Optional[complex] = None, tol: float = 1e-10,
               max_iter: int = 100) -> DispersionRoot:
    """Newton iteration on epsilon(K, omega) = 0 with a numerically
    differenced complex derivative.

    Starts from the Bohm-Gross-like guess omega^2 = 1 + K^2 unless a guess
    is supplied.  Converges when |epsilon| < tol, or when the Newton step
    stagnates below tol * |omega| while |epsilon| is already within a few
    quadrature noise floors of zero (adaptive integration limits the
    attainable residual for finite-temperature backgrounds).
    """
    if guess is None:
        omega = complex(math.sqrt(1.0 + k**2))
    else:
        omega = complex(guess)
    if omega.real <= 0:
        raise ValueError("initial guess must have positive real part")

    residual = float("inf")
    for iteration in range(1, max_iter + 1):
        val = model.eps(k, omega)
        residual = abs(val)
        if residual < tol:
            break
        h = 1e-7 * max(abs(omega), 1e-3)
        dval = (model.eps(k, omega + h) - model.eps(k, omega - h)) / (2.0 * h)
        if dval == 0.0:
            raise ArithmeticError(f"flat dielectric at omega={omega}")
        step = val / dval
        # damp absurd steps far from the linear regime
        if abs(step) > 0.5 * abs(omega):
            step *= 0.5 * abs(omega) / abs(step)
        omega = omega - step
        if abs(step) < tol * abs(omega) and residual < 1e3 * tol:
            residual = abs(model.eps(k, omega))
            break
    else:
        raise ArithmeticError(
            f"root iteration did not converge at K={k}: residual={residual:.3e}")

    return DispersionRoot(
        k=k, omega=omega, residual=residual, iterations=iteration,
        ordering_ok=_ordering_ok(model, k, omega),
        continuation_trusted=abs(omega.imag) <= 0.5 * abs(omega.real),
    )


def smallk_coefficients(model: DielectricModel, k_min: float = 0.02,
                        k_max: float = 0.2, n_k: int = 25,
                        fit_tol: float = 1e-6):
    """Fit omega^2(K) = c0 + c2 K^2 + c4 K^4 over a log-spaced K grid.

    A K^6 nuisance term is carried in the basis so that the next order of
    the expansion does not bias c4; only (c0, c2, c4) are returned, plus
    the rms misfit of omega^2.  Raises if the fit residual exceeds fit_tol
    (expansion not valid on the requested range).
    """
    ks = np.geomspace(k_min, k_max, n_k)
    omega_sq = np.empty_like(ks)
    guess = None
    for i, k in enumerate(ks):
        root = solve_root(model, k, guess=guess)
        omega_sq[i] = root.omega.real**2
        guess = root.omega
    basis = np.vstack([np.ones_like(ks), ks**2, ks**4, ks**6]).T
    coeffs, *_ = np.linalg.lstsq(basis, omega_sq, rcond=None)
    resid = float(np.sqrt(np.mean((basis @ coeffs - omega_sq) ** 2)))
    if resid > fit_tol:
        raise ArithmeticError(
            f"small-K fit residual {resid:.3e} exceeds {fit_tol:.1e}")
    return float(coeffs[0]), float(coeffs[1]), float(coeffs[2]), resid


def k_scan(model: DielectricModel, k_values, guess: Optional[complex] = None):
    """Roots along a K scan, warm-starting each solve from the previous root.

    The warm start is shifted by the Bohm-Gross increment between
    consecutive K values so it tracks the plasmon branch instead of
    falling into the continuum when K grows quickly.
    """
    roots = []
    k_prev = None
    for k in k_values:
        if roots:
            shift = math.sqrt(1.0 + k**2) - math.sqrt(1.0 + k_prev**2)
            guess = roots[-1].omega + shift
        root = solve_root(model, k, guess=guess)
        roots.append(root)
        k_prev = k
    return roots
