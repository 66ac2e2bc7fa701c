"""Quantum phase-space transport: splitting exactness, conservation, the
harmonic-oscillator oracle and the semiclassical limit."""

import numpy as np
import pytest

from qplasma import vlasov, wigner
from qplasma.equilibria import (Perturbation, projected_fd_finite_t,
                                projected_fd_zero_t)
from qplasma.fields import PhaseSpaceGrid, SpatialGrid, moments


def make_grid(n_x=64, n_v=128, v_max=3.0, length=2.0 * np.pi):
    return PhaseSpaceGrid(SpatialGrid(length, n_x), v_max, n_v)


class TestStepBasics:
    def test_requires_positive_h(self):
        grid = make_grid()
        state = wigner.initial_state(grid, projected_fd_zero_t(), 0.0)
        with pytest.raises(ValueError):
            wigner.step(state, 0.05)

    def test_without_field_matches_free_streaming(self):
        grid = make_grid()
        state = wigner.initial_state(grid, projected_fd_finite_t(t_over_tf=0.05),
                                     1.0, Perturbation(0.2, 1.0))
        f_expected = state.f.copy()
        for _ in range(10):
            f_expected = wigner.advect_x(f_expected, grid, 0.05)
        st = state
        for _ in range(10):
            st = wigner.step(st, 0.05, self_consistent=False)
        assert np.max(np.abs(st.f - f_expected)) < 1e-13

    def test_field_kick_leaves_density_untouched(self):
        # The kick acts only on nonzero dual modes, so the velocity
        # integral is pointwise invariant.
        grid = make_grid()
        state = wigner.initial_state(grid, projected_fd_finite_t(t_over_tf=0.05),
                                     1.0, Perturbation(0.2, 1.0))
        from qplasma.fields import poisson_periodic
        n0 = np.sum(state.f, axis=0) * grid.dv
        phi = poisson_periodic(n0, grid.spatial)
        kicked = wigner.potential_kick(state.f, grid, 1.0, 0.5, phi)
        n1 = np.sum(kicked, axis=0) * grid.dv
        assert np.max(np.abs(n1 - n0)) < 1e-13

    def test_mass_conserved_to_spectral_accuracy(self):
        grid = make_grid()
        state = wigner.initial_state(grid, projected_fd_finite_t(t_over_tf=0.01),
                                     1.0, Perturbation(0.1, 1.0))
        m0 = float(np.sum(state.f))
        for _ in range(100):
            state = wigner.step(state, 0.05)
        assert abs(float(np.sum(state.f)) - m0) / m0 < 1e-10

    def test_momentum_of_symmetric_data_stays_zero(self):
        grid = make_grid()
        state = wigner.initial_state(grid, projected_fd_finite_t(t_over_tf=0.01),
                                     1.0, Perturbation(0.1, 1.0))
        for _ in range(100):
            state = wigner.step(state, 0.05)
        _, flux, _ = moments(state.f, grid)
        assert abs(float(np.mean(flux))) < 1e-6

    def test_output_is_real_valued_array(self):
        grid = make_grid()
        state = wigner.initial_state(grid, projected_fd_zero_t(), 0.5,
                                     Perturbation(0.3, 1.0))
        for _ in range(20):
            state = wigner.step(state, 0.05)
        assert state.f.dtype == np.float64
        assert np.all(np.isfinite(state.f))

    def test_negative_values_develop_in_strong_quantum_runs(self):
        grid = make_grid(n_x=64, n_v=128)
        state = wigner.initial_state(grid, projected_fd_finite_t(t_over_tf=0.01),
                                     1.0, Perturbation(0.1, 1.0))
        for _ in range(200):  # t = 10
            state = wigner.step(state, 0.05)
        assert state.f.min() < -1e-3 * state.f.max()

    def test_large_kick_phase_warns(self):
        grid = make_grid(n_v=32)
        state = wigner.initial_state(grid, projected_fd_zero_t(), 0.05)
        steep = lambda y: 50.0 * np.cos(y)
        with pytest.warns(RuntimeWarning, match="aliasing"):
            wigner.step(state, 0.5, external_potential=steep,
                        self_consistent=False)


class TestHarmonicOracle:
    def test_centroid_follows_the_classical_split_trajectory(self):
        # In a harmonic well the force is linear, so the phase-space
        # centroid of the quantum state obeys the classical equations
        # exactly; with a shared splitting the solver centroid must track
        # the classical split-step particle to near round-off.
        length = 4.0 * np.pi
        grid = make_grid(n_x=128, n_v=64, v_max=4.0, length=length)
        x0 = 0.5 * length
        omega0 = 1.0
        well = lambda y: 0.5 * omega0**2 * (y - x0) ** 2
        sx = sv = 0.5
        xx = grid.spatial.x[None, :]
        vv = grid.v[:, None]
        f = np.exp(-0.5 * ((xx - x0 - 1.0) / sx) ** 2
                   - 0.5 * (vv / sv) ** 2)
        state = wigner.from_phase_space_field(f, grid, 0.5)

        dt, n_steps = 0.01, 200
        xc, vc = x0 + 1.0, 0.0
        for _ in range(n_steps):
            state = wigner.step(state, dt, external_potential=well,
                                self_consistent=False)
            # identical Strang splitting for the classical particle
            xc += 0.5 * dt * vc
            vc -= dt * omega0**2 * (xc - x0)
            xc += 0.5 * dt * vc
        n, flux, _ = moments(state.f, grid)
        mass = float(np.sum(n)) * grid.spatial.dx
        x_mean = float(np.sum(n * grid.spatial.x)) * grid.spatial.dx / mass
        v_mean = float(np.sum(flux)) * grid.spatial.dx / mass
        assert x_mean == pytest.approx(xc, abs=1e-8)
        assert v_mean == pytest.approx(vc, abs=1e-8)

    def test_centroid_frequency_is_the_well_frequency(self):
        # Quarter-period check: the centroid crosses the well center with
        # the classical period 2 pi / omega0 up to O(dt^2).
        length = 4.0 * np.pi
        grid = make_grid(n_x=128, n_v=64, v_max=4.0, length=length)
        x0 = 0.5 * length
        well = lambda y: 0.5 * (y - x0) ** 2
        xx = grid.spatial.x[None, :]
        vv = grid.v[:, None]
        f = np.exp(-0.5 * ((xx - x0 - 1.0) / 0.5) ** 2
                   - 0.5 * (vv / 0.5) ** 2)
        state = wigner.from_phase_space_field(f, grid, 0.5)
        dt = 0.01
        n_quarter = int(round(0.5 * np.pi / dt))
        for _ in range(n_quarter):
            state = wigner.step(state, dt, external_potential=well,
                                self_consistent=False)
        n, _, _ = moments(state.f, grid)
        mass = float(np.sum(n)) * grid.spatial.dx
        x_mean = float(np.sum(n * grid.spatial.x)) * grid.spatial.dx / mass
        assert x_mean == pytest.approx(x0, abs=1e-3)


@pytest.fixture(scope="module")
def deviations():
    grid = make_grid(n_x=64, n_v=128)
    eq = projected_fd_finite_t(t_over_tf=0.05)
    return wigner.semiclassical_limit_check(
        grid, eq, Perturbation(0.05, 1.0), [0.5, 0.25, 0.125],
        t_end=5.0, dt=0.02)


class TestSemiclassicalLimit:
    def test_deviation_monotone_in_h(self, deviations):
        devs = [d for _, d in deviations]
        assert devs[0] > devs[1] > devs[2] > 0

    def test_quadratic_convergence_rate(self, deviations):
        hs = np.array([h for h, _ in deviations])
        devs = np.array([d for _, d in deviations])
        slope = np.polyfit(np.log(hs), np.log(devs), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.4)

    def test_deviation_grows_with_time_at_fixed_h(self):
        grid = make_grid(n_x=64, n_v=128)
        eq = projected_fd_finite_t(t_over_tf=0.05)
        short = wigner.semiclassical_limit_check(
            grid, eq, Perturbation(0.05, 1.0), [0.25], t_end=2.0, dt=0.02)
        long = wigner.semiclassical_limit_check(
            grid, eq, Perturbation(0.05, 1.0), [0.25], t_end=5.0, dt=0.02)
        assert 0 < short[0][1] < long[0][1]

    def test_zero_horizon_has_zero_deviation(self):
        grid = make_grid(n_x=32, n_v=64)
        eq = projected_fd_zero_t()
        table = wigner.semiclassical_limit_check(
            grid, eq, Perturbation(0.05, 1.0), [0.5], t_end=0.0, dt=0.02)
        assert table[0][1] == 0.0
