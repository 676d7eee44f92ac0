import math

import numpy as np
import pytest

from cforbits.errors import CollisionError
from cforbits.flow import (
    integrate,
    integrate_with_variational,
    invariant_drift,
    monodromy,
    symplectic_matrix,
)
from cforbits.model import (
    HamiltonianSystem,
    KineticLaw,
    Perturbation,
    Potential,
)


def harmonic_system(dim=2):
    # V = -r^2/2, H = p^2/2 + r^2/2: every orbit has period 2 pi
    return HamiltonianSystem(KineticLaw.classical(), Potential.harmonic(),
                             Perturbation.zero(), dim)


def kepler_system(dim=2):
    return HamiltonianSystem(KineticLaw.classical(), Potential.kepler(),
                             Perturbation.zero(), dim)


class TestSymplecticMatrix:
    def test_structure(self):
        J = symplectic_matrix(2)
        assert np.allclose(J @ J, -np.eye(4))
        assert np.allclose(J.T, -J)


class TestIntegrate:
    def test_harmonic_closed_form(self):
        sys = harmonic_system()
        z0 = np.array([1.0, 0.0, 0.0, 1.0])
        traj = integrate(sys, z0, 0.0, 2 * math.pi)
        for t in np.linspace(0.0, 2 * math.pi, 17):
            z = traj(t)
            assert np.allclose(z, [math.cos(t), math.sin(t),
                                   -math.sin(t), math.cos(t)], atol=1e-10)

    def test_vectorized_evaluation(self):
        sys = harmonic_system()
        traj = integrate(sys, [1.0, 0.0, 0.0, 1.0], 0.0, 1.0)
        ts = np.linspace(0.0, 1.0, 5)
        out = traj(ts)
        assert out.shape == (5, 4)

    def test_collision_detected(self):
        sys = kepler_system()
        # radial infall: L = 0
        z0 = np.array([1.0, 0.0, 0.0, 0.0])
        with pytest.raises(CollisionError):
            integrate(sys, z0, 0.0, 5.0)

    def test_invariant_drift_over_ten_periods(self):
        sys = kepler_system()
        z0 = np.array([2.0, 0.0, 0.0, 0.5])  # h = -3/8, L = 1
        T = 2 * math.pi * 0.75 ** -1.5
        traj = integrate(sys, z0, 0.0, 10 * T)
        rep = invariant_drift(sys, traj)
        assert rep.energy_abs <= 1e-10
        assert np.all(rep.momentum_abs <= 1e-10)


class TestVariational:
    def test_harmonic_monodromy_is_identity(self):
        sys = harmonic_system()
        z0 = np.array([1.0, 0.0, 0.0, 1.2])
        _, fm = integrate_with_variational(sys, z0, 0.0, 2 * math.pi)
        assert np.allclose(fm.value, np.eye(4), atol=1e-9)
        assert fm.symplectic_residual <= 1e-8

    def test_fundamental_matrix_vs_flow_differences(self):
        sys = kepler_system()
        z0 = np.array([2.0, 0.0, 0.0, 0.5])
        t1 = 3.0
        _, fm = integrate_with_variational(sys, z0, 0.0, t1)
        d = 1e-6
        W_fd = np.zeros((4, 4))
        for i in range(4):
            e = np.zeros(4)
            e[i] = d
            zp = integrate(sys, z0 + e, 0.0, t1)(t1)
            zm = integrate(sys, z0 - e, 0.0, t1)(t1)
            W_fd[:, i] = (zp - zm) / (2 * d)
        assert np.max(np.abs(fm.value - W_fd)) <= 1e-4

    def test_symplectic_residual_small(self):
        sys = kepler_system()
        z0 = np.array([2.0, 0.0, 0.0, 0.5])
        _, fm = integrate_with_variational(sys, z0, 0.0, 20.0)
        assert fm.symplectic_residual <= 1e-8

    def test_monodromy_wrapper(self):
        class Dummy:
            z0 = np.array([1.0, 0.0, 0.0, 1.0])
            T = 2 * math.pi

        fm = monodromy(harmonic_system(), Dummy())
        assert np.allclose(fm.value, np.eye(4), atol=1e-9)

    def test_perturbed_nonautonomous_variational(self):
        pert = Perturbation.uniform_electric((1.0, 0.0), 1e-3,
                                             profile="cosine", T_forcing=2.0)
        sys = HamiltonianSystem(KineticLaw.classical(), Potential.kepler(),
                                pert, 2)
        z0 = np.array([2.0, 0.0, 0.0, 0.5])
        _, fm = integrate_with_variational(sys, z0, 0.0, 2.0)
        assert fm.symplectic_residual <= 1e-8

    def test_trajectory_endpoints(self):
        sys = kepler_system()
        z0 = np.array([2.0, 0.0, 0.0, 0.5])
        traj = integrate(sys, z0, 0.0, 4.0)
        assert np.allclose(traj(0.0), z0, atol=1e-12)
        assert traj.t0 == 0.0 and traj.t1 == 4.0
