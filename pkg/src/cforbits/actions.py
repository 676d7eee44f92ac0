"""Action-angle route to non-degeneracy of the planar unperturbed problem.

The chart (h, L) -> (I1, I2) has the closed Jacobian row (0, 1) and
dI1/dh = tau/(2 pi), dI1/dL = -phi/pi, so the Hessian of the Hamiltonian
in action variables is assembled from finite differences of the frequency
map alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ChartSingularityError
from .model import KineticLaw, Potential
from .orbit import (
    RadialProfile,
    radial_profile,
    turning_points,
    _converged_integrals,
)

__all__ = [
    "ActionPoint",
    "NondegReport",
    "DET_THRESHOLD",
    "action_point",
    "frequencies",
    "k0_hessian",
    "nondeg_fixed_period",
    "nondeg_fixed_energy",
]

DET_THRESHOLD = 1e-3


@dataclass(frozen=True)
class ActionPoint:
    """Action variables and frequencies at chart point (h, L)."""

    h: float
    L: float
    I1: float  # radial action
    I2: float  # angular momentum
    omega1: float  # radial frequency 2 pi / tau
    omega2: float  # angular frequency 2 phi / tau
    dI1_dh: float
    dI1_dL: float


def frequencies(profile: RadialProfile):
    """(radial, angular) frequency pair of a radial profile."""
    return 2.0 * math.pi / profile.tau, 2.0 * profile.phi / profile.tau


def action_point(law: KineticLaw, V: Potential, h: float, L: float) -> ActionPoint:
    r_min, r_max = turning_points(law, V, h, L)
    tau_half, phi, action = _converged_integrals(law, V, h, L, r_min, r_max)
    tau = 2.0 * tau_half
    return ActionPoint(
        h=h, L=L, I1=action, I2=L,
        omega1=2.0 * math.pi / tau, omega2=2.0 * phi / tau,
        dI1_dh=tau / (2.0 * math.pi), dI1_dL=-phi / math.pi,
    )


@dataclass(frozen=True)
class NondegReport:
    """Hessian and gradient of the action-variable Hamiltonian at a profile,
    with both non-degeneracy determinants and their scale-normalized forms."""

    point: ActionPoint
    hessian: np.ndarray  # 2x2, symmetrized
    gradient: np.ndarray  # (omega1, omega2)
    symmetry_defect: float
    det_fixed_period: float
    det_fixed_energy: float
    scale_fixed_period: float  # |det| / ||hessian||_F^2
    scale_fixed_energy: float  # |det3| / (||hessian||_F * |grad|^2)
    fd_step: float


def _omega(law, V, h, L):
    p = radial_profile(law, V, h, L)
    return np.array([2.0 * math.pi / p.tau, 2.0 * p.phi / p.tau])


def k0_hessian(law: KineticLaw, V: Potential, h: float, L: float,
               fd_step: float = 1e-5) -> NondegReport:
    """Hessian of the action-variable Hamiltonian at (h, L) by central
    differences of the frequency map through the (h, L) chart."""
    point = action_point(law, V, h, L)
    dh = fd_step * (1.0 + abs(h))
    dL = fd_step * (1.0 + abs(L))
    dom_dh = (_omega(law, V, h + dh, L) - _omega(law, V, h - dh, L)) / (2.0 * dh)
    dom_dL = (_omega(law, V, h, L + dL) - _omega(law, V, h, L - dL)) / (2.0 * dL)
    Domega = np.column_stack([dom_dh, dom_dL])
    DI = np.array([[point.dI1_dh, point.dI1_dL], [0.0, 1.0]])
    if abs(np.linalg.det(DI)) < 1e-12:
        raise ChartSingularityError(
            f"chart Jacobian singular at (h, L) = ({h:g}, {L:g})")
    H = Domega @ np.linalg.inv(DI)
    defect = float(abs(H[0, 1] - H[1, 0]))
    H = 0.5 * (H + H.T)
    grad = np.array([point.omega1, point.omega2])
    det2 = float(np.linalg.det(H))
    B = np.zeros((3, 3))
    B[:2, :2] = H
    B[:2, 2] = grad
    B[2, :2] = grad
    det3 = float(np.linalg.det(B))
    nH = float(np.linalg.norm(H))
    ng = float(np.linalg.norm(grad))
    # a Hessian below this floor is indistinguishable from fd noise on a
    # linear K0 (harmonic case); self-normalizing noise would report O(1)
    flat_floor = 1e-6 * ng / max(abs(point.I1), abs(point.I2), 1e-12)
    if nH <= flat_floor:
        scale2 = 0.0
        scale3 = 0.0
    else:
        scale2 = abs(det2) / nH**2
        scale3 = abs(det3) / (nH * ng**2)
    return NondegReport(
        point=point, hessian=H, gradient=grad, symmetry_defect=defect,
        det_fixed_period=det2, det_fixed_energy=det3,
        scale_fixed_period=scale2, scale_fixed_energy=scale3,
        fd_step=fd_step,
    )


def nondeg_fixed_period(report: NondegReport,
                        threshold: float = DET_THRESHOLD) -> str:
    """Verdict on the fixed-period non-degeneracy determinant."""
    return "nondegenerate" if report.scale_fixed_period > threshold else "degenerate"


def nondeg_fixed_energy(report: NondegReport,
                        threshold: float = DET_THRESHOLD) -> str:
    """Verdict on the bordered (isoenergetic) determinant."""
    return "nondegenerate" if report.scale_fixed_energy > threshold else "degenerate"
