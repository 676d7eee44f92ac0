"""Kinetic laws, potentials, electromagnetic perturbations and the
perturbed/unperturbed Hamiltonian systems.

All evaluators are pure functions of their inputs; instances are immutable
after construction and safe to share across threads.  Phase states are flat
arrays ``z = [x, p]`` of length ``2 * dim``; the :class:`PhaseState` helper
is provided for convenience.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import (
    DegenerateMomentumError,
    DomainError,
    UnsupportedConfigurationError,
)

__all__ = [
    "KineticLaw",
    "Potential",
    "Perturbation",
    "HamiltonianSystem",
    "PhaseState",
    "eval_hamiltonian",
    "eval_fields",
    "eval_vector_field",
    "eval_hessian",
    "first_integrals",
]


# --- kinetic laws ---

@dataclass(frozen=True)
class KineticLaw:
    """Radial profile f of the momentum-velocity map p = f(|v|) v/|v|.

    Built-in kinds: ``classical`` (f(s) = m s) and ``relativistic``
    (f(s) = m s / sqrt(1 - s^2/c^2)).  ``a`` is the velocity-domain radius
    (c in the relativistic case, +inf otherwise); ``b`` the momentum-domain
    radius (+inf for both built-ins).
    """

    kind: str
    m: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in ("classical", "relativistic"):
            raise ValueError(f"unknown kinetic law kind: {self.kind!r}")
        if self.m <= 0:
            raise ValueError("mass must be positive")
        if self.kind == "relativistic" and self.c <= 0:
            raise ValueError("light speed must be positive")

    @classmethod
    def classical(cls, m: float = 1.0) -> "KineticLaw":
        return cls("classical", m=m)

    @classmethod
    def relativistic(cls, m: float = 1.0, c: float = 1.0) -> "KineticLaw":
        return cls("relativistic", m=m, c=c)

    @property
    def a(self) -> float:
        return self.c if self.kind == "relativistic" else math.inf

    @property
    def b(self) -> float:
        return math.inf

    def f(self, s):
        """Speed -> momentum magnitude."""
        s = np.asarray(s, dtype=float)
        if self.kind == "classical":
            return self.m * s
        return self.m * s / np.sqrt(1.0 - (s / self.c) ** 2)

    def f_prime(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "classical":
            return np.full_like(s, self.m)
        return self.m * (1.0 - (s / self.c) ** 2) ** -1.5

    def f_inv(self, s):
        """Momentum magnitude -> speed (inverse of f)."""
        s = np.asarray(s, dtype=float)
        if self.kind == "classical":
            return s / self.m
        return s / (self.m * np.sqrt(1.0 + (s / (self.m * self.c)) ** 2))

    def f_inv_prime(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "classical":
            return np.full_like(s, 1.0 / self.m)
        return 1.0 / (self.m * (1.0 + (s / (self.m * self.c)) ** 2) ** 1.5)

    def F(self, s):
        """Kinetic energy as a function of speed."""
        s = np.asarray(s, dtype=float)
        if self.kind == "classical":
            return 0.5 * self.m * s**2
        return self.m * self.c**2 * (1.0 - np.sqrt(1.0 - (s / self.c) ** 2))

    def G(self, s):
        """Kinetic energy as a function of momentum magnitude (Legendre dual of F)."""
        s = np.asarray(s, dtype=float)
        if self.kind == "classical":
            return s**2 / (2.0 * self.m)
        mc = self.m * self.c
        return self.m * self.c**2 * (np.sqrt(1.0 + (s / mc) ** 2) - 1.0)

    def G_prime(self, s):
        return self.f_inv(s)

    def G_inv(self, e):
        """Momentum magnitude at kinetic energy e >= 0."""
        e = np.asarray(e, dtype=float)
        if self.kind == "classical":
            return np.sqrt(2.0 * self.m * e)
        return np.sqrt(2.0 * self.m * e + (e / self.c) ** 2)


# --- potentials ---

@dataclass(frozen=True)
class Potential:
    """Radial potential V(r) with first and second derivatives on r > 0.

    The Hamiltonian carries the potential with a minus sign,
    H = G(|p|) - V(|x|), so an attractive force corresponds to V' < 0.
    """

    kind: str
    _V: Callable
    _dV: Callable
    _d2V: Callable
    params: tuple = ()

    def V(self, r):
        return self._V(np.asarray(r, dtype=float))

    def dV(self, r):
        return self._dV(np.asarray(r, dtype=float))

    def d2V(self, r):
        return self._d2V(np.asarray(r, dtype=float))

    @classmethod
    def homogeneous(cls, kappa: float = 1.0, alpha: float = 1.0) -> "Potential":
        """V(r) = kappa / (alpha r^alpha), kappa > 0, alpha < 2, alpha != 0."""
        if kappa <= 0:
            raise ValueError("kappa must be positive")
        if alpha >= 2 or alpha == 0:
            raise ValueError("homogeneous potential requires alpha < 2, alpha != 0")
        return cls(
            "homogeneous",
            lambda r: kappa / alpha * r**-alpha,
            lambda r: -kappa * r ** (-alpha - 1),
            lambda r: kappa * (alpha + 1) * r ** (-alpha - 2),
            params=(kappa, alpha),
        )

    @classmethod
    def kepler(cls, kappa: float = 1.0) -> "Potential":
        return cls.homogeneous(kappa=kappa, alpha=1.0)

    @classmethod
    def harmonic(cls, kappa: float = 1.0) -> "Potential":
        return cls.homogeneous(kappa=kappa, alpha=-2.0)

    @classmethod
    def levi_civita(cls, kappa: float = 1.0, lam: float = 1.0) -> "Potential":
        """V(r) = kappa/r + lam/r^2, the classical correction of the Kepler problem."""
        if kappa <= 0 or lam <= 0:
            raise ValueError("kappa and lam must be positive")
        return cls(
            "levi_civita",
            lambda r: kappa / r + lam / r**2,
            lambda r: -kappa / r**2 - 2.0 * lam / r**3,
            lambda r: 2.0 * kappa / r**3 + 6.0 * lam / r**4,
            params=(kappa, lam),
        )

    @classmethod
    def tabulated(cls, r, V, dV, d2V) -> "Potential":
        """Cubic interpolation of tabulated columns; analytic-derivative columns
        are required since V'' enters the Hessian."""
        from scipy.interpolate import CubicSpline

        r = np.asarray(r, dtype=float)
        sV = CubicSpline(r, np.asarray(V, dtype=float))
        sdV = CubicSpline(r, np.asarray(dV, dtype=float))
        sd2V = CubicSpline(r, np.asarray(d2V, dtype=float))
        return cls("tabulated", sV, sdV, sd2V, params=(float(r[0]), float(r[-1])))


# --- perturbations ---

def _skew(b):
    return np.array(
        [[0.0, -b[2], b[1]], [b[2], 0.0, -b[0]], [-b[1], b[0], 0.0]]
    )


@dataclass(frozen=True)
class Perturbation:
    """Closed catalogue of electromagnetic perturbation families.

    Evaluators include the size ``eps``; ``U`` and ``A`` vanish identically at
    eps = 0.  All built-in vector potentials are linear in x, so second
    x-derivatives of A vanish.
    """

    family: str = "zero"
    eps: float = 0.0
    e_vec: tuple = ()
    profile: str = "constant"  # time profile of the electric potential
    T_forcing: float = math.inf
    B0: tuple = ()

    @classmethod
    def zero(cls) -> "Perturbation":
        return cls()

    @classmethod
    def uniform_electric(cls, e_vec, eps: float, profile: str = "constant",
                         T_forcing: float = math.inf) -> "Perturbation":
        if profile not in ("constant", "cosine"):
            raise ValueError(f"unknown time profile: {profile!r}")
        if profile == "cosine" and not (T_forcing > 0 and math.isfinite(T_forcing)):
            raise ValueError("cosine profile needs a finite positive T_forcing")
        return cls("uniform_electric", eps=eps, e_vec=tuple(e_vec),
                   profile=profile, T_forcing=T_forcing)

    @classmethod
    def uniform_magnetic(cls, B0, eps: float) -> "Perturbation":
        return cls("uniform_magnetic", eps=eps, B0=tuple(B0))

    @classmethod
    def rotating_frame(cls, eps: float) -> "Perturbation":
        return cls("rotating_frame", eps=eps)

    @property
    def is_autonomous(self) -> bool:
        return not (self.family == "uniform_electric" and self.profile == "cosine")

    def scaled(self, eps: float) -> "Perturbation":
        """Same family with a different perturbation size."""
        return replace(self, eps=eps)

    def check_dim(self, dim: int):
        if self.family == "rotating_frame" and dim != 2:
            raise UnsupportedConfigurationError("rotating_frame is 2D only")
        if self.family == "uniform_magnetic" and dim != 3:
            raise UnsupportedConfigurationError("uniform_magnetic needs dim = 3")
        if self.family == "uniform_electric" and len(self.e_vec) != dim:
            raise UnsupportedConfigurationError(
                f"electric vector has length {len(self.e_vec)}, system dim is {dim}"
            )

    def _g(self, t: float) -> float:
        if self.profile == "cosine":
            return math.cos(2.0 * math.pi * t / self.T_forcing)
        return 1.0

    # scalar potential and derivatives

    def U(self, t: float, x) -> float:
        if self.family == "uniform_electric":
            return self.eps * self._g(t) * float(np.dot(self.e_vec, x))
        return 0.0

    def grad_U(self, t: float, x):
        if self.family == "uniform_electric":
            return self.eps * self._g(t) * np.asarray(self.e_vec, dtype=float)
        return np.zeros(len(x))

    def hess_U(self, t: float, x):
        d = len(x)
        return np.zeros((d, d))

    # vector potential and derivatives

    def A(self, t: float, x):
        x = np.asarray(x, dtype=float)
        if self.family == "uniform_magnetic":
            return 0.5 * self.eps * np.cross(self.B0, x)
        if self.family == "rotating_frame":
            return self.eps * np.array([x[1], 0.0])
        return np.zeros(len(x))

    def DA(self, t: float, x):
        d = len(x)
        if self.family == "uniform_magnetic":
            return 0.5 * self.eps * _skew(np.asarray(self.B0, dtype=float))
        if self.family == "rotating_frame":
            return self.eps * np.array([[0.0, 1.0], [0.0, 0.0]])
        return np.zeros((d, d))

    def dA_dt(self, t: float, x):
        return np.zeros(len(x))


def eval_fields(pert: Perturbation, t: float, x):
    """Electric and magnetic fields at (t, x).

    E = grad_x U - dA/dt; B = curl_x A (a vector for dim 3, the scalar curl
    for dim 2).
    """
    x = np.asarray(x, dtype=float)
    d = len(x)
    pert.check_dim(d)
    if np.linalg.norm(x) == 0.0:
        raise DomainError("fields undefined at x = 0")
    E = pert.grad_U(t, x) - pert.dA_dt(t, x)
    DA = pert.DA(t, x)
    if d == 3:
        B = np.array([DA[2, 1] - DA[1, 2], DA[0, 2] - DA[2, 0], DA[1, 0] - DA[0, 1]])
    else:
        B = DA[1, 0] - DA[0, 1]
    return E, B


# --- phase states and the Hamiltonian system ---

@dataclass(frozen=True)
class PhaseState:
    """Position/momentum pair; ``z`` is the flat [x, p] layout used everywhere."""

    x: tuple
    p: tuple

    @classmethod
    def from_z(cls, z) -> "PhaseState":
        z = np.asarray(z, dtype=float)
        d = z.size // 2
        return cls(tuple(z[:d]), tuple(z[d:]))

    @property
    def z(self):
        return np.concatenate([self.x, self.p])


def _as_z(z):
    if isinstance(z, PhaseState):
        return z.z
    return np.asarray(z, dtype=float)


@dataclass(frozen=True)
class HamiltonianSystem:
    """Central force problem H = G(|p - A(t,x)|) - V(|x|) - U(t,x) in dim 2 or 3."""

    law: KineticLaw
    potential: Potential
    perturbation: Perturbation = Perturbation.zero()
    dim: int = 2

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if self.perturbation.family != "zero":
            self.perturbation.check_dim(self.dim)

    def with_eps(self, eps: float) -> "HamiltonianSystem":
        return replace(self, perturbation=self.perturbation.scaled(eps))

    @property
    def is_autonomous(self) -> bool:
        return self.perturbation.is_autonomous

    def _split(self, z):
        z = _as_z(z)
        if z.size != 2 * self.dim:
            raise DomainError(f"state has size {z.size}, expected {2 * self.dim}")
        return z[: self.dim], z[self.dim:]

    def hamiltonian(self, t: float, z) -> float:
        x, p = self._split(z)
        r = np.linalg.norm(x)
        if r == 0.0:
            raise DomainError("Hamiltonian undefined at x = 0")
        w = p - self.perturbation.A(t, x)
        s = np.linalg.norm(w)
        if s >= self.law.b:
            raise DomainError("momentum argument outside [0, b)")
        return float(self.law.G(s) - self.potential.V(r)
                     - self.perturbation.U(t, x))

    def vector_field(self, t: float, z):
        """Canonical phase velocity (dx/dt, dp/dt) = (grad_p H, -grad_x H)."""
        x, p = self._split(z)
        r = np.linalg.norm(x)
        if r == 0.0:
            raise DomainError("vector field undefined at x = 0")
        pert = self.perturbation
        w = p - pert.A(t, x)
        s = np.linalg.norm(w)
        if s >= self.law.b:
            raise DomainError("momentum argument outside [0, b)")
        v = self.law.f_inv(s) * w / s if s > 0.0 else np.zeros(self.dim)
        xdot = v
        pdot = (pert.DA(t, x).T @ v
                + float(self.potential.dV(r)) * x / r
                + pert.grad_U(t, x))
        return np.concatenate([xdot, pdot])

    def hessian(self, t: float, z):
        """Symmetric (2d x 2d) matrix of second z-derivatives of H."""
        x, p = self._split(z)
        d = self.dim
        r = np.linalg.norm(x)
        if r == 0.0:
            raise DomainError("Hessian undefined at x = 0")
        pert = self.perturbation
        w = p - pert.A(t, x)
        s = np.linalg.norm(w)
        if s == 0.0:
            raise DegenerateMomentumError("Hessian singular at p = A(t, x)")
        u = w / s
        uu = np.outer(u, u)
        eye = np.eye(d)
        g = float(self.law.f_inv(s))
        gp = float(self.law.f_inv_prime(s))
        Kww = gp * uu + (g / s) * (eye - uu)

        ux = x / r
        uxux = np.outer(ux, ux)
        Vpp = float(self.potential.d2V(r))
        Vp = float(self.potential.dV(r))
        Vblock = Vpp * uxux + (Vp / r) * (eye - uxux)

        Ax = pert.DA(t, x)
        # built-in A families are linear in x, so the D^2 A term vanishes
        Hxx = Ax.T @ Kww @ Ax - Vblock - pert.hess_U(t, x)
        Hxp = -(Ax.T @ Kww)
        Hpp = Kww

        H = np.empty((2 * d, 2 * d))
        H[:d, :d] = Hxx
        H[:d, d:] = Hxp
        H[d:, :d] = Hxp.T
        H[d:, d:] = Hpp
        return H

    def first_integrals(self, t: float, z):
        """Energy and angular momentum (scalar for dim 2, vector for dim 3)."""
        x, p = self._split(z)
        energy = self.hamiltonian(t, z)
        if self.dim == 2:
            mom = float(x[0] * p[1] - x[1] * p[0])
        else:
            mom = np.cross(x, p)
        return energy, mom


# module-level aliases matching the operation names used throughout the docs

def eval_hamiltonian(sys: HamiltonianSystem, t: float, z) -> float:
    return sys.hamiltonian(t, z)


def eval_vector_field(sys: HamiltonianSystem, t: float, z):
    return sys.vector_field(t, z)


def eval_hessian(sys: HamiltonianSystem, t: float, z):
    return sys.hessian(t, z)


def first_integrals(sys: HamiltonianSystem, t: float, z):
    return sys.first_integrals(t, z)
