"""Shooting continuation of unperturbed periodic orbits into the
electromagnetically perturbed system.

Fixed-period: damped Gauss-Newton on the time-T return map mismatch, period
pinned by the (resonant) time-dependent forcing.  Fixed-energy: the period
joins the unknowns; the system gains an energy row and a phase row that
removes time-translation freedom, and is solved in the least-squares sense.
The unperturbed shooting Jacobian is singular along the manifold of rotated
and time-shifted copies, so the continuation starts at a small positive
epsilon and grows it geometrically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.transform import Rotation

from .errors import EnergyInfeasibleError, StagnationError, CollisionError
from .flow import integrate, integrate_with_variational, symplectic_matrix
from .model import HamiltonianSystem
from .orbit import ManifoldSample, PeriodicOrbit

__all__ = [
    "ShootingProblem",
    "ContinuationResult",
    "eps_path",
    "continue_fixed_period",
    "continue_fixed_energy",
    "distance_to_manifold",
    "multistart",
    "distinct_results",
]

RESIDUAL_TOL = 1e-9
ENERGY_TOL = 1e-10
DEFAULT_MAX_NEWTON = 25


@dataclass(frozen=True)
class ShootingProblem:
    """One continuation task: a perturbed system, a mode, and a seed.

    mode "fixed_period" keeps T fixed (the forcing period must divide it);
    mode "fixed_energy" solves for (z0, T) on the level set H = h and
    requires an autonomous perturbation.
    """

    sys: HamiltonianSystem
    mode: str  # fixed_period | fixed_energy
    seed: np.ndarray
    T: float
    h: float | None = None
    phase_anchor: np.ndarray | None = None
    seed_id: int = 0

    def __post_init__(self):
        if self.mode not in ("fixed_period", "fixed_energy"):
            raise ValueError(f"unknown mode {self.mode!r}")
        pert = self.sys.perturbation
        if pert.eps == 0.0:
            raise ValueError(
                "refusing eps = 0: the unperturbed shooting Jacobian is "
                "singular along the orbit manifold")
        if self.mode == "fixed_period" and not pert.is_autonomous:
            ratio = self.T / pert.T_forcing
            if abs(ratio - round(ratio)) > 1e-8:
                raise ValueError(
                    "fixed-period shooting needs the forcing period to "
                    f"divide T (T/T_forcing = {ratio:g})")
        if self.mode == "fixed_energy":
            if not pert.is_autonomous:
                raise ValueError(
                    "fixed-energy shooting needs an autonomous perturbation")
            if self.h is None:
                raise ValueError("fixed_energy mode needs the target energy h")


@dataclass(frozen=True)
class ContinuationResult:
    accepted: bool
    reason: str
    z0: np.ndarray
    period: float
    eps: float
    residual: float
    energy_residual: float
    phase_residual: float
    newton_iters: int
    seed_id: int
    trajectory: object = None
    distance: float | None = None
    distance_element: tuple | None = None


def eps_path(eps_target: float, eps_start: float = 1e-4,
             factor: float = math.sqrt(10.0)):
    """Geometric epsilon ladder from eps_start up to eps_target."""
    if eps_target <= 0:
        raise ValueError("eps_target must be positive")
    if eps_target <= eps_start:
        return [eps_target]
    path = [eps_start]
    while path[-1] * factor < eps_target * 0.999:
        path.append(path[-1] * factor)
    path.append(eps_target)
    return path


def _lm_step(Jac, R, lam):
    # least-squares Levenberg-Marquardt step for (possibly) rectangular Jac
    m, n = Jac.shape
    A = np.vstack([Jac, math.sqrt(lam) * np.eye(n)])
    b = np.concatenate([-R, np.zeros(n)])
    step, *_ = np.linalg.lstsq(A, b, rcond=None)
    return step


def _shoot_fixed_period(sys, z0, T, tol):
    traj, fm = integrate_with_variational(sys, z0, 0.0, T, tol=tol)
    R = traj(T) - z0
    Jac = fm.value - np.eye(z0.size)
    return R, Jac, traj


def continue_fixed_period(problem: ShootingProblem, eps_ladder=None,
                          max_newton: int = DEFAULT_MAX_NEWTON,
                          tol: float = 1e-12) -> ContinuationResult:
    """Continue the seed into a T-periodic solution of the perturbed system."""
    target_eps = problem.sys.perturbation.eps
    ladder = list(eps_ladder) if eps_ladder is not None else eps_path(target_eps)
    z0 = np.asarray(problem.seed, dtype=float).copy()
    T = problem.T
    total_iters = 0
    scale = 1.0 + np.linalg.norm(z0)
    for eps in ladder:
        sys = problem.sys.with_eps(eps)
        lam = 1e-8
        try:
            R, Jac, _ = _shoot_fixed_period(sys, z0, T, tol)
        except CollisionError:
            return ContinuationResult(
                False, f"collision at eps={eps:g}", z0, T, eps,
                np.inf, np.inf, 0.0, total_iters, problem.seed_id)
        res = np.linalg.norm(R)
        for _ in range(max_newton):
            if res <= RESIDUAL_TOL * scale:
                break
            step = _lm_step(Jac, R, lam)
            tried = z0 + step
            try:
                R2, Jac2, _ = _shoot_fixed_period(sys, tried, T, tol)
            except CollisionError:
                lam *= 10.0
                total_iters += 1
                continue
            res2 = np.linalg.norm(R2)
            total_iters += 1
            if res2 < res:
                z0, R, Jac, res = tried, R2, Jac2, res2
                lam = max(lam / 10.0, 1e-12)
            else:
                lam *= 10.0
                if lam > 1e8:
                    return ContinuationResult(
                        False, f"damping floor at eps={eps:g}", z0, T, eps,
                        res, np.inf, 0.0, total_iters, problem.seed_id)
        else:
            return ContinuationResult(
                False, f"stagnation at eps={eps:g}", z0, T, eps,
                res, np.inf, 0.0, total_iters, problem.seed_id)
    # independent closure re-check at tighter tolerance
    sys = problem.sys.with_eps(target_eps)
    traj = integrate(sys, z0, 0.0, T, tol=1e-12)
    res = float(np.linalg.norm(traj(T) - z0))
    ok = bool(res <= 10.0 * RESIDUAL_TOL * scale)
    return ContinuationResult(
        ok, "ok" if ok else "re-check residual too large",
        z0, T, target_eps, res, np.inf, 0.0,
        total_iters, problem.seed_id, trajectory=traj)


def continue_fixed_energy(problem: ShootingProblem, eps_ladder=None,
                          max_newton: int = DEFAULT_MAX_NEWTON,
                          tol: float = 1e-12) -> ContinuationResult:
    """Continue the seed into a periodic solution on the energy level h,
    solving for the initial state and the period jointly."""
    target_eps = problem.sys.perturbation.eps
    ladder = list(eps_ladder) if eps_ladder is not None else eps_path(target_eps)
    z0 = np.asarray(problem.seed, dtype=float).copy()
    T = problem.T
    h = problem.h
    anchor = (np.asarray(problem.phase_anchor, dtype=float)
              if problem.phase_anchor is not None else z0.copy())
    n = z0.size
    J = symplectic_matrix(problem.sys.dim)
    total_iters = 0
    scale = 1.0 + np.linalg.norm(z0)

    def residual_and_jac(sys, z, T):
        traj, fm = integrate_with_variational(sys, z, 0.0, T, tol=tol)
        zT = traj(T)
        R_close = zT - z
        R_en = sys.hamiltonian(0.0, z) - h
        # phase row: step orthogonal to the flow direction at the anchor
        vstar = sys.vector_field(0.0, anchor)
        R_ph = float(vstar @ (z - anchor))
        R = np.concatenate([R_close, [R_en, R_ph]])
        gradH = J @ sys.vector_field(0.0, z)
        dz_dT = sys.vector_field(T, zT)
        Jac = np.zeros((n + 2, n + 1))
        Jac[:n, :n] = fm.value - np.eye(n)
        Jac[:n, n] = dz_dT
        Jac[n, :n] = gradH
        Jac[n + 1, :n] = vstar
        return R, Jac, traj

    for eps in ladder:
        sys = problem.sys.with_eps(eps)
        lam = 1e-8
        try:
            R, Jac, _ = residual_and_jac(sys, z0, T)
        except CollisionError:
            return ContinuationResult(
                False, f"collision at eps={eps:g}", z0, T, eps,
                np.inf, np.inf, np.inf, total_iters, problem.seed_id)
        res = np.linalg.norm(R)
        for _ in range(max_newton):
            if res <= RESIDUAL_TOL * scale:
                break
            step = _lm_step(Jac, R, lam)
            z_try = z0 + step[:n]
            T_try = T + step[n]
            if T_try <= 0.1 * problem.T:
                lam *= 10.0
                total_iters += 1
                continue
            try:
                R2, Jac2, _ = residual_and_jac(sys, z_try, T_try)
            except CollisionError:
                lam *= 10.0
                total_iters += 1
                continue
            res2 = np.linalg.norm(R2)
            total_iters += 1
            if res2 < res:
                z0, T, R, Jac, res = z_try, T_try, R2, Jac2, res2
                lam = max(lam / 10.0, 1e-12)
            else:
                lam *= 10.0
                if lam > 1e8:
                    return ContinuationResult(
                        False, f"damping floor at eps={eps:g}", z0, T, eps,
                        res, np.inf, np.inf, total_iters, problem.seed_id)
        else:
            raise EnergyInfeasibleError(
                f"no level-h orbit found near the seed at eps={eps:g} "
                f"(residual {res:.3g})")
    sys = problem.sys.with_eps(target_eps)
    traj = integrate(sys, z0, 0.0, T, tol=1e-12)
    close = float(np.linalg.norm(traj(T) - z0))
    en = abs(float(sys.hamiltonian(0.0, z0)) - h)
    # energy conservation along the whole orbit
    ts = np.linspace(0.0, T, 200)
    drift = max(abs(float(sys.hamiltonian(t, traj(t))) - h) for t in ts)
    vstar = sys.vector_field(0.0, anchor)
    ph = abs(float(vstar @ (z0 - anchor)))
    ok = bool(close <= 10.0 * RESIDUAL_TOL * scale and en <= ENERGY_TOL
              and drift <= 1e-9)
    reason = "ok" if ok else (
        f"re-check failed: closure {close:.3g}, energy {en:.3g}, "
        f"drift {drift:.3g}")
    return ContinuationResult(
        ok, reason, z0, T, target_eps, close, en, ph,
        total_iters, problem.seed_id, trajectory=traj)


# --- closeness certification ---

def _base_position(orbit: PeriodicOrbit, t: float, dim: int):
    z = orbit.state_at(t)
    x = z[: orbit.dim]
    if dim == 3 and orbit.dim == 2:
        return np.array([x[0], x[1], 0.0])
    return x


def _sup_distance(traj, T, orbit, M, theta, dim, n_t: int = 96):
    ts = np.linspace(0.0, T, n_t)
    worst = 0.0
    for t in ts:
        x = traj(t)[:dim]
        xs = M @ _base_position(orbit, t - theta, dim)
        worst = max(worst, float(np.linalg.norm(x - xs)))
    return worst


def distance_to_manifold(result: ContinuationResult, samples: ManifoldSample,
                         refine: bool = True) -> ContinuationResult:
    """Distance of a continued solution to the manifold of rotated and
    time-shifted copies of the base orbit, as a sup-norm over positions.

    Coarse minimum over the sample grid; optional derivative-free local
    refinement in the rotation and shift parameters.
    """
    traj = result.trajectory
    if traj is None:
        raise ValueError("result carries no trajectory")
    orbit = samples.base
    dim = np.asarray(result.z0).size // 2
    best, best_el = np.inf, None
    for el in samples.elements:
        M, theta = el
        if np.isscalar(M):
            a = float(M)
            M = np.array([[math.cos(a), -math.sin(a)],
                          [math.sin(a), math.cos(a)]])
        d = _sup_distance(traj, result.period, orbit, M, theta, dim, n_t=48)
        if d < best:
            best, best_el = d, (M, theta)
    if refine and best_el is not None and dim == 3:
        M0, th0 = best_el

        def objective(u):
            M = Rotation.from_rotvec(u[:3]).as_matrix() @ M0
            return _sup_distance(traj, result.period, orbit, M, th0 + u[3], dim)

        res = minimize(objective, np.zeros(4), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12,
                                "maxiter": 400})
        if res.fun < best:
            best = float(res.fun)
            best_el = (Rotation.from_rotvec(res.x[:3]).as_matrix() @ M0,
                       th0 + res.x[3])
    elif refine and best_el is not None and dim == 2:
        M0, th0 = best_el
        a0 = math.atan2(M0[1, 0], M0[0, 0])

        def objective(u):
            a = a0 + u[0]
            M = np.array([[math.cos(a), -math.sin(a)],
                          [math.sin(a), math.cos(a)]])
            return _sup_distance(traj, result.period, orbit, M, th0 + u[1], dim)

        res = minimize(objective, np.zeros(2), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12,
                                "maxiter": 300})
        if res.fun < best:
            a = a0 + res.x[0]
            best = float(res.fun)
            best_el = (np.array([[math.cos(a), -math.sin(a)],
                                 [math.sin(a), math.cos(a)]]), th0 + res.x[1])
    return replace(result, distance=best, distance_element=best_el)


# --- multi-start ---

def multistart(problem_template: ShootingProblem, samples: ManifoldSample,
               eps_ladder=None, max_newton: int = DEFAULT_MAX_NEWTON,
               tol: float = 1e-12):
    """Run one continuation per manifold sample; returns all results in
    sample order."""
    runner = (continue_fixed_period if problem_template.mode == "fixed_period"
              else continue_fixed_energy)
    results = []
    for i, seed in enumerate(samples.states):
        prob = replace(problem_template, seed=np.asarray(seed, dtype=float),
                       seed_id=i)
        try:
            results.append(runner(prob, eps_ladder, max_newton, tol))
        except (StagnationError, EnergyInfeasibleError, CollisionError) as exc:
            results.append(ContinuationResult(
                False, f"{type(exc).__name__}: {exc}", np.asarray(seed, float),
                problem_template.T, problem_template.sys.perturbation.eps,
                np.inf, np.inf, np.inf, 0, i))
    return results


def distinct_results(results, scale: float | None = None, n_t: int = 64):
    """Deduplicate accepted results by pairwise trajectory sup-distance.

    Two solutions count as the same when their position curves stay within
    10x the residual scale of each other.
    """
    accepted = [r for r in results if r.accepted and r.trajectory is not None]
    if not accepted:
        return []
    if scale is None:
        scale = max(10.0 * max(r.residual for r in accepted), 1e-7)
    reps = []
    for r in accepted:
        dim = np.asarray(r.z0).size // 2
        ts = np.linspace(0.0, r.period, n_t)
        curve = np.array([r.trajectory(t)[:dim] for t in ts])
        dup = False
        for _, c in reps:
            if c.shape == curve.shape and np.max(np.linalg.norm(c - curve, axis=1)) <= scale:
                dup = True
                break
        if not dup:
            reps.append((r, curve))
    return [r for r, _ in reps]
