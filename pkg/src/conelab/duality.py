"""The power-law duality q = Q^beta with dt = beta^2 |q|^alpha dtau.

Tuning beta = 2/(2 - alpha) cancels the potential singularity and carries
solutions of the -alpha force law at energy E to solutions of the +gamma
force law, gamma = 2*alpha/(2 - alpha), where energy and coupling swap
roles: the transformed curve has energy mu*beta^2 in the potential
W(Q) = -beta^2 E |Q|^gamma, hence satisfies Q'' = beta^2 E gamma
|Q|^(gamma-2) Q. For alpha = 1 this is the squaring map with
dtau = dt/(4|q|) sending Kepler orbits to the linear system Q'' = 8 E Q.

Q -> Q^beta is multivalued for non-integer beta; curves missing the origin
are continued by unwrapping the polar angle along the samples, and the
branch choice k rotates the image rigidly by 2*pi*beta*k.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline, PchipInterpolator

from .curves import PlaneCurve
from .errors import (
    CylinderCaseError,
    DomainError,
    OriginCrossingError,
    UnderSampledError,
)
from .integrate import Trajectory

__all__ = [
    "DualityMap",
    "BranchTracker",
    "make_dual",
    "transform_forward",
    "transform_inverse",
    "levi_civita",
    "dual_residual",
    "fit_dual_coefficient",
    "dual_energy_samples",
    "trajectory_curve",
    "dualize_trajectory",
]

_UNWRAP_LIMIT = 0.95 * np.pi  # per-step angle jump beyond this is ambiguous
_ORIGIN_TOL = 1e-10


@dataclass(frozen=True)
class DualityMap:
    """Exponent triple (alpha, beta, gamma) plus the source (E, mu).

    Identities (1 - alpha/2)(1 + gamma/2) = 1, alpha/2 + 1/beta = 1 and
    gamma = 2*beta - 2 hold by construction and are re-checked here.
    """

    alpha: float
    beta: float
    gamma: float
    E_source: float
    mu_source: float

    def __post_init__(self):
        i1 = (1.0 - 0.5 * self.alpha) * (1.0 + 0.5 * self.gamma) - 1.0
        i2 = 0.5 * self.alpha + 1.0 / self.beta - 1.0
        i3 = self.gamma - (2.0 * self.beta - 2.0)
        if max(abs(i1), abs(i2), abs(i3)) > 1e-12:
            raise DomainError("inconsistent exponent triple")

    @property
    def dual_energy(self) -> float:
        """Energy of the transformed curve: mu * beta^2."""
        return self.mu_source * self.beta**2

    @property
    def dual_coupling(self) -> float:
        """Coupling of the dual potential W(Q) = -(beta^2 E) |Q|^gamma."""
        return self.beta**2 * self.E_source

    @property
    def dual_coefficient(self) -> float:
        """Force coefficient C in Q'' = C |Q|^(gamma-2) Q, C = beta^2 E gamma."""
        return self.beta**2 * self.E_source * self.gamma


def make_dual(alpha: float, E: float, mu: float) -> DualityMap:
    """Build the duality data for a source problem (alpha, mu) at energy E."""
    if alpha <= 0.0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if alpha == 2.0:
        raise CylinderCaseError("alpha = 2 has no cone dual (cylinder case)")
    beta = 2.0 / (2.0 - alpha)
    gamma = 2.0 * alpha / (2.0 - alpha)
    return DualityMap(alpha=alpha, beta=beta, gamma=gamma, E_source=E, mu_source=mu)


class BranchTracker:
    """Continuous polar angle along a curve, with integer sheet offset k.

    update() consumes raw angles one by one and returns the unwrapped value
    arg + 2*pi*k; raw jumps are folded into (-pi, pi) per step, which is
    only unambiguous for adequately sampled curves.
    """

    def __init__(self, start_arg: float, k: int = 0):
        self.current_arg = float(start_arg) + 2.0 * np.pi * k
        self.k = k

    def update(self, raw_angle: float) -> float:
        delta = (raw_angle - self.current_arg + np.pi) % (2.0 * np.pi) - np.pi
        if abs(delta) > _UNWRAP_LIMIT:
            raise UnderSampledError(
                f"angle step {delta:+.3f} rad is too close to pi to unwrap"
            )
        self.current_arg += delta
        return self.current_arg


def unwrapped_argument(points: np.ndarray) -> np.ndarray:
    """np.unwrap of arg(points) with an explicit ambiguity guard."""
    arg = np.unwrap(np.angle(points))
    steps = np.abs(np.diff(arg))
    if steps.size and float(steps.max()) > _UNWRAP_LIMIT:
        raise UnderSampledError(
            f"largest angle step {steps.max():.3f} rad exceeds the unwrap limit "
            f"{_UNWRAP_LIMIT:.3f}; resample the curve more densely"
        )
    return arg


def _check_origin(points: np.ndarray, origin_tol: float) -> None:
    rmin = float(np.min(np.abs(points)))
    if rmin < origin_tol:
        raise OriginCrossingError(
            f"curve reaches |z| = {rmin:.3e} < {origin_tol:.1e}; "
            "branch continuation breaks at the origin"
        )


def _cumulative(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    out[0] = 0.0
    out[1:] = cumulative_simpson(y, x=x)
    return out


def transform_forward(
    dmap: DualityMap,
    curve: PlaneCurve,
    seed_branch: int = 0,
    t0: float = 0.0,
    origin_tol: float = _ORIGIN_TOL,
) -> PlaneCurve:
    """Map a tau-parameterized folding-plane curve Q to q(t) = Q^beta.

    Newtonian time is recovered by t(tau) = t0 + integral of
    beta^2 |Q|^(alpha*beta) d sigma (composite Simpson on the sample grid).
    Different seed branches rotate the image by 2*pi*beta*k.
    """
    _check_origin(curve.points, origin_tol)
    rho = np.abs(curve.points)
    psi = unwrapped_argument(curve.points) + 2.0 * np.pi * seed_branch
    q = rho**dmap.beta * np.exp(1j * dmap.beta * psi)
    speed = dmap.beta**2 * rho ** (dmap.alpha * dmap.beta)
    t = t0 + _cumulative(speed, curve.param)
    return PlaneCurve(param=t, points=q)


def transform_inverse(
    dmap: DualityMap,
    curve: PlaneCurve,
    seed_branch: int = 0,
    tau0: float = 0.0,
    origin_tol: float = _ORIGIN_TOL,
) -> PlaneCurve:
    """Map a t-parameterized Newtonian curve q to Q(tau) = q^(1/beta).

    tau(t) = tau0 + integral of dt / (beta^2 |q|^alpha). The inverse of
    transform_forward up to quadrature tolerance.
    """
    _check_origin(curve.points, origin_tol)
    r = np.abs(curve.points)
    theta = unwrapped_argument(curve.points) + 2.0 * np.pi * seed_branch
    Q = r ** (1.0 / dmap.beta) * np.exp(1j * theta / dmap.beta)
    slowness = 1.0 / (dmap.beta**2 * r**dmap.alpha)
    tau = tau0 + _cumulative(slowness, curve.param)
    return PlaneCurve(param=tau, points=Q)


def levi_civita(curve: PlaneCurve, seed_branch: int = 0) -> PlaneCurve:
    """Square-root continuation Q = q^(1/2) with dtau = dt / (4|q|)."""
    return transform_inverse(make_dual(1.0, E=0.0, mu=1.0), curve, seed_branch)


def _second_derivative(curve: PlaneCurve) -> tuple[np.ndarray, np.ndarray]:
    """Three-point second derivative on a (possibly non-uniform) grid."""
    if len(curve) < 5:
        raise UnderSampledError("need at least 5 samples for a residual")
    tau = curve.param
    Q = curve.points
    h1 = np.diff(tau)[:-1]
    h2 = np.diff(tau)[1:]
    Qpp = 2.0 * (Q[:-2] * h2 - Q[1:-1] * (h1 + h2) + Q[2:] * h1) / (
        h1 * h2 * (h1 + h2)
    )
    return Qpp, Q[1:-1]


def dual_residual(dmap: DualityMap, curve: PlaneCurve) -> float:
    """Max scaled deviation of a curve from Q'' = C |Q|^(gamma-2) Q.

    C is beta^2 E gamma. The scale is the largest force sample, with a
    curvature fallback when the force vanishes identically (E = 0, where
    the dual motion is a straight line).
    """
    Qpp, Qc = _second_derivative(curve)
    force = dmap.dual_coefficient * np.abs(Qc) ** (dmap.gamma - 2.0) * Qc
    span = curve.param[-1] - curve.param[0]
    scale = max(float(np.max(np.abs(force))), float(np.max(np.abs(Qc))) / span**2)
    return float(np.max(np.abs(Qpp - force))) / scale


def fit_dual_coefficient(dmap: DualityMap, curve: PlaneCurve) -> float:
    """Least-squares fit of C in Q'' = C |Q|^(gamma-2) Q from samples."""
    Qpp, Qc = _second_derivative(curve)
    basis = np.abs(Qc) ** (dmap.gamma - 2.0) * Qc
    denom = float(np.real(np.vdot(basis, basis)))
    if denom == 0.0:
        raise DomainError("degenerate curve; cannot fit a force coefficient")
    return float(np.real(np.vdot(basis, Qpp))) / denom


def dual_energy_samples(dmap: DualityMap, curve: PlaneCurve) -> np.ndarray:
    """(1/2)|Q'|^2 + W(Q) at interior samples; should equal mu * beta^2."""
    tau = curve.param
    Q = curve.points
    h1 = np.diff(tau)[:-1]
    h2 = np.diff(tau)[1:]
    # non-uniform central first derivative
    Qp = (-h2 / (h1 * (h1 + h2)) * Q[:-2]
          + (h2 - h1) / (h1 * h2) * Q[1:-1]
          + h1 / (h2 * (h1 + h2)) * Q[2:])
    W = -dmap.dual_coupling * np.abs(Q[1:-1]) ** dmap.gamma
    return 0.5 * np.abs(Qp) ** 2 + W


def trajectory_curve(traj: Trajectory, n: int | None = None) -> PlaneCurve:
    """View a trajectory as a complex plane curve, optionally resampled."""
    if n is None:
        return PlaneCurve(param=traj.t, points=traj.q[:, 0] + 1j * traj.q[:, 1])
    tr = traj.resampled(n)
    return PlaneCurve(param=tr.t, points=tr.q[:, 0] + 1j * tr.q[:, 1])


def dualize_trajectory(
    dmap: DualityMap,
    traj: Trajectory,
    n: int = 6001,
    seed_branch: int = 0,
) -> PlaneCurve:
    """transform_inverse of a trajectory, resampled to a uniform tau grid.

    A first pass on a uniform t grid estimates tau(t); its inverse places
    sample times so the final tau grid is uniform to interpolation error,
    which keeps finite-difference residuals at their nominal order.
    """
    first = transform_inverse(dmap, trajectory_curve(traj, n), seed_branch)
    tau1 = first.param
    t1 = np.linspace(traj.t[0], traj.t[-1], n)
    tau_u = np.linspace(tau1[0], tau1[-1], n)
    t2 = CubicSpline(tau1, t1)(tau_u)
    if np.any(np.diff(t2) <= 0.0):
        t2 = PchipInterpolator(tau1, t1)(tau_u)
    t2[0], t2[-1] = t1[0], t1[-1]
    q2, _ = traj.states_at(t2)
    resampled = PlaneCurve(param=t2, points=q2[:, 0] + 1j * q2[:, 1])
    return transform_inverse(dmap, resampled, seed_branch)
