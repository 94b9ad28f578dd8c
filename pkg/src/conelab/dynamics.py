"""Power-law central force problems and their conserved structure.

The potential is V(q) = -mu / |q|^alpha on the punctured plane, so
Newton's equations read qdd = -mu * alpha * q / |q|^(alpha + 2).
Positive mu attracts, negative mu is the repulsive (Coulomb-type) case.
All quantities are dimensionless.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import brentq

from .errors import CollisionError, DomainError, EmptyHillError

if TYPE_CHECKING:
    from .integrate import Trajectory

__all__ = [
    "PowerLawProblem",
    "PhaseState",
    "ConservedPair",
    "HillInterval",
    "ScalingMap",
    "acceleration",
    "energy",
    "potential",
    "kinetic_energy",
    "angular_momentum",
    "effective_potential",
    "effective_potential_min_radius",
    "hill_interval",
    "scale_trajectory",
]

_ROOT_RTOL = 4.0 * np.finfo(float).eps  # brentq floor; endpoints hit 1e-12 relative easily


@dataclass(frozen=True)
class PowerLawProblem:
    """The pair (alpha, mu) defining V = -mu / r^alpha.

    alpha must be positive; alpha = 2 is allowed for construction but the
    cone-angle, Hill-interval and scattering operations require
    alpha in (0, 2) and raise DomainError otherwise.
    """

    alpha: float
    mu: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0.0) or not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be positive and finite, got {self.alpha}")
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu}")

    def require_subcritical(self, what: str = "operation") -> None:
        """Raise unless alpha is in the open interval (0, 2)."""
        if not (0.0 < self.alpha < 2.0):
            raise DomainError(
                f"{what} requires alpha in (0, 2), got alpha={self.alpha}"
            )

    @property
    def cone_c(self) -> float:
        """Cone parameter 1 - alpha/2 (signed; see conegeom for |.|)."""
        return 1.0 - 0.5 * self.alpha


@dataclass(frozen=True)
class PhaseState:
    """Position, velocity and time of a point on a solution curve."""

    q: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float).reshape(2))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(2))

    @property
    def r(self) -> float:
        return float(np.hypot(self.q[0], self.q[1]))

    @property
    def speed(self) -> float:
        return float(np.hypot(self.v[0], self.v[1]))


@dataclass(frozen=True)
class ConservedPair:
    """Energy and angular momentum carried along a solution."""

    E: float
    J: float


@dataclass(frozen=True)
class HillInterval:
    """Radial interval {r : V_eff(r; J) <= E}.

    r_max is None for unbounded motion (E >= 0), an explicit marker rather
    than an infinite float. A degenerate interval (r_min == r_max) is the
    circular orbit radius.
    """

    r_min: float
    r_max: float | None

    @property
    def unbounded(self) -> bool:
        return self.r_max is None

    @property
    def degenerate(self) -> bool:
        return self.r_max is not None and self.r_max == self.r_min


def _radius(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.hypot(q[..., 0], q[..., 1])


def acceleration(problem: PowerLawProblem, q: np.ndarray) -> np.ndarray:
    """Force per unit mass: -mu * alpha * q / |q|^(alpha + 2)."""
    q = np.asarray(q, dtype=float)
    r = _radius(q)
    if np.any(r == 0.0):
        raise CollisionError("acceleration is undefined at the origin")
    coef = -problem.mu * problem.alpha / r ** (problem.alpha + 2.0)
    return coef[..., np.newaxis] * q if q.ndim > 1 else coef * q


def potential(problem: PowerLawProblem, q: np.ndarray) -> float | np.ndarray:
    """V(q) = -mu / |q|^alpha."""
    r = _radius(np.asarray(q, dtype=float))
    if np.any(r == 0.0):
        raise CollisionError("potential is undefined at the origin")
    out = -problem.mu / r**problem.alpha
    return float(out) if np.ndim(out) == 0 else out


def kinetic_energy(v: np.ndarray) -> float:
    v = np.asarray(v, dtype=float)
    return 0.5 * float(v[0] ** 2 + v[1] ** 2)


def energy(problem: PowerLawProblem, state: PhaseState) -> float:
    """Total energy K(v) + V(q); conserved along solutions."""
    return kinetic_energy(state.v) + float(potential(problem, state.q))


def angular_momentum(state: PhaseState) -> float:
    """Planar cross product J = x*vy - y*vx = r^2 * thetadot."""
    return float(state.q[0] * state.v[1] - state.q[1] * state.v[0])


def conserved_pair(problem: PowerLawProblem, state: PhaseState) -> ConservedPair:
    return ConservedPair(E=energy(problem, state), J=angular_momentum(state))


def effective_potential(
    problem: PowerLawProblem, J: float, r: float | np.ndarray
) -> float | np.ndarray:
    """Radial potential V_eff(r; J) = J^2/(2 r^2) - mu/r^alpha."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("effective_potential requires r > 0")
    out = J**2 / (2.0 * r**2) - problem.mu / r**problem.alpha
    return float(out) if np.ndim(out) == 0 else out


def effective_potential_min_radius(problem: PowerLawProblem, J: float) -> float:
    """Unique critical radius r_* = (J^2/(alpha*mu))^(1/(2-alpha)).

    Valid for attractive mu > 0 and alpha in (0, 2), where V_eff has a
    single interior minimum.
    """
    problem.require_subcritical("effective potential minimum")
    if problem.mu <= 0.0:
        raise DomainError("V_eff has no interior minimum for mu <= 0")
    if J == 0.0:
        raise DomainError("r_* is undefined for J = 0")
    return float((J**2 / (problem.alpha * problem.mu)) ** (1.0 / (2.0 - problem.alpha)))


def _veff_root(problem: PowerLawProblem, E: float, J: float, lo: float, hi: float) -> float:
    f = lambda r: effective_potential(problem, J, r) - E
    return float(brentq(f, lo, hi, xtol=1e-300, rtol=_ROOT_RTOL, maxiter=200))


def hill_interval(problem: PowerLawProblem, E: float, J: float) -> HillInterval:
    """Bracketed root-find of V_eff = E around the critical radius.

    For attractive problems V_eff is unimodal on (0, inf) with a negative
    minimum, so {V_eff <= E} is one interval: [r_min, r_max] for E < 0 and
    [r_min, inf) for E >= 0. Repulsive problems (mu < 0) have V_eff
    strictly decreasing and positive, giving [r_min, inf) for E > 0 and an
    empty set otherwise.
    """
    problem.require_subcritical("hill_interval")
    if J == 0.0:
        raise DomainError("hill_interval requires J != 0")

    if problem.mu > 0.0:
        r_star = effective_potential_min_radius(problem, J)
        v_min = float(effective_potential(problem, J, r_star))
        if E < v_min:
            raise EmptyHillError(
                f"E={E} is below the effective potential minimum {v_min}"
            )
        if E == v_min:
            return HillInterval(r_min=r_star, r_max=r_star)
        lo = r_star
        while effective_potential(problem, J, lo) - E < 0.0:
            lo *= 0.5
        r_min = _veff_root(problem, E, J, lo, r_star)
        if E >= 0.0:
            return HillInterval(r_min=r_min, r_max=None)
        hi = r_star
        while effective_potential(problem, J, hi) - E < 0.0:
            hi *= 2.0
        r_max = _veff_root(problem, E, J, r_star, hi)
        return HillInterval(r_min=r_min, r_max=r_max)

    if problem.mu == 0.0:
        # free motion: V_eff = J^2/2r^2
        if E <= 0.0:
            raise EmptyHillError("free motion with J != 0 requires E > 0")
        return HillInterval(r_min=float(abs(J) / math.sqrt(2.0 * E)), r_max=None)

    # repulsive: V_eff > 0 everywhere, strictly decreasing
    if E <= 0.0:
        raise EmptyHillError("repulsive motion requires E > 0")
    lo = 1e-3
    while effective_potential(problem, J, lo) - E < 0.0:
        lo *= 0.5
    hi = 1.0
    while effective_potential(problem, J, hi) - E > 0.0:
        hi *= 2.0
    return HillInterval(r_min=_veff_root(problem, E, J, lo, hi), r_max=None)


@dataclass(frozen=True)
class ScalingMap:
    """Space-time dilation q(t) -> lam * q(lam^-nu * t) with nu = alpha/2 + 1.

    Takes solutions to solutions; transforms velocities by lam^(1-nu),
    energy by lam^-alpha and angular momentum by lam^c with c = 1 - alpha/2.
    """

    lam: float
    alpha: float

    def __post_init__(self):
        if not (self.lam > 0.0):
            raise DomainError(f"dilation factor must be positive, got {self.lam}")

    @property
    def nu(self) -> float:
        return 0.5 * self.alpha + 1.0

    def scale_position(self, q: np.ndarray) -> np.ndarray:
        return self.lam * np.asarray(q, dtype=float)

    def scale_velocity(self, v: np.ndarray) -> np.ndarray:
        return self.lam ** (1.0 - self.nu) * np.asarray(v, dtype=float)

    def scale_time(self, t: float | np.ndarray) -> float | np.ndarray:
        return self.lam**self.nu * t

    def scale_energy(self, E: float) -> float:
        return self.lam ** (-self.alpha) * E

    def scale_angular_momentum(self, J: float) -> float:
        return self.lam ** (1.0 - 0.5 * self.alpha) * J

    def scale_state(self, state: PhaseState) -> PhaseState:
        return PhaseState(
            q=self.scale_position(state.q),
            v=self.scale_velocity(state.v),
            t=float(self.scale_time(state.t)),
        )


def scale_trajectory(traj: "Trajectory", smap: ScalingMap) -> "Trajectory":
    """Apply the dilation sample-wise; the image is again a solution."""
    from .integrate import Trajectory, TrajectoryEvent

    if smap.alpha != traj.problem.alpha:
        raise DomainError("scaling map exponent does not match the problem")
    events = [
        TrajectoryEvent(kind=ev.kind, time=float(smap.scale_time(ev.time)),
                        state=smap.scale_state(ev.state))
        for ev in traj.events
    ]
    return Trajectory(
        problem=traj.problem,
        t=np.asarray(smap.scale_time(traj.t), dtype=float),
        q=smap.scale_position(traj.q),
        v=smap.scale_velocity(traj.v),
        events=events,
        conserved=ConservedPair(
            E=smap.scale_energy(traj.conserved.E),
            J=smap.scale_angular_momentum(traj.conserved.J),
        ),
        drift_budget=traj.drift_budget,
        meta=dict(traj.meta),
    )
