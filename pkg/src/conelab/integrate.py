"""Adaptive orbit integration in Newtonian and regularized fictitious time.

Both drivers wrap the Dormand-Prince 5(4) embedded pair (scipy's RK45) with
dense output. Event detection covers collision proximity and brake points;
apsis passages are located afterwards by root-polishing d(r^2)/dt on the
dense solution. The fictitious-time driver integrates
dt/dtau = beta^2 |q|^alpha alongside the state, which regularizes
near-collision passages that defeat fixed Newtonian-time stepping.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .dynamics import (
    ConservedPair,
    PhaseState,
    PowerLawProblem,
    angular_momentum,
    conserved_pair,
    energy,
)
from .errors import CollisionError, CylinderCaseError, DomainError, DriftBudgetError, StepUnderflowError

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "TrajectoryEvent",
    "ApsisEvent",
    "integrate",
    "integrate_fictitious",
    "detect_apsides",
]

BRAKE_SPEED = 1e-10       # |v| below this at the Hill boundary counts as a brake
DRIFT_BUDGET_FACTOR = 1e3  # declared drift budget = factor * rel_tol


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    collision_radius: float = 1e-8
    max_samples: int = 200_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "collision_radius"):
            if not (getattr(self, name) > 0.0):
                raise DomainError(f"{name} must be positive")
        if self.max_samples < 8:
            raise DomainError("max_samples must be at least 8")


@dataclass(frozen=True)
class TrajectoryEvent:
    kind: str  # "collision" | "brake"
    time: float
    state: PhaseState


@dataclass(frozen=True)
class ApsisEvent:
    kind: str  # "perihelion" | "apohelion"
    time: float
    radius: float


class _NewtonianDense:
    """Evaluate (q, v) at arbitrary t from a solve_ivp dense solution."""

    def __init__(self, sol):
        self._sol = sol

    def __call__(self, t):
        y = self._sol(np.asarray(t, dtype=float))
        return y[0:2].T, y[2:4].T


class _FictitiousDense:
    """Evaluate (q, v) at Newtonian t from a dense solution in fictitious tau.

    The state carries t as its last component; t(tau) is inverted per call
    by vectorized Newton iteration with dt/dtau = beta^2 |q|^alpha.
    """

    def __init__(self, sol, tau_nodes, t_nodes, alpha, beta):
        self._sol = sol
        self._tau_nodes = tau_nodes
        self._t_nodes = t_nodes
        self._alpha = alpha
        self._b2 = beta * beta

    def tau_of_t(self, t):
        t = np.asarray(t, dtype=float)
        tau = np.interp(t, self._t_nodes, self._tau_nodes)
        lo, hi = self._tau_nodes[0], self._tau_nodes[-1]
        span = max(abs(self._t_nodes[-1] - self._t_nodes[0]), 1.0)
        for _ in range(60):
            y = self._sol(tau)
            err = y[4] - t
            if np.max(np.abs(err)) < 1e-15 * span:
                break
            g = self._b2 * np.hypot(y[0], y[1]) ** self._alpha
            tau = np.clip(tau - err / g, lo, hi)
        return tau

    def __call__(self, t):
        y = self._sol(self.tau_of_t(t))
        return y[0:2].T, y[2:4].T


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution with conserved-quantity bookkeeping.

    Samples are strictly increasing in t. The conserved pair is taken from
    the initial state; drift() reports the worst deviation over samples.
    """

    problem: PowerLawProblem
    t: np.ndarray
    q: np.ndarray            # shape (n, 2)
    v: np.ndarray            # shape (n, 2)
    events: list[TrajectoryEvent]
    conserved: ConservedPair
    drift_budget: float
    meta: dict = field(default_factory=dict)
    dense: object | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.t) < 2:
            raise DomainError("a trajectory needs at least two samples")
        if np.any(np.diff(self.t) <= 0.0):
            raise DomainError("trajectory samples must be strictly increasing in t")

    def __len__(self) -> int:
        return len(self.t)

    def __iter__(self) -> Iterator[PhaseState]:
        for i in range(len(self.t)):
            yield self.sample(i)

    def sample(self, i: int) -> PhaseState:
        return PhaseState(q=self.q[i], v=self.v[i], t=float(self.t[i]))

    @property
    def initial_state(self) -> PhaseState:
        return self.sample(0)

    @property
    def final_state(self) -> PhaseState:
        return self.sample(-1)

    def radii(self) -> np.ndarray:
        return np.hypot(self.q[:, 0], self.q[:, 1])

    def energies(self) -> np.ndarray:
        k = 0.5 * (self.v[:, 0] ** 2 + self.v[:, 1] ** 2)
        return k - self.problem.mu / self.radii() ** self.problem.alpha

    def angular_momenta(self) -> np.ndarray:
        return self.q[:, 0] * self.v[:, 1] - self.q[:, 1] * self.v[:, 0]

    def drift(self) -> tuple[float, float]:
        """Max |E - E0| and |J - J0| over samples (absolute)."""
        e = float(np.max(np.abs(self.energies() - self.conserved.E)))
        j = float(np.max(np.abs(self.angular_momenta() - self.conserved.J)))
        return e, j

    def states_at(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Dense (q, v) at arbitrary times inside the sample range."""
        if self.dense is None:
            raise DomainError("trajectory carries no dense solution")
        return self.dense(t)

    def resampled(self, n: int) -> "Trajectory":
        """Uniform-in-t resampling from the dense solution."""
        tg = np.linspace(self.t[0], self.t[-1], n)
        q, v = self.states_at(tg)
        return Trajectory(
            problem=self.problem, t=tg, q=q, v=v, events=list(self.events),
            conserved=self.conserved, drift_budget=self.drift_budget,
            meta=dict(self.meta), dense=self.dense,
        )


def _energy_scale(problem: PowerLawProblem, state: PhaseState) -> float:
    k = 0.5 * state.speed**2
    vpot = problem.mu / state.r**problem.alpha  # V(q0) = -vpot
    return max(abs(k - vpot), k, abs(vpot)) or 1.0


def _check_drift(traj: Trajectory) -> None:
    e_drift, j_drift = traj.drift()
    st = traj.initial_state
    scale_e = _energy_scale(traj.problem, st)
    scale_j = max(abs(traj.conserved.J), 1.0)
    if e_drift > traj.drift_budget * scale_e or j_drift > traj.drift_budget * scale_j:
        raise DriftBudgetError(
            f"conserved drift (dE={e_drift:.3e}, dJ={j_drift:.3e}) exceeds "
            f"budget {traj.drift_budget:.1e} at scales ({scale_e:.3g}, {scale_j:.3g})"
        )


def _make_events(cfg: IntegratorConfig):
    def collision(t, y):
        return np.hypot(y[0], y[1]) - cfg.collision_radius

    collision.terminal = True
    collision.direction = -1.0

    def brake(t, y):
        return y[2] ** 2 + y[3] ** 2 - BRAKE_SPEED**2

    brake.terminal = True
    brake.direction = -1.0
    return [collision, brake]


_EVENT_KINDS = ("collision", "brake")


def _collect_events(sol, state_of) -> list[TrajectoryEvent]:
    events = []
    for kind, times, ys in zip(_EVENT_KINDS, sol.t_events, sol.y_events):
        for te, ye in zip(times, ys):
            st = state_of(te, ye)
            events.append(TrajectoryEvent(kind=kind, time=st.t, state=st))
    events.sort(key=lambda ev: ev.time)
    return events


def _raise_if_underflow(sol, cfg: IntegratorConfig) -> None:
    if sol.status == -1:
        r_last = float(np.hypot(sol.y[0, -1], sol.y[1, -1]))
        if r_last > 10.0 * cfg.collision_radius:
            raise StepUnderflowError(
                f"step size underflow at t={sol.t[-1]!r}, |q|={r_last:.3e} "
                f"(not a collision; collision_radius={cfg.collision_radius:.1e})"
            )


def _downsample(idx_len: int, max_samples: int) -> np.ndarray:
    if idx_len <= max_samples:
        return np.arange(idx_len)
    keep = np.linspace(0, idx_len - 1, max_samples).round().astype(int)
    return np.unique(keep)


def integrate(
    problem: PowerLawProblem,
    state0: PhaseState,
    t_final: float,
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Propagate Newton's equations from state0.t to t_final.

    Terminates early with a "collision" event when |q| crosses
    cfg.collision_radius and with a "brake" event when |v| falls through
    zero at the Hill boundary. Raises DriftBudgetError if conserved
    quantities drift beyond 1e3 * rel_tol and StepUnderflowError if the
    step collapses away from a collision.
    """
    cfg = cfg or IntegratorConfig()
    if state0.r <= cfg.collision_radius:
        raise CollisionError("initial state is inside the collision radius")
    if t_final <= state0.t:
        raise DomainError("t_final must exceed the initial time")

    mu_a = problem.mu * problem.alpha
    apow = problem.alpha + 2.0

    def rhs(t, y):
        r = math.hypot(y[0], y[1])
        coef = -mu_a / r**apow
        return (y[2], y[3], coef * y[0], coef * y[1])

    sol = solve_ivp(
        rhs, (state0.t, t_final), np.concatenate([state0.q, state0.v]),
        method="RK45", rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=cfg.max_step,
        dense_output=True, events=_make_events(cfg),
    )
    _raise_if_underflow(sol, cfg)

    keep = _downsample(len(sol.t), cfg.max_samples)
    t = sol.t[keep]
    q = sol.y[0:2, keep].T
    v = sol.y[2:4, keep].T

    def state_of(te, ye):
        return PhaseState(q=ye[0:2], v=ye[2:4], t=float(te))

    traj = Trajectory(
        problem=problem, t=t, q=q, v=v,
        events=_collect_events(sol, state_of),
        conserved=conserved_pair(problem, state0),
        drift_budget=DRIFT_BUDGET_FACTOR * cfg.rel_tol,
        meta={"time_variable": "newtonian"},
        dense=_NewtonianDense(sol.sol),
    )
    _check_drift(traj)
    return traj


def integrate_fictitious(
    problem: PowerLawProblem,
    state0: PhaseState,
    tau_final: float,
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Propagate in fictitious time tau with dt = beta^2 |q|^alpha dtau.

    beta = 2/(2 - alpha) is the folding exponent. The returned trajectory
    is resampled on a uniform Newtonian-time grid; the solver's tau grid
    and the matching t values are recorded in meta["tau_grid"] and
    meta["t_of_tau"].
    """
    cfg = cfg or IntegratorConfig()
    if problem.alpha == 2.0:
        raise CylinderCaseError("fictitious time needs alpha != 2 (beta undefined)")
    if state0.r <= cfg.collision_radius:
        raise CollisionError("initial state is inside the collision radius")
    if tau_final <= 0.0:
        raise DomainError("tau_final must be positive")

    beta = 2.0 / (2.0 - problem.alpha)
    b2 = beta * beta
    mu_a = problem.mu * problem.alpha
    apow = problem.alpha + 2.0
    alpha = problem.alpha

    def rhs(tau, y):
        r = math.hypot(y[0], y[1])
        g = b2 * r**alpha
        coef = -mu_a / r**apow * g
        return (g * y[2], g * y[3], coef * y[0], coef * y[1], g)

    y0 = np.concatenate([state0.q, state0.v, [state0.t]])
    sol = solve_ivp(
        rhs, (0.0, tau_final), y0,
        method="RK45", rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=cfg.max_step,
        dense_output=True, events=_make_events(cfg),
    )
    _raise_if_underflow(sol, cfg)

    tau_nodes = sol.t
    t_nodes = sol.y[4]
    dense = _FictitiousDense(sol.sol, tau_nodes, t_nodes, alpha, beta)

    n_out = int(min(cfg.max_samples, max(2 * len(tau_nodes), 1001)))
    t = np.linspace(t_nodes[0], t_nodes[-1], n_out)
    q, v = dense(t)

    def state_of(tau_e, ye):
        return PhaseState(q=ye[0:2], v=ye[2:4], t=float(ye[4]))

    traj = Trajectory(
        problem=problem, t=t, q=q, v=v,
        events=_collect_events(sol, state_of),
        conserved=conserved_pair(problem, state0),
        drift_budget=DRIFT_BUDGET_FACTOR * cfg.rel_tol,
        meta={
            "time_variable": "newtonian-from-fictitious",
            "beta": beta,
            "tau_grid": tau_nodes,
            "t_of_tau": t_nodes,
        },
        dense=dense,
    )
    _check_drift(traj)
    return traj


def detect_apsides(traj: Trajectory, time_tol: float = 1e-12) -> list[ApsisEvent]:
    """Locate perihelion/apohelion passages from sign changes of q . v.

    Crossings are root-polished on the dense solution when available.
    A trajectory whose radial velocity never rises above noise (circular
    orbit) yields no events.
    """
    rdot = np.einsum("ij,ij->i", traj.q, traj.v)
    scale = np.max(traj.radii() * np.hypot(traj.v[:, 0], traj.v[:, 1]))
    if scale == 0.0 or np.max(np.abs(rdot)) < 1e-8 * scale:
        return []

    events: list[ApsisEvent] = []
    sign = np.sign(rdot)

    def rdot_at(tt: float) -> float:
        qq, vv = traj.states_at(tt)
        return float(qq[0, 0] * vv[0, 0] + qq[0, 1] * vv[0, 1])

    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        lo, hi = float(traj.t[i]), float(traj.t[i + 1])
        if traj.dense is not None:
            t_ap = float(brentq(rdot_at, lo, hi, xtol=time_tol, rtol=8.9e-16))
            qq, _ = traj.states_at(t_ap)
            radius = float(np.hypot(qq[0, 0], qq[0, 1]))
        else:
            # quadratic interpolation through the bracketing samples
            w = rdot[i] / (rdot[i] - rdot[i + 1])
            t_ap = lo + w * (hi - lo)
            radius = float((1 - w) * np.hypot(*traj.q[i]) + w * np.hypot(*traj.q[i + 1]))
        kind = "perihelion" if rdot[i] < 0.0 else "apohelion"
        events.append(ApsisEvent(kind=kind, time=t_ap, radius=radius))
    return events
