"""Zero-energy geometry: cones, their geodesics, and folding maps.

The flat metric with line element d rho^2 + c^2 rho^2 d theta^2 is a cone
of angle 2*pi*c; for the -mu/r^alpha potential at zero energy,
c = |1 - alpha/2|. Geodesics are closed-form: lines read through the
unfolding psi = c*theta. Angles theta are kept unwrapped (real-valued);
reduce mod 2*pi only when rendering, since swept angles routinely
exceed a full turn.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import PlaneCurve
from .errors import CylinderCaseError, DomainError, NotEmbeddableError

__all__ = [
    "ConeGeometry",
    "ConeGeodesic",
    "ConeTrace",
    "QuotientCone",
    "cone_parameter",
    "scattering_angle",
    "cone_geodesic_trace",
    "count_trace_crossings",
    "self_intersection_count",
    "embedding_coefficient",
    "jm_factor_map",
    "jm_factor_inverse",
    "fold_map",
    "maclaurin_polar",
    "jm_path_length",
    "cone_path_length",
    "cylinder_geodesics",
]


def cone_parameter(alpha: float) -> float:
    """c = |1 - alpha/2|, the cone parameter of the zero-energy geometry."""
    if alpha == 2.0:
        raise CylinderCaseError("alpha = 2 gives a cylinder, not a cone")
    return abs(1.0 - 0.5 * alpha)


def scattering_angle(c: float) -> float:
    """Total angle pi/c swept by every non-collision geodesic."""
    if c <= 0.0:
        raise DomainError("cone parameter must be positive")
    return math.pi / c


@dataclass(frozen=True)
class ConeGeometry:
    """Cone of angle 2*pi*c, i.e. metric d rho^2 + c^2 rho^2 d theta^2."""

    c: float

    def __post_init__(self):
        if self.c <= 0.0:
            raise DomainError("cone parameter must be positive")

    @classmethod
    def for_power_law(cls, alpha: float) -> "ConeGeometry":
        return cls(c=cone_parameter(alpha))

    @property
    def scattering_angle(self) -> float:
        return scattering_angle(self.c)

    @property
    def angle(self) -> float:
        return 2.0 * math.pi * self.c


@dataclass(frozen=True)
class ConeGeodesic:
    """Closed-form geodesic: rho = sqrt(s^2 + p*^2), a line once unfolded.

    p_star = 0 degenerates to a generator (collision geodesic) along the
    fixed ray theta_star.
    """

    geometry: ConeGeometry
    p_star: float
    theta_star: float = 0.0
    orientation: int = 1

    def __post_init__(self):
        if self.p_star < 0.0:
            raise DomainError("closest-approach distance must be >= 0")
        if self.orientation not in (-1, 1):
            raise DomainError("orientation must be +1 or -1")

    def rho(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return np.hypot(s, self.p_star)

    def theta(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.p_star == 0.0:
            return np.full_like(s, self.theta_star)
        turn = np.arctan2(s, self.p_star) / self.geometry.c
        return self.theta_star + self.orientation * turn


@dataclass(frozen=True)
class ConeTrace:
    """Sampled (rho, theta) curve on a cone; theta is unwrapped."""

    s: np.ndarray
    rho: np.ndarray
    theta: np.ndarray

    def swept_angle(self) -> float:
        return float(abs(self.theta[-1] - self.theta[0]))

    def developed_xy(self) -> np.ndarray:
        """Embed into the plane via the angle mod 2*pi (not an isometry).

        Faithful for locating self-intersections: two parameter values meet
        on the cone iff their developed images coincide.
        """
        x = self.rho * np.cos(self.theta)
        y = self.rho * np.sin(self.theta)
        return np.column_stack([x, y])


def cone_geodesic_trace(
    geom: ConeGeometry,
    p_star: float,
    theta_star: float,
    s_min: float,
    s_max: float,
    n: int = 2001,
) -> ConeTrace:
    """Sample the closed-form geodesic over the arclength window [s_min, s_max].

    The swept angle over a symmetric window (-S, S) is (2/c) * arctan(S/p*),
    approaching the full scattering angle pi/c as S grows.
    """
    if s_max <= s_min:
        raise DomainError("empty arclength window")
    geo = ConeGeodesic(geometry=geom, p_star=p_star, theta_star=theta_star)
    s = np.linspace(s_min, s_max, n)
    return ConeTrace(s=s, rho=geo.rho(s), theta=geo.theta(s))


def count_trace_crossings(trace: ConeTrace, chunk: int = 512) -> int:
    """Count transversal self-intersections of a sampled cone curve.

    Works on the developed image; strict segment-pair crossing test,
    skipping adjacent segments.
    """
    pts = trace.developed_xy()
    a = pts[:-1]
    d = pts[1:] - a
    n = len(a)
    count = 0
    for i0 in range(0, n, chunk):
        i1 = min(i0 + chunk, n)
        ai = a[i0:i1, None, :]
        di = d[i0:i1, None, :]
        aj = a[None, :, :]
        dj = d[None, :, :]
        w = aj - ai
        denom = di[..., 0] * dj[..., 1] - di[..., 1] * dj[..., 0]
        cross_wj = w[..., 0] * dj[..., 1] - w[..., 1] * dj[..., 0]
        cross_wi = w[..., 0] * di[..., 1] - w[..., 1] * di[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            ti = cross_wj / denom
            tj = cross_wi / denom
        ok = (denom != 0.0) & (ti > 0.0) & (ti < 1.0) & (tj > 0.0) & (tj < 1.0)
        # pair each segment only with strictly later, non-adjacent segments
        ok &= np.arange(n)[None, :] > np.arange(i0, i1)[:, None] + 1
        count += int(np.count_nonzero(ok))
    return count


def self_intersection_count(c: float) -> tuple[int, bool]:
    """Self-intersections of a non-collision geodesic on the cone of angle 2*pi*c.

    k = floor(1/(2c)) when 1/(2c) is not an integer. At integer 1/(2c) the
    incoming and outgoing asymptotes coincide; the geodesic then has
    1/(2c) - 1 transversal crossings plus a tangential closure at infinity,
    reported via the degenerate flag.
    """
    if c <= 0.0:
        raise DomainError("cone parameter must be positive")
    x = 1.0 / (2.0 * c)
    nearest = round(x)
    if abs(x - nearest) < 1e-12 and nearest >= 1:
        return int(nearest) - 1, True
    return int(math.floor(x)), False


def embedding_coefficient(c: float) -> float:
    """A in the rotational embedding x^2 + y^2 = A z^2 (0 < c < 1)."""
    if not (0.0 < c < 1.0):
        raise NotEmbeddableError(
            f"cones embed as surfaces of revolution only for 0 < c < 1, got c={c}"
        )
    return (1.0 - c * c) / (c * c)


def _beta(alpha: float) -> float:
    if alpha == 2.0:
        raise CylinderCaseError("alpha = 2 has no folding exponent")
    return 2.0 / (2.0 - alpha)


def jm_factor_map(alpha: float, rho, theta):
    """Radial factor (rho, theta) -> (rho^beta, theta) of the polar factorization."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise DomainError("jm_factor_map requires rho > 0")
    return rho ** _beta(alpha), np.asarray(theta, dtype=float)


def jm_factor_inverse(alpha: float, r, theta):
    """Inverse radial factor (r, theta) -> (r^c, theta) with c = 1/beta."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("jm_factor_inverse requires r > 0")
    return r ** (1.0 / _beta(alpha)), np.asarray(theta, dtype=float)


def fold_map(alpha: float, rho, psi):
    """Angular factor (rho, psi) -> (rho, beta*psi): unfold the paper cone."""
    return np.asarray(rho, dtype=float), _beta(alpha) * np.asarray(psi, dtype=float)


def maclaurin_polar(alpha: float, rho, psi):
    """Full polar transform (rho, psi) -> (rho^beta, beta*psi), i.e. Q -> Q^beta.

    Composition of the two factors: fold first, then the radial map.
    """
    rho_mid, theta = fold_map(alpha, rho, psi)
    return jm_factor_map(alpha, rho_mid, theta)


@dataclass(frozen=True)
class QuotientCone:
    """The plane modulo rotation by 2*pi/n, isometric to the cone with c = 1/n."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("quotient order must be a positive integer")

    @property
    def geometry(self) -> ConeGeometry:
        return ConeGeometry(c=1.0 / self.n)

    def cone_coordinates(self, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map orbit representatives Q to cone polar coordinates.

        Computed through the single-valued power map w = Q^n followed by
        the inverse radial factor rho = |w|^(1/n); theta = arg(w) in
        (-pi, pi] represents the angle mod 2*pi.
        """
        Q = np.asarray(Q, dtype=complex)
        w = Q**self.n
        return np.abs(w) ** (1.0 / self.n), np.angle(w)

    def push_line(self, p_star: float, psi_star: float, s: np.ndarray):
        """Push the line at distance p_star, normal angle psi_star, through
        the quotient; returns cone (rho, theta mod 2*pi) samples."""
        s = np.asarray(s, dtype=float)
        Q = np.exp(1j * psi_star) * (p_star + 1j * s)
        return self.cone_coordinates(Q)


def jm_path_length(alpha: float, points: np.ndarray) -> float:
    """Length of a polygonal path in the metric r^(-alpha) |dq|^2.

    Midpoint rule per segment; the overall coupling factor 2*mu is dropped
    (it rescales lengths without moving geodesics).
    """
    z = np.asarray(points, dtype=complex)
    mid = 0.5 * (z[1:] + z[:-1])
    return float(np.sum(np.abs(mid) ** (-0.5 * alpha) * np.abs(np.diff(z))))


def cone_path_length(c: float, rho: np.ndarray, theta: np.ndarray) -> float:
    """Length of a polygonal (rho, theta) path in d rho^2 + c^2 rho^2 d theta^2."""
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    rho_mid = 0.5 * (rho[1:] + rho[:-1])
    return float(np.sum(np.hypot(np.diff(rho), c * rho_mid * np.diff(theta))))


def cylinder_geodesics(
    mu: float,
    kind: str,
    *,
    radius: float = 1.0,
    r0: float = 1.0,
    theta0: float = 0.0,
    pitch: float = 1.0,
    t_final: float | None = None,
    n: int = 2001,
) -> PlaneCurve:
    """Zero-energy solutions of the -mu/r^2 potential, by geodesic type.

    kind = "circle": q = radius * e^{i w t} with w = sqrt(2 mu)/radius^2
    (the radius where rotation balances the inverse-cube force at E = 0).
    kind = "generator": the outgoing radial ray r^2 = r0^2 + 2 sqrt(2 mu) t.
    kind = "helix": the logarithmic spiral with d(log r)/d theta = pitch,
    carried by angular momentum J = sqrt(2 mu / (1 + pitch^2)).
    """
    if mu <= 0.0:
        raise DomainError("cylinder geodesics need an attractive coupling mu > 0")
    if kind == "circle":
        omega = math.sqrt(2.0 * mu) / radius**2
        if t_final is None:
            t_final = 2.0 * math.pi / omega
        t = np.linspace(0.0, t_final, n)
        return PlaneCurve(param=t, points=radius * np.exp(1j * (theta0 + omega * t)))
    if kind == "generator":
        if t_final is None:
            t_final = r0**2
        t = np.linspace(0.0, t_final, n)
        r = np.sqrt(r0**2 + 2.0 * math.sqrt(2.0 * mu) * t)
        return PlaneCurve(param=t, points=r * np.exp(1j * theta0))
    if kind == "helix":
        if pitch == 0.0:
            raise DomainError("helix pitch must be nonzero (use kind='circle')")
        J = math.sqrt(2.0 * mu / (1.0 + pitch**2))
        radial = abs(pitch) * J  # sqrt(2 mu - J^2)
        if t_final is None:
            t_final = r0**2
        t = np.linspace(0.0, t_final, n)
        r = np.sqrt(r0**2 + 2.0 * radial * t)
        theta = theta0 + np.log(r / r0) / pitch
        return PlaneCurve(param=t, points=r * np.exp(1j * theta))
    raise DomainError(f"unknown cylinder geodesic kind {kind!r}")
