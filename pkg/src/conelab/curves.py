"""Sampled plane curves and trace-comparison helpers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError

__all__ = ["PlaneCurve", "polyline_hausdorff", "best_fit_rotation"]


@dataclass(frozen=True)
class PlaneCurve:
    """A plane curve sampled against a strictly increasing parameter.

    Points are stored as complex numbers x + iy; the parameter is either
    Newtonian time t or folding-plane time tau depending on provenance.
    """

    param: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "param", np.asarray(self.param, dtype=float))
        object.__setattr__(self, "points", np.asarray(self.points, dtype=complex))
        if self.param.shape != self.points.shape or self.param.ndim != 1:
            raise DomainError("param and points must be 1-d arrays of equal length")
        if len(self.param) < 2:
            raise DomainError("a curve needs at least two samples")
        if np.any(np.diff(self.param) <= 0.0):
            raise DomainError("curve parameter must be strictly increasing")

    def __len__(self) -> int:
        return len(self.param)

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.points.real, self.points.imag])

    def radii(self) -> np.ndarray:
        return np.abs(self.points)


def _directed_polyline_distance(pts: np.ndarray, poly: np.ndarray) -> float:
    """Max over pts of the distance to the polyline through poly vertices.

    Nearest segments are short-listed with a KD-tree on the vertices, then
    measured exactly by projection; correct as long as segment lengths are
    small against feature scales, which dense sampling guarantees.
    """
    tree = cKDTree(poly)
    _, nearest = tree.query(pts, k=1)
    a = poly[:-1]
    seg = poly[1:] - a
    seg_len2 = np.einsum("ij,ij->i", seg, seg)
    seg_len2[seg_len2 == 0.0] = 1.0

    best = np.full(len(pts), np.inf)
    n_seg = len(a)
    for offset in (-2, -1, 0, 1):
        idx = np.clip(nearest + offset, 0, n_seg - 1)
        d = pts - a[idx]
        tproj = np.clip(np.einsum("ij,ij->i", d, seg[idx]) / seg_len2[idx], 0.0, 1.0)
        foot = a[idx] + tproj[:, None] * seg[idx]
        best = np.minimum(best, np.hypot(*(pts - foot).T))
    return float(best.max())


def polyline_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two densely sampled polylines.

    Inputs are (n, 2) vertex arrays ordered along each curve.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return max(_directed_polyline_distance(a, b), _directed_polyline_distance(b, a))


def best_fit_rotation(z: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    """Fit w ~ e^{i phi} z; return (phi, max residual |w - e^{i phi} z|)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    inner = np.vdot(z, w)  # sum conj(z) * w
    if inner == 0.0:
        raise DomainError("curves are orthogonal; no rotation fit")
    phi = float(np.angle(inner))
    resid = float(np.max(np.abs(w - np.exp(1j * phi) * z)))
    return phi, resid
