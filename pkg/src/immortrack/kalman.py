"""Constant-velocity Kalman filter over ``[x, y, z, yaw, l, w, h, vx, vy, vz]``.

Velocities are in meters per frame; the transition always advances exactly
one frame. States are plain values: every operation returns a new state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Box3D, normalize_angle

DIM_X = 10
DIM_Z = 7
# keeps predicted boxes valid if an update drives a size towards zero
MIN_SIZE = 1e-3

_F = np.eye(DIM_X)
_F[0, 7] = _F[1, 8] = _F[2, 9] = 1.0
_H = np.eye(DIM_Z, DIM_X)


def _positive_vector(values, n: int, name: str) -> tuple[float, ...]:
    vals = tuple(float(v) for v in values)
    if len(vals) != n:
        raise ValueError(f"{name} needs {n} entries, got {len(vals)}")
    if not all(math.isfinite(v) and v > 0 for v in vals):
        raise ValueError(f"{name} entries must be finite and positive: {vals}")
    return vals


@dataclass(frozen=True)
class KfConfig:
    P0_diag: tuple[float, ...] = (1, 1, 1, 1, 1, 1, 1, 10, 10, 10)
    Q_diag: tuple[float, ...] = (1, 1, 1, 0.1, 0.01, 0.01, 0.01, 0.1, 0.1, 0.1)
    R_diag: tuple[float, ...] = (1, 1, 1, 0.3, 0.1, 0.1, 0.1)

    def __post_init__(self):
        object.__setattr__(self, "P0_diag", _positive_vector(self.P0_diag, DIM_X, "P0_diag"))
        object.__setattr__(self, "Q_diag", _positive_vector(self.Q_diag, DIM_X, "Q_diag"))
        object.__setattr__(self, "R_diag", _positive_vector(self.R_diag, DIM_Z, "R_diag"))


@dataclass(frozen=True)
class KfState:
    z: np.ndarray = field(repr=False)
    P: np.ndarray = field(repr=False)

    def box(self) -> Box3D:
        """The pose part of the state as a box."""
        v = self.z[:DIM_Z].copy()
        v[4:7] = np.maximum(v[4:7], MIN_SIZE)
        return Box3D.from_array(v)

    @property
    def velocity(self) -> np.ndarray:
        return self.z[7:].copy()


def kf_init(d: Box3D, cfg: KfConfig) -> KfState:
    z = np.zeros(DIM_X)
    z[:DIM_Z] = d.to_array()
    z[3] = normalize_angle(z[3])
    return KfState(z, np.diag(np.asarray(cfg.P0_diag, dtype=float)))


def kf_predict(s: KfState, cfg: KfConfig) -> tuple[KfState, Box3D]:
    """Advance one frame. Returns the new state and the predicted box."""
    z = _F @ s.z
    z[3] = normalize_angle(z[3])
    P = _F @ s.P @ _F.T + np.diag(cfg.Q_diag)
    P = 0.5 * (P + P.T)
    out = KfState(z, P)
    return out, out.box()


def yaw_innovation(state_yaw: float, det_yaw: float) -> tuple[float, float]:
    """Wrapped yaw innovation and the (possibly flipped) detection yaw.

    A detection pointing more than 90 degrees away from the state is
    treated as a heading flip and turned around before the update.
    """
    dy = normalize_angle(det_yaw - state_yaw)
    if abs(dy) > 0.5 * math.pi:
        det_yaw = normalize_angle(det_yaw + math.pi)
        dy = normalize_angle(det_yaw - state_yaw)
    return dy, det_yaw


def kf_update(s: KfState, d: Box3D, cfg: KfConfig) -> KfState:
    innov = d.to_array() - s.z[:DIM_Z]
    innov[3], _ = yaw_innovation(s.z[3], d.yaw)

    R = np.diag(cfg.R_diag)
    PHt = s.P @ _H.T
    S = _H @ PHt + R
    K = np.linalg.solve(S, PHt.T).T
    z = s.z + K @ innov
    z[3] = normalize_angle(z[3])
    # Joseph form keeps P symmetric positive definite
    IKH = np.eye(DIM_X) - K @ _H
    P = IKH @ s.P @ IKH.T + K @ R @ K.T
    P = 0.5 * (P + P.T)
    return KfState(z, P)


def kf_coast(s: KfState, cfg: KfConfig) -> KfState:
    """Keep the prediction as the estimate (no measurement this frame)."""
    return s
