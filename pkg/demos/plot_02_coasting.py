"""
Coasting through a detection gap
================================

A constant-velocity Kalman filter locks onto a vehicle moving at 1 m per
frame, then loses it for 30 frames. While coasting the state only moves
along the predicted line and the covariance grows; when the vehicle shows
up again the prediction is still on top of it.
"""

import numpy as np

from immortrack.geometry import Box3D, iou3d
from immortrack.kalman import KfConfig, kf_coast, kf_init, kf_predict, kf_update

cfg = KfConfig()
truth = lambda t: Box3D(1.0 * t, 0.2 * t, 0.8, np.arctan2(0.2, 1.0), 4.5, 1.9, 1.6)

s = kf_init(truth(0), cfg)
for t in range(1, 61):
    s, pred = kf_predict(s, cfg)
    seen = not 11 <= t <= 40
    if seen:
        s = kf_update(s, truth(t), cfg)
    else:
        s = kf_coast(s, cfg)
    if t in (1, 5, 10, 11, 20, 30, 40, 41, 45, 60):
        print("frame %2d %-8s pred err %.3f m  iou %.3f  pos var %.2f"
              % (t, "seen" if seen else "coasting", np.hypot(pred.x - t, pred.y - 0.2 * t),
                 iou3d(pred, truth(t)), s.P[0, 0]))
