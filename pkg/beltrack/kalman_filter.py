# Software License Agreement (BSD License)
#
# Copyright (c) 2026, beltrack contributors
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without
# modification, are permitted provided that the following conditions
# are met:
#
#  * Redistributions of source code must retain the above copyright
#    notice, this list of conditions and the following disclaimer.
#  * Redistributions in binary form must reproduce the above
#    copyright notice, this list of conditions and the following
#    disclaimer in the documentation and/or other materials provided
#    with the distribution.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS
# "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT
# LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS
# FOR A PARTICULAR PURPOSE ARE DISCLAIMED.

"""
Constant-velocity Kalman filter over (cx, cy, a, h) box coordinates.

The state is the 8-vector (cx, cy, a, h, vcx, vcy, va, vh): box center,
aspect ratio w/h, height and their per-frame velocities. Process and
measurement noise are proportional to the current box height.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import BeltrackError, BoundingBox

NDIM = 4

_motion_mat = np.eye(2 * NDIM)
for _i in range(NDIM):
    _motion_mat[_i, NDIM + _i] = 1.0
_update_mat = np.eye(NDIM, 2 * NDIM)

# aspect ratio is dimensionless, so its noise is not scaled by h
_ASPECT_STD_POSITION = 1e-2
_ASPECT_STD_VELOCITY = 1e-5
_ASPECT_STD_MEASUREMENT = 1e-1


class FilterDivergence(BeltrackError):
    pass


@dataclass(frozen=True)
class KalmanConfig:
    std_weight_position: float = 1.0 / 20
    std_weight_velocity: float = 1.0 / 160
    std_weight_measurement: float = 1.0 / 20
    init_position_factor: float = 1.0
    init_velocity_factor: float = 1.0

    def __post_init__(self):
        for name in ('std_weight_position', 'std_weight_velocity',
                     'std_weight_measurement', 'init_position_factor',
                     'init_velocity_factor'):
            if not getattr(self, name) > 0:
                raise ValueError("kalman %s must be positive" % name)


DEFAULT_KALMAN_CONFIG = KalmanConfig()
# wider start-up uncertainty, so velocity locks on within a few frames
INFLATED_INIT_KALMAN_CONFIG = KalmanConfig(init_position_factor=2.0, init_velocity_factor=10.0)


@dataclass(frozen=True, eq=False)
class KalmanState:
    mean: np.ndarray
    covariance: np.ndarray

    @property
    def height(self) -> float:
        return float(self.mean[3])


def box_to_xyah(box: BoundingBox) -> np.ndarray:
    return np.array([box.x + box.w / 2.0, box.y + box.h / 2.0,
                     box.w / box.h, box.h], dtype=float)


def _symmetrize(p):
    return (p + p.T) / 2.0


def kf_initiate(box: BoundingBox, config: KalmanConfig = DEFAULT_KALMAN_CONFIG) -> KalmanState:
    """
    Start a track state at ``box`` with zero velocity.
    """
    measurement = box_to_xyah(box)
    mean = np.r_[measurement, np.zeros(NDIM)]
    h = measurement[3]
    pos = config.init_position_factor * config.std_weight_position * h
    vel = config.init_velocity_factor * config.std_weight_velocity * h
    std = [pos, pos, _ASPECT_STD_POSITION, pos,
           vel, vel, _ASPECT_STD_VELOCITY, vel]
    return KalmanState(mean, np.diag(np.square(std)))


def kf_predict(state: KalmanState, config: KalmanConfig = DEFAULT_KALMAN_CONFIG) -> KalmanState:
    h = state.mean[3]
    std_pos = config.std_weight_position * h
    std_vel = config.std_weight_velocity * h
    motion_cov = np.diag(np.square([
        std_pos, std_pos, _ASPECT_STD_POSITION, std_pos,
        std_vel, std_vel, _ASPECT_STD_VELOCITY, std_vel]))

    mean = _motion_mat.dot(state.mean)
    covariance = np.linalg.multi_dot((_motion_mat, state.covariance, _motion_mat.T)) + motion_cov
    return KalmanState(mean, _symmetrize(covariance))


def kf_update(state: KalmanState, observed: BoundingBox,
              config: KalmanConfig = DEFAULT_KALMAN_CONFIG) -> KalmanState:
    """
    Correct ``state`` with an observed box.

    The covariance is updated in Joseph form and symmetrized, so it stays
    positive semi-definite over long streams.
    """
    h = state.mean[3]
    std = config.std_weight_measurement * h
    innovation_cov = np.diag(np.square([std, std, _ASPECT_STD_MEASUREMENT, std]))

    projected_mean = _update_mat.dot(state.mean)
    projected_cov = np.linalg.multi_dot((_update_mat, state.covariance, _update_mat.T)) + innovation_cov

    chol_factor, lower = scipy.linalg.cho_factor(projected_cov, lower=True, check_finite=False)
    kalman_gain = scipy.linalg.cho_solve(
        (chol_factor, lower), np.dot(state.covariance, _update_mat.T).T,
        check_finite=False).T
    innovation = box_to_xyah(observed) - projected_mean

    new_mean = state.mean + kalman_gain.dot(innovation)
    i_kh = np.eye(2 * NDIM) - kalman_gain.dot(_update_mat)
    new_covariance = (np.linalg.multi_dot((i_kh, state.covariance, i_kh.T)) +
                      np.linalg.multi_dot((kalman_gain, innovation_cov, kalman_gain.T)))
    return KalmanState(new_mean, _symmetrize(new_covariance))


def state_to_box(state: KalmanState) -> BoundingBox:
    """
    :raises: :exc:`FilterDivergence` if the aspect ratio or height is not
      positive
    """
    cx, cy, a, h = (float(v) for v in state.mean[:NDIM])
    if not (np.isfinite(a) and np.isfinite(h)) or a <= 0 or h <= 0:
        raise FilterDivergence("state has aspect %r and height %r" % (a, h))
    w = a * h
    return BoundingBox(cx - w / 2.0, cy - h / 2.0, w, h)
