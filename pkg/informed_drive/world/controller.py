# -*- coding: utf-8 -*-
# Copyright 2024 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""PID tracking of planned trajectories.

The longitudinal loop follows the target speed with the target acceleration
as feed forward. The lateral loop works in the Frenet frame: it compares the
trajectory offset at the lookahead time with the offset the vehicle would
reach by then at its current lateral speed, and damps on the measured
lateral speed. The road curvature is fed forward as a steering angle.
"""

import collections
import logging
import math

from informed_drive.world import vehicle

PidGains = collections.namedtuple('PidGains', ['kp', 'ki', 'kd'])

TrackerGains = collections.namedtuple(
    'TrackerGains', ['longitudinal', 'lateral', 'lookahead'])
TrackerGains.__new__.__defaults__ = (0.5,)

DEFAULT_GAINS = TrackerGains(
    longitudinal=PidGains(1.2, 0.05, 0.01), lateral=PidGains(0.4, 0.0, 0.15),
    lookahead=0.5)


def GainsFromConfig(controller_config):
  """Builds tracker gains from a controller configuration section."""
  return TrackerGains(
      longitudinal=PidGains(
          controller_config.longitudinal_kp, controller_config.longitudinal_ki,
          controller_config.longitudinal_kd),
      lateral=PidGains(
          controller_config.lateral_kp, controller_config.lateral_ki,
          controller_config.lateral_kd),
      lookahead=controller_config.lookahead)


class PidController(object):
  """A discrete PID loop.

  Without a measured derivative, the derivative term differentiates the error
  and is zero on the first update after a reset. With output limits, the
  integral stops accumulating while the output is saturated in the direction
  of the error.
  """

  def __init__(self, gains, output_limits=None):
    """Initializes a PidController object.

    Args:
      gains (PidGains): the gains.
      output_limits (tuple(float, float)): the (low, high) output range, or
          None for an unbounded output.

    Raises:
      ValueError: if the limits are empty.
    """
    if output_limits is not None and not output_limits[0] < output_limits[1]:
      raise ValueError('Empty output range {0!r}'.format(output_limits))
    self.gains = gains
    self.output_limits = output_limits
    self._integral = 0.0
    self._previous_error = None

  def Reset(self):
    """Clears the integral and derivative memory."""
    self._integral = 0.0
    self._previous_error = None

  def Update(self, error, dt, derivative=None, feedforward=0.0):
    """Feeds an error sample and returns the control output.

    Args:
      error (float): the current error.
      dt (float): the time since the previous sample, in seconds.
      derivative (float): the measured rate of the error, or None to
          differentiate the error samples.
      feedforward (float): added to the output.

    Returns:
      float: the output, within the output limits if any.
    """
    if derivative is None:
      derivative = 0.0
      if self._previous_error is not None and dt > 0:
        derivative = (error - self._previous_error) / dt
    self._previous_error = error

    integral = self._integral + error * dt
    output = (feedforward + self.gains.kp * error +
              self.gains.ki * integral + self.gains.kd * derivative)
    if self.output_limits is None:
      self._integral = integral
      return output

    low, high = self.output_limits
    winding_up = (output > high and error > 0) or (output < low and error < 0)
    if winding_up:
      output -= self.gains.ki * (integral - self._integral)
    else:
      self._integral = integral
    return min(max(output, low), high)


class TrajectoryTracker(object):
  """Longitudinal and lateral PID loops tracking one trajectory at a time."""

  def __init__(self, gains=DEFAULT_GAINS, limits=vehicle.VehicleLimits()):
    """Initializes a TrajectoryTracker object.

    Args:
      gains (TrackerGains): the loop gains and lookahead.
      limits (VehicleLimits): the actuator limits the loops saturate at.
    """
    self.gains = gains
    self.limits = limits
    self._longitudinal = PidController(
        gains.longitudinal, output_limits=(limits.accel_min, limits.accel_max))
    self._lateral = PidController(
        gains.lateral, output_limits=(-limits.steer_max, limits.steer_max))
    self._logger = logging.getLogger(self.__class__.__name__)

  def Reset(self):
    """Resets both loops, eg: when a new trajectory is adopted."""
    self._longitudinal.Reset()
    self._lateral.Reset()

  def _CurvatureSteer(self, trajectory, frenet):
    """Returns the steering angle that keeps the vehicle on its lane."""
    if trajectory.path is None:
      return 0.0
    curvature = trajectory.path.Curvature(frenet.s)
    return math.atan(self.limits.wheelbase * curvature /
                     max(1.0 - curvature * frenet.d, 0.1))

  def Track(self, state, trajectory, elapsed, dt):
    """Computes the controls for the next step.

    Args:
      state (VehicleState): the vehicle state, with its Frenet pose.
      trajectory (Trajectory): the trajectory being followed.
      elapsed (float): seconds since the trajectory started.
      dt (float): the control period, in seconds.

    Returns:
      Controls: acceleration and steering angle, within the limits.

    Raises:
      ValueError: if the state has no Frenet pose.
    """
    frenet = state.frenet
    if frenet is None:
      raise ValueError('Tracking needs the Frenet pose of the vehicle')
    _, target_speed, target_accel = trajectory.TargetAt(elapsed)
    accel = self._longitudinal.Update(
        target_speed - state.speed, dt, feedforward=target_accel)

    lookahead = self.gains.lookahead
    target = trajectory.FrenetAt(elapsed)
    ahead = trajectory.FrenetAt(elapsed + lookahead)
    cross_track = ahead.d - (frenet.d + lookahead * frenet.d_dot)
    steer = self._lateral.Update(
        cross_track, dt, derivative=target.d_dot - frenet.d_dot,
        feedforward=self._CurvatureSteer(trajectory, frenet))
    return vehicle.Controls(float(accel), float(steer))


def PidTrack(state, trajectory, dt, gains=DEFAULT_GAINS, elapsed=0.0,
             limits=vehicle.VehicleLimits()):
  """Computes the controls of a fresh tracker for one step.

  Args:
    state (VehicleState): the vehicle state.
    trajectory (Trajectory): the trajectory.
    dt (float): the control period, in seconds.
    gains (TrackerGains): the loop gains.
    elapsed (float): seconds since the trajectory started.
    limits (VehicleLimits): the actuator limits.

  Returns:
    Controls: acceleration and steering angle.
  """
  return TrajectoryTracker(gains, limits).Track(state, trajectory, elapsed, dt)
