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
"""Frenet space trajectories built from terminal manifolds.

A terminal manifold fixes the velocity v and the lateral offset d that the
vehicle should reach after t seconds. The lateral motion is a quintic
polynomial with a fully constrained end state, the longitudinal motion a
velocity keeping quartic whose end position is left free.
"""

import collections

import numpy as np
from numpy.polynomial import polynomial

from informed_drive import errors
from informed_drive import geometry

TerminalManifold = collections.namedtuple('TerminalManifold', ['v', 'd', 't'])

TrajectorySample = collections.namedtuple(
    'TrajectorySample', ['time', 'frenet', 'point', 'speed', 'accel'])

# Size of the dynamic action set, in both lateral regimes.
ACTION_COUNT = 3


def ValidateManifold(manifold):
  """Checks the invariants of a terminal manifold.

  Args:
    manifold (TerminalManifold): the manifold to check.

  Raises:
    TrajectoryError: if t <= 0, v < 0 or d leaves the corridor.
  """
  if not manifold.t > 0:
    raise errors.TrajectoryError(
        'Manifold duration must be > 0, got {0!r}'.format(manifold.t))
  if manifold.v < 0:
    raise errors.TrajectoryError(
        'Manifold velocity must be >= 0, got {0!r}'.format(manifold.v))
  if abs(manifold.d) > geometry.CORRIDOR_BOUND:
    raise errors.TrajectoryError(
        'Manifold offset {0!r} is outside the corridor'.format(manifold.d))


class _Polynomial(object):
  """A polynomial in time, valid on [0, duration].

  Attributes:
    coefficients (numpy.ndarray): coefficients, lowest order first.
    duration (float): the valid duration, in seconds.
  """

  def __init__(self, coefficients, duration):
    self.coefficients = np.asarray(coefficients, dtype=np.float64)
    self.coefficients.setflags(write=False)
    self.duration = float(duration)
    self._first = polynomial.polyder(self.coefficients, 1)
    self._second = polynomial.polyder(self.coefficients, 2)

  def Evaluate(self, t):
    """Returns the value at time t."""
    return polynomial.polyval(t, self.coefficients)

  def FirstDerivative(self, t):
    """Returns the first derivative at time t."""
    return polynomial.polyval(t, self._first)

  def SecondDerivative(self, t):
    """Returns the second derivative at time t."""
    return polynomial.polyval(t, self._second)


class QuinticPoly(_Polynomial):
  """Quintic polynomial connecting two fully specified states."""


class QuarticPoly(_Polynomial):
  """Quartic polynomial reaching a velocity with zero acceleration."""


def _CheckDuration(duration):
  if not duration > 0:
    raise errors.TrajectoryError(
        'Duration must be > 0, got {0!r}'.format(duration))


def SolveLateralQuintic(d0, d0_dot, d0_ddot, d_target, duration):
  """Solves the lateral quintic with d(T)=d_target, d'(T)=0, d''(T)=0.

  Args:
    d0 (float): initial offset, in meters.
    d0_dot (float): initial lateral speed, in m/s.
    d0_ddot (float): initial lateral acceleration, in m/s^2.
    d_target (float): terminal offset, in meters.
    duration (float): the duration T, in seconds.

  Returns:
    QuinticPoly: the polynomial.

  Raises:
    TrajectoryError: if the duration is not positive.
  """
  _CheckDuration(duration)
  T = float(duration)
  c0, c1, c2 = d0, d0_dot, d0_ddot / 2.0
  matrix = np.array([
      [T**3, T**4, T**5],
      [3 * T**2, 4 * T**3, 5 * T**4],
      [6 * T, 12 * T**2, 20 * T**3]])
  rhs = np.array([
      d_target - (c0 + c1 * T + c2 * T**2),
      -(c1 + 2 * c2 * T),
      -2 * c2])
  c3, c4, c5 = np.linalg.solve(matrix, rhs)
  return QuinticPoly([c0, c1, c2, c3, c4, c5], T)


def SolveLongitudinalQuartic(s0, s0_dot, s0_ddot, v_target, duration):
  """Solves the velocity keeping quartic with s'(T)=v_target, s''(T)=0.

  Args:
    s0 (float): initial arc length, in meters.
    s0_dot (float): initial speed, in m/s.
    s0_ddot (float): initial acceleration, in m/s^2.
    v_target (float): terminal speed, in m/s.
    duration (float): the duration T, in seconds.

  Returns:
    QuarticPoly: the polynomial.

  Raises:
    TrajectoryError: if the duration is not positive or v_target < 0.
  """
  _CheckDuration(duration)
  if v_target < 0:
    raise errors.TrajectoryError(
        'Terminal velocity must be >= 0, got {0!r}'.format(v_target))
  T = float(duration)
  c0, c1, c2 = s0, s0_dot, s0_ddot / 2.0
  matrix = np.array([
      [3 * T**2, 4 * T**3],
      [6 * T, 12 * T**2]])
  rhs = np.array([
      v_target - (c1 + 2 * c2 * T),
      -2 * c2])
  c3, c4 = np.linalg.solve(matrix, rhs)
  return QuarticPoly([c0, c1, c2, c3, c4], T)


class Trajectory(object):
  """A time sampled trajectory.

  Attributes:
    samples (tuple[TrajectorySample]): the states, dt seconds apart.
    source_manifold (TerminalManifold): the manifold it was generated from.
    dt (float): the sampling step, in seconds.
    path (ReferencePath): the path the Frenet poses refer to, or None.
  """

  def __init__(self, samples, source_manifold, dt, path=None):
    """Initializes a Trajectory object.

    Args:
      samples (list[TrajectorySample]): the states.
      source_manifold (TerminalManifold): the source manifold.
      dt (float): the sampling step, in seconds.
      path (ReferencePath): the reference path, or None.

    Raises:
      ValueError: if there are no samples.
    """
    if not samples:
      raise ValueError('A trajectory needs at least one sample')
    self.samples = tuple(samples)
    self.source_manifold = source_manifold
    self.dt = float(dt)
    self.path = path
    self._points = np.array([sample.point for sample in self.samples])
    self._points.setflags(write=False)

  def __len__(self):
    return len(self.samples)

  @property
  def duration(self):
    """float: the time of the last sample, in seconds."""
    return self.samples[-1].time

  @property
  def points(self):
    """numpy.ndarray: (N, 2) Cartesian points of the samples."""
    return self._points

  def TargetAt(self, time):
    """Interpolates the trajectory at a given time.

    Times past the end return the last sample.

    Args:
      time (float): seconds since the start of the trajectory.

    Returns:
      tuple(numpy.ndarray, float, float): the target point, speed and
          acceleration.
    """
    if time <= 0.0:
      first = self.samples[0]
      return np.asarray(first.point), first.speed, first.accel
    position = time / self.dt
    index = int(np.floor(position))
    if index >= len(self.samples) - 1:
      last = self.samples[-1]
      return np.asarray(last.point), last.speed, 0.0
    ratio = position - index
    before, after = self.samples[index], self.samples[index + 1]
    point = ((1.0 - ratio) * self._points[index] +
             ratio * self._points[index + 1])
    speed = (1.0 - ratio) * before.speed + ratio * after.speed
    accel = (1.0 - ratio) * before.accel + ratio * after.accel
    return point, speed, accel

  def FrenetAt(self, time):
    """Interpolates the Frenet pose of the trajectory at a given time.

    Past the end the pose keeps the last offset and moves along the lane at
    the last longitudinal speed, so that the target never stops ahead of the
    vehicle.

    Args:
      time (float): seconds since the start of the trajectory.

    Returns:
      FrenetPose: the target pose.
    """
    if time <= 0.0:
      return self.samples[0].frenet
    position = time / self.dt
    index = int(np.floor(position))
    if index >= len(self.samples) - 1:
      last = self.samples[-1].frenet
      return geometry.FrenetPose(
          last.s + last.s_dot * max(time - self.duration, 0.0), last.d,
          last.s_dot, 0.0, 0.0)
    ratio = position - index
    before = self.samples[index].frenet
    after = self.samples[index + 1].frenet
    return geometry.FrenetPose(
        *[(1.0 - ratio) * first + ratio * second
          for first, second in zip(before, after)])


def GenerateTrajectory(current, manifold, path, dt):
  """Generates the trajectory reaching a terminal manifold.

  Sampling stops at the end of the path: the last sample is clamped to the
  path's total length.

  Args:
    current (FrenetPose): the vehicle state at generation time.
    manifold (TerminalManifold): the target end state.
    path (ReferencePath): the reference path.
    dt (float): the sampling step, in seconds.

  Returns:
    Trajectory: the trajectory.

  Raises:
    TrajectoryError: if dt or the manifold are invalid.
  """
  if not dt > 0:
    raise errors.TrajectoryError('dt must be > 0, got {0!r}'.format(dt))
  ValidateManifold(manifold)
  lateral = SolveLateralQuintic(
      current.d, current.d_dot, current.d_ddot, manifold.d, manifold.t)
  longitudinal = SolveLongitudinalQuartic(
      current.s, current.s_dot, 0.0, manifold.v, manifold.t)

  steps = int(round(manifold.t / dt))
  samples = []
  for k in range(steps + 1):
    time = k * dt
    s = float(longitudinal.Evaluate(time))
    s_dot = float(longitudinal.FirstDerivative(time))
    s_ddot = float(longitudinal.SecondDerivative(time))
    clamped = s >= path.total_length
    if clamped:
      s = path.total_length
    d = float(lateral.Evaluate(time))
    d_dot = float(lateral.FirstDerivative(time))
    d_ddot = float(lateral.SecondDerivative(time))
    pose = geometry.FrenetPose(s, d, s_dot, d_dot, d_ddot)
    point = geometry.FrenetToCartesian(path, s, d)
    samples.append(TrajectorySample(
        time=time, frenet=pose, point=(float(point[0]), float(point[1])),
        speed=float(np.hypot(s_dot, d_dot)), accel=s_ddot))
    if clamped:
      break
  return Trajectory(samples, manifold, dt, path=path)


def CandidateManifolds(current_d, lane_width, v_const, t_const):
  """Enumerates the dynamic discrete action set.

  In the own lane the offsets are listed from the own lane outward, in the
  oncoming lane from the oncoming lane back, so that action 0 always keeps
  the current lane.

  Args:
    current_d (float): the current lateral offset, in meters.
    lane_width (float): the lane width, in meters.
    v_const (float): the terminal velocity of every action, in m/s.
    t_const (float): the duration of every action, in seconds.

  Returns:
    tuple[TerminalManifold]: exactly ACTION_COUNT manifolds.
  """
  offsets = (0.0, lane_width / 2.0, lane_width)
  if current_d >= lane_width / 2.0:
    offsets = tuple(reversed(offsets))
  return tuple(TerminalManifold(v_const, d, t_const) for d in offsets)
