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
"""Kinematic bicycle model of the ego vehicle."""

import collections
import math

import numpy as np
from shapely import affinity
from shapely import geometry as shapely_geometry

from informed_drive import geometry

VehicleState = collections.namedtuple(
    'VehicleState', ['x', 'y', 'heading', 'speed', 'frenet'])
VehicleState.__new__.__defaults__ = (None,)

Controls = collections.namedtuple('Controls', ['accel', 'steer'])

VehicleLimits = collections.namedtuple(
    'VehicleLimits',
    ['wheelbase', 'accel_min', 'accel_max', 'steer_max', 'speed_max'])
VehicleLimits.__new__.__defaults__ = (2.7, -4.0, 3.0, 0.5, 15.0)


def LimitsFromConfig(world_config):
  """Builds the vehicle limits of a world configuration section."""
  return VehicleLimits(
      wheelbase=world_config.wheelbase, accel_min=world_config.accel_min,
      accel_max=world_config.accel_max, steer_max=world_config.steer_max,
      speed_max=world_config.speed_max)


def _WrapAngle(angle):
  if -math.pi < angle <= math.pi:
    return angle
  return (angle + math.pi) % (2.0 * math.pi) - math.pi


def FrenetStateOf(path, x, y, heading, speed, yaw_rate=0.0, accel=0.0):
  """Computes the Frenet pose and rates of a vehicle.

  The lateral acceleration neglects the path curvature.

  Args:
    path (ReferencePath): the reference path.
    x (float): position, in meters.
    y (float): position, in meters.
    heading (float): heading, in radians.
    speed (float): speed, in m/s.
    yaw_rate (float): yaw rate, in rad/s.
    accel (float): longitudinal acceleration, in m/s^2.

  Returns:
    FrenetPose: the pose.

  Raises:
    GeometryError: if the vehicle is outside the corridor of the path.
  """
  s, d = geometry.CartesianToFrenet(path, (x, y))
  relative = _WrapAngle(heading - path.Heading(s))
  cosine, sine = math.cos(relative), math.sin(relative)
  return geometry.FrenetPose(
      s, d, speed * cosine, speed * sine,
      accel * sine + speed * yaw_rate * cosine)


def StepVehicle(state, controls, dt, limits, path=None):
  """Advances the vehicle by one explicit Euler step.

  Controls are clamped to the limits, and the speed to [0, speed_max].

  Args:
    state (VehicleState): the current state.
    controls (Controls): acceleration and steering angle.
    dt (float): the step, in seconds.
    limits (VehicleLimits): the actuator limits.
    path (ReferencePath): when set, the Frenet pose is refreshed.

  Returns:
    VehicleState: the new state.
  """
  accel = float(np.clip(controls.accel, limits.accel_min, limits.accel_max))
  steer = float(np.clip(controls.steer, -limits.steer_max, limits.steer_max))
  speed = state.speed
  yaw_rate = speed * math.tan(steer) / limits.wheelbase

  x = state.x + speed * math.cos(state.heading) * dt
  y = state.y + speed * math.sin(state.heading) * dt
  heading = _WrapAngle(state.heading + yaw_rate * dt)
  new_speed = min(max(speed + accel * dt, 0.0), limits.speed_max)

  frenet = None
  if path is not None:
    frenet = FrenetStateOf(
        path, x, y, heading, new_speed, yaw_rate=yaw_rate,
        accel=(new_speed - speed) / dt)
  return VehicleState(x, y, heading, new_speed, frenet)


def SteerForYawRate(yaw_rate, speed, limits, min_speed=0.1):
  """Converts a yaw rate request to a steering angle.

  Below min_speed the request can't be honored and the wheels stay straight.
  """
  if speed < min_speed:
    return 0.0
  return math.atan(yaw_rate * limits.wheelbase / speed)


def Footprint(state, length, width):
  """Returns the rectangle covered by the vehicle.

  Args:
    state (VehicleState): the vehicle state; (x, y) is the center.
    length (float): the vehicle length, in meters.
    width (float): the vehicle width, in meters.

  Returns:
    shapely.geometry.Polygon: the footprint.
  """
  footprint = shapely_geometry.box(
      -length / 2.0, -width / 2.0, length / 2.0, width / 2.0)
  footprint = affinity.rotate(
      footprint, state.heading, origin=(0.0, 0.0), use_radians=True)
  return affinity.translate(footprint, xoff=state.x, yoff=state.y)


def InitialState(path, speed):
  """Returns the ego spawn state: on the path start, aligned with it."""
  point, tangent, _ = path.Frame(0.0)
  heading = math.atan2(tangent[1], tangent[0])
  x, y = float(point[0]), float(point[1])
  return VehicleState(
      x, y, heading, float(speed),
      FrenetStateOf(path, x, y, heading, float(speed)))
