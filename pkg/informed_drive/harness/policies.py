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
"""Scripted policies for the trajectory action space.

They drive from ground truth rather than observations, and show that the
scenarios can be solved independently of any learning.
"""

import numpy as np

from informed_drive import trajectory

_SAMPLES = 301


def _ActionFor(env, target_d):
  """Returns the index of the candidate manifold closest to target_d."""
  offsets = [manifold.d for manifold in env.CandidateManifolds()]
  return int(np.argmin([abs(offset - target_d) for offset in offsets]))


def CrossingTime(start_d, end_d, threshold, duration):
  """Returns when a lateral maneuver from rest crosses an offset.

  Args:
    start_d (float): the initial offset, in meters.
    end_d (float): the target offset, in meters.
    threshold (float): the offset to cross, in meters.
    duration (float): the maneuver duration, in seconds.

  Returns:
    float: the first time the planned offset reaches threshold, or duration
        if it never does.
  """
  poly = trajectory.SolveLateralQuintic(start_d, 0.0, 0.0, end_d, duration)
  times = np.linspace(0.0, duration, _SAMPLES)
  offsets = poly.Evaluate(times)
  if end_d >= start_d:
    crossed = offsets >= threshold
  else:
    crossed = offsets <= threshold
  if not crossed.any():
    return duration
  return float(times[int(np.argmax(crossed))])


class KeepLanePolicy(object):
  """Always targets the center of the ego lane."""

  def SelectAction(self, observation, env, epsilon=0.0):
    del observation, epsilon
    return _ActionFor(env, 0.0)


class AvoidAndReturnPolicy(object):
  """Overtakes the obstacle through the oncoming lane, then returns.

  The lane change starts once the ego would otherwise reach the obstacle
  before clearing it laterally; the return starts once the ego rear will
  have passed the obstacle front by the time it is back within reach.

  Attributes:
    margin (float): lateral and longitudinal clearance, in meters.
    anticipation (float): decision latency to account for, in seconds.
  """

  def __init__(self, margin=0.3, anticipation=0.8):
    self.margin = margin
    self.anticipation = anticipation

  def TargetOffset(self, env):
    """Returns the lateral offset the ego should aim for."""
    scenario = env.scenario
    obstacle = scenario.obstacle
    if obstacle is None:
      return 0.0
    state = env.state
    manifold = env.CandidateManifolds()[0]
    lane_width = scenario.lane_width
    half_length = env.ego_shape.length / 2.0
    clearance = (obstacle.d_center + obstacle.width / 2.0 +
                 env.ego_shape.width / 2.0 + self.margin)
    rear = obstacle.s_center - obstacle.length / 2.0
    front = obstacle.s_center + obstacle.length / 2.0
    s = state.frenet.s

    return_time = CrossingTime(
        max(state.frenet.d, clearance), 0.0, clearance, manifold.t)
    if s - half_length + state.speed * return_time >= front + self.margin:
      return 0.0

    change_time = CrossingTime(0.0, lane_width, clearance, manifold.t)
    speed = max(state.speed, manifold.v)
    reach = s + half_length + speed * (change_time + self.anticipation)
    if reach + self.margin >= rear:
      return lane_width
    return 0.0

  def SelectAction(self, observation, env, epsilon=0.0):
    del observation, epsilon
    return _ActionFor(env, self.TargetOffset(env))


SCRIPTED_POLICIES = {
    'keep_lane': KeepLanePolicy,
    'avoid_and_return': AvoidAndReturnPolicy,
}
