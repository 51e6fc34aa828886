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
"""Rule atoms and situation awareness over world states."""

import collections

from informed_drive.world import vehicle

ATOM_NO_COLLISION = 'no_collision'
ATOM_IN_LANE = 'in_lane'
ATOM_NO_OUT_ROAD = 'no_out_road'
ATOMS = (ATOM_NO_COLLISION, ATOM_IN_LANE, ATOM_NO_OUT_ROAD)

ActivationWindow = collections.namedtuple(
    'ActivationWindow', ['ahead', 'behind'])
ActivationWindow.__new__.__defaults__ = (20.0, 10.0)

EgoShape = collections.namedtuple('EgoShape', ['length', 'width'])
EgoShape.__new__.__defaults__ = (4.5, 2.0)


def EvalAtoms(state, scenario, ego_shape=EgoShape()):
  """Evaluates the rule atoms at a state.

  Args:
    state (VehicleState): the ego state, with its Frenet pose.
    scenario (Scenario): the scenario.
    ego_shape (EgoShape): the ego rectangle.

  Returns:
    dict[str, bool]: the atom assignment.
  """
  obstacle = scenario.ObstaclePolygon()
  collision = False
  if obstacle is not None:
    footprint = vehicle.Footprint(state, ego_shape.length, ego_shape.width)
    collision = footprint.intersects(obstacle)
  d = abs(state.frenet.d)
  return {
      ATOM_NO_COLLISION: not collision,
      ATOM_IN_LANE: d <= scenario.lane_width / 2.0,
      ATOM_NO_OUT_ROAD: d <= 1.5 * scenario.lane_width,
  }


def RulebookActive(state, scenario, window=ActivationWindow()):
  """Tells whether the ego approaches, or is passing, the obstacle.

  Args:
    state (VehicleState): the ego state, with its Frenet pose.
    scenario (Scenario): the scenario.
    window (ActivationWindow): distances ahead of and behind the obstacle.

  Returns:
    bool: True if the rulebook coefficients should apply.
  """
  if scenario.obstacle is None:
    return False
  gap = scenario.obstacle.s_center - state.frenet.s
  return -window.behind <= gap <= window.ahead
