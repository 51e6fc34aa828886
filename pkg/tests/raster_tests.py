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
"""Tests for the raster module."""

import unittest

import numpy as np

from informed_drive import geometry
from informed_drive import trajectory as trajectory_lib
from informed_drive.world import raster
from informed_drive.world import scenario as scenario_lib
from informed_drive.world import vehicle

# pylint: disable=missing-docstring


def _StraightScenario(obstacle=None):
  kind = scenario_lib.KIND_NORMAL
  if obstacle is not None:
    kind = scenario_lib.KIND_ANOMALY
  waypoints = geometry.BuildReferencePath(
      [(0.0, 0.0), (80.0, 0.0)]).waypoints
  return scenario_lib.Scenario(
      0, kind, 0, waypoints, 3.5, obstacle, scenario_lib.Goal(78.0, 0.0))


def _StateAt(path, s, d, speed=5.0):
  x, y = geometry.FrenetToCartesian(path, s, d)
  heading = path.Heading(s)
  return vehicle.VehicleState(
      float(x), float(y), heading, speed,
      vehicle.FrenetStateOf(path, x, y, heading, speed))


class RenderObservationTests(unittest.TestCase):
  """Tests for RenderObservation()."""

  def testShape(self):
    scenario = _StraightScenario()
    grid = raster.RenderObservation(
        _StateAt(scenario.path, 20.0, 0.0), scenario)
    self.assertEqual(
        grid.channels.shape,
        (raster.CHANNEL_COUNT, raster.GRID_SIZE, raster.GRID_SIZE))
    self.assertEqual(grid.channels.dtype, np.float32)
    self.assertEqual(grid.resolution, 0.5)
    self.assertTrue(np.all(np.isin(grid.channels, (0.0, 1.0))))

  def testRoadBand(self):
    scenario = _StraightScenario()
    # A quarter cell off center keeps the band edges off the cell centers.
    grid = raster.RenderObservation(
        _StateAt(scenario.path, 20.0, 0.25), scenario)
    road = grid.channels[raster.CHANNEL_ROAD]
    band = int(2 * scenario.lane_width / raster.RESOLUTION)
    self.assertEqual(band, 14)
    np.testing.assert_array_equal(road.sum(axis=1), np.full(64, band))
    # Column 0 is the left side: the oncoming lane sits left of the ego.
    self.assertTrue(np.all(road[:, 22:36] == 1.0))

  def testRoadEndsAtPathStart(self):
    scenario = _StraightScenario()
    grid = raster.RenderObservation(
        _StateAt(scenario.path, 2.0, 0.25), scenario)
    road = grid.channels[raster.CHANNEL_ROAD]
    self.assertEqual(road[-1].sum(), 0.0)
    self.assertEqual(road[0].sum(), 14.0)

  def testNoObstacle(self):
    scenario = _StraightScenario()
    grid = raster.RenderObservation(
        _StateAt(scenario.path, 20.0, 0.0), scenario)
    self.assertEqual(grid.channels[raster.CHANNEL_OBSTACLE].sum(), 0.0)

  def testObstacle(self):
    scenario = _StraightScenario(scenario_lib.Obstacle(30.0, 4.0, 2.5))
    grid = raster.RenderObservation(
        _StateAt(scenario.path, 20.0, 0.0), scenario)
    obstacle = grid.channels[raster.CHANNEL_OBSTACLE]
    rows, columns = np.nonzero(obstacle)
    self.assertAlmostEqual(len(rows), 40, delta=8)
    # 10m ahead of an ego sitting on row 48.
    self.assertTrue(np.all(rows < 48 - 2 * 7))
    self.assertTrue(np.all(np.abs(columns + 0.5 - 32) <= 2.5 / 2 / 0.5))

  def testEgo(self):
    scenario = _StraightScenario()
    state = _StateAt(scenario.path, 20.0, 0.0)
    ego = raster.RenderObservation(state, scenario).channels[
        raster.CHANNEL_EGO]
    self.assertEqual(ego.sum(), 40.0)

    planned = trajectory_lib.GenerateTrajectory(
        state.frenet, trajectory_lib.TerminalManifold(8.0, 3.5, 3.0),
        scenario.path, 0.1)
    with_plan = raster.RenderObservation(
        state, scenario, planned=planned).channels[raster.CHANNEL_EGO]
    self.assertGreater(with_plan.sum(), ego.sum())
    self.assertTrue(np.all(with_plan >= ego))
    # The plan ends in the oncoming lane, left of the ego.
    self.assertGreater(with_plan[:, :26].sum(), 0.0)

  def testDeterministic(self):
    scenario = scenario_lib.GenerateScenario(17, scenario_lib.KIND_ANOMALY)
    state = vehicle.InitialState(scenario.path, 5.0)
    first = raster.RenderObservation(state, scenario)
    second = raster.RenderObservation(state, scenario)
    np.testing.assert_array_equal(first.channels, second.channels)


if __name__ == '__main__':
  unittest.main()
