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
"""Tests for the scenario module."""

import json
import os
import shutil
import tempfile
import unittest

from informed_drive import errors
from informed_drive.world import scenario as scenario_lib

# pylint: disable=missing-docstring


class GenerateScenarioTests(unittest.TestCase):
  """Tests for GenerateScenario()."""

  def testDeterministic(self):
    first = scenario_lib.GenerateScenario(123, scenario_lib.KIND_ANOMALY)
    second = scenario_lib.GenerateScenario(123, scenario_lib.KIND_ANOMALY)
    self.assertEqual(first, second)
    self.assertEqual(
        json.dumps(scenario_lib.ScenarioToDict(first), sort_keys=True),
        json.dumps(scenario_lib.ScenarioToDict(second), sort_keys=True))

  def testNormalHasNoObstacle(self):
    normal = scenario_lib.GenerateScenario(7, scenario_lib.KIND_NORMAL)
    self.assertIsNone(normal.obstacle)
    self.assertIsNone(normal.ObstaclePolygon())

  def testKindsShareTheRoad(self):
    normal = scenario_lib.GenerateScenario(7, scenario_lib.KIND_NORMAL)
    anomaly = scenario_lib.GenerateScenario(7, scenario_lib.KIND_ANOMALY)
    self.assertEqual(
        normal.path.waypoints.tolist(), anomaly.path.waypoints.tolist())
    self.assertEqual(normal.goal, anomaly.goal)

  def testAnomalyRanges(self):
    for index in range(1000):
      scenario = scenario_lib.BenchmarkScenario(
          42, scenario_lib.KIND_ANOMALY, index)
      obstacle = scenario.obstacle
      self.assertGreaterEqual(obstacle.s_center, 15.0)
      self.assertLessEqual(obstacle.s_center, 60.0)
      self.assertGreaterEqual(obstacle.length, 2.0)
      self.assertLessEqual(obstacle.length, 5.0)
      self.assertLessEqual(obstacle.width, scenario.lane_width)
      self.assertEqual(obstacle.d_center, 0.0)
      self.assertAlmostEqual(scenario.path.total_length, 80.0, delta=0.01)
      self.assertEqual(scenario.scenario_id, index)

  def testGoal(self):
    scenario = scenario_lib.GenerateScenario(3, scenario_lib.KIND_NORMAL)
    self.assertAlmostEqual(
        scenario.goal.s_target,
        scenario.path.total_length - scenario_lib.GOAL_MARGIN, places=6)
    self.assertEqual(scenario.goal.d_target, 0.0)

  def testObstaclePolygonArea(self):
    scenario = scenario_lib.GenerateScenario(11, scenario_lib.KIND_ANOMALY)
    obstacle = scenario.obstacle
    self.assertAlmostEqual(
        scenario.ObstaclePolygon().area, obstacle.length * obstacle.width,
        places=6)

  def testPathLength(self):
    longer = scenario_lib.GenerateScenario(
        8, scenario_lib.KIND_ANOMALY, path_length=100.0)
    default = scenario_lib.GenerateScenario(8, scenario_lib.KIND_ANOMALY)
    self.assertAlmostEqual(longer.path.total_length, 100.0, delta=0.01)
    self.assertAlmostEqual(longer.goal.s_target, 98.0, delta=0.01)
    self.assertEqual(longer.obstacle, default.obstacle)
    with self.assertRaises(errors.ScenarioError):
      scenario_lib.GenerateScenario(
          8, scenario_lib.KIND_NORMAL, path_length=60.0)

  def testUnknownKind(self):
    with self.assertRaises(errors.ScenarioError):
      scenario_lib.GenerateScenario(0, 'blocked')

  def testInconsistentObstacle(self):
    normal = scenario_lib.GenerateScenario(5, scenario_lib.KIND_NORMAL)
    with self.assertRaises(errors.ScenarioError):
      scenario_lib.Scenario(
          0, scenario_lib.KIND_NORMAL, 5, normal.path.waypoints, 3.5,
          scenario_lib.Obstacle(30.0, 3.0, 2.0), normal.goal)

  def testShortPath(self):
    with self.assertRaises(errors.ScenarioError):
      scenario_lib.Scenario(
          0, scenario_lib.KIND_NORMAL, 0, [(0.0, 0.0), (40.0, 0.0)], 3.5,
          None, scenario_lib.Goal(30.0, 0.0))


class ScenarioFileTests(unittest.TestCase):
  """Tests for saving and loading scenarios."""

  def setUp(self):
    self.temp_directory = tempfile.mkdtemp()

  def tearDown(self):
    shutil.rmtree(self.temp_directory)

  def testSaveLoad(self):
    scenario = scenario_lib.GenerateScenario(
        99, scenario_lib.KIND_ANOMALY, scenario_id=4)
    path = os.path.join(self.temp_directory, 'one', 'scenario.json')
    scenario_lib.SaveScenario(scenario, path)
    loaded = scenario_lib.LoadScenario(path)
    self.assertEqual(scenario, loaded)
    self.assertEqual(repr(loaded), 'Scenario(anomaly #4, seed=99)')

  def testMissingFile(self):
    with self.assertRaises(errors.ScenarioError):
      scenario_lib.LoadScenario(os.path.join(self.temp_directory, 'nope'))

  def testBadVersion(self):
    document = scenario_lib.ScenarioToDict(
        scenario_lib.GenerateScenario(1, scenario_lib.KIND_NORMAL))
    document['format_version'] = 99
    path = os.path.join(self.temp_directory, 'bad.json')
    with open(path, 'w') as scenario_file:
      json.dump(document, scenario_file)
    with self.assertRaisesRegex(errors.ScenarioError, 'version'):
      scenario_lib.LoadScenario(path)

  def testMalformed(self):
    path = os.path.join(self.temp_directory, 'bad.json')
    with open(path, 'w') as scenario_file:
      scenario_file.write('{"format_version": 1}')
    with self.assertRaises(errors.ScenarioError):
      scenario_lib.LoadScenario(path)

  def testWriteBenchmarkIsReproducible(self):
    counts = {scenario_lib.KIND_NORMAL: 2, scenario_lib.KIND_ANOMALY: 3}
    first_root = os.path.join(self.temp_directory, 'first')
    second_root = os.path.join(self.temp_directory, 'second')
    written = scenario_lib.WriteBenchmark(first_root, 42, counts)
    scenario_lib.WriteBenchmark(second_root, 42, counts)
    self.assertEqual(len(written), 5)
    for path in written:
      relative = os.path.relpath(path, first_root)
      with open(path, 'rb') as first, open(
          os.path.join(second_root, relative), 'rb') as second:
        self.assertEqual(first.read(), second.read())

  def testLoadBenchmarkScenario(self):
    scenario_lib.WriteBenchmark(
        self.temp_directory, 42, {scenario_lib.KIND_ANOMALY: 1})
    from_disk = scenario_lib.LoadBenchmarkScenario(
        self.temp_directory, 42, scenario_lib.KIND_ANOMALY, 0)
    generated = scenario_lib.LoadBenchmarkScenario(
        None, 42, scenario_lib.KIND_ANOMALY, 0)
    missing = scenario_lib.LoadBenchmarkScenario(
        self.temp_directory, 42, scenario_lib.KIND_ANOMALY, 1)
    self.assertEqual(from_disk, generated)
    self.assertEqual(
        missing, scenario_lib.BenchmarkScenario(
            42, scenario_lib.KIND_ANOMALY, 1))

  def testSeedsDifferPerKind(self):
    self.assertNotEqual(
        scenario_lib.ScenarioSeed(42, scenario_lib.KIND_NORMAL, 0),
        scenario_lib.ScenarioSeed(42, scenario_lib.KIND_ANOMALY, 0))


if __name__ == '__main__':
  unittest.main()
