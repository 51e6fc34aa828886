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
"""Tests for the geometry module."""

import math
import unittest

from hypothesis import given
from hypothesis import strategies
import numpy as np

from informed_drive import errors
from informed_drive import geometry
from informed_drive.world import scenario as scenario_lib

# pylint: disable=missing-docstring


def _ArcPath(curvature, length=80.0, chord=0.5):
  """Builds a constant curvature path sampled every chord meters."""
  steps = int(math.ceil(length / chord))
  arcs = np.linspace(0.0, length, steps + 1)
  if curvature == 0.0:
    return geometry.BuildReferencePath(np.stack([arcs, 0 * arcs], axis=1))
  radius = 1.0 / curvature
  angles = arcs * curvature
  return geometry.BuildReferencePath(np.stack(
      [radius * np.sin(angles), radius * (1.0 - np.cos(angles))], axis=1))


class BuildReferencePathTests(unittest.TestCase):
  """Tests for BuildReferencePath()."""

  def testStraight(self):
    path = geometry.BuildReferencePath([(0.0, 0.0), (80.0, 0.0)])
    self.assertAlmostEqual(path.total_length, 80.0, places=12)
    spacing = np.diff(path.cumulative_s)
    self.assertLessEqual(spacing.max(), geometry.MAX_WAYPOINT_SPACING)
    self.assertEqual(len(path.cumulative_s), len(path.waypoints))

  def testQuarterCircle(self):
    radius = 50.0
    steps = int(math.ceil(25.0 * math.pi / 0.5))
    angles = np.linspace(0.0, math.pi / 2.0, steps + 1)
    path = geometry.BuildReferencePath(
        np.stack([radius * np.cos(angles), radius * np.sin(angles)], axis=1))
    self.assertAlmostEqual(path.total_length, 25.0 * math.pi, delta=0.01)

  def testDegenerate(self):
    with self.assertRaises(errors.GeometryError):
      geometry.BuildReferencePath([(0.0, 0.0), (0.0, 0.0)])
    with self.assertRaises(errors.GeometryError):
      geometry.BuildReferencePath([(0.0, 0.0)])
    with self.assertRaises(errors.GeometryError):
      geometry.BuildReferencePath([(0.0, 0.0), (1.0, 0.0), (1.0, 0.0)])

  def testImmutable(self):
    path = _ArcPath(0.0)
    with self.assertRaises(ValueError):
      path.waypoints[0, 0] = 1.0

  def testCurvature(self):
    self.assertAlmostEqual(_ArcPath(0.01).Curvature(40.2), 0.01, delta=1e-4)
    self.assertAlmostEqual(
        _ArcPath(-0.01).Curvature(40.2), -0.01, delta=1e-4)
    self.assertEqual(_ArcPath(0.0).Curvature(40.2), 0.0)
    path = _ArcPath(0.01)
    self.assertEqual(path.Curvature(path.total_length + 5.0), 0.0)
    self.assertGreater(path.Curvature(0.0), 0.0)


class FrenetConversionTests(unittest.TestCase):
  """Tests for CartesianToFrenet() and FrenetToCartesian()."""

  def setUp(self):
    self.straight = _ArcPath(0.0)

  def testOnPath(self):
    s, d = geometry.CartesianToFrenet(self.straight, (12.5, 0.0))
    self.assertAlmostEqual(s, 12.5, places=12)
    self.assertAlmostEqual(d, 0.0, places=12)

    point = geometry.FrenetToCartesian(self.straight, 12.5, 0.0)
    np.testing.assert_allclose(point, [12.5, 0.0], atol=1e-12)

  def testAxisAligned(self):
    s, d = geometry.CartesianToFrenet(self.straight, (10.0, 3.5))
    self.assertAlmostEqual(s, 10.0, places=12)
    self.assertAlmostEqual(d, 3.5, places=12)
    np.testing.assert_allclose(
        geometry.FrenetToCartesian(self.straight, 10.0, 3.5), [10.0, 3.5],
        atol=1e-12)

  def testLeftIsPositive(self):
    # Heading north, the left side is west.
    path = geometry.BuildReferencePath([(0.0, 0.0), (0.0, 50.0)])
    _, d = geometry.CartesianToFrenet(path, (-2.0, 10.0))
    self.assertAlmostEqual(d, 2.0, places=12)

  def testOutsideCorridor(self):
    with self.assertRaises(errors.GeometryError):
      geometry.CartesianToFrenet(self.straight, (10.0, 25.0))
    with self.assertRaises(errors.GeometryError):
      geometry.FrenetToCartesian(self.straight, 10.0, 21.0)

  def testArcLengthOutOfRange(self):
    with self.assertRaises(errors.GeometryError):
      geometry.FrenetToCartesian(self.straight, -0.5, 0.0)
    with self.assertRaises(errors.GeometryError):
      geometry.FrenetToCartesian(self.straight, 80.5, 0.0)

  def testMonotoneOnStraightPath(self):
    xs = np.linspace(0.0, 80.0, 200)
    arcs = [geometry.CartesianToFrenet(self.straight, (x, 1.3))[0] for x in xs]
    self.assertTrue(np.all(np.diff(arcs) > 0.0))

  @given(strategies.floats(min_value=0.0, max_value=80.0),
         strategies.floats(min_value=0.0, max_value=19.0))
  def testMirroredPointsNegateOffset(self, x, y):
    _, left = geometry.CartesianToFrenet(self.straight, (x, y))
    _, right = geometry.CartesianToFrenet(self.straight, (x, -y))
    self.assertEqual(left, -right)

  @given(strategies.floats(min_value=0.0, max_value=80.0),
         strategies.floats(min_value=-19.0, max_value=19.0))
  def testStraightRoundTrip(self, s, d):
    point = geometry.FrenetToCartesian(self.straight, s, d)
    back = geometry.FrenetToCartesian(
        self.straight, *geometry.CartesianToFrenet(self.straight, point))
    self.assertLess(np.hypot(*(back - point)), 1e-6)

  def _AssertRoundTrip(self, path, rng, count):
    worst = 0.0
    for _ in range(count):
      point = geometry.FrenetToCartesian(
          path, rng.uniform(0.0, path.total_length), rng.uniform(-10.0, 10.0))
      s, d = geometry.CartesianToFrenet(path, point)
      back = geometry.FrenetToCartesian(path, s, d)
      worst = max(worst, float(np.hypot(*(back - point))))
    self.assertLess(worst, 1e-6)

  def testCurvedRoundTrip(self):
    rng = np.random.default_rng(7)
    for curvature in (0.01, -0.01, 0.004):
      self._AssertRoundTrip(_ArcPath(curvature), rng, 400)

  def testBenchmarkRoundTrip(self):
    rng = np.random.default_rng(11)
    for index in range(5):
      scenario = scenario_lib.BenchmarkScenario(
          42, scenario_lib.KIND_ANOMALY, index)
      self._AssertRoundTrip(scenario.path, rng, 200)

  def testFrameIsContinuousAtVertices(self):
    path = _ArcPath(0.01)
    vertex = float(path.cumulative_s[10])
    before = geometry.FrenetToCartesian(path, vertex - 1e-9, 5.0)
    after = geometry.FrenetToCartesian(path, vertex + 1e-9, 5.0)
    self.assertLess(np.hypot(*(after - before)), 1e-6)

  def testProjectWindow(self):
    s, d, _ = self.straight.Project(
        np.array([[30.0, 1.0], [35.0, -1.0]]), s_min=20.0, s_max=40.0)
    np.testing.assert_allclose(s, [30.0, 35.0], atol=1e-9)
    np.testing.assert_allclose(d, [1.0, -1.0], atol=1e-9)

  def testProjectBehindStart(self):
    s, d, distance = self.straight.Project(np.array([[-3.0, 4.0]]))
    self.assertAlmostEqual(s[0], 0.0, places=12)
    self.assertAlmostEqual(d[0], 5.0, places=12)
    self.assertAlmostEqual(distance[0], 5.0, places=12)


if __name__ == '__main__':
  unittest.main()
