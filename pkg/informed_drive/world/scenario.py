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
"""Scenario generation and the on disk benchmark.

A scenario is a two lane road along a reference path, an optional static
obstacle blocking the ego lane, and a goal. Scenarios are pure functions of
their seed, and are stored as JSON documents under
<root>/<kind>/<NNNN>.json.
"""

import collections
import json
import math
import os

import numpy as np
from shapely import affinity
from shapely import geometry as shapely_geometry

from informed_drive import errors
from informed_drive import geometry
from informed_drive import seeding

SCENARIO_FORMAT_VERSION = 1

KIND_NORMAL = 'normal'
KIND_ANOMALY = 'anomaly'
KINDS = (KIND_NORMAL, KIND_ANOMALY)

# Minimum length of every generated road, in meters.
PATH_LENGTH = 80.0
MAX_CURVATURE = 1.0 / 100.0
CHORD_LENGTH = 0.5
GOAL_MARGIN = 2.0

OBSTACLE_S_RANGE = (15.0, 60.0)
OBSTACLE_LENGTH_RANGE = (2.0, 5.0)
# Obstacle width as a fraction of the lane width.
OBSTACLE_WIDTH_RANGE = (0.6, 1.0)

Obstacle = collections.namedtuple(
    'Obstacle', ['s_center', 'length', 'width', 'd_center'])
Obstacle.__new__.__defaults__ = (0.0,)

Goal = collections.namedtuple('Goal', ['s_target', 'd_target'])


class Scenario(object):
  """A generated driving scenario.

  Attributes:
    scenario_id (int): the index of the scenario in its split.
    kind (str): KIND_NORMAL or KIND_ANOMALY.
    seed (int): the seed it was generated from.
    path (ReferencePath): the center line of the ego lane.
    lane_width (float): the lane width, in meters.
    obstacle (Obstacle): the blocking obstacle, or None.
    goal (Goal): the goal.
  """

  def __init__(
      self, scenario_id, kind, seed, waypoints, lane_width, obstacle, goal):
    """Initializes a Scenario object.

    Args:
      scenario_id (int): the index of the scenario.
      kind (str): the scenario kind.
      seed (int): the generation seed.
      waypoints (numpy.ndarray): (N, 2) dense waypoints of the path.
      lane_width (float): the lane width, in meters.
      obstacle (Obstacle): the obstacle, or None.
      goal (Goal): the goal.

    Raises:
      ScenarioError: if the scenario is inconsistent.
    """
    if kind not in KINDS:
      raise errors.ScenarioError('Unknown scenario kind {0!r}'.format(kind))
    if (kind == KIND_ANOMALY) != (obstacle is not None):
      raise errors.ScenarioError(
          'Anomaly scenarios, and only those, have an obstacle')
    self.scenario_id = scenario_id
    self.kind = kind
    self.seed = seed
    self.path = geometry.ReferencePath(waypoints)
    self.lane_width = float(lane_width)
    self.obstacle = obstacle
    self.goal = goal
    self._obstacle_polygon = None
    if self.path.total_length < PATH_LENGTH - 1e-6:
      raise errors.ScenarioError(
          'Path is {0:.3f}m long, needs {1:.1f}m'.format(
              self.path.total_length, PATH_LENGTH))
    if not 0.0 < goal.s_target <= self.path.total_length:
      raise errors.ScenarioError(
          'Goal s_target {0!r} is not on the path'.format(goal.s_target))

  def __eq__(self, other):
    if not isinstance(other, Scenario):
      return NotImplemented
    return ScenarioToDict(self) == ScenarioToDict(other)

  def __ne__(self, other):
    result = self.__eq__(other)
    return result if result is NotImplemented else not result

  def __repr__(self):
    return 'Scenario({0:s} #{1:d}, seed={2:d})'.format(
        self.kind, self.scenario_id, self.seed)

  def ObstaclePolygon(self):
    """Returns the obstacle footprint as a polygon, or None."""
    if self.obstacle is None:
      return None
    if self._obstacle_polygon is None:
      obstacle = self.obstacle
      center = geometry.FrenetToCartesian(
          self.path, obstacle.s_center, obstacle.d_center)
      footprint = shapely_geometry.box(
          -obstacle.length / 2.0, -obstacle.width / 2.0,
          obstacle.length / 2.0, obstacle.width / 2.0)
      footprint = affinity.rotate(
          footprint, self.path.Heading(obstacle.s_center), origin=(0.0, 0.0),
          use_radians=True)
      self._obstacle_polygon = affinity.translate(
          footprint, xoff=float(center[0]), yoff=float(center[1]))
    return self._obstacle_polygon


def _ArcWaypoints(curvature, length):
  """Samples a circular arc, or a line, starting at the origin along +x.

  Arc waypoints are CHORD_LENGTH apart, so that the polyline length equals
  the requested length.
  """
  count = int(math.ceil(length / CHORD_LENGTH))
  chord = length / count
  if curvature == 0.0:
    return np.array([[0.0, 0.0], [length, 0.0]])
  # A chord of length c spans an angle of 2 * asin(c * kappa / 2).
  step = math.copysign(2.0 * math.asin(chord * abs(curvature) / 2.0),
                       curvature)
  points = [(0.0, 0.0)]
  heading = 0.0
  for _ in range(count):
    x, y = points[-1]
    middle = heading + step / 2.0
    points.append((x + chord * math.cos(middle), y + chord * math.sin(middle)))
    heading += step
  return np.array(points)


def GenerateScenario(seed, kind, scenario_id=0, lane_width=3.5,
                     path_length=PATH_LENGTH):
  """Generates a scenario.

  The same seed gives the same road for both kinds; anomaly scenarios add a
  static obstacle centered in the ego lane.

  Args:
    seed (int): the generation seed.
    kind (str): KIND_NORMAL or KIND_ANOMALY.
    scenario_id (int): the index of the scenario in its split.
    lane_width (float): the lane width, in meters.
    path_length (float): the length of the road, at least PATH_LENGTH.

  Returns:
    Scenario: the scenario.

  Raises:
    ScenarioError: if the kind is unknown or the road too short.
  """
  if kind not in KINDS:
    raise errors.ScenarioError('Unknown scenario kind {0!r}'.format(kind))
  if path_length < PATH_LENGTH:
    raise errors.ScenarioError(
        'Roads must be at least {0:.1f}m long, got {1!r}'.format(
            PATH_LENGTH, path_length))
  rng = np.random.default_rng(seed)
  curved = rng.random() < 0.5
  curvature = float(rng.uniform(-MAX_CURVATURE, MAX_CURVATURE))
  s_center = float(rng.uniform(*OBSTACLE_S_RANGE))
  length = float(rng.uniform(*OBSTACLE_LENGTH_RANGE))
  width = float(rng.uniform(*OBSTACLE_WIDTH_RANGE)) * lane_width

  if not curved or abs(curvature) < 1e-6:
    curvature = 0.0
  path = geometry.BuildReferencePath(_ArcWaypoints(curvature, path_length))
  obstacle = None
  if kind == KIND_ANOMALY:
    obstacle = Obstacle(s_center, length, width, 0.0)
  goal = Goal(min(path_length, path.total_length) - GOAL_MARGIN, 0.0)
  return Scenario(
      scenario_id, kind, seed, path.waypoints, lane_width, obstacle, goal)


def ScenarioToDict(scenario):
  """Converts a scenario to JSON serializable data."""
  obstacle = None
  if scenario.obstacle is not None:
    obstacle = dict(scenario.obstacle._asdict())
  return {
      'format_version': SCENARIO_FORMAT_VERSION,
      'scenario_id': scenario.scenario_id,
      'kind': scenario.kind,
      'seed': scenario.seed,
      'lane_width': scenario.lane_width,
      'waypoints': scenario.path.waypoints.tolist(),
      'obstacle': obstacle,
      'goal': dict(scenario.goal._asdict()),
  }


def ScenarioFromDict(document):
  """Builds a scenario from data produced by ScenarioToDict().

  Raises:
    ScenarioError: if the document is malformed or of another version.
  """
  try:
    version = document['format_version']
    if version != SCENARIO_FORMAT_VERSION:
      raise errors.ScenarioError(
          'Unsupported scenario format version {0!r}'.format(version))
    obstacle = document['obstacle']
    if obstacle is not None:
      obstacle = Obstacle(**obstacle)
    return Scenario(
        document['scenario_id'], document['kind'], document['seed'],
        np.array(document['waypoints'], dtype=np.float64),
        document['lane_width'], obstacle, Goal(**document['goal']))
  except (KeyError, TypeError, ValueError, errors.GeometryError) as exception:
    raise errors.ScenarioError(
        'Malformed scenario: {0!s}'.format(exception))


def SaveScenario(scenario, path):
  """Writes a scenario as canonical JSON.

  Args:
    scenario (Scenario): the scenario.
    path (str): the destination file.
  """
  directory = os.path.dirname(path)
  if directory and not os.path.isdir(directory):
    os.makedirs(directory)
  with open(path, 'w') as scenario_file:
    json.dump(ScenarioToDict(scenario), scenario_file, sort_keys=True)
    scenario_file.write('\n')


def LoadScenario(path):
  """Reads a scenario written by SaveScenario().

  Raises:
    ScenarioError: if the file is missing or malformed.
  """
  try:
    with open(path, 'r') as scenario_file:
      document = json.load(scenario_file)
  except (IOError, ValueError) as exception:
    raise errors.ScenarioError(
        'Unable to load scenario {0:s}: {1!s}'.format(path, exception))
  return ScenarioFromDict(document)


def ScenarioSeed(benchmark_seed, kind, index):
  """Returns the generation seed of a benchmark scenario."""
  return seeding.DeriveSeed(benchmark_seed, 'scenario/' + kind, index)


def BenchmarkScenario(benchmark_seed, kind, index, lane_width=3.5,
                      path_length=PATH_LENGTH):
  """Generates the benchmark scenario of a kind at an index."""
  return GenerateScenario(
      ScenarioSeed(benchmark_seed, kind, index), kind, scenario_id=index,
      lane_width=lane_width, path_length=path_length)


def BenchmarkPath(root, kind, index):
  """Returns the file of a benchmark scenario under a root directory."""
  return os.path.join(root, kind, '{0:04d}.json'.format(index))


def WriteBenchmark(root, benchmark_seed, counts, lane_width=3.5,
                   path_length=PATH_LENGTH):
  """Generates and writes a benchmark.

  Args:
    root (str): the benchmark directory.
    benchmark_seed (int): the benchmark seed.
    counts (dict[str, int]): number of scenarios per kind.
    lane_width (float): the lane width, in meters.
    path_length (float): the length of the roads, in meters.

  Returns:
    list[str]: the written files.
  """
  written = []
  for kind in KINDS:
    for index in range(counts.get(kind, 0)):
      path = BenchmarkPath(root, kind, index)
      SaveScenario(
          BenchmarkScenario(
              benchmark_seed, kind, index, lane_width, path_length),
          path)
      written.append(path)
  return written


def LoadBenchmarkScenario(root, benchmark_seed, kind, index, lane_width=3.5,
                          path_length=PATH_LENGTH):
  """Loads a benchmark scenario from disk, or generates it when absent.

  Args:
    root (str): the benchmark directory, or None to always generate.
    benchmark_seed (int): the benchmark seed.
    kind (str): the scenario kind.
    index (int): the index of the scenario.
    lane_width (float): the lane width, in meters.
    path_length (float): the length of generated roads, in meters.

  Returns:
    Scenario: the scenario.
  """
  if root:
    path = BenchmarkPath(root, kind, index)
    if os.path.exists(path):
      return LoadScenario(path)
  return BenchmarkScenario(
      benchmark_seed, kind, index, lane_width, path_length)
