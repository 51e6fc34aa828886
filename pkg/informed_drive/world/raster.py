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
"""Ego centric bird's eye view rasters.

The grid is aligned with the ego heading: row 0 is the far end ahead of the
vehicle, column 0 its left side. The ego sits on the center column, a quarter
of the grid height above the bottom edge.
"""

import collections
import math

import numpy as np

from informed_drive import geometry
from informed_drive.world import atoms

GRID_SIZE = 64
RESOLUTION = 0.5
EGO_ROW_FRACTION = 0.25

CHANNEL_ROAD = 0
CHANNEL_OBSTACLE = 1
CHANNEL_EGO = 2
CHANNEL_COUNT = 3

# Polyline sampling step when drawing planned trajectories, in meters.
_POLYLINE_STEP = RESOLUTION / 2.0

ObservationGrid = collections.namedtuple(
    'ObservationGrid', ['channels', 'resolution'])

_EGO_ROW = GRID_SIZE * (1.0 - EGO_ROW_FRACTION)
_CENTER_COLUMN = GRID_SIZE / 2.0

# Cell centers in the ego frame: forward is +f, left is +l.
_FORWARD = (_EGO_ROW - (np.arange(GRID_SIZE) + 0.5)) * RESOLUTION
_LATERAL = (_CENTER_COLUMN - (np.arange(GRID_SIZE) + 0.5)) * RESOLUTION
_CELL_FORWARD, _CELL_LATERAL = np.meshgrid(_FORWARD, _LATERAL, indexing='ij')

# Frenet window projected around the ego, in meters. Covers the grid diagonal.
_PROJECTION_MARGIN = 40.0


def _CellsInWorld(state):
  """Returns the (GRID_SIZE**2, 2) world coordinates of the cell centers."""
  cosine, sine = math.cos(state.heading), math.sin(state.heading)
  forward = _CELL_FORWARD.ravel()
  lateral = _CELL_LATERAL.ravel()
  x = state.x + forward * cosine - lateral * sine
  y = state.y + forward * sine + lateral * cosine
  return np.stack([x, y], axis=1)


def _ToLocal(state, points):
  """Expresses world points in the ego frame, as (forward, lateral)."""
  points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
  cosine, sine = math.cos(state.heading), math.sin(state.heading)
  dx = points[:, 0] - state.x
  dy = points[:, 1] - state.y
  return dx * cosine + dy * sine, -dx * sine + dy * cosine


def _RoadMask(cells, state, scenario):
  path = scenario.path
  s_ego = state.frenet.s
  s, d, _ = path.Project(
      cells, s_min=s_ego - _PROJECTION_MARGIN,
      s_max=s_ego + _PROJECTION_MARGIN)
  half = scenario.lane_width / 2.0
  inside = (s > 0.0) & (s < path.total_length)
  return inside & (d >= -half) & (d < 3.0 * half)


def _ObstacleMask(cells, scenario):
  obstacle = scenario.obstacle
  if obstacle is None:
    return np.zeros(cells.shape[0], dtype=bool)
  center = geometry.FrenetToCartesian(
      scenario.path, obstacle.s_center, obstacle.d_center)
  _, tangent, _ = scenario.path.Frame(obstacle.s_center)
  normal = np.array([-tangent[1], tangent[0]])
  offsets = cells - center
  along = offsets.dot(tangent)
  across = offsets.dot(normal)
  return ((np.abs(along) <= obstacle.length / 2.0) &
          (np.abs(across) <= obstacle.width / 2.0))


def _DensifyPolyline(points):
  points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
  if len(points) < 2:
    return points
  dense = [points[:1]]
  for start, end in zip(points[:-1], points[1:]):
    pieces = max(1, int(math.ceil(np.hypot(*(end - start)) / _POLYLINE_STEP)))
    ratios = np.arange(1, pieces + 1)[:, np.newaxis] / pieces
    dense.append(start + ratios * (end - start))
  return np.concatenate(dense)


def _EgoMask(state, planned, ego_shape):
  mask = ((np.abs(_CELL_FORWARD) <= ego_shape.length / 2.0) &
          (np.abs(_CELL_LATERAL) <= ego_shape.width / 2.0))
  if planned is not None:
    forward, lateral = _ToLocal(state, _DensifyPolyline(planned.points))
    rows = np.floor(_EGO_ROW - forward / RESOLUTION).astype(np.int64)
    columns = np.floor(_CENTER_COLUMN - lateral / RESOLUTION).astype(np.int64)
    visible = ((rows >= 0) & (rows < GRID_SIZE) &
               (columns >= 0) & (columns < GRID_SIZE))
    mask[rows[visible], columns[visible]] = True
  return mask


def RenderObservation(
    state, scenario, planned=None, ego_shape=atoms.EgoShape()):
  """Renders the observation of the ego vehicle.

  Args:
    state (VehicleState): the ego state, with its Frenet pose.
    scenario (Scenario): the scenario.
    planned (Trajectory): the trajectory being followed, if any.
    ego_shape (EgoShape): the ego rectangle.

  Returns:
    ObservationGrid: a (CHANNEL_COUNT, GRID_SIZE, GRID_SIZE) float32 raster
        with cells in {0, 1}.
  """
  cells = _CellsInWorld(state)
  channels = np.zeros((CHANNEL_COUNT, GRID_SIZE, GRID_SIZE), dtype=np.float32)
  channels[CHANNEL_ROAD] = _RoadMask(cells, state, scenario).reshape(
      GRID_SIZE, GRID_SIZE)
  channels[CHANNEL_OBSTACLE] = _ObstacleMask(cells, scenario).reshape(
      GRID_SIZE, GRID_SIZE)
  channels[CHANNEL_EGO] = _EgoMask(state, planned, ego_shape)
  return ObservationGrid(channels, RESOLUTION)
