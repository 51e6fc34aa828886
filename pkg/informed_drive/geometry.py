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
"""Arc-length parameterized reference paths and Frenet conversions.

Paths are dense polylines. The Frenet normal is the tangent rotated by +90
degrees, smoothed across vertices, so positive lateral offsets lie left of
the travel direction, toward the oncoming lane.
"""

import collections
import math

import numpy as np

from informed_drive import errors

# Segments longer than this are split when building a path, in meters.
MAX_WAYPOINT_SPACING = 1.0

# Points further than this from the path are rejected, in meters.
CORRIDOR_BOUND = 20.0

_S_TOLERANCE = 1e-9
_RATIO_TOLERANCE = 1e-12

FrenetPose = collections.namedtuple(
    'FrenetPose', ['s', 'd', 's_dot', 'd_dot', 'd_ddot'])
FrenetPose.__new__.__defaults__ = (0.0, 0.0, 0.0)


class ReferencePath(object):
  """A dense polyline parameterized by arc length.

  Normals are defined at the vertices, as the bisector of the normals of the
  adjacent segments, and interpolated along each segment. The resulting frame
  is continuous, so that every corridor point has exactly one Frenet pose.

  Instances are immutable: the underlying arrays are read-only.

  Attributes:
    waypoints (numpy.ndarray): (N, 2) points, in meters.
    cumulative_s (numpy.ndarray): (N,) arc length at each waypoint.
    total_length (float): the length of the path, in meters.
  """

  def __init__(self, waypoints):
    """Initializes a ReferencePath object.

    Use BuildReferencePath() to build a path from arbitrary waypoints.

    Args:
      waypoints (numpy.ndarray): (N, 2) dense waypoints.
    """
    self.waypoints = np.array(waypoints, dtype=np.float64)
    deltas = np.diff(self.waypoints, axis=0)
    self._segment_lengths = np.hypot(deltas[:, 0], deltas[:, 1])
    self._tangents = deltas / self._segment_lengths[:, np.newaxis]
    self._vertex_normals = _VertexNormals(self._tangents)
    self.cumulative_s = np.concatenate(
        [[0.0], np.cumsum(self._segment_lengths)])
    self.total_length = float(self.cumulative_s[-1])
    for array in (self.waypoints, self._segment_lengths, self._tangents,
                  self._vertex_normals, self.cumulative_s):
      array.setflags(write=False)

  @property
  def segment_count(self):
    """int: the number of polyline segments."""
    return len(self._segment_lengths)

  def _SegmentIndex(self, s):
    """Returns the index of the segment holding arc length s."""
    index = int(np.searchsorted(self.cumulative_s, s, side='right')) - 1
    return min(max(index, 0), self.segment_count - 1)

  def Heading(self, s):
    """Returns the heading of the path at arc length s.

    Args:
      s (float): the arc length, in meters.

    Returns:
      float: the heading, in radians.
    """
    tangent = self._tangents[self._SegmentIndex(s)]
    return math.atan2(tangent[1], tangent[0])

  def Curvature(self, s, span=1.0):
    """Returns the signed curvature of the path around arc length s.

    The heading change is averaged over span meters, clamped to the path.
    Left turns are positive.

    Args:
      s (float): the arc length, in meters.
      span (float): the averaging window, in meters.

    Returns:
      float: the curvature, in 1/m.
    """
    low = min(max(s - span / 2.0, 0.0), self.total_length)
    high = min(max(s + span / 2.0, 0.0), self.total_length)
    if high - low < _S_TOLERANCE:
      return 0.0
    turn = self.Heading(high) - self.Heading(low)
    turn = (turn + math.pi) % (2.0 * math.pi) - math.pi
    return turn / (high - low)

  def Frame(self, s):
    """Returns the point, tangent and normal of the path at arc length s.

    Args:
      s (float): the arc length, in meters, clamped to the path.

    Returns:
      tuple(numpy.ndarray, numpy.ndarray, numpy.ndarray): point, unit tangent
          of the segment and interpolated unit normal.
    """
    s = min(max(s, 0.0), self.total_length)
    index = self._SegmentIndex(s)
    along = s - self.cumulative_s[index]
    ratio = along / self._segment_lengths[index]
    tangent = self._tangents[index]
    point = self.waypoints[index] + along * tangent
    normal = ((1.0 - ratio) * self._vertex_normals[index] +
              ratio * self._vertex_normals[index + 1])
    return point, tangent, normal / np.hypot(normal[0], normal[1])

  def _SegmentWindow(self, s_min, s_max):
    """Returns the [first, last) segment indices overlapping [s_min, s_max]."""
    first = 0 if s_min is None else self._SegmentIndex(s_min)
    last = self.segment_count
    if s_max is not None:
      last = self._SegmentIndex(s_max) + 1
    return first, max(last, first + 1)

  def _NearestPoints(self, points, first, last):
    """Orthogonal projection onto the closest segment, clamped to its ends.

    Returns:
      tuple(numpy.ndarray, numpy.ndarray, numpy.ndarray): arc lengths, signed
          lateral offsets and distances.
    """
    starts = self.waypoints[first:last]
    tangents = self._tangents[first:last]
    offsets = points[:, np.newaxis, :] - starts[np.newaxis, :, :]
    along = np.einsum('mkj,kj->mk', offsets, tangents)
    along = np.clip(along, 0.0, self._segment_lengths[np.newaxis, first:last])
    residual = offsets - along[:, :, np.newaxis] * tangents[np.newaxis]
    distances = np.hypot(residual[:, :, 0], residual[:, :, 1])
    nearest = np.argmin(distances, axis=1)
    rows = np.arange(points.shape[0])
    distance = distances[rows, nearest]
    cross = _Cross(tangents[nearest], residual[rows, nearest])
    s = self.cumulative_s[first + nearest] + along[rows, nearest]
    return s, np.copysign(distance, cross), distance

  def Project(self, points, s_min=None, s_max=None):
    """Finds the Frenet pose of points, without corridor checks.

    On each segment, the foot of a point is where the interpolated normal
    passes through the point. Among segments with such a foot, the closest
    one wins; ties go to the smaller arc length. Points without any foot
    (eg: behind the start of the path) are projected orthogonally onto the
    nearest segment instead.

    Args:
      points (numpy.ndarray): (M, 2) points.
      s_min (Optional[float]): only consider segments reaching past this arc
          length.
      s_max (Optional[float]): only consider segments starting before this arc
          length.

    Returns:
      tuple(numpy.ndarray, numpy.ndarray, numpy.ndarray): arc lengths, signed
          lateral offsets and distances to the path, each of shape (M,).
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    first, last = self._SegmentWindow(s_min, s_max)
    starts = self.waypoints[first:last]
    tangents = self._tangents[first:last]
    lengths = self._segment_lengths[first:last]
    normals_a = self._vertex_normals[first:last]
    normals_delta = self._vertex_normals[first + 1:last + 1] - normals_a

    # (M, K, 2) offsets of every point from every segment start.
    offsets = points[:, np.newaxis, :] - starts[np.newaxis, :, :]
    # The normal at ratio u is normals_a + u * normals_delta, and must be
    # parallel to offsets - u * length * tangent: a quadratic in u.
    quadratic = np.broadcast_to(
        -lengths * _Cross(normals_delta, tangents), offsets.shape[:2])
    linear = (_Cross(normals_delta[np.newaxis], offsets) -
              lengths * _Cross(normals_a, tangents))
    constant = _Cross(normals_a[np.newaxis], offsets)
    discriminant = linear * linear - 4.0 * quadratic * constant
    with np.errstate(divide='ignore', invalid='ignore'):
      # The root of smallest magnitude, in its numerically stable form.
      denominator = linear + np.copysign(
          np.sqrt(np.maximum(discriminant, 0.0)), linear)
      ratio = -2.0 * constant / denominator
    valid = ((discriminant >= 0.0) & np.isfinite(ratio) &
             (ratio >= -_RATIO_TOLERANCE) & (ratio <= 1.0 + _RATIO_TOLERANCE))
    ratio = np.where(valid, np.clip(ratio, 0.0, 1.0), 0.0)

    along = ratio * lengths
    residual = offsets - along[:, :, np.newaxis] * tangents[np.newaxis]
    distances = np.where(
        valid, np.hypot(residual[:, :, 0], residual[:, :, 1]), np.inf)
    # argmin keeps the first minimum, which is the smaller arc length.
    nearest = np.argmin(distances, axis=1)
    rows = np.arange(points.shape[0])
    normal = (normals_a[nearest] +
              ratio[rows, nearest][:, np.newaxis] * normals_delta[nearest])
    normal /= np.hypot(normal[:, 0], normal[:, 1])[:, np.newaxis]
    chosen = residual[rows, nearest]

    s = self.cumulative_s[first + nearest] + along[rows, nearest]
    d = np.einsum('mj,mj->m', chosen, normal)
    distance = distances[rows, nearest]

    orphans = ~np.isfinite(distance)
    if orphans.any():
      s[orphans], d[orphans], distance[orphans] = self._NearestPoints(
          points[orphans], first, last)
    return s, d, distance


def _Cross(first, second):
  """Returns the z component of the cross product of 2D vectors."""
  return first[..., 0] * second[..., 1] - first[..., 1] * second[..., 0]


def _VertexNormals(tangents):
  """Computes unit normals at the vertices of a polyline.

  Args:
    tangents (numpy.ndarray): (N - 1, 2) unit segment tangents.

  Returns:
    numpy.ndarray: (N, 2) unit normals, left of the travel direction.
  """
  segment_normals = np.stack([-tangents[:, 1], tangents[:, 0]], axis=1)
  inner = segment_normals[:-1] + segment_normals[1:]
  norms = np.hypot(inner[:, 0], inner[:, 1])
  # Reversals have no bisector, keep the incoming normal.
  folded = norms < 1e-9
  inner[folded] = segment_normals[:-1][folded]
  norms[folded] = 1.0
  return np.concatenate(
      [segment_normals[:1], inner / norms[:, np.newaxis],
       segment_normals[-1:]])


def BuildReferencePath(waypoints):
  """Builds a dense reference path from waypoints.

  Segments longer than MAX_WAYPOINT_SPACING are split by linear
  interpolation.

  Args:
    waypoints (list[tuple[float, float]]): at least two 2D points, in meters.

  Returns:
    ReferencePath: the path.

  Raises:
    GeometryError: if there are fewer than two points, or two consecutive
        points are identical.
  """
  points = np.asarray(waypoints, dtype=np.float64)
  if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 2:
    raise errors.GeometryError('A reference path needs at least 2 2D points')

  deltas = np.diff(points, axis=0)
  lengths = np.hypot(deltas[:, 0], deltas[:, 1])
  if np.any(lengths <= 0.0):
    index = int(np.argmax(lengths <= 0.0))
    raise errors.GeometryError(
        'Zero-length segment between waypoints {0:d} and {1:d}'.format(
            index, index + 1))

  dense = []
  for start, delta, length in zip(points[:-1], deltas, lengths):
    pieces = int(math.floor(length / MAX_WAYPOINT_SPACING)) + 1
    for k in range(pieces):
      dense.append(start + delta * (k / pieces))
  dense.append(points[-1])
  return ReferencePath(np.array(dense))


def CartesianToFrenet(path, point):
  """Converts a Cartesian point to Frenet coordinates.

  Args:
    path (ReferencePath): the reference path.
    point (tuple[float, float]): the point, in meters.

  Returns:
    tuple(float, float): the arc length s and the lateral offset d.

  Raises:
    GeometryError: if the point is outside the corridor around the path.
  """
  s, d, distance = path.Project(np.asarray(point, dtype=np.float64))
  if distance[0] > CORRIDOR_BOUND:
    raise errors.GeometryError(
        'Point ({0:.3f}, {1:.3f}) is {2:.3f}m away from the path '
        '(corridor is {3:.1f}m)'.format(
            point[0], point[1], distance[0], CORRIDOR_BOUND))
  return float(s[0]), float(d[0])


def FrenetToCartesian(path, s, d):
  """Converts Frenet coordinates to a Cartesian point.

  Args:
    path (ReferencePath): the reference path.
    s (float): the arc length, in meters.
    d (float): the lateral offset, in meters.

  Returns:
    numpy.ndarray: the (2,) point.

  Raises:
    GeometryError: if s is outside the path, or d outside the corridor.
  """
  if s < -_S_TOLERANCE or s > path.total_length + _S_TOLERANCE:
    raise errors.GeometryError(
        's={0:.6f} is outside the path [0, {1:.6f}]'.format(
            s, path.total_length))
  if abs(d) > CORRIDOR_BOUND:
    raise errors.GeometryError(
        'd={0:.3f} is outside the corridor'.format(d))
  point, _, normal = path.Frame(s)
  return point + d * normal
