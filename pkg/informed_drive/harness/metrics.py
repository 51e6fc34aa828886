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
"""Metrics logs and the running statistics derived from them."""

import collections
import logging
import os

import pandas as pd

from informed_drive import artifacts

METRICS_COLUMNS = (
    'step', 'episode', 'phase', 'ablation', 'arrived_distance',
    'finished_score', 'return', 'loss', 'epsilon')

PLOT_COLUMNS = ('step', 'mean', 'std', 'p5', 'p95')
PLOTTED_METRICS = ('arrived_distance', 'finished_score', 'return')

PHASE_NORMAL = 'normal'
PHASE_ANOMALY = 'anomaly'
PHASE_EVAL = 'eval'

# The 'return' column is held in the episode_return field.
MetricsRow = collections.namedtuple(
    'MetricsRow',
    [('episode_return' if column == 'return' else column)
     for column in METRICS_COLUMNS])


class MetricsLog(object):
  """An append only CSV log, flushed after every row.

  Rows must come with strictly increasing steps.
  """

  def __init__(self, path, append=False):
    """Initializes a MetricsLog object.

    Args:
      path (str): the CSV file.
      append (bool): whether to continue an existing log.
    """
    self.path = path
    self._last_step = None
    self._logger = logging.getLogger(self.__class__.__name__)
    directory = os.path.dirname(path)
    if directory and not os.path.isdir(directory):
      os.makedirs(directory)
    exists = append and os.path.exists(path) and os.path.getsize(path) > 0
    if exists:
      last = LastRow(path)
      if last is not None:
        self._last_step = int(last['step'])
    self._file = open(path, 'a' if exists else 'w')
    if not exists:
      self._file.write(artifacts.CsvText(METRICS_COLUMNS, []))
      self._file.flush()

  def __enter__(self):
    return self

  def __exit__(self, exc_type, exc_value, traceback):
    self.Close()

  @property
  def last_step(self):
    """int: the step of the last row, or None."""
    return self._last_step

  def Append(self, row):
    """Appends a row.

    Args:
      row (MetricsRow): the row.

    Raises:
      ValueError: if the step doesn't increase.
    """
    if self._last_step is not None and row.step <= self._last_step:
      raise ValueError('Step {0:d} logged after step {1:d}'.format(
          row.step, self._last_step))
    text = artifacts.CsvText(METRICS_COLUMNS, [row])
    self._file.write(text.split('\n', 1)[1])
    self._file.flush()
    self._last_step = row.step

  def Close(self):
    """Closes the underlying file."""
    if not self._file.closed:
      self._file.close()


def ReadMetrics(path):
  """Reads a metrics log into a DataFrame."""
  return pd.read_csv(path)


def LastRow(path):
  """Returns the last row of a metrics log as a Series, or None."""
  frame = ReadMetrics(path)
  if frame.empty:
    return None
  return frame.iloc[-1]


def RunningStatistics(values, window):
  """Computes the running mean, deviation and 5/95 percentiles.

  Args:
    values (pandas.Series): the values, in episode order.
    window (int): the number of trailing episodes.

  Returns:
    pandas.DataFrame: columns mean, std, p5 and p95.
  """
  rolling = values.astype(float).rolling(window, min_periods=1)
  return pd.DataFrame({
      'mean': rolling.mean(),
      'std': rolling.std(ddof=0),
      'p5': rolling.quantile(0.05),
      'p95': rolling.quantile(0.95),
  })


def PlotSeries(frame, window):
  """Builds the plotted curves of a metrics log.

  Args:
    frame (pandas.DataFrame): the metrics log.
    window (int): the running window, in episodes.

  Returns:
    collections.OrderedDict: (ablation, phase, metric) -> DataFrame with the
        PLOT_COLUMNS.
  """
  series = collections.OrderedDict()
  for (ablation, phase), group in frame.groupby(
      ['ablation', 'phase'], sort=True):
    group = group.sort_values('step')
    for metric in PLOTTED_METRICS:
      statistics = RunningStatistics(group[metric].reset_index(drop=True),
                                     window)
      statistics.insert(0, 'step', group['step'].to_numpy())
      series[(ablation, phase, metric)] = statistics[list(PLOT_COLUMNS)]
  return series


def PlotDataArtifacts(metrics_path, window):
  """Converts a metrics log into per curve CSV artifacts.

  Args:
    metrics_path (str): the metrics CSV.
    window (int): the running window, in episodes.

  Returns:
    list[CsvArtifact]: one artifact per (ablation, phase, metric).
  """
  result = []
  for (ablation, phase, metric), statistics in PlotSeries(
      ReadMetrics(metrics_path), window).items():
    rows = [
        [int(row[0])] + [float(value) for value in row[1:]]
        for row in statistics.itertuples(index=False, name=None)]
    result.append(artifacts.CsvArtifact(
        '{0:s}_{1:s}_{2:s}.csv'.format(ablation, phase, metric),
        PLOT_COLUMNS, rows))
  return result
