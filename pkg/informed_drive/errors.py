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
"""Custom errors for the informed driving tools."""


class BadConfigOption(Exception):
  """Raised when a faulty configuration option is encountered."""


class ConfigParseError(BadConfigOption):
  """Raised when a configuration file can't be parsed.

  Attributes:
    line (int): the 1-based line number of the problem, or None.
  """

  def __init__(self, message, line=None):
    if line is not None:
      message = 'line {0:d}: {1:s}'.format(line, message)
    super(ConfigParseError, self).__init__(message)
    self.line = line


class InformedDriveError(Exception):
  """Raised when a simulation, training or evaluation step failed."""


class GeometryError(InformedDriveError):
  """Raised on degenerate paths or out of range Frenet queries."""


class TrajectoryError(InformedDriveError):
  """Raised when a trajectory can't be generated."""


class FormulaError(InformedDriveError):
  """Raised when a LTL formula can't be parsed or evaluated."""


class LtlSyntaxError(FormulaError):
  """Raised on malformed LTL formula text.

  Attributes:
    offset (int): the byte offset of the offending token.
    expected (frozenset[str]): the tokens that would have been accepted.
  """

  def __init__(self, message, offset, expected=None):
    self.offset = offset
    self.expected = frozenset(expected or [])
    if self.expected:
      message = '{0:s} at offset {1:d} (expected one of: {2:s})'.format(
          message, offset, ', '.join(sorted(self.expected)))
    else:
      message = '{0:s} at offset {1:d}'.format(message, offset)
    super(LtlSyntaxError, self).__init__(message)


class MissingAtomError(FormulaError):
  """Raised when a trace state doesn't assign an atom used by a formula."""


class RulebookError(InformedDriveError):
  """Raised when a rulebook is inconsistent or misused."""


class ScenarioError(InformedDriveError):
  """Raised when a scenario file is invalid."""


class EnvironmentTerminatedError(InformedDriveError):
  """Raised when stepping an environment whose episode has ended."""


class CheckpointError(InformedDriveError):
  """Raised when a checkpoint can't be read or doesn't fit the network."""


class DivergenceError(InformedDriveError):
  """Raised when training produced a non-finite loss."""


class EvaluationError(InformedDriveError):
  """Raised when an evaluation can't be run."""
