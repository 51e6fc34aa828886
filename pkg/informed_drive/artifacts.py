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
"""Output artifacts and the local writer that stores them."""

import csv
import hashlib
import io
import json
import logging
import os
from collections import namedtuple

RunStamp = namedtuple(
    'RunStamp', ['identifier', 'ablation', 'master_seed', 'total_steps'])


def FormatCell(value):
  """Renders one CSV cell; floats use their shortest round trip form."""
  if value is None:
    return ''
  if isinstance(value, bool):
    return '1' if value else '0'
  if isinstance(value, float):
    return repr(value)
  return str(value)


def CsvText(header, rows):
  """Renders rows as CSV text with '\\n' line endings.

  Args:
    header (list[str]): the column names.
    rows (list[list]): the rows.

  Returns:
    str: the CSV text.
  """
  output = io.StringIO()
  writer = csv.writer(output, lineterminator='\n')
  writer.writerow(header)
  for row in rows:
    writer.writerow([FormatCell(value) for value in row])
  return output.getvalue()


class BaseArtifact(object):
  """BaseArtifact class.

  Attributes:
    name (str): the name of the artifact.
    relative_path (str): where the artifact goes, under the output directory.
    size (int): the size of the artifact, in bytes.
  """

  def __init__(self, name):
    """Initializes a BaseArtifact object.

    Args:
      name (str): the name of the artifact.

    Raises:
      ValueError: if the name is empty or None.
    """
    self._size = 0
    self._stream = None
    if name:
      self.name = name
    else:
      raise ValueError('The name of the artifact must not be None or empty.')
    self.relative_path = self.name

    self._logger = logging.getLogger(self.__class__.__name__)

  def _GetStream(self):
    """Get access to the file-like object.

    Raises:
      NotImplementedError: If this method is not implemented.
    """
    class_name = type(self).__name__
    raise NotImplementedError(
        '_GetStream() is not implemented in {0:s}'.format(class_name))

  def CloseStream(self):
    """Closes the file-like object.

    Raises:
      IOError: if this method is called before OpenStream.
    """
    if self._stream:
      self._stream.close()
      self._stream = None
    else:
      raise IOError('Illegal call to CloseStream() before OpenStream()')

  def OpenStream(self):
    """Get the file-like object to the data of the artifact.

    Returns:
      file: Read-only file-like object to the data.
    """
    if not self._stream:
      # pylint: disable=assignment-from-no-return
      self._stream = self._GetStream()
    return self._stream

  @property
  def size(self):
    """int: the size of the artifact in bytes."""
    return self._size


class BytesArtifact(BaseArtifact):
  """An artifact holding raw bytes."""

  def __init__(self, path, data):
    """Initializes a BytesArtifact object.

    Args:
      path (str): the path of the artifact, relative to the output directory.
      data (bytes): the content.
    """
    super(BytesArtifact, self).__init__(os.path.basename(path))
    self._data = bytes(data)
    self._size = len(self._data)
    self.relative_path = path

  def _GetStream(self):
    return io.BytesIO(self._data)


class StringArtifact(BytesArtifact):
  """An artifact holding text, stored as UTF-8."""

  def __init__(self, path, string_content):
    super(StringArtifact, self).__init__(
        path, string_content.encode('utf-8'))


class CsvArtifact(StringArtifact):
  """A CSV table."""

  def __init__(self, path, header, rows):
    """Initializes a CsvArtifact object.

    Args:
      path (str): the path of the artifact, relative to the output directory.
      header (list[str]): the column names.
      rows (list[list]): the rows.
    """
    super(CsvArtifact, self).__init__(path, CsvText(header, rows))


class JsonArtifact(StringArtifact):
  """A JSON document with sorted keys."""

  def __init__(self, path, document):
    super(JsonArtifact, self).__init__(
        path, json.dumps(document, sort_keys=True, indent=2) + '\n')


def MakeStamp(run_config_text, ablation, master_seed, total_steps):
  """Builds the stamp of a run.

  The identifier is derived from the resolved configuration, so that the
  stamp of a run is reproducible.
  """
  digest = hashlib.sha256(run_config_text.encode('utf-8')).hexdigest()
  return RunStamp(
      identifier=digest[:16], ablation=ablation, master_seed=master_seed,
      total_steps=total_steps)


class LocalWriter(object):
  """Writes artifacts under a local directory."""

  def __init__(self, destination_dir):
    """Initializes the LocalWriter class.

    Args:
      destination_dir (str): the path to the destination directory.
    """
    self.destination_dir = destination_dir
    self._logger = logging.getLogger(self.__class__.__name__)

  def _MakeLocalPath(self, relative_path):
    """Builds the local path of an artifact, creating parent directories."""
    local_path = os.path.join(self.destination_dir, relative_path)
    base_dir = os.path.dirname(local_path)
    if base_dir and not os.path.exists(base_dir):
      os.makedirs(base_dir)
    return local_path

  def WriteArtifact(self, artifact):
    """Writes an artifact.

    Args:
      artifact (BaseArtifact): the artifact.

    Returns:
      str: the path of the written file.
    """
    local_path = self._MakeLocalPath(artifact.relative_path)
    stream = artifact.OpenStream()
    buffer_length = 16 * 1024
    with open(local_path, 'wb') as destination_file:
      while True:
        buf = stream.read(buffer_length)
        if not buf:
          break
        destination_file.write(buf)
    artifact.CloseStream()
    self._logger.info('Wrote %s', local_path)
    return local_path

  def WriteStamp(self, stamp):
    """Writes the stamp of a run as stamp.json."""
    return self.WriteArtifact(JsonArtifact('stamp.json', stamp._asdict()))
