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
"""Named random streams derived from a single master seed.

Every consumer of randomness (scenario generation, network initialization,
exploration draws, replay sampling) asks for its own stream by name. Streams
are independent of each other, so adding a consumer never changes the numbers
another consumer sees.
"""

import zlib

import numpy as np


def _NameKey(name):
  """Maps a stream name to a stable integer key.

  Args:
    name (str): the name of the stream.

  Returns:
    int: a 32-bit key.

  Raises:
    ValueError: if the name is empty.
  """
  if not name:
    raise ValueError('A random stream needs a name')
  return zlib.crc32(name.encode('utf-8')) & 0xffffffff


def SeedSequenceFor(master_seed, name, index=None):
  """Builds the SeedSequence of a named stream.

  Args:
    master_seed (int): the master seed of the run.
    name (str): the name of the consumer.
    index (int): an optional sub-stream index (eg: a scenario id).

  Returns:
    numpy.random.SeedSequence: the seed sequence.
  """
  spawn_key = (_NameKey(name),)
  if index is not None:
    spawn_key += (int(index),)
  return np.random.SeedSequence(int(master_seed), spawn_key=spawn_key)


def SeedStream(master_seed, name, index=None):
  """Returns an independent random generator for a named consumer.

  Args:
    master_seed (int): the master seed of the run.
    name (str): the name of the consumer.
    index (int): an optional sub-stream index.

  Returns:
    numpy.random.Generator: the generator.
  """
  return np.random.default_rng(SeedSequenceFor(master_seed, name, index))


def DeriveSeed(master_seed, name, index=None):
  """Derives a 32-bit integer seed for a named consumer.

  Args:
    master_seed (int): the master seed of the run.
    name (str): the name of the consumer.
    index (int): an optional sub-stream index.

  Returns:
    int: the derived seed.
  """
  state = SeedSequenceFor(master_seed, name, index).generate_state(1)
  return int(state[0])
