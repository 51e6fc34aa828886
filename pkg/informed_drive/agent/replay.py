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
"""Experience replay ring buffer."""

import collections

import numpy as np

Transition = collections.namedtuple(
    'Transition',
    ['observation', 'action', 'reward', 'next_observation', 'terminal'])

Batch = collections.namedtuple(
    'Batch',
    ['observations', 'actions', 'rewards', 'next_observations', 'terminals'])


class ReplayBuffer(object):
  """A fixed capacity ring of transitions.

  Observations are binary masks and are stored bit packed, so that a full
  buffer of 64x64x3 grids stays small. Cells are read back as 0.0 or 1.0.

  Attributes:
    capacity (int): the maximum number of transitions held.
    insertions (int): the number of transitions ever added.
  """

  def __init__(self, capacity, observation_shape, rng):
    """Initializes a ReplayBuffer object.

    Args:
      capacity (int): the maximum number of transitions.
      observation_shape (tuple[int]): the shape of one observation.
      rng (numpy.random.Generator): the sampling stream.

    Raises:
      ValueError: if the capacity is not positive.
    """
    if capacity < 1:
      raise ValueError('Replay capacity must be >= 1')
    self.capacity = int(capacity)
    self.insertions = 0
    self._observation_shape = tuple(observation_shape)
    self._cell_count = int(np.prod(self._observation_shape))
    packed = (self._cell_count + 7) // 8
    self._observations = np.zeros((self.capacity, packed), dtype=np.uint8)
    self._next_observations = np.zeros(
        (self.capacity, packed), dtype=np.uint8)
    self._actions = np.zeros(self.capacity, dtype=np.int64)
    self._rewards = np.zeros(self.capacity, dtype=np.float32)
    self._terminals = np.zeros(self.capacity, dtype=np.float32)
    self._rng = rng

  def __len__(self):
    return min(self.insertions, self.capacity)

  def _Pack(self, observation):
    observation = np.asarray(observation).reshape(-1)
    if observation.size != self._cell_count:
      raise ValueError('Expected an observation of shape {0!r}'.format(
          self._observation_shape))
    return np.packbits(observation > 0.5)

  def _Unpack(self, packed):
    cells = np.unpackbits(packed, axis=-1, count=self._cell_count)
    return cells.astype(np.float32).reshape(
        (packed.shape[0],) + self._observation_shape)

  def Add(self, transition):
    """Appends a transition, overwriting the oldest one when full.

    Args:
      transition (Transition): the transition.
    """
    index = self.insertions % self.capacity
    self._observations[index] = self._Pack(transition.observation)
    self._next_observations[index] = self._Pack(transition.next_observation)
    self._actions[index] = transition.action
    self._rewards[index] = transition.reward
    self._terminals[index] = float(transition.terminal)
    self.insertions += 1

  def Get(self, index):
    """Returns the transition stored at a ring index."""
    if not 0 <= index < len(self):
      raise IndexError(index)
    return Transition(
        observation=self._Unpack(self._observations[index:index + 1])[0],
        action=int(self._actions[index]),
        reward=float(self._rewards[index]),
        next_observation=self._Unpack(
            self._next_observations[index:index + 1])[0],
        terminal=bool(self._terminals[index]))

  def Sample(self, batch_size):
    """Draws a uniform batch, with replacement.

    Args:
      batch_size (int): the number of transitions.

    Returns:
      Batch: stacked arrays.

    Raises:
      ValueError: if the buffer is empty.
    """
    if not len(self):
      raise ValueError('Cannot sample from an empty buffer')
    indices = self._rng.integers(0, len(self), size=batch_size)
    return Batch(
        observations=self._Unpack(self._observations[indices]),
        actions=self._actions[indices],
        rewards=self._rewards[indices],
        next_observations=self._Unpack(self._next_observations[indices]),
        terminals=self._terminals[indices])
