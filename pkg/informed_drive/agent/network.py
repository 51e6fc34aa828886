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
"""Convolutional Q network and its checkpoint format.

Checkpoints are little endian binary files: the magic bytes, a format
version, the network shape, the parameter count, then every parameter tensor
flattened in declaration order, as 32-bit floats.
"""

import collections
import io
import struct

import numpy as np
import torch
from torch import nn

from informed_drive import errors

CHECKPOINT_MAGIC = b'IDQN'
CHECKPOINT_VERSION = 1

NetworkShape = collections.namedtuple(
    'NetworkShape',
    ['in_channels', 'height', 'width', 'conv1_channels', 'conv1_kernel',
     'conv1_stride', 'conv2_channels', 'conv2_kernel', 'conv2_stride',
     'hidden_units', 'action_count'])

_HEADER = struct.Struct('<4sI{0:d}IQ'.format(len(NetworkShape._fields)))


def DefaultShape(action_count, conv1_channels=16, conv2_channels=32,
                 hidden_units=256):
  """Returns the shape of the network over 3x64x64 observation grids."""
  return NetworkShape(
      in_channels=3, height=64, width=64, conv1_channels=conv1_channels,
      conv1_kernel=8, conv1_stride=4, conv2_channels=conv2_channels,
      conv2_kernel=4, conv2_stride=2, hidden_units=hidden_units,
      action_count=action_count)


def ShapeFromConfig(agent_config, action_count):
  """Returns the network shape of an agent configuration section."""
  return DefaultShape(
      action_count, conv1_channels=agent_config.conv1_channels,
      conv2_channels=agent_config.conv2_channels,
      hidden_units=agent_config.hidden_units)


def _ConvOutput(size, kernel, stride):
  return (size - kernel) // stride + 1


class QNetwork(nn.Module):
  """Two convolution stages and two fully connected stages.

  Attributes:
    shape (NetworkShape): the layer sizes.
  """

  def __init__(self, shape):
    """Initializes a QNetwork object.

    Args:
      shape (NetworkShape): the layer sizes.

    Raises:
      ValueError: if the convolutions don't fit the input.
    """
    super(QNetwork, self).__init__()
    height = _ConvOutput(
        _ConvOutput(shape.height, shape.conv1_kernel, shape.conv1_stride),
        shape.conv2_kernel, shape.conv2_stride)
    width = _ConvOutput(
        _ConvOutput(shape.width, shape.conv1_kernel, shape.conv1_stride),
        shape.conv2_kernel, shape.conv2_stride)
    if height < 1 or width < 1:
      raise ValueError('Convolutions do not fit a {0:d}x{1:d} input'.format(
          shape.height, shape.width))
    if shape.action_count < 1:
      raise ValueError('A Q network needs at least one action')
    self.shape = shape
    self.conv1 = nn.Conv2d(
        shape.in_channels, shape.conv1_channels, shape.conv1_kernel,
        stride=shape.conv1_stride)
    self.conv2 = nn.Conv2d(
        shape.conv1_channels, shape.conv2_channels, shape.conv2_kernel,
        stride=shape.conv2_stride)
    self.fc1 = nn.Linear(shape.conv2_channels * height * width,
                         shape.hidden_units)
    self.fc2 = nn.Linear(shape.hidden_units, shape.action_count)

  def forward(self, observations):
    """Computes the Q values of a batch of observations.

    Args:
      observations (torch.Tensor): (B, C, H, W) inputs.

    Returns:
      torch.Tensor: (B, action_count) Q values.
    """
    hidden = torch.relu(self.conv1(observations))
    hidden = torch.relu(self.conv2(hidden))
    hidden = torch.relu(self.fc1(torch.flatten(hidden, start_dim=1)))
    return self.fc2(hidden)


def BuildNetwork(shape, seed):
  """Builds a network with seeded initial parameters.

  The global torch random state is left untouched.

  Args:
    shape (NetworkShape): the layer sizes.
    seed (int): the initialization seed.

  Returns:
    QNetwork: the network.
  """
  with torch.random.fork_rng(devices=[]):
    torch.manual_seed(seed)
    return QNetwork(shape)


def FlatParameters(network):
  """Returns all parameters, in declaration order, as one float32 vector."""
  with torch.no_grad():
    return np.concatenate([
        parameter.detach().cpu().numpy().astype(np.float32).ravel()
        for parameter in network.parameters()])


def LoadFlatParameters(network, vector):
  """Copies a vector produced by FlatParameters() into a network.

  Raises:
    ValueError: if the vector size doesn't match the network.
  """
  vector = np.asarray(vector)
  expected = sum(parameter.numel() for parameter in network.parameters())
  if vector.size != expected:
    raise ValueError('Expected {0:d} parameters, got {1:d}'.format(
        expected, vector.size))
  offset = 0
  with torch.no_grad():
    for parameter in network.parameters():
      count = parameter.numel()
      block = vector[offset:offset + count].reshape(parameter.shape)
      parameter.copy_(torch.from_numpy(np.array(block)).to(parameter.dtype))
      offset += count


def SyncTarget(network, target_network):
  """Copies the online parameters into the target network.

  Raises:
    ValueError: if the two networks have different shapes.
  """
  if network.shape != target_network.shape:
    raise ValueError('Cannot sync a {0!r} network into a {1!r} one'.format(
        network.shape, target_network.shape))
  target_network.load_state_dict(network.state_dict())


def CheckpointBytes(network):
  """Serializes a network to the checkpoint format.

  Args:
    network (QNetwork): the network.

  Returns:
    bytes: the checkpoint.
  """
  parameters = FlatParameters(network)
  header = _HEADER.pack(
      CHECKPOINT_MAGIC, CHECKPOINT_VERSION, *network.shape,
      parameters.size)
  return header + parameters.astype('<f4').tobytes()


def NetworkFromBytes(data, expected_shape=None):
  """Deserializes a checkpoint.

  Args:
    data (bytes): the checkpoint.
    expected_shape (NetworkShape): if set, the shape the checkpoint must have.

  Returns:
    QNetwork: the network.

  Raises:
    CheckpointError: if the data is not a valid checkpoint, or has another
        shape.
  """
  if len(data) < _HEADER.size:
    raise errors.CheckpointError('Checkpoint is truncated')
  fields = _HEADER.unpack_from(data)
  magic, version = fields[0], fields[1]
  if magic != CHECKPOINT_MAGIC:
    raise errors.CheckpointError('Not a checkpoint (bad magic)')
  if version != CHECKPOINT_VERSION:
    raise errors.CheckpointError(
        'Unsupported checkpoint version {0:d}'.format(version))
  shape = NetworkShape(*fields[2:-1])
  count = fields[-1]
  if expected_shape is not None and shape != tuple(expected_shape):
    raise errors.CheckpointError(
        'Checkpoint shape {0!r} does not match {1!r}'.format(
            shape, expected_shape))
  payload = data[_HEADER.size:]
  if len(payload) != 4 * count:
    raise errors.CheckpointError(
        'Checkpoint holds {0:d} bytes of parameters, expected {1:d}'.format(
            len(payload), 4 * count))
  try:
    network = QNetwork(shape)
    LoadFlatParameters(network, np.frombuffer(payload, dtype='<f4'))
  except ValueError as exception:
    raise errors.CheckpointError(
        'Invalid checkpoint: {0!s}'.format(exception))
  return network


def SaveCheckpoint(network, path):
  """Writes a network checkpoint file."""
  with io.open(path, 'wb') as checkpoint_file:
    checkpoint_file.write(CheckpointBytes(network))


def LoadCheckpoint(path, expected_shape=None):
  """Reads a checkpoint file.

  Raises:
    CheckpointError: if the file is missing or invalid.
  """
  try:
    with io.open(path, 'rb') as checkpoint_file:
      data = checkpoint_file.read()
  except IOError as exception:
    raise errors.CheckpointError(
        'Unable to read checkpoint {0:s}: {1!s}'.format(path, exception))
  return NetworkFromBytes(data, expected_shape)
