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
"""Deep Q learning with experience replay and a target network."""

import logging
import math

import numpy as np
import torch
from torch.nn import functional

from informed_drive import errors
from informed_drive import seeding
from informed_drive.agent import network as network_lib
from informed_drive.agent import replay as replay_lib


def _ParameterDtype(network):
  return next(network.parameters()).dtype


def _AsTensor(array, network):
  return torch.as_tensor(np.asarray(array), dtype=_ParameterDtype(network))


def GreedyAction(network, observation):
  """Returns the action with the highest Q value, the lowest index on ties."""
  with torch.no_grad():
    q_values = network(_AsTensor(observation, network).unsqueeze(0))[0]
  return int(np.argmax(q_values.cpu().numpy()))


def Act(network, observation, epsilon, rng):
  """Selects an epsilon greedy action.

  A uniform draw is always consumed first, so that the exploration stream
  advances the same way whatever the outcome.

  Args:
    network (QNetwork): the online network.
    observation (numpy.ndarray): a (C, H, W) observation.
    epsilon (float): the exploration probability, in [0, 1].
    rng (numpy.random.Generator): the exploration stream.

  Returns:
    int: the action index.
  """
  if rng.random() < epsilon:
    return int(rng.integers(network.shape.action_count))
  return GreedyAction(network, observation)


def EpsilonAt(step, total_steps, start, end, fraction):
  """Linearly anneals epsilon over the first fraction of the run."""
  horizon = fraction * total_steps
  if horizon <= 0 or step >= horizon:
    return end
  return start + (end - start) * (step / horizon)


def TemporalDifferenceLoss(
    network, target_network, batch, discount, double_q=False):
  """Computes the mean Huber loss of a batch.

  The target is r + discount * (1 - terminal) * max_a' Q_target(s', a'). With
  double_q the maximizing action is picked by the online network instead.

  Args:
    network (QNetwork): the online network.
    target_network (QNetwork): the target network.
    batch (Batch): the transitions.
    discount (float): the discount factor.
    double_q (bool): whether to decouple action selection and evaluation.

  Returns:
    torch.Tensor: the scalar loss, differentiable w.r.t. the online network.
  """
  observations = _AsTensor(batch.observations, network)
  next_observations = _AsTensor(batch.next_observations, network)
  actions = torch.as_tensor(np.asarray(batch.actions), dtype=torch.int64)
  rewards = _AsTensor(batch.rewards, network)
  terminals = _AsTensor(batch.terminals, network)

  q_taken = network(observations).gather(1, actions.unsqueeze(1)).squeeze(1)
  with torch.no_grad():
    next_q = target_network(next_observations)
    if double_q:
      chosen = network(next_observations).argmax(dim=1, keepdim=True)
      next_value = next_q.gather(1, chosen).squeeze(1)
    else:
      next_value = next_q.max(dim=1).values
    targets = rewards + discount * (1.0 - terminals) * next_value
  return functional.smooth_l1_loss(q_taken, targets)


def Update(network, target_network, optimizer, batch, discount,
           double_q=False):
  """Performs one gradient step.

  Args:
    network (QNetwork): the online network.
    target_network (QNetwork): the target network.
    optimizer (torch.optim.Optimizer): the optimizer of the online network.
    batch (Batch): the transitions.
    discount (float): the discount factor.
    double_q (bool): whether to use double Q learning targets.

  Returns:
    float: the loss before the step.

  Raises:
    DivergenceError: if the loss is not finite.
    ValueError: if the batch is empty.
  """
  if len(batch.actions) < 1:
    raise ValueError('Cannot update on an empty batch')
  loss = TemporalDifferenceLoss(
      network, target_network, batch, discount, double_q)
  value = float(loss.item())
  if not math.isfinite(value):
    raise errors.DivergenceError('Loss diverged to {0!r}'.format(value))
  optimizer.zero_grad()
  loss.backward()
  optimizer.step()
  return value


class DqnAgent(object):
  """An epsilon greedy DQN agent with its replay buffer.

  Attributes:
    network (QNetwork): the online network.
    target_network (QNetwork): the target network.
    replay (ReplayBuffer): the experience replay.
    update_count (int): gradient steps taken.
  """

  def __init__(self, agent_config, shape, master_seed, total_steps):
    """Initializes a DqnAgent object.

    Args:
      agent_config (AgentConfig): the hyperparameters.
      shape (NetworkShape): the network shape.
      master_seed (int): the master seed of the run.
      total_steps (int): the length of the run, for the epsilon schedule.
    """
    self._config = agent_config
    self._total_steps = total_steps
    self.network = network_lib.BuildNetwork(
        shape, seeding.DeriveSeed(master_seed, 'network'))
    self.target_network = network_lib.QNetwork(shape)
    network_lib.SyncTarget(self.network, self.target_network)
    self._optimizer = torch.optim.Adam(
        self.network.parameters(), lr=agent_config.learning_rate)
    self.replay = replay_lib.ReplayBuffer(
        agent_config.replay_capacity,
        (shape.in_channels, shape.height, shape.width),
        seeding.SeedStream(master_seed, 'replay'))
    self._exploration = seeding.SeedStream(master_seed, 'exploration')
    self.update_count = 0
    self._logger = logging.getLogger(self.__class__.__name__)

  def Epsilon(self, step):
    """Returns the exploration probability at a global step."""
    return EpsilonAt(
        step, self._total_steps, self._config.epsilon_start,
        self._config.epsilon_end, self._config.epsilon_fraction)

  def SelectAction(self, observation, env, epsilon=0.0):
    """Selects an action for the observation of an environment."""
    del env  # The network only sees the observation.
    return Act(self.network, observation.channels, epsilon, self._exploration)

  def Observe(self, transition):
    """Stores a transition."""
    self.replay.Add(transition)

  def Learn(self, step):
    """Updates the network when the schedule says so.

    Args:
      step (int): the global step.

    Returns:
      float: the loss, or None if no update happened.

    Raises:
      DivergenceError: if the loss is not finite.
    """
    config = self._config
    if (step < config.learning_starts or step % config.train_every or
        len(self.replay) < config.batch_size):
      return None
    loss = Update(
        self.network, self.target_network, self._optimizer,
        self.replay.Sample(config.batch_size), config.discount,
        double_q=config.double_q)
    self.update_count += 1
    if self.update_count % config.target_sync_every == 0:
      network_lib.SyncTarget(self.network, self.target_network)
      self._logger.debug('Synced target network at update %d',
                         self.update_count)
    return loss

  def LoadParameters(self, network):
    """Replaces the online and target parameters with those of a network."""
    network_lib.SyncTarget(network, self.network)
    network_lib.SyncTarget(network, self.target_network)


class GreedyPolicy(object):
  """Acts greedily with a fixed network, as during evaluation."""

  def __init__(self, network):
    self.network = network

  def SelectAction(self, observation, env, epsilon=0.0):
    del env, epsilon
    return GreedyAction(self.network, observation.channels)
