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
"""Tests for the dqn module."""

import collections
import unittest

import numpy as np
import torch

from informed_drive import config
from informed_drive import errors
from informed_drive.agent import dqn
from informed_drive.agent import network as network_lib
from informed_drive.agent import replay as replay_lib
from informed_drive.world import raster

# pylint: disable=missing-docstring

TOY_SHAPE = network_lib.NetworkShape(1, 4, 4, 1, 2, 2, 1, 2, 1, 2, 3)


def _ConstantNetwork(q_values):
  """Builds a toy network whose Q values ignore the observation."""
  network = network_lib.QNetwork(TOY_SHAPE)
  network_lib.LoadFlatParameters(
      network, np.zeros(network_lib.FlatParameters(network).size))
  with torch.no_grad():
    network.fc2.bias.copy_(torch.tensor(q_values, dtype=torch.float32))
  return network


def _Batch(reward, terminal, size=1):
  observations = np.ones((size,) + TOY_SHAPE[:3], dtype=np.float32)
  return replay_lib.Batch(
      observations=observations, actions=np.zeros(size, dtype=np.int64),
      rewards=np.full(size, reward, dtype=np.float32),
      next_observations=observations,
      terminals=np.full(size, float(terminal), dtype=np.float32))


class ActionSelectionTests(unittest.TestCase):
  """Tests for GreedyAction() and Act()."""

  def setUp(self):
    self.observation = np.zeros(TOY_SHAPE[:3], dtype=np.float32)

  def testTieBreak(self):
    self.assertEqual(
        dqn.GreedyAction(_ConstantNetwork([0.0, 0.0, 0.0]),
                         self.observation), 0)
    self.assertEqual(
        dqn.GreedyAction(_ConstantNetwork([0.0, 1.0, 1.0]),
                         self.observation), 1)
    self.assertEqual(
        dqn.GreedyAction(_ConstantNetwork([0.0, 1.0, 2.0]),
                         self.observation), 2)

  def testGreedy(self):
    network = _ConstantNetwork([0.0, 3.0, 1.0])
    rng = np.random.default_rng(0)
    actions = {dqn.Act(network, self.observation, 0.0, rng)
               for _ in range(50)}
    self.assertEqual(actions, {1})

  def testUniformExploration(self):
    network = _ConstantNetwork([0.0, 3.0, 1.0])
    rng = np.random.default_rng(0)
    counts = collections.Counter(
        dqn.Act(network, self.observation, 1.0, rng) for _ in range(3000))
    self.assertEqual(set(counts), {0, 1, 2})
    for count in counts.values():
      self.assertGreater(count, 850)
      self.assertLess(count, 1150)

  def testAlwaysDraws(self):
    network = _ConstantNetwork([0.0, 3.0, 1.0])
    rng = np.random.default_rng(9)
    reference = np.random.default_rng(9)
    dqn.Act(network, self.observation, 0.0, rng)
    reference.random()
    self.assertEqual(rng.random(), reference.random())


class EpsilonAtTests(unittest.TestCase):
  """Tests for EpsilonAt()."""

  def testSchedule(self):
    self.assertEqual(dqn.EpsilonAt(0, 100, 1.0, 0.05, 0.25), 1.0)
    self.assertAlmostEqual(
        dqn.EpsilonAt(10, 100, 1.0, 0.05, 0.25), 0.62, places=12)
    self.assertEqual(dqn.EpsilonAt(25, 100, 1.0, 0.05, 0.25), 0.05)
    self.assertEqual(dqn.EpsilonAt(99, 100, 1.0, 0.05, 0.25), 0.05)
    self.assertEqual(dqn.EpsilonAt(0, 100, 1.0, 0.05, 0.0), 0.05)

  def testMonotone(self):
    values = [dqn.EpsilonAt(step, 1000, 1.0, 0.1, 0.5)
              for step in range(1000)]
    self.assertTrue(all(
        later <= earlier for earlier, later in zip(values, values[1:])))


class UpdateTests(unittest.TestCase):
  """Tests for TemporalDifferenceLoss() and Update()."""

  def testTerminalIgnoresBootstrap(self):
    network = _ConstantNetwork([0.0, 0.0, 0.0])
    target = _ConstantNetwork([100.0, 100.0, 100.0])
    terminal = dqn.TemporalDifferenceLoss(
        network, target, _Batch(0.5, True), 0.9)
    bootstrap = dqn.TemporalDifferenceLoss(
        network, target, _Batch(0.5, False), 0.9)
    # Huber loss of a 0.5 error, then of a 90.5 error.
    self.assertAlmostEqual(terminal.item(), 0.125, places=6)
    self.assertAlmostEqual(bootstrap.item(), 90.0, places=4)

  def testDoubleQ(self):
    network = _ConstantNetwork([0.0, 1.0, 0.0])
    target = _ConstantNetwork([5.0, 1.0, 3.0])
    single = dqn.TemporalDifferenceLoss(
        network, target, _Batch(0.0, False), 1.0)
    double = dqn.TemporalDifferenceLoss(
        network, target, _Batch(0.0, False), 1.0, double_q=True)
    # Targets are 5 and 1 against a Q value of 0.
    self.assertAlmostEqual(single.item(), 4.5, places=5)
    self.assertAlmostEqual(double.item(), 0.5, places=5)

  def testLossDecreases(self):
    network = network_lib.BuildNetwork(TOY_SHAPE, 0).double()
    target = network_lib.BuildNetwork(TOY_SHAPE, 0).double()
    optimizer = torch.optim.SGD(network.parameters(), lr=0.01)
    batch = _Batch(1.0, True, size=4)
    losses = [dqn.Update(network, target, optimizer, batch, 0.997)
              for _ in range(30)]
    for earlier, later in zip(losses, losses[1:]):
      self.assertLessEqual(later, earlier + 1e-12)
    self.assertLess(losses[-1], losses[0])

  def testDivergence(self):
    network = network_lib.BuildNetwork(TOY_SHAPE, 0)
    target = network_lib.BuildNetwork(TOY_SHAPE, 0)
    optimizer = torch.optim.SGD(network.parameters(), lr=0.01)
    with self.assertRaises(errors.DivergenceError):
      dqn.Update(network, target, optimizer, _Batch(float('inf'), True), 0.9)

  def testEmptyBatch(self):
    network = network_lib.BuildNetwork(TOY_SHAPE, 0)
    optimizer = torch.optim.SGD(network.parameters(), lr=0.01)
    with self.assertRaises(ValueError):
      dqn.Update(network, network, optimizer, _Batch(0.0, True, size=0), 0.9)


class DqnAgentTests(unittest.TestCase):
  """Tests for DqnAgent and GreedyPolicy."""

  def setUp(self):
    self.agent_config = config.ReplaceConfig(
        config.DefaultConfig(), agent={
            'replay_capacity': 10, 'batch_size': 2, 'learning_starts': 0,
            'target_sync_every': 2, 'epsilon_fraction': 0.5}).agent

  def _Observation(self, value=0.0):
    return raster.ObservationGrid(
        np.full(TOY_SHAPE[:3], value, dtype=np.float32), 0.5)

  def _Agent(self, master_seed=0):
    return dqn.DqnAgent(self.agent_config, TOY_SHAPE, master_seed, 100)

  def testSeeded(self):
    np.testing.assert_array_equal(
        network_lib.FlatParameters(self._Agent().network),
        network_lib.FlatParameters(self._Agent().network))
    np.testing.assert_array_equal(
        network_lib.FlatParameters(self._Agent().network),
        network_lib.FlatParameters(self._Agent().target_network))

  def testEpsilon(self):
    agent = self._Agent()
    self.assertEqual(agent.Epsilon(0), 1.0)
    self.assertEqual(agent.Epsilon(50), 0.05)

  def testLearn(self):
    agent = self._Agent()
    self.assertIsNone(agent.Learn(1))
    for action in range(2):
      agent.Observe(replay_lib.Transition(
          self._Observation(1.0).channels, action, 1.0,
          self._Observation().channels, True))
    self.assertIsInstance(agent.Learn(1), float)
    self.assertEqual(agent.update_count, 1)
    self.assertFalse(np.array_equal(
        network_lib.FlatParameters(agent.network),
        network_lib.FlatParameters(agent.target_network)))
    agent.Learn(2)
    self.assertEqual(agent.update_count, 2)
    np.testing.assert_array_equal(
        network_lib.FlatParameters(agent.network),
        network_lib.FlatParameters(agent.target_network))

  def testSelectAction(self):
    agent = self._Agent()
    action = agent.SelectAction(self._Observation(), None, epsilon=0.0)
    self.assertEqual(
        action, dqn.GreedyAction(agent.network, self._Observation().channels))

  def testGreedyPolicy(self):
    policy = dqn.GreedyPolicy(_ConstantNetwork([0.0, 0.0, 4.0]))
    self.assertEqual(
        policy.SelectAction(self._Observation(), None, epsilon=1.0), 2)

  def testLoadParameters(self):
    agent = self._Agent()
    other = network_lib.BuildNetwork(TOY_SHAPE, 99)
    agent.LoadParameters(other)
    np.testing.assert_array_equal(
        network_lib.FlatParameters(agent.network),
        network_lib.FlatParameters(other))


if __name__ == '__main__':
  unittest.main()
