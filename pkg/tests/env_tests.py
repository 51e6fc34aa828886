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
"""Tests for the env module."""

import unittest

from informed_drive import config
from informed_drive import errors
from informed_drive.world import atoms
from informed_drive.world import env as env_lib
from informed_drive.world import scenario as scenario_lib

# pylint: disable=missing-docstring


def _Env(action_mode=env_lib.MODE_TRAJECTORY, **world):
  run_config = config.DefaultConfig()
  if world:
    run_config = config.ReplaceConfig(run_config, world=world)
  return env_lib.LaneWorldEnv(
      run_config.world, run_config.trajectory, run_config.controller,
      action_mode=action_mode)


def _LateObstacleScenario():
  """Returns the first benchmark anomaly with an obstacle past 35m."""
  index = 0
  while True:
    scenario = scenario_lib.BenchmarkScenario(
        42, scenario_lib.KIND_ANOMALY, index)
    if scenario.obstacle.s_center >= 35.0:
      return scenario
    index += 1


class LaneWorldEnvTests(unittest.TestCase):
  """Tests for LaneWorldEnv."""

  def testUnknownMode(self):
    with self.assertRaises(ValueError):
      _Env(action_mode='teleport')

  def testActionCount(self):
    self.assertEqual(_Env().action_count, 3)
    self.assertEqual(_Env(env_lib.MODE_CONTROL).action_count, 9)

  def testStepBeforeReset(self):
    with self.assertRaises(errors.EnvironmentTerminatedError):
      _Env().Step(0)

  def testBadAction(self):
    env = _Env()
    env.Reset(scenario_lib.BenchmarkScenario(42, scenario_lib.KIND_NORMAL, 0))
    with self.assertRaises(ValueError):
      env.Step(3)
    with self.assertRaises(ValueError):
      env.Step(-1)

  def testKeepLane(self):
    env = _Env()
    env.Reset(scenario_lib.BenchmarkScenario(42, scenario_lib.KIND_NORMAL, 0))
    outcome = None
    while not env.terminated:
      _, outcome = env.Step(0)
      self.assertEqual(len(outcome.trace_states), len(outcome.visited))
      for assignment in outcome.trace_states:
        self.assertTrue(all(assignment.values()))
    self.assertEqual(outcome.termination_reason, env_lib.TERMINATION_GOAL)
    self.assertTrue(outcome.events.reached_s_target)
    self.assertTrue(outcome.events.reached_both)
    with self.assertRaises(errors.EnvironmentTerminatedError):
      env.Step(0)

  def testSubSteps(self):
    env = _Env()
    env.Reset(scenario_lib.BenchmarkScenario(42, scenario_lib.KIND_NORMAL, 1))
    _, outcome = env.Step(0)
    self.assertEqual(len(outcome.visited), 5)
    self.assertGreater(outcome.traveled_length, 2.0)
    self.assertEqual(env.steps, 1)
    self.assertIsNotNone(env.planned_trajectory)

  def testSameActionKeepsTrajectory(self):
    env = _Env()
    env.Reset(scenario_lib.BenchmarkScenario(42, scenario_lib.KIND_NORMAL, 1))
    env.Step(2)
    planned = env.planned_trajectory
    env.Step(2)
    self.assertIs(env.planned_trajectory, planned)

  def testBaselineStandstill(self):
    env = _Env(env_lib.MODE_CONTROL, initial_speed=0.0)
    env.Reset(scenario_lib.BenchmarkScenario(42, scenario_lib.KIND_NORMAL, 0))
    start = env.state
    _, outcome = env.Step(env_lib.CONTROL_ACTIONS.index((0.0, 0.0)))
    self.assertEqual(outcome.traveled_length, 0.0)
    self.assertEqual((outcome.state.x, outcome.state.y), (start.x, start.y))
    self.assertEqual(len(outcome.trace_states), 1)
    self.assertFalse(outcome.terminated)

  def testLaneChangeAvoidsObstacle(self):
    env = _Env()
    scenario = _LateObstacleScenario()
    env.Reset(scenario)
    obstacle = scenario.obstacle
    clear_s = obstacle.s_center + obstacle.length / 2.0 + 5.0
    while not env.terminated and env.state.frenet.s < clear_s:
      manifolds = env.CandidateManifolds()
      action = [manifold.d for manifold in manifolds].index(
          scenario.lane_width)
      _, outcome = env.Step(action)
      self.assertFalse(outcome.events.collision)
      self.assertFalse(outcome.events.off_road)
    self.assertGreaterEqual(env.state.frenet.s, clear_s)

  def testCollision(self):
    env = _Env()
    scenario = _LateObstacleScenario()
    env.Reset(scenario)
    outcome = None
    while not env.terminated:
      _, outcome = env.Step(0)
    self.assertEqual(
        outcome.termination_reason, env_lib.TERMINATION_COLLISION)
    self.assertTrue(outcome.events.collision)
    self.assertFalse(
        outcome.trace_states[-1][atoms.ATOM_NO_COLLISION])

  def testStepBudget(self):
    env = _Env(step_budget=2)
    env.Reset(scenario_lib.BenchmarkScenario(42, scenario_lib.KIND_NORMAL, 0))
    _, outcome = env.Step(0)
    self.assertFalse(outcome.terminated)
    _, outcome = env.Step(0)
    self.assertEqual(outcome.termination_reason, env_lib.TERMINATION_BUDGET)

  def testObserve(self):
    env = _Env()
    observation = env.Reset(
        scenario_lib.BenchmarkScenario(42, scenario_lib.KIND_ANOMALY, 0))
    self.assertEqual(observation.channels.shape, (3, 64, 64))


class RunEnvStepTests(unittest.TestCase):
  """Tests for RunEnvStep()."""

  def testRewardInputs(self):
    env = _Env()
    scenario = scenario_lib.BenchmarkScenario(42, scenario_lib.KIND_NORMAL, 0)
    env.Reset(scenario)
    _, outcome, reward_inputs = env_lib.RunEnvStep(env, 0)
    self.assertIs(reward_inputs.outcome, outcome)
    self.assertIs(reward_inputs.scenario, scenario)


if __name__ == '__main__':
  unittest.main()
