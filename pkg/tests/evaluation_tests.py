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
"""Tests for the evaluation module."""

import json
import unittest

from informed_drive import config
from informed_drive import errors
from informed_drive.agent import dqn
from informed_drive.agent import network as network_lib
from informed_drive.harness import ablations
from informed_drive.harness import episodes
from informed_drive.harness import evaluation
from informed_drive.world import scenario as scenario_lib

# pylint: disable=missing-docstring

KEEP_LANE = evaluation.PolicySpec(evaluation.POLICY_SCRIPTED, 'keep_lane')


def _Config(ablation='combination'):
  return config.ReplaceConfig(
      config.DefaultConfig(), run={'ablation': ablation})


def _Result(finished_score, termination_reason='goal'):
  return episodes.EpisodeResult(
      scenario_id=0, kind=scenario_lib.KIND_ANOMALY, arrived_distance=10.0,
      finished_score=finished_score, steps=4, episode_return=1.0,
      violation_counts={}, active_span=None,
      termination_reason=termination_reason)


class SplitTests(unittest.TestCase):
  """Tests for the scenario splits."""

  def testRanges(self):
    run_config = _Config()
    self.assertEqual(
        evaluation.SplitRange(run_config, evaluation.SPLIT_TRAIN), (0, 800))
    self.assertEqual(
        evaluation.SplitRange(run_config, evaluation.SPLIT_VALIDATION),
        (800, 900))
    self.assertEqual(
        evaluation.SplitRange(run_config, evaluation.SPLIT_EVAL), (900, 1000))

  def testSplitScenarios(self):
    scenarios = evaluation.SplitScenarios(
        _Config(), evaluation.SPLIT_EVAL, count=3)
    self.assertEqual(
        [scenario.scenario_id for scenario in scenarios], [900, 901, 902])
    self.assertEqual(
        scenarios[0],
        scenario_lib.BenchmarkScenario(42, scenario_lib.KIND_ANOMALY, 900))


class BuildPolicyTests(unittest.TestCase):
  """Tests for BuildPolicy()."""

  def testCheckpoint(self):
    run_config = _Config()
    setup = ablations.ApplyAblation(run_config)
    shape = network_lib.ShapeFromConfig(run_config.agent, 3)
    data = network_lib.CheckpointBytes(network_lib.BuildNetwork(shape, 0))
    policy = evaluation.BuildPolicy(
        run_config,
        evaluation.PolicySpec(evaluation.POLICY_CHECKPOINT, data), setup)
    self.assertIsInstance(policy, dqn.GreedyPolicy)

  def testCheckpointMismatch(self):
    baseline = _Config('baseline')
    shape = network_lib.ShapeFromConfig(baseline.agent, 3)
    data = network_lib.CheckpointBytes(network_lib.BuildNetwork(shape, 0))
    with self.assertRaises(errors.CheckpointError):
      evaluation.BuildPolicy(
          baseline, evaluation.PolicySpec(evaluation.POLICY_CHECKPOINT, data),
          ablations.ApplyAblation(baseline))

  def testScripted(self):
    run_config = _Config()
    setup = ablations.ApplyAblation(run_config)
    with self.assertRaises(ValueError):
      evaluation.BuildPolicy(
          run_config,
          evaluation.PolicySpec(evaluation.POLICY_SCRIPTED, 'teleport'),
          setup)
    with self.assertRaises(ValueError):
      evaluation.BuildPolicy(
          run_config, evaluation.PolicySpec('lookup', None), setup)
    baseline = _Config('baseline')
    with self.assertRaises(ValueError):
      evaluation.BuildPolicy(
          baseline, KEEP_LANE, ablations.ApplyAblation(baseline))


class EvaluateTests(unittest.TestCase):
  """Tests for Evaluate() and its summaries."""

  def testEmpty(self):
    with self.assertRaises(errors.EvaluationError):
      evaluation.Evaluate(_Config(), KEEP_LANE, [])

  def testKeepLane(self):
    scenarios = evaluation.SplitScenarios(
        _Config(), evaluation.SPLIT_EVAL, kind=scenario_lib.KIND_NORMAL,
        count=3)
    summary = evaluation.Evaluate(_Config(), KEEP_LANE, scenarios)
    self.assertEqual(summary.aggregates['episodes'], 3)
    self.assertEqual(summary.aggregates['finished_score_mean'], 1.0)
    self.assertEqual(summary.aggregates['finished_score_std'], 0.0)
    self.assertEqual(summary.aggregates['failures'], {})

  def testDeterministicAcrossWorkers(self):
    run_config = _Config()
    scenarios = evaluation.SplitScenarios(
        run_config, evaluation.SPLIT_EVAL, count=3)
    single = evaluation.Evaluate(run_config, KEEP_LANE, scenarios)
    again = evaluation.Evaluate(run_config, KEEP_LANE, scenarios)
    pooled = evaluation.Evaluate(run_config, KEEP_LANE, scenarios, workers=2)
    self.assertEqual(single, again)
    self.assertEqual(single, pooled)
    self.assertEqual(
        single.aggregates['failures'], {'collision': 3})

  def testFailureLabel(self):
    self.assertIsNone(evaluation.FailureLabel(_Result(1.0)))
    self.assertEqual(
        evaluation.FailureLabel(_Result(0.5)),
        evaluation.FAILURE_LATERAL_MISS)
    self.assertEqual(
        evaluation.FailureLabel(_Result(0.0, 'off_road')), 'off_road')

  def testArtifacts(self):
    summary = evaluation.EvaluationSummary(
        [_Result(1.0)._replace(violation_counts={'psi2': 3},
                               active_span=(12.0, 30.5))],
        evaluation.Summarize([_Result(1.0)]))
    csv_artifact, json_artifact = evaluation.EvaluationArtifacts(
        summary, ['psi1', 'psi2'], prefix='eval_')
    self.assertEqual(csv_artifact.name, 'eval_episodes.csv')
    lines = csv_artifact.OpenStream().read().decode('utf-8').splitlines()
    self.assertEqual(
        lines[0],
        'kind,scenario_id,arrived_distance,finished_score,steps,return,'
        'termination_reason,active_start,active_end,violations_psi1,'
        'violations_psi2')
    self.assertEqual(lines[1], 'anomaly,0,10.0,1.0,4,1.0,goal,12.0,30.5,0,3')
    document = json.loads(json_artifact.OpenStream().read().decode('utf-8'))
    self.assertEqual(document['episodes'], 1)
    self.assertEqual(document['failures'], {})


if __name__ == '__main__':
  unittest.main()
