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
"""Greedy evaluation of policies over scenario sets."""

import collections
import concurrent.futures
import logging

import numpy as np
import torch

from informed_drive import artifacts
from informed_drive import errors
from informed_drive.agent import dqn
from informed_drive.agent import network as network_lib
from informed_drive.harness import ablations
from informed_drive.harness import episodes
from informed_drive.harness import policies
from informed_drive.world import env as env_lib
from informed_drive.world import scenario as scenario_lib

POLICY_CHECKPOINT = 'checkpoint'
POLICY_SCRIPTED = 'scripted'

SPLIT_TRAIN = 'train'
SPLIT_VALIDATION = 'validation'
SPLIT_EVAL = 'eval'
SPLITS = (SPLIT_TRAIN, SPLIT_VALIDATION, SPLIT_EVAL)

# Failure label of episodes that crossed s_target outside the ego lane.
FAILURE_LATERAL_MISS = 'lateral_miss'

PolicySpec = collections.namedtuple('PolicySpec', ['kind', 'value'])

EvaluationSummary = collections.namedtuple(
    'EvaluationSummary', ['rows', 'aggregates'])


def SplitRange(run_config, split):
  """Returns the [start, end) scenario indices of a split."""
  harness = run_config.harness
  return {
      SPLIT_TRAIN: harness.train_seeds,
      SPLIT_VALIDATION: harness.validation_seeds,
      SPLIT_EVAL: harness.eval_seeds,
  }[split]


def SplitScenarios(run_config, split, kind=scenario_lib.KIND_ANOMALY,
                   count=None, scenario_root=None):
  """Returns the scenarios of a split.

  Args:
    run_config (RunConfig): the run configuration.
    split (str): one of SPLITS.
    kind (str): the scenario kind.
    count (int): only return the first count scenarios.
    scenario_root (str): a benchmark directory to read scenarios from.

  Returns:
    list[Scenario]: the scenarios.
  """
  start, end = SplitRange(run_config, split)
  if count is not None:
    end = min(end, start + count)
  return [
      scenario_lib.LoadBenchmarkScenario(
          scenario_root, run_config.harness.benchmark_seed, kind, index,
          run_config.world.lane_width, run_config.world.path_length)
      for index in range(start, end)]


def BuildPolicy(run_config, policy_spec, setup):
  """Instantiates the policy described by a PolicySpec.

  Raises:
    CheckpointError: if the checkpoint doesn't match the configured network.
    ValueError: if the policy kind or name is unknown.
  """
  if policy_spec.kind == POLICY_CHECKPOINT:
    shape = network_lib.ShapeFromConfig(
        run_config.agent, setup.env.action_count)
    return dqn.GreedyPolicy(
        network_lib.NetworkFromBytes(policy_spec.value, expected_shape=shape))
  if policy_spec.kind == POLICY_SCRIPTED:
    if policy_spec.value not in policies.SCRIPTED_POLICIES:
      raise ValueError('Unknown scripted policy {0!r}'.format(
          policy_spec.value))
    if setup.ablation.action_mode != env_lib.MODE_TRAJECTORY:
      raise ValueError('Scripted policies need trajectory actions')
    return policies.SCRIPTED_POLICIES[policy_spec.value]()
  raise ValueError('Unknown policy kind {0!r}'.format(policy_spec.kind))


def _EvaluateScenarios(run_config, policy_spec, scenarios):
  """Runs greedy episodes; the unit of work of evaluation workers."""
  torch.set_num_threads(run_config.agent.torch_threads)
  setup = ablations.ApplyAblation(run_config)
  policy = BuildPolicy(run_config, policy_spec, setup)
  return [
      episodes.RunEpisode(setup, policy, scenario, mode=episodes.MODE_EVAL)[0]
      for scenario in scenarios]


def FailureLabel(result):
  """Returns why an episode failed, or None if it fully succeeded."""
  if result.finished_score == 1.0:
    return None
  if result.finished_score == 0.5:
    return FAILURE_LATERAL_MISS
  return result.termination_reason


def Summarize(rows):
  """Aggregates per scenario results.

  Args:
    rows (list[EpisodeResult]): the results.

  Returns:
    collections.OrderedDict: the aggregates.
  """
  arrived = np.array([row.arrived_distance for row in rows])
  finished = np.array([row.finished_score for row in rows])
  returns = np.array([row.episode_return for row in rows])
  failures = collections.Counter(
      label for label in map(FailureLabel, rows) if label)
  return collections.OrderedDict([
      ('episodes', len(rows)),
      ('arrived_distance_mean', float(arrived.mean())),
      ('arrived_distance_std', float(arrived.std())),
      ('finished_score_mean', float(finished.mean())),
      ('finished_score_std', float(finished.std())),
      ('return_mean', float(returns.mean())),
      ('failures', collections.OrderedDict(sorted(failures.items()))),
  ])


def Evaluate(run_config, policy_spec, scenarios, workers=1):
  """Evaluates a policy greedily on a scenario set.

  Episodes may run in worker processes; results are merged by scenario kind
  and id, so the summary doesn't depend on the number of workers.

  Args:
    run_config (RunConfig): the run configuration.
    policy_spec (PolicySpec): the policy.
    scenarios (list[Scenario]): the scenarios.
    workers (int): the number of worker processes.

  Returns:
    EvaluationSummary: per scenario rows and aggregates.

  Raises:
    EvaluationError: if there are no scenarios.
    CheckpointError: if the checkpoint doesn't match the configuration.
  """
  if not scenarios:
    raise errors.EvaluationError('Cannot evaluate on an empty scenario set')
  logger = logging.getLogger(__name__)
  workers = max(1, min(workers, len(scenarios)))
  if workers == 1:
    rows = _EvaluateScenarios(run_config, policy_spec, scenarios)
  else:
    # Fail fast on checkpoint mismatches, before spawning workers.
    BuildPolicy(run_config, policy_spec, ablations.ApplyAblation(run_config))
    chunks = [scenarios[index::workers] for index in range(workers)]
    logger.info('Evaluating %d scenarios on %d workers', len(scenarios),
                workers)
    rows = []
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
      futures = [
          pool.submit(_EvaluateScenarios, run_config, policy_spec, chunk)
          for chunk in chunks]
      for future in futures:
        rows.extend(future.result())
  rows = sorted(rows, key=lambda row: (row.kind, row.scenario_id))
  return EvaluationSummary(rows, Summarize(rows))


def EvaluationArtifacts(summary, rule_ids, prefix=''):
  """Renders an evaluation summary as episodes.csv and summary.json."""
  header = [
      'kind', 'scenario_id', 'arrived_distance', 'finished_score', 'steps',
      'return', 'termination_reason', 'active_start', 'active_end']
  header.extend('violations_' + rule_id for rule_id in rule_ids)
  rows = []
  for row in summary.rows:
    span = row.active_span or (None, None)
    rows.append(
        [row.kind, row.scenario_id, float(row.arrived_distance),
         float(row.finished_score), row.steps, float(row.episode_return),
         row.termination_reason, span[0], span[1]] +
        [row.violation_counts.get(rule_id, 0) for rule_id in rule_ids])
  return [
      artifacts.CsvArtifact(prefix + 'episodes.csv', header, rows),
      artifacts.JsonArtifact(prefix + 'summary.json', summary.aggregates),
  ]
