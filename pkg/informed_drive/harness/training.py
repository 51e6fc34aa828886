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
"""Curriculum training of the DQN agent.

The first phase drives normal scenarios only, so that the agent learns
regular driving; the second phase samples anomaly scenarios of the train
split, where passing the obstacle requires leaving the ego lane.
"""

import collections
import logging
import os

import numpy as np
from progress.bar import IncrementalBar
import torch

from informed_drive import artifacts
from informed_drive import config as config_lib
from informed_drive import seeding
from informed_drive.agent import dqn
from informed_drive.agent import network as network_lib
from informed_drive.harness import ablations
from informed_drive.harness import episodes
from informed_drive.harness import evaluation
from informed_drive.harness import metrics
from informed_drive.world import scenario as scenario_lib

METRICS_FILE = 'metrics.csv'
EVAL_METRICS_FILE = 'eval_metrics.csv'
CHECKPOINT_FILE = 'checkpoint.bin'
CONFIG_FILE = 'config.yaml'

TrainingResult = collections.namedtuple(
    'TrainingResult', ['metrics_path', 'checkpoint_path', 'steps', 'episodes'])


def ConfigureTorch(agent_config):
  """Makes torch computations reproducible."""
  torch.use_deterministic_algorithms(True)
  torch.set_num_threads(agent_config.torch_threads)


class _Schedule(episodes.TrainingHooks):
  """Counts global steps and drives the agent's updates."""

  def __init__(self, agent, total_steps, first_step=0, progress_bar=None):
    self.step = first_step
    self._agent = agent
    self._total_steps = total_steps
    self._progress_bar = progress_bar

  def Epsilon(self):
    return self._agent.Epsilon(self.step + 1)

  def OnStep(self, transition):
    self.step += 1
    if self._progress_bar:
      self._progress_bar.next()
    self._agent.Observe(transition)
    return self._agent.Learn(self.step)

  def ShouldStop(self):
    return self.step >= self._total_steps


class Trainer(object):
  """Trains one ablation and writes its outputs to a directory."""

  def __init__(self, run_config, output_dir, scenario_root=None,
               show_progress=False):
    """Initializes a Trainer object.

    Args:
      run_config (RunConfig): the run configuration.
      output_dir (str): where metrics, checkpoints and the stamp go.
      scenario_root (str): a benchmark directory to read scenarios from,
          scenarios are generated when absent.
      show_progress (bool): whether to display a progress bar.
    """
    self._run_config = run_config
    self._output_dir = output_dir
    self._scenario_root = scenario_root
    self._show_progress = show_progress
    self._writer = artifacts.LocalWriter(output_dir)
    self._scenarios = {}
    self._logger = logging.getLogger(self.__class__.__name__)

  def _Scenario(self, kind, index):
    key = (kind, index)
    if key not in self._scenarios:
      self._scenarios[key] = scenario_lib.LoadBenchmarkScenario(
          self._scenario_root, self._run_config.harness.benchmark_seed, kind,
          index, self._run_config.world.lane_width,
          self._run_config.world.path_length)
    return self._scenarios[key]

  def _NextScenario(self, rng, step):
    """Draws the scenario of the next episode from the curriculum."""
    start, end = self._run_config.harness.train_seeds
    index = int(rng.integers(start, end))
    if step < self._run_config.run.curriculum_switch_step:
      return metrics.PHASE_NORMAL, self._Scenario(
          scenario_lib.KIND_NORMAL, index)
    return metrics.PHASE_ANOMALY, self._Scenario(
        scenario_lib.KIND_ANOMALY, index)

  def _Evaluate(self, agent, setup, eval_scenarios):
    results = [
        episodes.RunEpisode(
            setup, dqn.GreedyPolicy(agent.network), scenario,
            mode=episodes.MODE_EVAL)[0]
        for scenario in eval_scenarios]
    return evaluation.Summarize(results)

  def _SaveCheckpoint(self, agent):
    return self._writer.WriteArtifact(artifacts.BytesArtifact(
        CHECKPOINT_FILE, network_lib.CheckpointBytes(agent.network)))

  def Train(self, resume=False):
    """Runs the training loop.

    Args:
      resume (bool): continue from the checkpoint and metrics of a previous
          run in the output directory. The replay buffer starts empty.

    Returns:
      TrainingResult: where the outputs went.

    Raises:
      DivergenceError: if the loss diverges; the metrics logged so far are
          kept.
    """
    run_config = self._run_config
    run = run_config.run
    harness = run_config.harness
    ConfigureTorch(run_config.agent)

    setup = ablations.ApplyAblation(run_config)
    shape = network_lib.ShapeFromConfig(
        run_config.agent, setup.env.action_count)
    agent = dqn.DqnAgent(
        run_config.agent, shape, run.master_seed, run.total_steps)
    curriculum = seeding.SeedStream(run.master_seed, 'curriculum')

    metrics_path = os.path.join(self._output_dir, METRICS_FILE)
    checkpoint_path = os.path.join(self._output_dir, CHECKPOINT_FILE)
    first_step = 0
    episode = 0
    if resume and os.path.exists(checkpoint_path):
      agent.LoadParameters(
          network_lib.LoadCheckpoint(checkpoint_path, expected_shape=shape))
      last = metrics.LastRow(metrics_path)
      if last is not None:
        first_step = int(last['step'])
        episode = int(last['episode']) + 1
      self._logger.info('Resuming from step %d', first_step)

    config_text = config_lib.DumpConfig(run_config)
    self._writer.WriteArtifact(
        artifacts.StringArtifact(CONFIG_FILE, config_text))
    self._writer.WriteStamp(artifacts.MakeStamp(
        config_text, run.ablation, run.master_seed, run.total_steps))

    eval_scenarios = []
    if harness.eval_every:
      eval_scenarios = evaluation.SplitScenarios(
          run_config, evaluation.SPLIT_EVAL, count=harness.eval_episodes,
          scenario_root=self._scenario_root)
    next_eval = None
    if harness.eval_every:
      next_eval = (first_step // harness.eval_every + 1) * harness.eval_every

    progress_bar = None
    if self._show_progress:
      progress_bar = IncrementalBar(
          'Training {0:s}'.format(run.ablation), max=run.total_steps,
          suffix='%(index)d/%(max)d steps, ETA %(eta_td)s')
      progress_bar.goto(first_step)
    schedule = _Schedule(agent, run.total_steps, first_step, progress_bar)

    self._logger.info(
        'Training %s for %d steps (seed %d)', run.ablation, run.total_steps,
        run.master_seed)
    train_log = metrics.MetricsLog(metrics_path, append=resume)
    eval_log = metrics.MetricsLog(
        os.path.join(self._output_dir, EVAL_METRICS_FILE), append=resume)
    eval_round = 0
    try:
      while not schedule.ShouldStop():
        phase, scenario = self._NextScenario(curriculum, schedule.step)
        result, losses = episodes.RunEpisode(
            setup, agent, scenario, mode=episodes.MODE_TRAIN, hooks=schedule)
        train_log.Append(metrics.MetricsRow(
            step=schedule.step, episode=episode, phase=phase,
            ablation=run.ablation,
            arrived_distance=float(result.arrived_distance),
            finished_score=float(result.finished_score),
            episode_return=float(result.episode_return),
            loss=float(np.mean(losses)) if losses else None,
            epsilon=float(agent.Epsilon(schedule.step))))
        episode += 1

        if next_eval is not None and schedule.step >= next_eval:
          summary = self._Evaluate(agent, setup, eval_scenarios)
          eval_log.Append(metrics.MetricsRow(
              step=schedule.step, episode=eval_round, phase=metrics.PHASE_EVAL,
              ablation=run.ablation,
              arrived_distance=summary['arrived_distance_mean'],
              finished_score=summary['finished_score_mean'],
              episode_return=summary['return_mean'], loss=None,
              epsilon=0.0))
          self._logger.info(
              'Step %d: eval finished score %.3f, arrived distance %.1f',
              schedule.step, summary['finished_score_mean'],
              summary['arrived_distance_mean'])
          self._SaveCheckpoint(agent)
          eval_round += 1
          while next_eval <= schedule.step:
            next_eval += harness.eval_every
    finally:
      train_log.Close()
      eval_log.Close()
      if progress_bar:
        progress_bar.finish()

    self._SaveCheckpoint(agent)
    self._logger.info('Training done after %d episodes', episode)
    return TrainingResult(
        metrics_path=metrics_path, checkpoint_path=checkpoint_path,
        steps=schedule.step, episodes=episode)


def Train(run_config, output_dir, **kwargs):
  """Trains the configured ablation; see Trainer."""
  resume = kwargs.pop('resume', False)
  return Trainer(run_config, output_dir, **kwargs).Train(resume=resume)
