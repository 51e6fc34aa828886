#!/usr/bin/env python
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
"""Command line tool to generate scenarios, train, evaluate and replay."""

from __future__ import print_function

import argparse
import logging
import os
import sys

from progress.bar import IncrementalBar

from informed_drive import artifacts
from informed_drive import config as config_lib
from informed_drive import errors
from informed_drive import rulebook as rulebook_lib
from informed_drive.harness import ablations
from informed_drive.harness import episodes
from informed_drive.harness import evaluation
from informed_drive.harness import metrics
from informed_drive.harness import policies
from informed_drive.harness import training
from informed_drive.world import atoms
from informed_drive.world import scenario as scenario_lib

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

REPLAY_COLUMNS = (
    ('step', 'time', 'x', 'y', 's', 'd', 'speed', 'action') + atoms.ATOMS +
    ('rulebook_active', 'r_ego', 'r_rb', 'r_total'))

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(name)s - %(message)s'


class ReplayRecorder(object):
  """Collects one CSV row per simulation sub-step of an episode."""

  def __init__(self, dt):
    self.rows = []
    self._dt = dt
    self._step = 0
    self._substeps = 0

  def __call__(self, outcome, breakdown, active):
    last = len(outcome.visited) - 1
    for index, (state, assignment) in enumerate(
        zip(outcome.visited, outcome.trace_states)):
      self._substeps += 1
      row = [self._step, self._substeps * self._dt, state.x, state.y,
             state.frenet.s, state.frenet.d, state.speed, outcome.action]
      row.extend(int(assignment[atom]) for atom in atoms.ATOMS)
      row.append(int(active))
      # Rewards are granted once per step, on its last sub-step.
      if index == last:
        row.extend([breakdown.r_ego, breakdown.r_rb, breakdown.r_total])
      else:
        row.extend([None, None, None])
      self.rows.append(row)
    self._step += 1


class InformedDrive(object):
  """Class implementing the command line tool.

  Attributes:
    _ablations (dict[str, BaseAblation]): the available ablations.
  """

  def __init__(self, ablations_registry=None):
    """Instantiates the InformedDrive object.

    Args:
      ablations_registry (dict[str, type]): the available ablations.

    Raises:
      errors.BadConfigOption: if no ablation registry is passed.
    """
    if ablations_registry is None:
      raise errors.BadConfigOption(
          'The ablations_registry argument must not be None')
    self._ablations = ablations_registry
    self._logger = logging.getLogger(self.__class__.__name__)
    self._options = None
    self._log_handler = None

  def _AddConfigArgument(self, parser, required=False):
    parser.add_argument(
        '--config', action='store', required=required,
        help='Path to the YAML run configuration (defaults apply otherwise)')

  def _AddAblationArgument(self, parser):
    parser.add_argument(
        '--ablation', action='store', choices=sorted(self._ablations),
        help='Overrides run.ablation')

  def _AddPolicyArguments(self, parser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument(
        '--checkpoint', action='store',
        help='Path to a checkpoint.bin written by the train command')
    group.add_argument(
        '--policy', action='store', choices=sorted(policies.SCRIPTED_POLICIES),
        help='A scripted policy, for trajectory action ablations')

  def _CreateParser(self):
    """Returns an instance of argparse.ArgumentParser."""
    parser = argparse.ArgumentParser(
        description=(
            'Train and evaluate driving agents that may break traffic rules '
            'in a controlled way'))
    parser.add_argument(
        '--verbose', action='store_true', default=False,
        help='Log debug messages')
    parser.add_argument(
        '--log_file', action='store', required=False,
        help='Also write log messages to this file')
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    generate = subparsers.add_parser(
        'gen-scenarios', help='Generate a benchmark of scenario files')
    generate.add_argument(
        '--count', action='store', type=int, required=True,
        help='Number of scenarios per kind')
    generate.add_argument(
        '--seed', action='store', type=int, default=42,
        help='The benchmark seed')
    generate.add_argument(
        '--kind', action='store', default='all',
        choices=['all'] + list(scenario_lib.KINDS),
        help='Which kind of scenarios to generate')
    generate.add_argument(
        '--lane_width', action='store', type=float,
        default=config_lib.DEFAULTS['world']['lane_width'],
        help='The lane width, in meters')
    generate.add_argument(
        '--path_length', action='store', type=float,
        default=config_lib.DEFAULTS['world']['path_length'],
        help='The road length, in meters')
    generate.add_argument(
        '--out', action='store', required=True,
        help='The benchmark directory')

    train = subparsers.add_parser('train', help='Train an ablation')
    self._AddConfigArgument(train, required=True)
    train.add_argument(
        '--out', action='store', required=True,
        help='Directory for metrics, checkpoints and the run stamp')
    train.add_argument(
        '--resume', action='store_true', default=False,
        help='Continue from the checkpoint found in --out')
    self._AddAblationArgument(train)
    train.add_argument(
        '--seed', action='store', type=int,
        help='Overrides run.master_seed')
    train.add_argument(
        '--scenarios', action='store',
        help='A benchmark directory (scenarios are generated otherwise)')
    train.add_argument(
        '--no_progress', action='store_true', default=False,
        help='Do not display a progress bar')

    evaluate = subparsers.add_parser(
        'eval', help='Evaluate a policy greedily on a scenario split')
    self._AddConfigArgument(evaluate)
    self._AddAblationArgument(evaluate)
    self._AddPolicyArguments(evaluate)
    evaluate.add_argument(
        '--split', action='store', default=evaluation.SPLIT_EVAL,
        choices=evaluation.SPLITS, help='The scenario split')
    evaluate.add_argument(
        '--kind', action='store', default=scenario_lib.KIND_ANOMALY,
        choices=scenario_lib.KINDS, help='The scenario kind')
    evaluate.add_argument(
        '--count', action='store', type=int,
        help='Only evaluate the first scenarios of the split')
    evaluate.add_argument(
        '--scenarios', action='store',
        help='A benchmark directory (scenarios are generated otherwise)')
    evaluate.add_argument(
        '--workers', action='store', type=int,
        help='Number of worker processes (overrides harness.eval_workers)')
    evaluate.add_argument(
        '--out', action='store', required=True,
        help='Directory for episodes.csv and summary.json')

    replay = subparsers.add_parser(
        'replay', help='Dump the sub-step trace of one episode as CSV')
    self._AddConfigArgument(replay)
    self._AddAblationArgument(replay)
    self._AddPolicyArguments(replay)
    scenario_group = replay.add_mutually_exclusive_group(required=True)
    scenario_group.add_argument(
        '--scenario', action='store', help='A scenario JSON file')
    scenario_group.add_argument(
        '--index', action='store', type=int,
        help='The index of a benchmark scenario')
    replay.add_argument(
        '--kind', action='store', default=scenario_lib.KIND_ANOMALY,
        choices=scenario_lib.KINDS, help='The kind of the --index scenario')
    replay.add_argument(
        '--scenarios', action='store',
        help='A benchmark directory to find the --index scenario in')
    replay.add_argument(
        '--out', action='store', required=True, help='The CSV file to write')

    plot = subparsers.add_parser(
        'plot-data', help='Compute running statistics of metrics logs')
    plot.add_argument(
        '--metrics', action='append', required=True,
        help='A metrics CSV, can be repeated')
    plot.add_argument(
        '--window', action='store', type=int,
        default=config_lib.DEFAULTS['harness']['running_window'],
        help='Running window, in episodes')
    plot.add_argument(
        '--out', action='store', required=True,
        help='Directory for the per curve CSV files')

    validate = subparsers.add_parser(
        'validate-config', help='Print the resolved run configuration')
    validate.add_argument('path', action='store', help='The YAML file')
    return parser

  def _ParseLoggingArguments(self, options):
    """Parses the --verbose and --log_file flags.

    Args:
      options (argparse.Namespace): the parsed command-line arguments.
    """
    level = logging.DEBUG if options.verbose else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)
    if options.log_file:
      self._log_handler = logging.FileHandler(options.log_file)
      self._log_handler.setFormatter(logging.Formatter(LOG_FORMAT))
      logging.getLogger().addHandler(self._log_handler)
    self._options = options

  def ParseArguments(self, args):
    """Parses the arguments.

    Args:
      args (list): list of arguments.

    Returns:
      argparse.Namespace: parsed command line arguments.

    Raises:
      SystemExit: with status 2 if the arguments are not specified properly,
          or 0 after printing --help.
    """
    parser = self._CreateParser()
    options = parser.parse_args(args)

    for flag in ('count', 'workers', 'window'):
      value = getattr(options, flag, None)
      if value is not None and value < 1:
        parser.error('argument --{0:s}: must be at least 1'.format(flag))

    self._ParseLoggingArguments(options)
    return options

  def _LoadRunConfig(self, options):
    """Loads --config, or the defaults, and applies command overrides."""
    if options.config:
      run_config = config_lib.LoadConfig(options.config)
    else:
      run_config = config_lib.DefaultConfig()
    overrides = {}
    if getattr(options, 'ablation', None):
      overrides['ablation'] = options.ablation
    if getattr(options, 'seed', None) is not None:
      overrides['master_seed'] = options.seed
    if overrides:
      run_config = config_lib.ReplaceConfig(run_config, run=overrides)
    return run_config

  def _PolicySpec(self, options):
    if options.checkpoint:
      with open(options.checkpoint, 'rb') as checkpoint_file:
        return evaluation.PolicySpec(
            evaluation.POLICY_CHECKPOINT, checkpoint_file.read())
    return evaluation.PolicySpec(evaluation.POLICY_SCRIPTED, options.policy)

  def GenerateScenarios(self, options):
    """Runs the gen-scenarios command."""
    kinds = scenario_lib.KINDS if options.kind == 'all' else [options.kind]
    counts = dict((kind, options.count) for kind in kinds)
    progress_bar = IncrementalBar(
        'Generating', max=len(kinds), suffix='%(index)d/%(max)d kinds')
    written = []
    for kind in kinds:
      written.extend(scenario_lib.WriteBenchmark(
          options.out, options.seed, {kind: counts[kind]},
          lane_width=options.lane_width, path_length=options.path_length))
      progress_bar.next()
    progress_bar.finish()
    self._logger.info(
        'Wrote %d scenarios under %s', len(written), options.out)

  def Train(self, options):
    """Runs the train command."""
    run_config = self._LoadRunConfig(options)
    result = training.Train(
        run_config, options.out, resume=options.resume,
        scenario_root=options.scenarios,
        show_progress=not options.no_progress)
    self._logger.info(
        'Trained %d steps over %d episodes, checkpoint in %s', result.steps,
        result.episodes, result.checkpoint_path)

  def Evaluate(self, options):
    """Runs the eval command."""
    run_config = self._LoadRunConfig(options)
    scenarios = evaluation.SplitScenarios(
        run_config, options.split, kind=options.kind, count=options.count,
        scenario_root=options.scenarios)
    workers = options.workers or run_config.harness.eval_workers
    summary = evaluation.Evaluate(
        run_config, self._PolicySpec(options), scenarios, workers=workers)
    rule_ids = [
        rule.rule_id
        for rule in rulebook_lib.LoadRulebook(run_config.rulebook.path).rules]
    writer = artifacts.LocalWriter(options.out)
    for artifact in evaluation.EvaluationArtifacts(summary, rule_ids):
      writer.WriteArtifact(artifact)
    aggregates = summary.aggregates
    self._logger.info(
        'Finished score %.3f, arrived distance %.1f over %d episodes',
        aggregates['finished_score_mean'],
        aggregates['arrived_distance_mean'], aggregates['episodes'])

  def Replay(self, options):
    """Runs the replay command."""
    run_config = self._LoadRunConfig(options)
    if options.scenario:
      scenario = scenario_lib.LoadScenario(options.scenario)
    else:
      scenario = scenario_lib.LoadBenchmarkScenario(
          options.scenarios, run_config.harness.benchmark_seed, options.kind,
          options.index, run_config.world.lane_width,
          run_config.world.path_length)
    setup = ablations.ApplyAblation(run_config)
    policy = evaluation.BuildPolicy(
        run_config, self._PolicySpec(options), setup)
    recorder = ReplayRecorder(run_config.world.dt)
    result, _ = episodes.RunEpisode(
        setup, policy, scenario, mode=episodes.MODE_EVAL,
        step_observer=recorder)
    directory, name = os.path.split(os.path.abspath(options.out))
    artifacts.LocalWriter(directory).WriteArtifact(
        artifacts.CsvArtifact(name, REPLAY_COLUMNS, recorder.rows))
    self._logger.info(
        'Replayed %r: %s after %d steps, finished score %.1f', scenario,
        result.termination_reason, result.steps, result.finished_score)

  def PlotData(self, options):
    """Runs the plot-data command."""
    writer = artifacts.LocalWriter(options.out)
    for metrics_path in options.metrics:
      for artifact in metrics.PlotDataArtifacts(metrics_path, options.window):
        writer.WriteArtifact(artifact)

  def ValidateConfig(self, options):
    """Runs the validate-config command."""
    print(config_lib.DumpConfig(config_lib.LoadConfig(options.path)), end='')

  def Main(self, args=None):
    """Main method for InformedDrive.

    Args:
      args (list[str]): list of command line arguments.

    Returns:
      int: the exit code.
    """
    try:
      options = self.ParseArguments(args)
    except SystemExit as exception:
      return exception.code or EXIT_SUCCESS

    commands = {
        'gen-scenarios': self.GenerateScenarios,
        'train': self.Train,
        'eval': self.Evaluate,
        'replay': self.Replay,
        'plot-data': self.PlotData,
        'validate-config': self.ValidateConfig,
    }
    self._logger.debug('Running %s with args %r', options.command, args)
    try:
      commands[options.command](options)
    except Exception:  # pylint: disable=broad-except
      self._logger.exception('Command %s failed', options.command)
      return EXIT_FAILURE
    finally:
      if self._log_handler:
        logging.getLogger().removeHandler(self._log_handler)
        self._log_handler.close()
        self._log_handler = None
    return EXIT_SUCCESS


def main():
  """Entry point of the informed-drive console script."""
  app = InformedDrive(ablations.VALID_ABLATIONS)
  sys.exit(app.Main(args=sys.argv[1:]))


if __name__ == '__main__':
  main()
