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
"""Run configuration: sections, defaults, loading and validation.

A configuration file is a YAML document holding one mapping per section. All
keys are optional; missing keys take the values of DEFAULTS. An empty file is
the default configuration.
"""

import collections
import logging

import yaml

from informed_drive import errors

ABLATIONS = ('baseline', 'trajectory', 'rulebook', 'combination')

# Section name -> ordered (key, default value) pairs.
DEFAULTS = collections.OrderedDict([
    ('run', collections.OrderedDict([
        ('ablation', 'combination'),
        ('master_seed', 0),
        ('total_steps', 40000),
        ('curriculum_switch_step', 3000),
    ])),
    ('world', collections.OrderedDict([
        ('lane_width', 3.5),
        ('path_length', 80.0),
        ('dt', 0.1),
        ('execution_horizon', 0.5),
        ('initial_speed', 5.0),
        ('step_budget', 400),
        ('off_road_margin', 2.0),
        ('goal_lateral_tolerance', 0.5),
        ('activation_ahead', 20.0),
        ('activation_behind', 10.0),
        ('ego_length', 4.5),
        ('ego_width', 2.0),
        ('wheelbase', 2.7),
        ('accel_min', -4.0),
        ('accel_max', 3.0),
        ('steer_max', 0.5),
        ('speed_max', 15.0),
    ])),
    ('trajectory', collections.OrderedDict([
        ('v_const', 8.0),
        ('t_const', 3.0),
    ])),
    ('controller', collections.OrderedDict([
        ('longitudinal_kp', 1.2),
        ('longitudinal_ki', 0.05),
        ('longitudinal_kd', 0.01),
        ('lateral_kp', 0.4),
        ('lateral_ki', 0.0),
        ('lateral_kd', 0.15),
        ('lookahead', 0.5),
    ])),
    ('rulebook', collections.OrderedDict([
        ('path', None),
    ])),
    ('reward', collections.OrderedDict([
        ('speed_band_min_kmh', 10.0),
        ('speed_band_max_kmh', 50.0),
        ('finish_longitudinal', 10.0),
        ('finish_both', 60.0),
    ])),
    ('agent', collections.OrderedDict([
        ('replay_capacity', 50000),
        ('batch_size', 32),
        ('discount', 0.997),
        ('learning_rate', 3e-4),
        ('epsilon_start', 1.0),
        ('epsilon_end', 0.05),
        ('epsilon_fraction', 0.25),
        ('target_sync_every', 500),
        ('learning_starts', 1000),
        ('train_every', 1),
        ('double_q', False),
        ('conv1_channels', 16),
        ('conv2_channels', 32),
        ('hidden_units', 256),
        ('torch_threads', 1),
    ])),
    ('harness', collections.OrderedDict([
        ('benchmark_seed', 42),
        ('train_seeds', [0, 800]),
        ('validation_seeds', [800, 900]),
        ('eval_seeds', [900, 1000]),
        ('eval_every', 2000),
        ('eval_episodes', 20),
        ('running_window', 50),
        ('eval_workers', 1),
    ])),
])

RunSection = collections.namedtuple('RunSection', DEFAULTS['run'].keys())
WorldConfig = collections.namedtuple('WorldConfig', DEFAULTS['world'].keys())
TrajectoryConfig = collections.namedtuple(
    'TrajectoryConfig', DEFAULTS['trajectory'].keys())
ControllerConfig = collections.namedtuple(
    'ControllerConfig', DEFAULTS['controller'].keys())
RulebookConfig = collections.namedtuple(
    'RulebookConfig', DEFAULTS['rulebook'].keys())
RewardConfig = collections.namedtuple(
    'RewardConfig', DEFAULTS['reward'].keys())
AgentConfig = collections.namedtuple('AgentConfig', DEFAULTS['agent'].keys())
HarnessConfig = collections.namedtuple(
    'HarnessConfig', DEFAULTS['harness'].keys())

_SECTION_TYPES = collections.OrderedDict([
    ('run', RunSection),
    ('world', WorldConfig),
    ('trajectory', TrajectoryConfig),
    ('controller', ControllerConfig),
    ('rulebook', RulebookConfig),
    ('reward', RewardConfig),
    ('agent', AgentConfig),
    ('harness', HarnessConfig),
])

RunConfig = collections.namedtuple('RunConfig', _SECTION_TYPES.keys())


def _Coerce(section, key, value, default):
  """Converts a raw YAML value to the type of its default.

  Raises:
    BadConfigOption: if the value has the wrong type.
  """
  field = '{0:s}.{1:s}'.format(section, key)
  if default is None:
    if value is None or isinstance(value, str):
      return value
    raise errors.BadConfigOption('{0:s} must be a string'.format(field))
  if isinstance(default, bool):
    if isinstance(value, bool):
      return value
    raise errors.BadConfigOption('{0:s} must be true or false'.format(field))
  if isinstance(default, int):
    if isinstance(value, int) and not isinstance(value, bool):
      return value
    if isinstance(value, float) and value.is_integer():
      return int(value)
    raise errors.BadConfigOption('{0:s} must be an integer'.format(field))
  if isinstance(default, float):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
      return float(value)
    raise errors.BadConfigOption('{0:s} must be a number'.format(field))
  if isinstance(default, list):
    if (isinstance(value, (list, tuple)) and len(value) == 2 and
        all(isinstance(v, int) and not isinstance(v, bool) for v in value)):
      return tuple(value)
    raise errors.BadConfigOption(
        '{0:s} must be a [start, end) pair of integers'.format(field))
  if isinstance(value, str):
    return value
  raise errors.BadConfigOption('{0:s} must be a string'.format(field))


def _Check(condition, field, message):
  if not condition:
    raise errors.BadConfigOption('{0:s} {1:s}'.format(field, message))


def ValidateConfig(run_config):
  """Checks the cross-field invariants of a configuration.

  Args:
    run_config (RunConfig): the configuration.

  Raises:
    BadConfigOption: naming the first offending field.
  """
  run = run_config.run
  _Check(run.ablation in ABLATIONS, 'run.ablation',
         'must be one of {0:s}'.format(', '.join(ABLATIONS)))
  _Check(run.total_steps > 0, 'run.total_steps', 'must be > 0')
  _Check(0 <= run.curriculum_switch_step < run.total_steps,
         'run.curriculum_switch_step', 'must be in [0, run.total_steps)')

  world = run_config.world
  for key in ('lane_width', 'path_length', 'dt', 'execution_horizon',
              'ego_length', 'ego_width', 'wheelbase', 'speed_max',
              'steer_max', 'accel_max'):
    _Check(getattr(world, key) > 0, 'world.' + key, 'must be > 0')
  _Check(world.path_length >= 80.0, 'world.path_length', 'must be >= 80')
  _Check(world.accel_min < 0, 'world.accel_min', 'must be < 0')
  _Check(world.initial_speed >= 0, 'world.initial_speed', 'must be >= 0')
  _Check(world.step_budget > 0, 'world.step_budget', 'must be > 0')
  _Check(world.activation_ahead >= 0 and world.activation_behind >= 0,
         'world.activation_ahead', 'and activation_behind must be >= 0')
  _Check(world.execution_horizon <= run_config.trajectory.t_const + 1e-9,
         'world.execution_horizon', 'must not exceed trajectory.t_const')

  trajectory = run_config.trajectory
  _Check(trajectory.t_const > 0, 'trajectory.t_const', 'must be > 0')
  _Check(trajectory.v_const >= 0, 'trajectory.v_const', 'must be >= 0')
  _Check(run_config.controller.lookahead >= 0, 'controller.lookahead',
         'must be >= 0')

  reward = run_config.reward
  _Check(reward.speed_band_min_kmh <= reward.speed_band_max_kmh,
         'reward.speed_band_min_kmh', 'must be <= reward.speed_band_max_kmh')

  agent = run_config.agent
  _Check(0.0 < agent.discount <= 1.0, 'agent.discount', 'must be in (0, 1]')
  _Check(agent.learning_rate > 0, 'agent.learning_rate', 'must be > 0')
  for key in ('epsilon_start', 'epsilon_end', 'epsilon_fraction'):
    _Check(0.0 <= getattr(agent, key) <= 1.0, 'agent.' + key,
           'must be in [0, 1]')
  for key in ('replay_capacity', 'batch_size', 'target_sync_every',
              'train_every', 'conv1_channels', 'conv2_channels',
              'hidden_units', 'torch_threads'):
    _Check(getattr(agent, key) > 0, 'agent.' + key, 'must be > 0')
  _Check(agent.batch_size <= agent.replay_capacity, 'agent.batch_size',
         'must be <= agent.replay_capacity')
  _Check(agent.learning_starts >= 0, 'agent.learning_starts', 'must be >= 0')

  harness = run_config.harness
  splits = collections.OrderedDict([
      ('harness.train_seeds', harness.train_seeds),
      ('harness.validation_seeds', harness.validation_seeds),
      ('harness.eval_seeds', harness.eval_seeds)])
  for field, (start, end) in splits.items():
    _Check(0 <= start < end, field, 'must be a non-empty [start, end) range')
  _Check(max(harness.train_seeds[0], harness.eval_seeds[0]) >=
         min(harness.train_seeds[1], harness.eval_seeds[1]),
         'harness.eval_seeds', 'must not overlap harness.train_seeds')
  _Check(harness.eval_every >= 0, 'harness.eval_every',
         'must be >= 0 (0 disables evaluation)')
  _Check(harness.eval_episodes > 0, 'harness.eval_episodes', 'must be > 0')
  _Check(harness.eval_episodes <= harness.eval_seeds[1] - harness.eval_seeds[0],
         'harness.eval_episodes', 'must not exceed the eval split size')
  _Check(harness.running_window > 0, 'harness.running_window', 'must be > 0')
  _Check(harness.eval_workers > 0, 'harness.eval_workers', 'must be > 0')


def ConfigFromDict(document):
  """Builds a validated configuration from a parsed document.

  Args:
    document (dict): section name -> mapping of overrides, or None.

  Returns:
    RunConfig: the resolved configuration.

  Raises:
    BadConfigOption: on unknown sections or keys, or invalid values.
  """
  document = document or {}
  if not isinstance(document, dict):
    raise errors.BadConfigOption('The configuration must be a mapping')
  for section in document:
    if section not in DEFAULTS:
      raise errors.BadConfigOption('Unknown section {0!s}'.format(section))

  sections = []
  for section, defaults in DEFAULTS.items():
    overrides = document.get(section) or {}
    if not isinstance(overrides, dict):
      raise errors.BadConfigOption(
          'Section {0:s} must be a mapping'.format(section))
    for key in overrides:
      if key not in defaults:
        raise errors.BadConfigOption(
            'Unknown option {0:s}.{1!s}'.format(section, key))
    values = []
    for key, default in defaults.items():
      if key in overrides:
        values.append(_Coerce(section, key, overrides[key], default))
      else:
        values.append(tuple(default) if isinstance(default, list) else default)
    sections.append(_SECTION_TYPES[section](*values))

  run_config = RunConfig(*sections)
  ValidateConfig(run_config)
  return run_config


def DefaultConfig():
  """Returns the default configuration."""
  return ConfigFromDict({})


def ParseConfig(text):
  """Parses configuration text.

  Args:
    text (str): the YAML text.

  Returns:
    RunConfig: the resolved configuration.

  Raises:
    ConfigParseError: if the text isn't valid YAML.
    BadConfigOption: if a value is invalid.
  """
  try:
    document = yaml.safe_load(text)
  except yaml.YAMLError as exception:
    line = None
    mark = getattr(exception, 'problem_mark', None)
    if mark is not None:
      line = mark.line + 1
    raise errors.ConfigParseError(
        'Invalid configuration: {0!s}'.format(
            getattr(exception, 'problem', None) or exception), line=line)
  return ConfigFromDict(document)


def LoadConfig(path):
  """Loads a configuration file.

  Args:
    path (str): the path to the YAML file.

  Returns:
    RunConfig: the resolved configuration.

  Raises:
    BadConfigOption: if the file can't be read or is invalid.
  """
  logging.getLogger(__name__).debug('Loading configuration %s', path)
  try:
    with open(path, 'r') as config_file:
      text = config_file.read()
  except IOError as exception:
    raise errors.BadConfigOption(
        'Unable to read configuration {0:s}: {1!s}'.format(path, exception))
  return ParseConfig(text)


def ConfigToDict(run_config):
  """Converts a configuration to plain, YAML serializable data.

  Args:
    run_config (RunConfig): the configuration.

  Returns:
    collections.OrderedDict: section name -> key -> value.
  """
  document = collections.OrderedDict()
  for section in RunConfig._fields:
    values = getattr(run_config, section)
    document[section] = collections.OrderedDict(
        (key, list(value) if isinstance(value, tuple) else value)
        for key, value in values._asdict().items())
  return document


def DumpConfig(run_config):
  """Renders a configuration as YAML text.

  Args:
    run_config (RunConfig): the configuration.

  Returns:
    str: YAML text that parses back to the same configuration.
  """
  document = {
      section: dict(values)
      for section, values in ConfigToDict(run_config).items()}
  lines = []
  for section in RunConfig._fields:
    lines.append(yaml.safe_dump(
        {section: document[section]}, sort_keys=False,
        default_flow_style=None))
  return ''.join(lines)


def ReplaceConfig(run_config, **sections):
  """Returns a copy of a configuration with some values replaced.

  Args:
    run_config (RunConfig): the configuration.
    **sections (dict): section name -> dict of key -> new value.

  Returns:
    RunConfig: the validated new configuration.
  """
  document = ConfigToDict(run_config)
  for section, overrides in sections.items():
    if section not in document:
      raise errors.BadConfigOption('Unknown section {0!s}'.format(section))
    document[section].update(overrides)
  return ConfigFromDict(document)
