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
"""The ablation settings and how they wire the environment and reward."""

import collections
import logging

from informed_drive import reward
from informed_drive import rulebook as rulebook_lib
from informed_drive.world import atoms
from informed_drive.world import env as env_lib

WiredSetup = collections.namedtuple(
    'WiredSetup', ['ablation', 'env', 'reward', 'rulebook'])


class BaseAblation(object):
  """BaseAblation class.

  Attributes:
    name (str): the name of the ablation.
    action_mode (str): the action space of the environment.
    situation_aware (bool): whether the rulebook coefficients follow the
        situation; when False they are constantly 1.
  """

  action_mode = None
  situation_aware = False

  def __init__(self, name, run_config):
    """Initializes a BaseAblation object.

    Args:
      name (str): the name of the ablation.
      run_config (RunConfig): the run configuration.

    Raises:
      ValueError: if the name is empty or None.
    """
    if not name:
      raise ValueError('The name of the ablation must not be None or empty.')
    self.name = name
    self._run_config = run_config
    self._logger = logging.getLogger(self.__class__.__name__)

  @property
  def per_state_checking(self):
    """bool: whether rules only see the current state of each step."""
    return self.action_mode == env_lib.MODE_CONTROL

  def MakeEnvironment(self):
    """Returns a LaneWorldEnv in the ablation's action mode."""
    run_config = self._run_config
    return env_lib.LaneWorldEnv(
        run_config.world, run_config.trajectory, run_config.controller,
        action_mode=self.action_mode)

  def MakeRewardFunction(self, rulebook):
    """Returns the reward function of the ablation."""
    world = self._run_config.world
    return reward.RewardFunction(
        rulebook, reward_config=self._run_config.reward,
        window=atoms.ActivationWindow(
            world.activation_ahead, world.activation_behind),
        situation_aware=self.situation_aware,
        per_state_checking=self.per_state_checking)


class BaselineAblation(BaseAblation):
  """Direct controls, per state rule checks, constant coefficients."""

  action_mode = env_lib.MODE_CONTROL
  situation_aware = False


class TrajectoryAblation(BaseAblation):
  """Trajectory actions, per trajectory rule checks, constant coefficients."""

  action_mode = env_lib.MODE_TRAJECTORY
  situation_aware = False


class RulebookAblation(BaseAblation):
  """Direct controls, per state rule checks, situation aware coefficients."""

  action_mode = env_lib.MODE_CONTROL
  situation_aware = True


class CombinationAblation(BaseAblation):
  """Trajectory actions and the situation aware rulebook reward."""

  action_mode = env_lib.MODE_TRAJECTORY
  situation_aware = True


VALID_ABLATIONS = collections.OrderedDict([
    ('baseline', BaselineAblation),
    ('trajectory', TrajectoryAblation),
    ('rulebook', RulebookAblation),
    ('combination', CombinationAblation),
])


def ApplyAblation(run_config, rulebook=None):
  """Wires the environment and the reward of the configured ablation.

  Args:
    run_config (RunConfig): the run configuration.
    rulebook (Rulebook): the rulebook, defaults to the configured one.

  Returns:
    WiredSetup: the ablation, environment, reward function and rulebook.
  """
  name = run_config.run.ablation
  ablation = VALID_ABLATIONS[name](name, run_config)
  if rulebook is None:
    rulebook = rulebook_lib.LoadRulebook(run_config.rulebook.path)
  return WiredSetup(
      ablation=ablation, env=ablation.MakeEnvironment(),
      reward=ablation.MakeRewardFunction(rulebook), rulebook=rulebook)
