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
"""Situation aware step rewards.

The step reward is the ego reward, for finishing the route and keeping a
reasonable speed, plus the rulebook reward of the states visited during the
step.
"""

import collections

from informed_drive import config
from informed_drive import rulebook as rulebook_lib
from informed_drive.world import atoms

MPS_TO_KMH = 3.6

DEFAULT_REWARD_CONFIG = config.RewardConfig(**config.DEFAULTS['reward'])

COMPONENT_FINISH = 'r_finish'
COMPONENT_SPEED = 'r_speed_l'

RewardBreakdown = collections.namedtuple(
    'RewardBreakdown', ['r_ego', 'r_rb', 'r_total', 'components', 'violations'])


def FinishReward(outcome, reward_config=DEFAULT_REWARD_CONFIG):
  """Returns the finish term: both goals, the longitudinal goal, or none."""
  if outcome.events.reached_both:
    return reward_config.finish_both
  if outcome.events.reached_s_target:
    return reward_config.finish_longitudinal
  return 0.0


def SpeedPenalty(speed, reward_config=DEFAULT_REWARD_CONFIG):
  """Returns -1 when the speed, in m/s, is outside the inclusive band."""
  speed_kmh = speed * MPS_TO_KMH
  if (reward_config.speed_band_min_kmh <= speed_kmh <=
      reward_config.speed_band_max_kmh):
    return 0.0
  return -1.0


def EgoReward(outcome, scenario, reward_config=DEFAULT_REWARD_CONFIG):
  """Computes the ego reward of a step.

  Args:
    outcome (StepOutcome): the step outcome.
    scenario (Scenario): the scenario.
    reward_config (RewardConfig): the reward constants.

  Returns:
    float: the finish reward plus the speed penalty times the traveled length.
  """
  del scenario  # The goal events are resolved by the environment.
  return (FinishReward(outcome, reward_config) +
          SpeedPenalty(outcome.state.speed, reward_config) *
          outcome.traveled_length)


def RuleWeights(rulebook, traveled_length):
  """Returns the step weight of every rule of a rulebook."""
  weights = {}
  for rule in rulebook.rules:
    if rule.weighting == rulebook_lib.WEIGHTING_TRAVELED_LENGTH:
      weights[rule.rule_id] = traveled_length
    else:
      weights[rule.rule_id] = 1.0
  return weights


class RewardFunction(object):
  """Computes step rewards for one ablation setting.

  Attributes:
    rulebook (Rulebook): the rulebook; its active flag is set at every step.
    situation_aware (bool): whether the hierarchy coefficients apply near
        obstacles. When False they are constantly 1.
    per_state_checking (bool): whether rules only check the last state of the
        step rather than every visited state.
  """

  def __init__(
      self, rulebook, reward_config=DEFAULT_REWARD_CONFIG,
      window=atoms.ActivationWindow(), situation_aware=True,
      per_state_checking=False):
    self.rulebook = rulebook
    self.situation_aware = situation_aware
    self.per_state_checking = per_state_checking
    self._reward_config = reward_config
    self._window = window

  def __call__(self, outcome, scenario):
    """Computes the reward of a step.

    Args:
      outcome (StepOutcome): the step outcome.
      scenario (Scenario): the scenario.

    Returns:
      RewardBreakdown: the reward and its terms.
    """
    self.rulebook.active = self.situation_aware and atoms.RulebookActive(
        outcome.state, scenario, self._window)
    trace = list(outcome.trace_states)
    if self.per_state_checking:
      trace = trace[-1:]
    rulebook_reward = rulebook_lib.ComputeRulebookReward(
        self.rulebook, trace,
        RuleWeights(self.rulebook, outcome.traveled_length))

    finish = FinishReward(outcome, self._reward_config)
    speed = (SpeedPenalty(outcome.state.speed, self._reward_config) *
             outcome.traveled_length)
    components = collections.OrderedDict([
        (COMPONENT_FINISH, finish), (COMPONENT_SPEED, speed)])
    for rule_id, contribution in rulebook_reward.per_rule.items():
      components[rule_id] = contribution.contribution
    r_ego = finish + speed
    return RewardBreakdown(
        r_ego=r_ego, r_rb=rulebook_reward.total,
        r_total=r_ego + rulebook_reward.total, components=components,
        violations=tuple(
            rule_id for rule_id, term in rulebook_reward.per_rule.items()
            if term.penalty < 0.0))


def TotalReward(
    outcome, scenario, rulebook, reward_config=DEFAULT_REWARD_CONFIG,
    window=atoms.ActivationWindow()):
  """Computes the situation aware reward of a step.

  Args:
    outcome (StepOutcome): the step outcome.
    scenario (Scenario): the scenario.
    rulebook (Rulebook): the rulebook; its active flag is updated.
    reward_config (RewardConfig): the reward constants.
    window (ActivationWindow): the rulebook activation window.

  Returns:
    RewardBreakdown: the reward and its terms.
  """
  return RewardFunction(rulebook, reward_config, window)(outcome, scenario)
