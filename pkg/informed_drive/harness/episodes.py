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
"""Running episodes and scoring them."""

import collections

from informed_drive.agent import replay
from informed_drive.world import env as env_lib

MODE_TRAIN = 'train'
MODE_EVAL = 'eval'

EpisodeResult = collections.namedtuple(
    'EpisodeResult',
    ['scenario_id', 'kind', 'arrived_distance', 'finished_score', 'steps',
     'episode_return', 'violation_counts', 'active_span',
     'termination_reason'])

# Termination reasons that end the task, as opposed to truncating it.
_TERMINAL_REASONS = frozenset([
    env_lib.TERMINATION_COLLISION, env_lib.TERMINATION_OFF_ROAD,
    env_lib.TERMINATION_GOAL])


def FinishedScore(outcome, scenario):
  """Scores the final outcome of an episode.

  Args:
    outcome (StepOutcome): the last outcome of the episode.
    scenario (Scenario): the scenario.

  Returns:
    float: 1.0 if both goals were reached, 0.5 if only the longitudinal one,
        0.0 otherwise.
  """
  del scenario  # Goals are resolved into the outcome events.
  if outcome.events.reached_both:
    return 1.0
  if outcome.events.reached_s_target:
    return 0.5
  return 0.0


def ArrivedDistance(state, scenario):
  """Returns how far along the path the ego got, clamped to the path."""
  return min(max(state.frenet.s, 0.0), scenario.path.total_length)


class TrainingHooks(object):
  """Interface of the training schedule seen by RunEpisode()."""

  def Epsilon(self):
    """Returns the exploration probability of the next step."""
    raise NotImplementedError

  def OnStep(self, transition):
    """Consumes a transition; returns the loss of an update, or None."""
    raise NotImplementedError

  def ShouldStop(self):
    """Tells whether the step budget of the run is exhausted."""
    raise NotImplementedError


def RunEpisode(setup, policy, scenario, mode=MODE_EVAL, hooks=None,
               step_observer=None):
  """Drives one episode to termination.

  Args:
    setup (WiredSetup): the environment and reward function.
    policy (object): has SelectAction(observation, env, epsilon).
    scenario (Scenario): the scenario.
    mode (str): MODE_TRAIN stores transitions through hooks, MODE_EVAL acts
        greedily.
    hooks (TrainingHooks): the training schedule, in MODE_TRAIN.
    step_observer (callable): called with (outcome, breakdown, active) after
        every step.

  Returns:
    tuple(EpisodeResult, list[float]): the result and the losses of the
        updates made during the episode.

  Raises:
    ValueError: if training without hooks.
    DivergenceError: if an update diverges.
  """
  if mode == MODE_TRAIN and hooks is None:
    raise ValueError('Training episodes need hooks')
  env = setup.env
  observation = env.Reset(scenario)
  violation_counts = collections.OrderedDict(
      (rule.rule_id, 0) for rule in setup.rulebook.rules)
  active_span = None
  episode_return = 0.0
  losses = []
  outcome = None

  while not env.terminated:
    epsilon = hooks.Epsilon() if mode == MODE_TRAIN else 0.0
    action = policy.SelectAction(observation, env, epsilon)
    next_observation, outcome, inputs = env_lib.RunEnvStep(env, action)
    breakdown = setup.reward(inputs.outcome, inputs.scenario)
    episode_return += breakdown.r_total
    active = setup.rulebook.active
    if active:
      s = outcome.state.frenet.s
      active_span = (s, s) if active_span is None else (
          min(active_span[0], s), max(active_span[1], s))
    for rule_id in breakdown.violations:
      violation_counts[rule_id] += 1
    if step_observer:
      step_observer(outcome, breakdown, active)

    if mode == MODE_TRAIN:
      loss = hooks.OnStep(replay.Transition(
          observation=observation.channels, action=action,
          reward=breakdown.r_total,
          next_observation=next_observation.channels,
          terminal=outcome.termination_reason in _TERMINAL_REASONS))
      if loss is not None:
        losses.append(loss)
      if hooks.ShouldStop():
        break
    observation = next_observation

  state = env.state
  result = EpisodeResult(
      scenario_id=scenario.scenario_id, kind=scenario.kind,
      arrived_distance=ArrivedDistance(state, scenario),
      finished_score=FinishedScore(outcome, scenario) if outcome else 0.0,
      steps=env.steps, episode_return=episode_return,
      violation_counts=violation_counts, active_span=active_span,
      termination_reason=outcome.termination_reason if outcome else None)
  return result, losses
