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
"""The lane world environment.

In trajectory mode an action selects a terminal manifold of the dynamic action
set; the environment plans the trajectory and tracks it with the PID loops for
the execution horizon, sub-stepping at dt. Choosing the same target offset
again keeps following the current trajectory while it has time left. In
control mode an action is an (acceleration, yaw rate) pair applied for a
single dt.
"""

import collections
import itertools
import logging
import math

from informed_drive import errors
from informed_drive import trajectory as trajectory_lib
from informed_drive.world import atoms
from informed_drive.world import controller
from informed_drive.world import raster
from informed_drive.world import vehicle

MODE_TRAJECTORY = 'trajectory'
MODE_CONTROL = 'control'
MODES = (MODE_TRAJECTORY, MODE_CONTROL)

# (acceleration in m/s^2, yaw rate in rad/s), acceleration major.
CONTROL_ACTIONS = tuple(itertools.product((-1.0, 0.0, 1.0), repeat=2))

TERMINATION_COLLISION = 'collision'
TERMINATION_OFF_ROAD = 'off_road'
TERMINATION_GOAL = 'goal'
TERMINATION_BUDGET = 'budget'
TERMINATION_REASONS = (
    TERMINATION_COLLISION, TERMINATION_OFF_ROAD, TERMINATION_GOAL,
    TERMINATION_BUDGET)

_TIME_TOLERANCE = 1e-9

StepEvents = collections.namedtuple(
    'StepEvents',
    ['collision', 'off_road', 'reached_s_target', 'reached_both'])

StepOutcome = collections.namedtuple(
    'StepOutcome',
    ['action', 'state', 'traveled_length', 'events', 'trace_states',
     'visited', 'terminated', 'termination_reason'])

RewardInputs = collections.namedtuple('RewardInputs', ['outcome', 'scenario'])


class LaneWorldEnv(object):
  """A single ego vehicle driving one scenario.

  Attributes:
    action_mode (str): MODE_TRAJECTORY or MODE_CONTROL.
    scenario (Scenario): the current scenario.
    state (VehicleState): the current ego state.
    steps (int): environment steps taken in the current episode.
    terminated (bool): whether the episode is over.
  """

  def __init__(
      self, world_config, trajectory_config, controller_config,
      action_mode=MODE_TRAJECTORY):
    """Initializes a LaneWorldEnv object.

    Args:
      world_config (WorldConfig): world constants.
      trajectory_config (TrajectoryConfig): the action set parameters.
      controller_config (ControllerConfig): the PID gains.
      action_mode (str): MODE_TRAJECTORY or MODE_CONTROL.

    Raises:
      ValueError: if the action mode is unknown.
    """
    if action_mode not in MODES:
      raise ValueError('Unknown action mode {0!r}'.format(action_mode))
    self.action_mode = action_mode
    self._world = world_config
    self._trajectory_config = trajectory_config
    self._limits = vehicle.LimitsFromConfig(world_config)
    self._ego_shape = atoms.EgoShape(
        world_config.ego_length, world_config.ego_width)
    self._tracker = controller.TrajectoryTracker(
        controller.GainsFromConfig(controller_config), self._limits)
    self._substeps = max(
        1, int(round(world_config.execution_horizon / world_config.dt)))
    self._logger = logging.getLogger(self.__class__.__name__)

    self.scenario = None
    self.state = None
    self.steps = 0
    self.terminated = True
    self._trajectory = None
    self._trajectory_step = 0

  @property
  def action_count(self):
    """int: the size of the action set."""
    if self.action_mode == MODE_TRAJECTORY:
      return trajectory_lib.ACTION_COUNT
    return len(CONTROL_ACTIONS)

  @property
  def ego_shape(self):
    """EgoShape: the ego rectangle."""
    return self._ego_shape

  @property
  def planned_trajectory(self):
    """Trajectory: the trajectory being followed, or None."""
    return self._trajectory

  def CandidateManifolds(self):
    """Returns the current trajectory action set."""
    return trajectory_lib.CandidateManifolds(
        self.state.frenet.d, self.scenario.lane_width,
        self._trajectory_config.v_const, self._trajectory_config.t_const)

  def Observe(self):
    """Renders the current observation."""
    return raster.RenderObservation(
        self.state, self.scenario, planned=self._trajectory,
        ego_shape=self._ego_shape)

  def Reset(self, scenario):
    """Starts an episode.

    Args:
      scenario (Scenario): the scenario to drive.

    Returns:
      ObservationGrid: the first observation.
    """
    self.scenario = scenario
    self.state = vehicle.InitialState(
        scenario.path, self._world.initial_speed)
    self.steps = 0
    self.terminated = False
    self._trajectory = None
    self._trajectory_step = 0
    self._tracker.Reset()
    self._logger.debug('Reset on %r', scenario)
    return self.Observe()

  def _TrajectoryControls(self, action):
    """Yields the controls of the sub-steps of a trajectory action."""
    manifold = self.CandidateManifolds()[action]
    dt = self._world.dt
    current = self._trajectory
    keep = (
        current is not None and current.source_manifold == manifold and
        (self._trajectory_step + self._substeps) * dt <=
        current.duration + _TIME_TOLERANCE)
    if not keep:
      self._trajectory = trajectory_lib.GenerateTrajectory(
          self.state.frenet, manifold, self.scenario.path, dt)
      self._trajectory_step = 0
      self._tracker.Reset()
    for _ in range(self._substeps):
      controls = self._tracker.Track(
          self.state, self._trajectory, self._trajectory_step * dt, dt)
      self._trajectory_step += 1
      yield controls

  def _ControlControls(self, action):
    accel, yaw_rate = CONTROL_ACTIONS[action]
    steer = vehicle.SteerForYawRate(yaw_rate, self.state.speed, self._limits)
    yield vehicle.Controls(accel, steer)

  def _CheckTermination(self, state, assignment):
    """Returns the termination reason of a sub-step state, or None."""
    if not assignment[atoms.ATOM_NO_COLLISION]:
      return TERMINATION_COLLISION
    half = self.scenario.lane_width / 2.0
    margin = self._world.off_road_margin
    d = state.frenet.d
    if d < -half - margin or d > 3.0 * half + margin:
      return TERMINATION_OFF_ROAD
    if state.frenet.s >= self.scenario.goal.s_target:
      return TERMINATION_GOAL
    return None

  def Step(self, action):
    """Executes one action.

    Args:
      action (int): the index of the action.

    Returns:
      tuple(ObservationGrid, StepOutcome): the new observation and the
          outcome of the step.

    Raises:
      EnvironmentTerminatedError: if the episode is over.
      ValueError: if the action index is out of range.
    """
    if self.terminated:
      raise errors.EnvironmentTerminatedError(
          'The episode is over, call Reset() first')
    if not 0 <= action < self.action_count:
      raise ValueError('Action {0!r} is not in [0, {1:d})'.format(
          action, self.action_count))

    if self.action_mode == MODE_TRAJECTORY:
      controls_stream = self._TrajectoryControls(action)
    else:
      controls_stream = self._ControlControls(action)

    dt = self._world.dt
    visited = []
    trace_states = []
    traveled_length = 0.0
    reason = None
    state = self.state
    # Sub-step controls read self.state, which advances with every sub-step.
    for controls in controls_stream:
      new_state = vehicle.StepVehicle(
          state, controls, dt, self._limits, path=self.scenario.path)
      traveled_length += math.hypot(
          new_state.x - state.x, new_state.y - state.y)
      state = new_state
      self.state = state
      assignment = atoms.EvalAtoms(state, self.scenario, self._ego_shape)
      visited.append(state)
      trace_states.append(assignment)
      reason = self._CheckTermination(state, assignment)
      if reason:
        break
    self.steps += 1
    if reason is None and self.steps >= self._world.step_budget:
      reason = TERMINATION_BUDGET
    self.terminated = reason is not None

    reached_s_target = reason == TERMINATION_GOAL
    goal = self.scenario.goal
    events = StepEvents(
        collision=reason == TERMINATION_COLLISION,
        off_road=reason == TERMINATION_OFF_ROAD,
        reached_s_target=reached_s_target,
        reached_both=reached_s_target and (
            abs(state.frenet.d - goal.d_target) <=
            self._world.goal_lateral_tolerance))
    if reason:
      self._logger.debug(
          'Episode over after %d steps: %s at s=%.2f d=%.2f', self.steps,
          reason, state.frenet.s, state.frenet.d)
    outcome = StepOutcome(
        action=action, state=state, traveled_length=traveled_length,
        events=events, trace_states=tuple(trace_states),
        visited=tuple(visited), terminated=self.terminated,
        termination_reason=reason)
    return self.Observe(), outcome


def RunEnvStep(env, action):
  """Executes one action and bundles what the reward needs.

  Args:
    env (LaneWorldEnv): the environment.
    action (int): the index of the action.

  Returns:
    tuple(ObservationGrid, StepOutcome, RewardInputs): the new observation,
        the outcome and the reward inputs.
  """
  observation, outcome = env.Step(action)
  return observation, outcome, RewardInputs(outcome, env.scenario)
