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
"""Hierarchical rulebooks and the rulebook reward.

A rulebook is a set of rule realizations ordered by hierarchy levels, level 1
being the most important. Rules of equal priority share a level. Each level j
has a coefficient rho_j in [0, 1]; the effective weight of a rule is the
product of the coefficients from level 1 down to its own level. While the
rulebook is inactive every coefficient counts as 1.
"""

import collections
import logging
import os

import yaml

from informed_drive import errors
from informed_drive import ltl

RULEBOOK_FORMAT_VERSION = 1

DEFAULT_RULEBOOK_PATH = os.path.join(
    os.path.dirname(os.path.abspath(__file__)), 'rulebooks', 'default.yaml')

# How the caller weights a rule's penalty at every step.
WEIGHTING_UNIT = 'unit'
WEIGHTING_TRAVELED_LENGTH = 'traveled_length'
WEIGHTINGS = frozenset([WEIGHTING_UNIT, WEIGHTING_TRAVELED_LENGTH])

RuleSpec = collections.namedtuple(
    'RuleSpec', ['rule_id', 'formula', 'level', 'scale', 'weighting'])
RuleSpec.__new__.__defaults__ = (WEIGHTING_UNIT,)

RuleRealization = collections.namedtuple(
    'RuleRealization', ['rule_id', 'formula', 'level', 'scale', 'weighting'])

RuleContribution = collections.namedtuple(
    'RuleContribution', ['penalty', 'coefficient', 'contribution'])

RulebookReward = collections.namedtuple(
    'RulebookReward', ['total', 'per_rule'])


class Rulebook(object):
  """A set of rule realizations with hierarchy coefficients.

  Attributes:
    rules (tuple[RuleRealization]): the rules, in declaration order.
    level_coefficients (dict[int, float]): rho_j for each level j.
    active (bool): whether the situation requires the hierarchy coefficients.
  """

  def __init__(self, rules, level_coefficients, active=False):
    """Initializes a Rulebook object.

    Use BuildRulebook() to get a validated rulebook from rule specs.

    Args:
      rules (list[RuleRealization]): the rules.
      level_coefficients (dict[int, float]): rho_j for each level j.
      active (bool): the initial activation flag.
    """
    self.rules = tuple(rules)
    self.level_coefficients = dict(level_coefficients)
    self.active = active
    self._rules_by_id = {rule.rule_id: rule for rule in self.rules}

  @property
  def levels(self):
    """int: the number of hierarchy levels."""
    return max(rule.level for rule in self.rules)

  def GetRule(self, rule_id):
    """Returns a rule by identifier.

    Args:
      rule_id (str): the identifier.

    Returns:
      RuleRealization: the rule.

    Raises:
      RulebookError: if the rulebook has no such rule.
    """
    try:
      return self._rules_by_id[rule_id]
    except KeyError:
      raise errors.RulebookError('Unknown rule {0!r}'.format(rule_id))


def _CheckCoefficient(level, rho):
  if not 0.0 <= rho <= 1.0:
    raise errors.RulebookError(
        'Coefficient of level {0:d} must be in [0, 1], got {1!r}'.format(
            level, rho))


def BuildRulebook(rule_specs, coefficients):
  """Builds and validates a rulebook.

  Args:
    rule_specs (list[RuleSpec]): the rules, with formula text.
    coefficients (dict[int, float]): rho_j for each level j.

  Returns:
    Rulebook: the rulebook, inactive.

  Raises:
    RulebookError: if a formula doesn't parse or an invariant is violated.
  """
  if not rule_specs:
    raise errors.RulebookError('A rulebook needs at least one rule')

  coefficients = {
      int(level): float(rho) for level, rho in coefficients.items()}
  rules = []
  for spec in rule_specs:
    spec = RuleSpec(*spec)
    if any(rule.rule_id == spec.rule_id for rule in rules):
      raise errors.RulebookError('Duplicate rule {0!r}'.format(spec.rule_id))
    if isinstance(spec.level, bool) or int(spec.level) != spec.level:
      raise errors.RulebookError(
          'Rule {0!r} has a non integer level'.format(spec.rule_id))
    if spec.level < 1:
      raise errors.RulebookError(
          'Rule {0!r} level must be >= 1'.format(spec.rule_id))
    if not spec.scale > 0:
      raise errors.RulebookError(
          'Rule {0!r} scale must be > 0'.format(spec.rule_id))
    if spec.weighting not in WEIGHTINGS:
      raise errors.RulebookError(
          'Rule {0!r} has unknown weighting {1!r}'.format(
              spec.rule_id, spec.weighting))
    if int(spec.level) not in coefficients:
      raise errors.RulebookError(
          'Missing coefficient for level {0:d} of rule {1!r}'.format(
              int(spec.level), spec.rule_id))
    try:
      formula = ltl.ParseLtl(spec.formula)
    except errors.LtlSyntaxError as exception:
      raise errors.RulebookError(
          'Rule {0!r}: {1!s}'.format(spec.rule_id, exception))
    rules.append(RuleRealization(
        spec.rule_id, formula, int(spec.level), float(spec.scale),
        spec.weighting))

  used_levels = sorted({rule.level for rule in rules})
  if used_levels != list(range(1, len(used_levels) + 1)):
    raise errors.RulebookError(
        'Levels must be contiguous from 1, got {0!s}'.format(used_levels))
  for level, rho in coefficients.items():
    _CheckCoefficient(level, rho)

  return Rulebook(rules, coefficients)


def CumulativeCoefficient(rulebook, rule):
  """Returns the product of coefficients from level 1 to the rule's level.

  Args:
    rulebook (Rulebook): the rulebook.
    rule (RuleRealization): one of its rules.

  Returns:
    float: the cumulative coefficient, 1.0 if the rulebook is inactive.

  Raises:
    RulebookError: if the rule doesn't belong to the rulebook.
  """
  if rulebook.GetRule(rule.rule_id) != rule:
    raise errors.RulebookError(
        'Rule {0!r} does not belong to this rulebook'.format(rule.rule_id))
  if not rulebook.active:
    return 1.0
  product = 1.0
  for level in range(1, rule.level + 1):
    product *= rulebook.level_coefficients[level]
  return product


def ComputeRulebookReward(rulebook, trace, per_rule_weights):
  """Computes the rulebook reward of a trace.

  Args:
    rulebook (Rulebook): the rulebook.
    trace (list[dict[str, bool]]): the states to check.
    per_rule_weights (dict[str, float]): the step multiplier of each rule.

  Returns:
    RulebookReward: the total and each rule's contribution.

  Raises:
    RulebookError: if a rule has no weight.
  """
  per_rule = collections.OrderedDict()
  total = 0.0
  for rule in rulebook.rules:
    if rule.rule_id not in per_rule_weights:
      raise errors.RulebookError(
          'Missing weight for rule {0!r}'.format(rule.rule_id))
    penalty = ltl.RulePenalty(rule.formula, trace)
    coefficient = CumulativeCoefficient(rulebook, rule)
    contribution = (
        coefficient * penalty * rule.scale * per_rule_weights[rule.rule_id])
    per_rule[rule.rule_id] = RuleContribution(
        penalty, coefficient, contribution)
    total += contribution
  return RulebookReward(total, per_rule)


def LoadRulebook(path=None):
  """Loads a rulebook file.

  Args:
    path (str): the path to the YAML file, defaults to the shipped rulebook.

  Returns:
    Rulebook: the rulebook, inactive.

  Raises:
    RulebookError: if the file is invalid.
  """
  path = path or DEFAULT_RULEBOOK_PATH
  logging.getLogger(__name__).debug('Loading rulebook %s', path)
  try:
    with open(path, 'r') as rulebook_file:
      document = yaml.safe_load(rulebook_file)
  except (IOError, yaml.YAMLError) as exception:
    raise errors.RulebookError(
        'Unable to read rulebook {0:s}: {1!s}'.format(path, exception))

  if not isinstance(document, dict):
    raise errors.RulebookError('Rulebook {0:s} is empty'.format(path))
  version = document.get('version')
  if version != RULEBOOK_FORMAT_VERSION:
    raise errors.RulebookError(
        'Unsupported rulebook version {0!r} in {1:s}'.format(version, path))
  try:
    specs = [
        RuleSpec(
            rule_id=str(entry['id']), formula=entry['formula'],
            level=entry['level'], scale=entry['scale'],
            weighting=entry.get('weighting', WEIGHTING_UNIT))
        for entry in document.get('rules') or []]
  except (KeyError, TypeError) as exception:
    raise errors.RulebookError(
        'Malformed rule in {0:s}: {1!s}'.format(path, exception))
  return BuildRulebook(specs, document.get('coefficients') or {})
