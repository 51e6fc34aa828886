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
"""Linear temporal logic over finite traces.

Formulas use an ASCII syntax:

  !  negation        &  conjunction     |  disjunction     ->  implication
  X  next            G  globally        F  finally         U   until

Precedence, lowest first: '->' (right associative), '|', '&', the prefix
operators '!', 'X', 'G', 'F', then 'U' (left associative). Atoms are lower
case identifiers; 'true' and 'false' are constants.

Traces are finite, non-empty sequences of states. A state maps atom names to
booleans. Next is strong: 'X p' is false at the last position.
"""

import collections
import re

from informed_drive import errors

ATOM_PATTERN = re.compile(r'[a-z_][a-z0-9_]*\Z')


class Formula(object):
  """Base class of formula nodes.

  Nodes are immutable records. Two nodes are equal when they have the same
  kind and the same children.
  """

  __slots__ = ()

  def __str__(self):
    return PrettyPrint(self)

  def __eq__(self, other):
    return type(self) is type(other) and tuple.__eq__(self, other)

  def __ne__(self, other):
    return not self == other

  def __hash__(self):
    return hash((type(self).__name__,) + tuple(self))


class Atom(Formula, collections.namedtuple('Atom', ['name'])):
  __slots__ = ()

  def __new__(cls, name):
    if not ATOM_PATTERN.match(name or ''):
      raise ValueError('Invalid atom name {0!r}'.format(name))
    return super(Atom, cls).__new__(cls, name)


class Constant(Formula, collections.namedtuple('Constant', ['value'])):
  __slots__ = ()


class Not(Formula, collections.namedtuple('Not', ['operand'])):
  __slots__ = ()


class Next(Formula, collections.namedtuple('Next', ['operand'])):
  __slots__ = ()


class Globally(Formula, collections.namedtuple('Globally', ['operand'])):
  __slots__ = ()


class Finally(Formula, collections.namedtuple('Finally', ['operand'])):
  __slots__ = ()


class And(Formula, collections.namedtuple('And', ['left', 'right'])):
  __slots__ = ()


class Or(Formula, collections.namedtuple('Or', ['left', 'right'])):
  __slots__ = ()


class Implies(Formula, collections.namedtuple('Implies', ['left', 'right'])):
  __slots__ = ()


class Until(Formula, collections.namedtuple('Until', ['left', 'right'])):
  __slots__ = ()


UNARY_NODES = (Not, Next, Globally, Finally)
BINARY_NODES = (And, Or, Implies, Until)

_UNARY_SYMBOLS = {Not: '!', Next: 'X', Globally: 'G', Finally: 'F'}
_BINARY_SYMBOLS = {And: '&', Or: '|', Implies: '->', Until: 'U'}

Token = collections.namedtuple('Token', ['kind', 'text', 'offset'])

_TOKEN_PATTERN = re.compile(r'''
    (?P<space>\s+)
  | (?P<implies>->)
  | (?P<not>!)
  | (?P<and>&)
  | (?P<or>\|)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
''', re.VERBOSE)

_KEYWORDS = {
    'X': 'next', 'G': 'globally', 'F': 'finally', 'U': 'until',
    'true': 'true', 'false': 'false'}

_PREFIX_KINDS = {
    'not': Not, 'next': Next, 'globally': Globally, 'finally': Finally}

_TOKEN_TEXT = {
    'implies': '->', 'not': '!', 'and': '&', 'or': '|', 'lparen': '(',
    'rparen': ')', 'next': 'X', 'globally': 'G', 'finally': 'F',
    'until': 'U', 'true': 'true', 'false': 'false', 'atom': 'atom',
    'eof': 'end of input'}

_OPERAND_START = frozenset(
    ['not', 'next', 'globally', 'finally', 'lparen', 'atom', 'true', 'false'])


def Tokenize(text):
  """Splits formula text into tokens.

  Args:
    text (str): the formula text.

  Returns:
    list[Token]: the tokens, ending with an 'eof' token.

  Raises:
    LtlSyntaxError: on characters or words that aren't part of the syntax.
  """
  tokens = []
  position = 0
  while position < len(text):
    match = _TOKEN_PATTERN.match(text, position)
    if not match:
      raise errors.LtlSyntaxError(
          'Unknown token {0!r}'.format(text[position]), position)
    kind = match.lastgroup
    word = match.group()
    if kind == 'word':
      if word in _KEYWORDS:
        kind = _KEYWORDS[word]
      elif ATOM_PATTERN.match(word):
        kind = 'atom'
      else:
        raise errors.LtlSyntaxError(
            'Unknown token {0!r}'.format(word), position)
    if kind != 'space':
      tokens.append(Token(kind, word, position))
    position = match.end()
  tokens.append(Token('eof', '', len(text)))
  return tokens


class Parser(object):
  """Recursive descent parser for LTL formulas."""

  def __init__(self, tokens):
    """Initializes a Parser object.

    Args:
      tokens (list[Token]): tokens ending with an 'eof' token.
    """
    self._tokens = list(tokens)
    self._index = 0

  @property
  def token(self):
    """Token: the current token."""
    return self._tokens[self._index]

  def _Advance(self):
    token = self.token
    if token.kind != 'eof':
      self._index += 1
    return token

  def _Fail(self, expected):
    token = self.token
    found = _TOKEN_TEXT.get(token.kind, token.kind)
    if token.kind == 'atom':
      found = repr(token.text)
    raise errors.LtlSyntaxError(
        'Unexpected {0:s}'.format(found), token.offset,
        [_TOKEN_TEXT[kind] for kind in expected])

  def Parse(self):
    """Parses the whole token list.

    Returns:
      Formula: the root of the syntax tree.

    Raises:
      LtlSyntaxError: if the tokens don't form a formula.
    """
    formula = self._Implication()
    if self.token.kind != 'eof':
      self._Fail({'implies', 'or', 'and', 'until', 'rparen', 'eof'})
    return formula

  def _Implication(self):
    left = self._Disjunction()
    if self.token.kind == 'implies':
      self._Advance()
      return Implies(left, self._Implication())
    return left

  def _Disjunction(self):
    formula = self._Conjunction()
    while self.token.kind == 'or':
      self._Advance()
      formula = Or(formula, self._Conjunction())
    return formula

  def _Conjunction(self):
    formula = self._Unary()
    while self.token.kind == 'and':
      self._Advance()
      formula = And(formula, self._Unary())
    return formula

  def _Unary(self):
    node_class = _PREFIX_KINDS.get(self.token.kind)
    if node_class:
      self._Advance()
      return node_class(self._Unary())
    return self._Until()

  def _Until(self):
    formula = self._Primary()
    while self.token.kind == 'until':
      self._Advance()
      formula = Until(formula, self._UntilOperand())
    return formula

  def _UntilOperand(self):
    # Prefix operators right of 'U' bind to the operand that follows them.
    node_class = _PREFIX_KINDS.get(self.token.kind)
    if node_class:
      self._Advance()
      return node_class(self._UntilOperand())
    return self._Primary()

  def _Primary(self):
    token = self.token
    if token.kind == 'atom':
      self._Advance()
      return Atom(token.text)
    if token.kind in ('true', 'false'):
      self._Advance()
      return Constant(token.kind == 'true')
    if token.kind == 'lparen':
      self._Advance()
      formula = self._Implication()
      if self.token.kind != 'rparen':
        self._Fail({'rparen', 'implies', 'or', 'and', 'until'})
      self._Advance()
      return formula
    self._Fail(_OPERAND_START)
    return None


def ParseLtl(text):
  """Parses a LTL formula.

  Args:
    text (str): the formula, eg: 'G(no_collision)'.

  Returns:
    Formula: the syntax tree.

  Raises:
    LtlSyntaxError: if the text isn't a valid formula.
  """
  return Parser(Tokenize(text)).Parse()


def PrettyPrint(formula):
  """Renders a formula in canonical, fully parenthesized form.

  Args:
    formula (Formula): the formula.

  Returns:
    str: text that parses back to the same tree.
  """
  if isinstance(formula, Atom):
    return formula.name
  if isinstance(formula, Constant):
    return 'true' if formula.value else 'false'
  symbol = _UNARY_SYMBOLS.get(type(formula))
  if symbol:
    return '{0:s}({1:s})'.format(symbol, PrettyPrint(formula.operand))
  symbol = _BINARY_SYMBOLS[type(formula)]
  left = PrettyPrint(formula.left)
  if isinstance(formula, Until) and isinstance(formula.left, UNARY_NODES):
    left = '({0:s})'.format(left)
  return '({0:s} {1:s} {2:s})'.format(left, symbol, PrettyPrint(formula.right))


def AtomNames(formula):
  """Returns the names of the atoms used in a formula.

  Args:
    formula (Formula): the formula.

  Returns:
    frozenset[str]: the atom names.
  """
  if isinstance(formula, Atom):
    return frozenset([formula.name])
  if isinstance(formula, Constant):
    return frozenset()
  if isinstance(formula, UNARY_NODES):
    return AtomNames(formula.operand)
  return AtomNames(formula.left) | AtomNames(formula.right)


def _Holds(formula, trace, position):
  """Evaluates a formula at a position, without argument checks."""
  if isinstance(formula, Atom):
    state = trace[position]
    try:
      return bool(state[formula.name])
    except KeyError:
      raise errors.MissingAtomError(
          'State {0:d} does not assign atom {1!r}'.format(
              position, formula.name))
  if isinstance(formula, Constant):
    return formula.value
  if isinstance(formula, Not):
    return not _Holds(formula.operand, trace, position)
  if isinstance(formula, And):
    return (_Holds(formula.left, trace, position) and
            _Holds(formula.right, trace, position))
  if isinstance(formula, Or):
    return (_Holds(formula.left, trace, position) or
            _Holds(formula.right, trace, position))
  if isinstance(formula, Implies):
    return (not _Holds(formula.left, trace, position) or
            _Holds(formula.right, trace, position))
  if isinstance(formula, Next):
    return (position + 1 < len(trace) and
            _Holds(formula.operand, trace, position + 1))
  if isinstance(formula, Globally):
    return all(
        _Holds(formula.operand, trace, i) for i in range(position, len(trace)))
  if isinstance(formula, Finally):
    return any(
        _Holds(formula.operand, trace, i) for i in range(position, len(trace)))
  if isinstance(formula, Until):
    for k in range(position, len(trace)):
      if _Holds(formula.right, trace, k):
        return True
      if not _Holds(formula.left, trace, k):
        return False
    return False
  raise errors.FormulaError('Unknown formula node {0!r}'.format(formula))


def EvalFormula(formula, trace, position=0):
  """Evaluates a formula on a finite trace.

  Args:
    formula (Formula): the formula.
    trace (list[dict[str, bool]]): the states.
    position (int): the position to evaluate at.

  Returns:
    bool: whether the trace satisfies the formula at the position.

  Raises:
    FormulaError: if the trace is empty or the position out of range.
    MissingAtomError: if a visited state lacks an atom of the formula.
  """
  if not trace:
    raise errors.FormulaError('Cannot evaluate a formula on an empty trace')
  if not 0 <= position < len(trace):
    raise errors.FormulaError(
        'Position {0:d} is outside the trace of length {1:d}'.format(
            position, len(trace)))
  return _Holds(formula, trace, position)


def RulePenalty(formula, trace):
  """Scores a trace against a rule formula.

  Args:
    formula (Formula): the rule, usually rooted in G.
    trace (list[dict[str, bool]]): the states.

  Returns:
    float: -1.0 if the trace violates the formula, 0.0 otherwise.
  """
  return 0.0 if EvalFormula(formula, trace, 0) else -1.0
