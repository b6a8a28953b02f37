"""DSL parser.

Grammar, loosest binding first:

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?
    atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"

So `^` is right-associative and binds tighter than unary minus: `-x^2` is
`-(x^2)` and `2^3^2` is `2^(3^2)`. Error offsets are UTF-8 byte offsets into
the original text.
"""

import logging
import math
import re

from ..errors import ExprSyntaxError, UnknownFunctionError
from .nodes import (
    FUNCTIONS, Binary, Constant, Symbol, Unary
)

logger = logging.getLogger(__name__)


TOKEN_PATTERN = re.compile(r'''
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
''', re.VERBOSE)

BINARY_TOKENS = {
    '+': 'add',
    '-': 'sub',
    '*': 'mul',
    '/': 'div',
    '^': 'pow'
}


class Token:
    def __init__(self, kind, text, offset):
        self.kind = kind
        self.text = text
        self.offset = offset

    def __repr__(self):
        return '<{}:{}@{}>'.format(self.kind, self.text, self.offset)


def byte_offset(text, index):
    return len(
        text[:index].encode('utf-8')
    )


def tokenize(text):
    """Split `text` into tokens, the last one being `end`."""
    tokens = []
    index = 0

    while index < len(text):
        match = TOKEN_PATTERN.match(text, index)

        if not match:
            raise ExprSyntaxError(
                'unexpected character {!r}'.format(text[index]),
                byte_offset(text, index), text
            )

        kind = match.lastgroup

        if kind != 'space':
            tokens.append(
                Token(kind, match.group(), byte_offset(text, index))
            )

        index = match.end()

    tokens.append(
        Token('end', '', byte_offset(text, len(text)))
    )

    return tokens


class ExprParser:
    """Recursive-descent parser over a token list."""
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.position = 0

    @property
    def current(self):
        return self.tokens[self.position]

    def advance(self):
        token = self.current
        self.position += 1

        return token

    def error(self, message, token=None):
        token = token or self.current

        return ExprSyntaxError(message, token.offset, self.text)

    def expect(self, text):
        if self.current.text != text:
            found = self.current.text or 'end of input'

            raise self.error(
                'expected `{}`, found `{}`'.format(text, found)
            )

        return self.advance()

    def parse(self):
        if self.current.kind == 'end':
            raise self.error('empty expression')

        expr = self.parse_expr()

        if self.current.kind != 'end':
            raise self.error(
                'unexpected `{}`'.format(self.current.text)
            )

        return expr

    def parse_expr(self):
        left = self.parse_term()

        while self.current.text in ('+', '-'):
            op = BINARY_TOKENS[self.advance().text]
            left = Binary(op, left, self.parse_term())

        return left

    def parse_term(self):
        left = self.parse_factor()

        while self.current.text in ('*', '/'):
            op = BINARY_TOKENS[self.advance().text]
            left = Binary(op, left, self.parse_factor())

        return left

    def parse_factor(self):
        if self.current.text == '-':
            self.advance()

            return Unary('neg', self.parse_factor())

        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()

        if self.current.text == '^':
            self.advance()

            return Binary('pow', base, self.parse_factor())

        return base

    def parse_atom(self):
        token = self.current

        if token.kind == 'number':
            value = float(token.text)

            if not math.isfinite(value):
                raise self.error(
                    'number `{}` is out of range'.format(token.text)
                )

            self.advance()

            return Constant(value)

        if token.kind == 'ident':
            self.advance()

            if self.current.text != '(':
                return Symbol(token.text)

            if token.text not in FUNCTIONS:
                raise UnknownFunctionError(token.text, token.offset, self.text)

            self.advance()
            child = self.parse_expr()
            self.expect(')')

            return Unary(token.text, child)

        if token.text == '(':
            self.advance()
            expr = self.parse_expr()
            self.expect(')')

            return expr

        if token.kind == 'end':
            raise self.error('unexpected end of input')

        raise self.error(
            'unexpected `{}`'.format(token.text)
        )


def parse(text):
    """Parse DSL text into an expression tree (not folded)."""
    if isinstance(text, bytes):
        text = text.decode('utf-8')

    return ExprParser(text).parse()
