"""Expression tree.

Nodes are immutable and compare structurally, so two trees built from the same
text (or by the same derivation) are equal and hash alike. The constructor
helpers (`add`, `mul`, ...) fold constants and drop 0/1 identities; building
nodes directly skips that. `0*e` and `e^0` only fold when `e` is total, so
folding never removes a subexpression that can fail to evaluate.
"""

import math
import operator

from dataclasses import dataclass, field

UNARY_OPS = ('neg', 'sin', 'cos', 'tan', 'exp', 'log', 'sqrt')
BINARY_OPS = ('add', 'sub', 'mul', 'div', 'pow')

# `neg` is an operator, the rest are callable by name from the DSL.
FUNCTIONS = ('sin', 'cos', 'tan', 'exp', 'log', 'sqrt')

UNARY_FUNCTIONS = {
    'neg': operator.neg,
    'sin': math.sin,
    'cos': math.cos,
    'tan': math.tan,
    'exp': math.exp,
    'log': math.log,
    'sqrt': math.sqrt
}

BINARY_FUNCTIONS = {
    'add': operator.add,
    'sub': operator.sub,
    'mul': operator.mul,
    'div': operator.truediv,
    'pow': math.pow
}


class Expr:
    """Base class of every node."""
    symbols = frozenset()

    def __str__(self):
        from .codegen import make_source

        return make_source(self)


@dataclass(frozen=True)
class Constant(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, 'value', float(self.value))


@dataclass(frozen=True)
class Symbol(Expr):
    name: str
    symbols: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'symbols', frozenset([self.name]))


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    child: Expr
    symbols: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.op not in UNARY_OPS:
            raise ValueError('unknown unary operator {}'.format(self.op))

        object.__setattr__(self, 'symbols', self.child.symbols)


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr
    symbols: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError('unknown binary operator {}'.format(self.op))

        object.__setattr__(
            self, 'symbols', self.left.symbols | self.right.symbols
        )


ZERO = Constant(0.0)
ONE = Constant(1.0)


def free_symbols(expr):
    """Names of the symbols appearing in `expr`."""
    return expr.symbols


def velocity_name(coordinate):
    """Velocity symbol paired with a coordinate: `x` has velocity `xd`."""
    return coordinate + 'd'


def as_expr(value):
    if isinstance(value, Expr):
        return value

    if isinstance(value, str):
        from .parser import parse

        return parse(value)

    return Constant(value)


def is_constant(expr, value=None):
    if not isinstance(expr, Constant):
        return False

    return value is None or expr.value == value


# Operators defined on part of the real line only. Overflow is not counted.
PARTIAL_OPS = ('tan', 'log', 'sqrt', 'div')


def is_total(expr):
    """Whether `expr` is defined at every finite point.

    A power is total when its base is and its exponent is a non-negative
    integer constant.
    """
    if isinstance(expr, Constant):
        return math.isfinite(expr.value)

    if isinstance(expr, Symbol):
        return True

    if expr.op in PARTIAL_OPS:
        return False

    if expr.op == 'pow':
        exponent = expr.right

        return isinstance(exponent, Constant) and exponent.value >= 0 \
            and exponent.value.is_integer() and is_total(expr.left)

    if isinstance(expr, Unary):
        return is_total(expr.child)

    return is_total(expr.left) and is_total(expr.right)


def _try_fold(node, function, *values):
    try:
        value = function(*values)
    except (ArithmeticError, ValueError):
        return node

    if not math.isfinite(value):
        return node

    return Constant(value)


def unary(op, child):
    if op == 'neg':
        return neg(child)

    node = Unary(op, child)

    if isinstance(child, Constant):
        return _try_fold(node, UNARY_FUNCTIONS[op], child.value)

    return node


def neg(child):
    if isinstance(child, Constant):
        return Constant(-child.value)

    if isinstance(child, Unary) and child.op == 'neg':
        return child.child

    return Unary('neg', child)


def binary(op, left, right):
    return {
        'add': add, 'sub': sub, 'mul': mul, 'div': div, 'pow': power
    }[op](left, right)


def _fold_binary(op, left, right):
    node = Binary(op, left, right)

    if isinstance(left, Constant) and isinstance(right, Constant):
        return _try_fold(
            node, BINARY_FUNCTIONS[op], left.value, right.value
        )

    return node


def add(left, right):
    left, right = as_expr(left), as_expr(right)

    if is_constant(left, 0.0):
        return right

    if is_constant(right, 0.0):
        return left

    return _fold_binary('add', left, right)


def sub(left, right):
    left, right = as_expr(left), as_expr(right)

    if is_constant(right, 0.0):
        return left

    if is_constant(left, 0.0):
        return neg(right)

    return _fold_binary('sub', left, right)


def mul(left, right):
    left, right = as_expr(left), as_expr(right)

    if is_constant(left, 0.0) and is_total(right) \
            or is_constant(right, 0.0) and is_total(left):
        return ZERO

    if is_constant(left, 1.0):
        return right

    if is_constant(right, 1.0):
        return left

    return _fold_binary('mul', left, right)


def div(left, right):
    left, right = as_expr(left), as_expr(right)

    if is_constant(right, 1.0):
        return left

    return _fold_binary('div', left, right)


def power(left, right):
    left, right = as_expr(left), as_expr(right)

    if is_constant(right, 0.0) and is_total(left):
        return ONE

    if is_constant(right, 1.0):
        return left

    return _fold_binary('pow', left, right)


def fold(expr):
    """Fold constants and eliminate 0/1 identities, bottom-up.

    A constant subexpression whose value cannot be computed (or is not
    finite) is kept as is so that evaluation still reports it.
    """
    if isinstance(expr, (Constant, Symbol)):
        return expr

    if isinstance(expr, Unary):
        return unary(expr.op, fold(expr.child))

    return binary(expr.op, fold(expr.left), fold(expr.right))


def substitute(expr, bindings):
    """Replace symbols by expressions (or numbers), then fold."""
    if not expr.symbols & set(bindings):
        return expr

    if isinstance(expr, Symbol):
        return as_expr(bindings[expr.name])

    if isinstance(expr, Unary):
        return unary(expr.op, substitute(expr.child, bindings))

    return binary(
        expr.op,
        substitute(expr.left, bindings),
        substitute(expr.right, bindings)
    )
