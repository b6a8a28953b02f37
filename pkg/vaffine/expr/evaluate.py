"""Numeric evaluation of expression trees."""

from ..errors import DomainError, UnboundSymbolError
from .codegen import make_source
from .nodes import (
    BINARY_FUNCTIONS, UNARY_FUNCTIONS, Binary, Constant, Symbol, Unary
)

DOMAIN_MESSAGES = {
    'log': 'log of non-positive value',
    'sqrt': 'square root of negative value',
    'pow': 'invalid power',
    'div': 'division by zero'
}


def domain_error(op, err, expr):
    if isinstance(err, OverflowError):
        message = 'overflow'
    elif isinstance(err, ZeroDivisionError):
        message = 'division by zero'
    else:
        message = DOMAIN_MESSAGES.get(op, 'math domain error')

    return DomainError(message, make_source(expr))


def evaluate(expr, env):
    """Evaluate `expr` with symbol values taken from the mapping `env`.

    Unbound symbols are errors, never zero. Domain errors name the innermost
    subexpression that failed.
    """
    if isinstance(expr, Constant):
        return expr.value

    if isinstance(expr, Symbol):
        try:
            return float(env[expr.name])
        except KeyError:
            raise UnboundSymbolError(expr.name)

    if isinstance(expr, Unary):
        value = evaluate(expr.child, env)

        try:
            return UNARY_FUNCTIONS[expr.op](value)
        except (ArithmeticError, ValueError) as err:
            raise domain_error(expr.op, err, expr)

    if isinstance(expr, Binary):
        left = evaluate(expr.left, env)
        right = evaluate(expr.right, env)

        try:
            return BINARY_FUNCTIONS[expr.op](left, right)
        except (ArithmeticError, ValueError) as err:
            raise domain_error(expr.op, err, expr)

    raise TypeError('unsupported node: {!r}'.format(expr))


def finite_difference(expr, name, env, h=1e-6):
    """Central difference of `expr` along symbol `name`."""
    forward = dict(env)
    backward = dict(env)

    forward[name] = env[name] + h
    backward[name] = env[name] - h

    return (evaluate(expr, forward) - evaluate(expr, backward)) / (2 * h)
