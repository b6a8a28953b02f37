"""Exact symbolic differentiation."""

from ..utils import memoized
from .nodes import (
    ONE, ZERO, Binary, Constant, Symbol, Unary, add, as_expr, div,
    is_constant, mul, neg, power, sub, unary
)


def product(left, right):
    """Product inside a derivative; a zero factor drops the term."""
    if is_constant(left, 0.0) or is_constant(right, 0.0):
        return ZERO

    return mul(left, right)


def quotient(left, right):
    if is_constant(left, 0.0):
        return ZERO

    return div(left, right)


@memoized
def diff(expr, name):
    """Partial derivative of `expr` with respect to the symbol `name`.

    The result is folded; an expression that does not mention `name`
    differentiates to `Constant(0)`.
    """
    expr = as_expr(expr)

    if name not in expr.symbols:
        return ZERO

    if isinstance(expr, Symbol):
        return ONE

    if isinstance(expr, Unary):
        return diff_unary(expr, name)

    if isinstance(expr, Binary):
        return diff_binary(expr, name)

    raise TypeError('unsupported node: {!r}'.format(expr))


def diff_unary(expr, name):
    child = expr.child
    inner = diff(child, name)

    if expr.op == 'neg':
        return neg(inner)

    if expr.op == 'sin':
        outer = unary('cos', child)
    elif expr.op == 'cos':
        outer = neg(unary('sin', child))
    elif expr.op == 'tan':
        outer = div(ONE, power(unary('cos', child), Constant(2)))
    elif expr.op == 'exp':
        outer = unary('exp', child)
    elif expr.op == 'log':
        return quotient(inner, child)
    elif expr.op == 'sqrt':
        return quotient(inner, mul(Constant(2), unary('sqrt', child)))

    return product(outer, inner)


def diff_binary(expr, name):
    left, right = expr.left, expr.right
    dleft, dright = diff(left, name), diff(right, name)

    if expr.op == 'add':
        return add(dleft, dright)

    if expr.op == 'sub':
        return sub(dleft, dright)

    if expr.op == 'mul':
        return add(product(dleft, right), product(left, dright))

    if expr.op == 'div':
        return sub(
            quotient(dleft, right),
            quotient(product(left, dright), power(right, Constant(2)))
        )

    # pow: the power rule when the exponent does not depend on `name`, which
    # keeps log(base) out of the result.
    if name not in right.symbols:
        return product(
            mul(right, power(left, sub(right, ONE))), dleft
        )

    if name not in left.symbols:
        return product(mul(expr, unary('log', left)), dright)

    return mul(
        expr,
        add(
            product(dright, unary('log', left)),
            quotient(product(right, dleft), left)
        )
    )


def gradient(expr, names):
    return [diff(expr, name) for name in names]
