"""Source generation from expression trees.

Two targets: DSL text (`make_source`), which parses back to the same tree, and
Python source (`make_python`), which `make_callable` compiles into a fast
batch evaluator.
"""

import logging
import math

from ..errors import UnboundSymbolError
from .nodes import (
    BINARY_FUNCTIONS, UNARY_FUNCTIONS, Binary, Constant, Symbol, Unary
)

logger = logging.getLogger(__name__)


BINARY_OP_MAPPING = {
    'add': '+',
    'sub': '-',
    'mul': '*',
    'div': '/',
    'pow': '^'
}

# Binding power of each node kind in the DSL grammar.
PRECEDENCE = {
    'add': 1,
    'sub': 1,
    'mul': 2,
    'div': 2,
    'neg': 3,
    'pow': 4
}

ATOM = 5

PYTHON_BINARY_MAPPING = {
    'add': '+',
    'sub': '-',
    'mul': '*',
    'div': '/'
}


def format_number(value):
    if value.is_integer() and abs(value) < 1e15:
        return '{:d}'.format(int(value))

    return repr(value)


def precedence(expr):
    if isinstance(expr, Constant):
        return PRECEDENCE['neg'] if expr.value < 0 else ATOM

    if isinstance(expr, Unary):
        return PRECEDENCE['neg'] if expr.op == 'neg' else ATOM

    if isinstance(expr, Binary):
        return PRECEDENCE[expr.op]

    return ATOM


def parenthesize(expr, minimum):
    text = make_source(expr)

    if precedence(expr) < minimum:
        return '({})'.format(text)

    return text


def make_source(expr):
    """Generate DSL text from an expression tree.

    Parentheses are only added where the grammar needs them to rebuild the
    same tree.
    """
    if isinstance(expr, Constant):
        return format_number(expr.value)

    if isinstance(expr, Symbol):
        return expr.name

    if isinstance(expr, Unary):
        if expr.op == 'neg':
            return '-{}'.format(
                parenthesize(expr.child, PRECEDENCE['neg'])
            )

        return '{}({})'.format(expr.op, make_source(expr.child))

    if isinstance(expr, Binary):
        if expr.op == 'pow':
            # The base is an atom, the exponent a factor.
            return '{}^{}'.format(
                parenthesize(expr.left, ATOM),
                parenthesize(expr.right, PRECEDENCE['neg'])
            )

        level = PRECEDENCE[expr.op]

        return '{} {} {}'.format(
            parenthesize(expr.left, level),
            BINARY_OP_MAPPING[expr.op],
            parenthesize(expr.right, level + 1)
        )

    raise TypeError('unsupported node: {!r}'.format(expr))


def make_python(expr, index):
    """Generate a Python expression reading symbols from a sequence `v`.

    `index` maps symbol names to positions in `v`.
    """
    if isinstance(expr, Constant):
        if not math.isfinite(expr.value):
            return "_float('{!r}')".format(expr.value)

        return repr(expr.value)

    if isinstance(expr, Symbol):
        try:
            return 'v[{}]'.format(index[expr.name])
        except KeyError:
            raise UnboundSymbolError(expr.name)

    if isinstance(expr, Unary):
        if expr.op == 'neg':
            return '(-{})'.format(make_python(expr.child, index))

        return '_{}({})'.format(expr.op, make_python(expr.child, index))

    if isinstance(expr, Binary):
        left = make_python(expr.left, index)
        right = make_python(expr.right, index)

        if expr.op == 'pow':
            return '_pow({}, {})'.format(left, right)

        return '({} {} {})'.format(
            left, PYTHON_BINARY_MAPPING[expr.op], right
        )

    raise TypeError('unsupported node: {!r}'.format(expr))


PYTHON_NAMESPACE = dict(
    ('_' + name, function) for name, function in UNARY_FUNCTIONS.items()
)
PYTHON_NAMESPACE['_pow'] = BINARY_FUNCTIONS['pow']
PYTHON_NAMESPACE['_float'] = float
PYTHON_NAMESPACE['__builtins__'] = {}


def make_callable(exprs, names):
    """Compile `exprs` into one function of a value sequence.

    The returned function takes values ordered like `names` and returns the
    list of expression values. It performs the same `math` calls as
    `evaluate`, so results are identical; when an arithmetic error occurs the
    expressions are re-evaluated one node at a time so the raised error names
    the failing subexpression.
    """
    from .evaluate import evaluate

    exprs = list(exprs)
    names = list(names)
    index = dict(
        (name, position) for position, name in enumerate(names)
    )

    source = 'def compiled(v):\n    return [{}]\n'.format(
        ', '.join(make_python(expr, index) for expr in exprs)
    )

    namespace = dict(PYTHON_NAMESPACE)
    exec(compile(source, '<vaffine.expr>', 'exec'), namespace)  # nosec
    compiled = namespace['compiled']

    def evaluator(values):
        # Plain floats: numpy scalars would turn x / 0 into a warning.
        values = [float(value) for value in values]

        try:
            return compiled(values)
        except (ArithmeticError, ValueError):
            env = dict(zip(names, values))

            for expr in exprs:
                evaluate(expr, env)

            raise

    evaluator.source = source
    evaluator.names = tuple(names)

    return evaluator
