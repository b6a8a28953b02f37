"""Expression DSL: parsing, printing, evaluation and differentiation."""

from .calculus import diff, gradient
from .codegen import make_callable, make_source
from .evaluate import evaluate, finite_difference
from .nodes import (
    Binary, Constant, Expr, Symbol, Unary, add, as_expr, div, fold,
    free_symbols, is_total, mul, neg, power, sub, substitute, unary,
    velocity_name
)
from .parser import parse

__all__ = [
    'Binary',
    'Constant',
    'Expr',
    'Symbol',
    'Unary',
    'add',
    'as_expr',
    'diff',
    'div',
    'evaluate',
    'finite_difference',
    'fold',
    'free_symbols',
    'gradient',
    'is_total',
    'make_callable',
    'make_source',
    'mul',
    'neg',
    'parse',
    'power',
    'sub',
    'substitute',
    'to_text',
    'unary',
    'velocity_name'
]

to_text = make_source
