"""Riemannian geometry of a mechanical control system in one chart.

A `MechanicalModel` holds the metric, the potential, the external force and
the control coframe as expression grids. Everything that is evaluated at a
configuration point goes through `MechanicalModel.point`, which factorizes the
metric once and serves the musical isomorphisms, the Christoffel symbols and
the drift acceleration from that factorization.
"""

import logging
import re

import numpy as np
import scipy.linalg

from scipy.linalg.lapack import dpocon, dpotrf, dpotrs

from .errors import ExprError, MetricError, ModelError
from .expr import (
    as_expr, diff, fold, make_callable, make_source, substitute, velocity_name
)

logger = logging.getLogger(__name__)


# Largest accepted condition number for metric and control solves.
CONDITION_CAP = 1e12

IDENTIFIER = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')


class State:
    """Chart point `q` and velocity `qdot`."""
    def __init__(self, q, qdot):
        self.q = np.array(q, dtype=float).reshape(-1)
        self.qdot = np.array(qdot, dtype=float).reshape(-1)

        if self.q.shape != self.qdot.shape:
            raise ValueError(
                'q has {} components but qdot has {}'.format(
                    self.q.size, self.qdot.size
                )
            )

    def __repr__(self):
        return 'State(q={}, qdot={})'.format(
            self.q.tolist(), self.qdot.tolist()
        )

    def __eq__(self, other):
        return isinstance(other, State) \
            and np.array_equal(self.q, other.q) \
            and np.array_equal(self.qdot, other.qdot)

    @property
    def n(self):
        return self.q.size

    def is_finite(self):
        return bool(
            np.isfinite(self.q).all() and np.isfinite(self.qdot).all()
        )

    def as_vector(self):
        return np.concatenate([self.q, self.qdot])

    @classmethod
    def from_vector(cls, vector):
        n = vector.size // 2

        return cls(vector[:n], vector[n:])


def expr_grid(rows, shape, location):
    """Turn nested lists of strings/numbers/Exprs into Expr grids."""
    if len(rows) != shape[0]:
        raise ModelError(
            'expected {} rows, got {}'.format(shape[0], len(rows)), location
        )

    grid = []

    for i, row in enumerate(rows):
        if len(shape) == 1:
            grid.append(
                parse_entry(row, '{}[{}]'.format(location, i))
            )
            continue

        if len(row) != shape[1]:
            raise ModelError(
                'expected {} entries, got {}'.format(shape[1], len(row)),
                '{}[{}]'.format(location, i)
            )

        grid.append([
            parse_entry(entry, '{}[{}][{}]'.format(location, i, j))
            for j, entry in enumerate(row)
        ])

    return grid


def parse_entry(entry, location):
    try:
        return as_expr(entry)
    except ExprError as err:
        raise ModelError(err.message, location)


class MechanicalModel:
    """Data of a mechanical control system on an open set of n-space.

    Expressions may mention coordinates, velocities (coordinate name suffixed
    with `d`) and parameters. The metric, the potential and the control
    coframe must not depend on velocities.
    """
    def __init__(self, coordinates, metric, potential=0, external_force=None,
                 input_coframe=(), parameters=None, name=None):
        self.coordinates = tuple(coordinates)
        self.velocities = tuple(velocity_name(c) for c in self.coordinates)
        self.parameters = dict(parameters or {})
        self.name = name

        n = self.n

        validate_names(self.coordinates, self.parameters)

        self.metric = expr_grid(list(metric), (n, n), 'metric')
        self.potential = parse_entry(potential, 'potential')
        self.external_force = expr_grid(
            list(external_force or [0] * n), (n,), 'external_force'
        )
        self.input_coframe = expr_grid(
            [list(row) for row in input_coframe], (len(input_coframe), n),
            'inputs'
        )

        if self.m >= n:
            raise ModelError(
                'need fewer inputs than coordinates (m={}, n={})'.format(
                    self.m, n
                ), 'inputs'
            )

        self.bind()

    @property
    def n(self):
        return len(self.coordinates)

    @property
    def m(self):
        return len(self.input_coframe)

    def bind(self):
        """Substitute parameters, check symbols and compile evaluators."""
        positional = set(self.coordinates) | set(self.parameters)
        kinematic = positional | set(self.velocities)

        def bound(expr, location, allowed):
            expr = fold(substitute(expr, self.parameters))
            check_symbols(expr, allowed, location, self.velocities)

            return expr

        n = self.n

        metric = [
            [bound(self.metric[i][j], 'metric[{}][{}]'.format(i, j),
                   positional) for j in range(n)]
            for i in range(n)
        ]

        for i in range(n):
            for j in range(i):
                if fold(self.metric[i][j]) != fold(self.metric[j][i]):
                    raise ModelError(
                        'metric is not symmetric: `{}` != `{}`'.format(
                            make_source(self.metric[i][j]),
                            make_source(self.metric[j][i])
                        ), 'metric[{}][{}]'.format(i, j)
                    )

        potential = bound(self.potential, 'potential', positional)
        force = [
            bound(f, 'external_force[{}]'.format(i), kinematic)
            for i, f in enumerate(self.external_force)
        ]
        coframe = [
            [bound(f, 'inputs[{}][{}]'.format(a, i), positional)
             for i, f in enumerate(row)]
            for a, row in enumerate(self.input_coframe)
        ]

        upper = [(i, j) for i in range(n) for j in range(i, n)]

        position_exprs = [metric[i][j] for i, j in upper]
        position_exprs += [
            diff(metric[i][j], q) for q in self.coordinates for i, j in upper
        ]
        position_exprs += [diff(potential, q) for q in self.coordinates]
        position_exprs += [f for row in coframe for f in row]

        # Gather indices of the metric and its derivatives in the values of
        # `_position`.
        index = np.empty((n, n), dtype=int)

        for position, (i, j) in enumerate(upper):
            index[i, j] = index[j, i] = position

        self._metric_index = index
        self._derivative_index = index + len(upper) * np.arange(
            1, n + 1
        ).reshape(n, 1, 1)
        self._metric_size = len(upper) * (n + 1)
        self._constant_metric = not any(
            metric[i][j].symbols for i, j in upper
        )
        self._metric = None

        self._potential = make_callable([potential], self.coordinates)
        self._position = make_callable(position_exprs, self.coordinates)
        self._force = make_callable(
            force, self.coordinates + self.velocities
        )

        logger.debug(
            'compiled model {} (n={}, m={}, {} position expressions)'.format(
                self.name or '<anonymous>', n, self.m, len(position_exprs)
            )
        )

    def with_parameters(self, **overrides):
        """Copy of the model with some parameter values replaced."""
        unknown = set(overrides) - set(self.parameters)

        if unknown:
            raise ModelError(
                'unknown parameters: {}'.format(', '.join(sorted(unknown))),
                'parameters'
            )

        parameters = dict(self.parameters)
        parameters.update(overrides)

        return MechanicalModel(
            self.coordinates, self.metric, self.potential,
            self.external_force, self.input_coframe, parameters, self.name
        )

    def check_state(self, state):
        if state.n != self.n:
            raise ValueError(
                'state has dimension {}, model has {}'.format(state.n, self.n)
            )

        if not state.is_finite():
            raise ValueError('state has non-finite entries: {}'.format(state))

    def point(self, q):
        """Evaluate every configuration-only quantity at `q`."""
        return Point(self, q)

    def potential_at(self, q):
        return self._potential(q)[0]

    def external_force_at(self, state):
        return np.array(
            self._force(state.q.tolist() + state.qdot.tolist())
        )


def validate_names(coordinates, parameters):
    names = list(coordinates) + list(parameters)

    for name in names:
        if not IDENTIFIER.match(name):
            raise ModelError('invalid name `{}`'.format(name), 'coordinates')

    if len(set(names)) != len(names):
        raise ModelError(
            'coordinate and parameter names must be unique', 'coordinates'
        )

    if not coordinates:
        raise ModelError('need at least one coordinate', 'coordinates')

    clashes = set(velocity_name(c) for c in coordinates) & set(names)

    if clashes:
        raise ModelError(
            'names clash with velocity symbols: {}'.format(
                ', '.join(sorted(clashes))
            ), 'coordinates'
        )


def check_symbols(expr, allowed, location, velocities=()):
    extra = expr.symbols - set(allowed)

    if not extra:
        return

    moving = extra & set(velocities)

    if moving:
        raise ModelError(
            'must not depend on velocities ({})'.format(
                ', '.join(sorted(moving))
            ), location
        )

    raise ModelError(
        'unknown symbols: {}'.format(', '.join(sorted(extra))), location
    )


def factor_metric(model, q, values):
    """Metric, its derivatives, its upper Cholesky factor and a 1-norm
    condition estimate taken from that factor.

    A metric that does not depend on the configuration is kept on the model
    after the first success, read-only.
    """
    G = values[model._metric_index]
    # dG[k, i, j] = d g_ij / d q^k
    dG = values[model._derivative_index]

    factor, info = dpotrf(G, lower=False, clean=True)

    if info != 0:
        raise MetricError(
            'metric is not positive definite at q = {}'.format(q.tolist()),
            q, scipy.linalg.eigvalsh(G, check_finite=False)
        )

    rcond, info = dpocon(factor, np.max(np.sum(np.abs(G), axis=0)))
    condition = 1.0 / rcond if rcond > 0 else float('inf')

    if condition > CONDITION_CAP:
        raise MetricError(
            'metric condition estimate {:.3g} exceeds {:.0e}'.format(
                condition, CONDITION_CAP
            ), q, scipy.linalg.eigvalsh(G, check_finite=False)
        )

    # lower[l, i, j] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    lower = 0.5 * (dG.transpose(2, 0, 1) + dG.transpose(2, 1, 0) - dG)
    metric = (G, dG, lower, factor, condition)

    if model._constant_metric:
        for array in metric[:4]:
            array.flags.writeable = False

        model._metric = metric

    return metric


class Point:
    """Configuration-dependent data at one chart point."""
    def __init__(self, model, q):
        q = np.array(q, dtype=float).reshape(-1)

        if q.size != model.n:
            raise ValueError(
                'q has {} components, model has {}'.format(q.size, model.n)
            )

        if not np.isfinite(q).all():
            raise ValueError('q has non-finite entries: {}'.format(q))

        n, m = model.n, model.m
        values = np.array(model._position(q.tolist()))
        offset = model._metric_size

        self.model = model
        self.q = q
        self.dV = values[offset:offset + n]
        self.coframe = values[offset + n:offset + n + m * n].reshape(m, n)
        self.G, self.dG, self.lower, self.factor, self.condition = \
            model._metric or factor_metric(model, q, values)

    def sharp(self, covector):
        covector = np.asarray(covector, dtype=float)
        result, info = dpotrs(self.factor, covector.reshape(self.model.n, -1))

        return result.reshape(covector.shape)

    def flat(self, vector):
        return self.G.dot(vector)

    def christoffel_first_kind(self):
        return self.lower

    def christoffel(self):
        n = self.model.n
        lower = self.christoffel_first_kind()

        gamma = self.sharp(lower.reshape(n, n * n)).reshape(n, n, n)

        return 0.5 * (gamma + gamma.transpose(0, 2, 1))

    def quadratic_force(self, qdot):
        """Covector lower[l, i, j] qdot^i qdot^j (geodesic spray, lowered)."""
        return self.christoffel_first_kind().dot(qdot).dot(qdot)

    def input_fields(self):
        """Columns Y^a = sharp(f^a)."""
        if not self.model.m:
            return np.zeros((self.model.n, 0))

        return self.sharp(self.coframe.T)

    def drift(self, qdot, force):
        """Acceleration of the unactuated forced system."""
        return self.sharp(force - self.dV - self.quadratic_force(qdot))


def metric_at(model, q):
    return model.point(q).G


def christoffel_at(model, q):
    """Christoffel symbols, indexed [k, i, j] for Gamma^k_ij."""
    return model.point(q).christoffel()


def sharp(model, q, covector):
    return model.point(q).sharp(covector)


def flat(model, q, vector):
    return model.point(q).flat(vector)


def grad_potential(model, q):
    point = model.point(q)

    return point.sharp(point.dV)


def input_vector_fields(model, q):
    return model.point(q).input_fields()


def external_force_field(model, state):
    model.check_state(state)

    return model.point(state.q).sharp(model.external_force_at(state))


def drift_acceleration(model, state, point=None):
    model.check_state(state)
    point = point or model.point(state.q)

    return point.drift(state.qdot, model.external_force_at(state))


def controlled_acceleration(model, state, u, point=None):
    """Acceleration of the control system for an arbitrary input `u`."""
    point = point or model.point(state.q)
    a = drift_acceleration(model, state, point)

    if model.m:
        a = a + point.input_fields().dot(np.asarray(u, dtype=float))

    return a


def kinetic_energy(model, state, point=None):
    point = point or model.point(state.q)

    return 0.5 * state.qdot.dot(point.flat(state.qdot))


def potential_energy(model, q):
    return model.potential_at(q)


def lagrangian(model, state):
    return kinetic_energy(model, state) - potential_energy(model, state.q)


class RankReport:
    def __init__(self, q, singular_values, rank, expected):
        self.q = q
        self.singular_values = singular_values
        self.rank = rank
        self.expected = expected

    @property
    def ok(self):
        return self.rank == self.expected

    def as_dict(self):
        return {
            'ok': self.ok,
            'rank': self.rank,
            'expected': self.expected,
            'singular_values': self.singular_values.tolist()
        }


def numerical_rank(singular_values, tolerance):
    if not singular_values.size or not singular_values[0] > 0:
        return 0

    return int(np.sum(singular_values > tolerance * singular_values[0]))


def input_rank_check(model, q, tolerance=1e-9):
    """Whether the control coframe rows are linearly independent at `q`."""
    singular_values = np.zeros(0)

    if model.m:
        singular_values = scipy.linalg.svdvals(
            model.point(q).coframe, check_finite=False
        )

    return RankReport(
        np.array(q, dtype=float), singular_values,
        numerical_rank(singular_values, tolerance), model.m
    )
