"""Affine velocity constraints.

The affine distribution is declared by its constraint one-forms (the rows of
S) and the affine term Z, so that a velocity is admissible exactly when
phi(q, qdot) = S(q) qdot + Z(q) vanishes.
"""

import logging
import math

import numpy as np
import scipy.linalg

from scipy.linalg.lapack import dgecon, dgetrf, dgetrs

from .errors import ModelError, RankDefect
from .expr import (
    Constant, Symbol, add, diff, fold, make_callable, mul, neg, substitute,
    velocity_name
)
from .geometry import (
    CONDITION_CAP, RankReport, State, check_symbols, expr_grid, numerical_rank,
    validate_names
)

logger = logging.getLogger(__name__)


# Relative singular value threshold for rank decisions.
RANK_TOLERANCE = 1e-9


class AffineConstraint:
    """Constraint one-forms `mu` (m x n) and affine term `Z` (m).

    Every entry is a function of the coordinates (and parameters) only.
    """
    def __init__(self, coordinates, mu, Z=None, parameters=None, name=None):
        self.coordinates = tuple(coordinates)
        self.velocities = tuple(velocity_name(c) for c in self.coordinates)
        self.parameters = dict(parameters or {})
        self.name = name

        validate_names(self.coordinates, self.parameters)

        mu = [list(row) for row in mu]

        if not mu:
            raise ModelError('need at least one constraint', 'constraint.mu')

        self.mu = expr_grid(mu, (len(mu), self.n), 'constraint.mu')
        self.Z = expr_grid(
            list(Z if Z is not None else [0] * self.m), (self.m,),
            'constraint.Z'
        )

        self.bind()

    @classmethod
    def from_vector_field(cls, coordinates, mu, X, parameters=None,
                          name=None):
        """Build the constraint of the affine distribution X + ker S.

        Z = -S X, assembled symbolically.
        """
        bare = cls(coordinates, mu, parameters=parameters, name=name)
        X = expr_grid(list(X), (bare.n,), 'constraint.X')

        Z = []

        for row in bare.mu:
            total = Constant(0)

            for entry, component in zip(row, X):
                total = add(total, mul(entry, component))

            Z.append(fold(neg(total)))

        return cls(coordinates, bare.mu, Z, parameters, name)

    @property
    def n(self):
        return len(self.coordinates)

    @property
    def m(self):
        return len(self.mu)

    @property
    def model_rank(self):
        """Rank r = n - m of the model distribution."""
        return self.n - self.m

    def bind(self):
        allowed = set(self.coordinates) | set(self.parameters)

        def bound(expr, location):
            expr = fold(substitute(expr, self.parameters))
            check_symbols(expr, allowed, location, self.velocities)

            return expr

        n, m = self.n, self.m

        mu = [
            [bound(self.mu[b][i], 'constraint.mu[{}][{}]'.format(b, i))
             for i in range(n)]
            for b in range(m)
        ]
        Z = [
            bound(self.Z[b], 'constraint.Z[{}]'.format(b)) for b in range(m)
        ]

        exprs = [entry for row in mu for entry in row]
        exprs += Z
        exprs += [
            diff(mu[b][i], q)
            for b in range(m) for i in range(n) for q in self.coordinates
        ]
        exprs += [diff(Z[b], q) for b in range(m) for q in self.coordinates]

        self.bound_mu = mu
        self.bound_Z = Z
        self._position = make_callable(exprs, self.coordinates)
        self._gradients = None

    def point(self, q):
        return ConstraintPoint(self, q)

    def phi_gradients(self, state):
        """Partial derivatives of phi in q and in qdot, each m x n.

        Both come from the symbolic derivatives of `phi_expressions`,
        compiled on first use.
        """
        names = self.coordinates + self.velocities

        if self._gradients is None:
            self._gradients = make_callable(
                [diff(expr, name)
                 for expr in self.phi_expressions() for name in names],
                names
            )

        values = np.array(
            self._gradients(state.q.tolist() + state.qdot.tolist())
        ).reshape(self.m, len(names))

        return values[:, :self.n], values[:, self.n:]

    def phi_expressions(self):
        """phi^b as expressions in coordinates and velocities."""
        result = []

        for row, affine in zip(self.bound_mu, self.bound_Z):
            total = affine

            for entry, velocity in zip(row, self.velocities):
                total = add(total, mul(entry, Symbol(velocity)))

            result.append(total)

        return result


class ConstraintPoint:
    """S, Z and their coordinate derivatives at one point."""
    def __init__(self, con, q):
        q = np.array(q, dtype=float).reshape(-1)

        if q.size != con.n:
            raise ValueError(
                'q has {} components, constraint has {}'.format(q.size, con.n)
            )

        n, m = con.n, con.m
        values = np.array(con._position(q.tolist()))

        self.q = q
        self.S = values[:m * n].reshape(m, n)
        self.Z = values[m * n:m * n + m]

        offset = m * n + m

        # dS[b, i, j] = d mu^b_i / d q^j, dZ[b, j] = d Z_b / d q^j
        self.dS = values[offset:offset + m * n * n].reshape(m, n, n)
        self.dZ = values[offset + m * n * n:].reshape(m, n)

    def phi(self, qdot):
        return self.S.dot(qdot) + self.Z

    def rate(self, qdot, acceleration):
        """Time derivative of phi along a curve with this velocity and
        acceleration."""
        return self.dS.dot(qdot).dot(qdot) + self.dZ.dot(qdot) \
            + self.S.dot(acceleration)


def check_pair(model, con):
    """Load-time compatibility of a model and a constraint."""
    if tuple(model.coordinates) != tuple(con.coordinates):
        raise ModelError(
            'constraint coordinates {} differ from model coordinates {}'
            .format(list(con.coordinates), list(model.coordinates)),
            'constraint'
        )

    if con.m != model.m:
        raise ModelError(
            'number of constraints ({}) must equal number of inputs ({})'
            .format(con.m, model.m), 'constraint.mu'
        )


def phi(con, state):
    return con.point(state.q).phi(state.qdot)


def on_distribution(con, state, tolerance=1e-9):
    residual = np.max(np.abs(phi(con, state)))

    return bool(
        residual <= tolerance * (1 + np.linalg.norm(state.qdot))
    )


def rank_check(con, q, tolerance=RANK_TOLERANCE):
    """Whether S(q) has full row rank m, as a report."""
    S = con.point(q).S
    singular_values = scipy.linalg.svdvals(S, check_finite=False)

    return RankReport(
        np.array(q, dtype=float), singular_values,
        numerical_rank(singular_values, tolerance), con.m
    )


class TransversalityReport:
    def __init__(self, q, matrix, condition, det, reason=None):
        self.q = q
        self.matrix = matrix
        self.condition = condition
        self.det = det
        self.reason = reason

    @property
    def ok(self):
        return self.reason is None

    def as_dict(self):
        return {
            'ok': self.ok,
            'condition': self.condition,
            'det': self.det,
            'matrix': self.matrix.tolist() if self.matrix is not None
            else None,
            'reason': self.reason
        }


def condition_number(matrix):
    singular_values = scipy.linalg.svdvals(matrix, check_finite=False)

    if not singular_values[-1] > 0:
        return float('inf')

    return float(singular_values[0] / singular_values[-1])


def pairing_matrix(con, model, q, point=None, con_point=None):
    """Matrix with entry (b, a) = mu^b(Y^a)."""
    point = point or model.point(q)
    con_point = con_point or con.point(q)

    return con_point.S.dot(point.input_fields())


def factorize(matrix):
    """LU factor of a square matrix and its 1-norm condition estimate."""
    if matrix.shape == (1, 1):
        value = matrix[0, 0]
        condition = 1.0 if value != 0 and math.isfinite(value) else math.inf

        return (matrix, np.zeros(1, dtype=np.int32)), condition

    lu, piv, info = dgetrf(matrix)

    if info != 0:
        return (lu, piv), float('inf')

    rcond, info = dgecon(lu, np.max(np.sum(np.abs(matrix), axis=0)))

    return (lu, piv), 1.0 / rcond if rcond > 0 else float('inf')


def lu_solve(factor, rhs):
    lu, piv = factor
    solution, info = dgetrs(lu, piv, rhs)

    return solution


def lu_det(factor):
    """Determinant from an LU factor: the product of the pivots, signed by
    the row swaps."""
    lu, piv = factor
    swaps = np.count_nonzero(piv != np.arange(piv.size))

    return float((-1) ** swaps * np.prod(np.diag(lu)))


def assess(q, matrix, label, condition=None):
    """Report on a control matrix; `condition` skips the SVD when the caller
    already has an estimate."""
    if condition is None:
        condition = condition_number(matrix)

    det = float(np.linalg.det(matrix))
    reason = None

    if condition > CONDITION_CAP:
        reason = '{} is singular or ill-conditioned ' \
            '(condition estimate {:.3g})'.format(label, condition)

    return TransversalityReport(q, matrix, condition, det, reason)


def transversality_check(con, model, q):
    """Whether the affine distribution and the input distribution are
    transversal at `q`, decided on the m x m matrix mu^b(Y^a)."""
    q = np.array(q, dtype=float)
    check_pair(model, con)

    ranks = rank_check(con, q)

    if not ranks.ok:
        return TransversalityReport(
            q, None, float('inf'), 0.0,
            'constraint rank {} < {}'.format(ranks.rank, ranks.expected)
        )

    return assess(q, pairing_matrix(con, model, q), 'P')


def model_distribution_basis(con, q):
    """Orthonormal basis (columns) of the kernel of S(q)."""
    S = con.point(q).S

    return scipy.linalg.null_space(S, rcond=RANK_TOLERANCE)


def distribution_transversality_check(con, model, q):
    """Brute-force transversality of ker S and the input distribution.

    The columns of a kernel basis and the input vector fields must together
    span the tangent space.
    """
    q = np.array(q, dtype=float)
    check_pair(model, con)

    basis = model_distribution_basis(con, q)
    fields = model.point(q).input_fields()
    matrix = np.hstack([basis, fields])

    if matrix.shape[0] != matrix.shape[1]:
        return TransversalityReport(
            q, matrix, float('inf'), 0.0,
            'dimensions are not complementary ({} + {} != {})'.format(
                basis.shape[1], fields.shape[1], con.n
            )
        )

    return assess(q, matrix, '[ker S | Y]')


def project_onto_A(con, model, state):
    """Smallest kinetic-energy correction of the velocity onto phi = 0.

    qdot' = qdot - G^-1 S^T (S G^-1 S^T)^-1 phi(q, qdot)
    """
    check_pair(model, con)
    model.check_state(state)

    ranks = rank_check(con, state.q)

    if not ranks.ok:
        raise RankDefect(ranks)

    point = model.point(state.q)
    con_point = con.point(state.q)

    W = point.sharp(con_point.S.T)
    M = con_point.S.dot(W)
    multipliers = scipy.linalg.solve(
        M, con_point.phi(state.qdot), assume_a='pos', check_finite=False
    )

    correction = W.dot(multipliers)

    logger.debug('projection changed qdot by {}'.format(
        (-correction).tolist()
    ))

    return State(state.q, state.qdot - correction)
