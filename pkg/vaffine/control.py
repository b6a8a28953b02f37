"""Feedback law making an affine constraint invariant.

At every state the control tau solves P tau = b where

    P[b, a] = mu^b(Y^a)
    b[b]    = -(d mu^b_i/d q^j qdot^i qdot^j + d Z_b/d q^j qdot^j
                + mu^b_i a^i)

and `a` is the drift acceleration. P only depends on the configuration. The
law is defined wherever P is invertible, on or off the constraint; off the
constraint it keeps phi at its initial value.
"""

import logging

import numpy as np
import scipy.linalg

from .constraint import assess, check_pair, factorize, lu_det, lu_solve
from .errors import TransversalityViolation
from .geometry import CONDITION_CAP, controlled_acceleration

logger = logging.getLogger(__name__)


class ControlSolve:
    """Snapshot of one control solve."""
    def __init__(self, state, P, b, tau, condition, factor, drift, fields,
                 point=None, con_point=None):
        self.state = state
        self.P = P
        self.b = b
        self.tau = tau
        self.condition = condition
        self.factor = factor
        self.drift = drift
        self.fields = fields
        self.point = point
        self.con_point = con_point
        self.tau_lstsq = None

    @property
    def det(self):
        return lu_det(self.factor)

    @property
    def residual(self):
        """Max-norm of P tau - b."""
        return float(np.max(np.abs(self.P.dot(self.tau) - self.b)))

    @property
    def acceleration(self):
        """Closed-loop acceleration: drift plus tau_a Y^a."""
        return self.drift + self.fields.dot(self.tau)

    def as_dict(self):
        record = {
            'q': self.state.q.tolist(),
            'qdot': self.state.qdot.tolist(),
            'P': self.P.tolist(),
            'b': self.b.tolist(),
            'tau': self.tau.tolist(),
            'condition': self.condition,
            'det': self.det,
            'residual': self.residual
        }

        if self.tau_lstsq is not None:
            record['tau_lstsq'] = self.tau_lstsq.tolist()

        return record


def violation(report):
    return TransversalityViolation(
        'transversality violated: {}'.format(report.reason), report.q,
        report.matrix, report.condition, report.det
    )


def solve_control(model, con, state, verify=False):
    """Assemble and solve P tau = b at `state`.

    With `verify`, the system is also solved by least squares so the two
    solutions can be compared.
    """
    check_pair(model, con)
    model.check_state(state)

    solve = control_solve(model, con, state)

    if verify:
        solve.tau_lstsq = scipy.linalg.lstsq(
            solve.P, solve.b, check_finite=False
        )[0]

        logger.debug('lu and least-squares solutions differ by {:.3g}'.format(
            float(np.max(np.abs(solve.tau - solve.tau_lstsq)))
        ))

    return solve


def control_solve(model, con, state):
    """`solve_control` for a pair and a state that are already validated."""
    point = model.point(state.q)
    con_point = con.point(state.q)
    fields = point.input_fields()

    P = con_point.S.dot(fields)
    factor, condition = factorize(P)

    if condition > CONDITION_CAP:
        raise violation(assess(point.q, P, 'P', condition))

    drift = point.drift(state.qdot, model.external_force_at(state))
    b = -con_point.rate(state.qdot, drift)

    return ControlSolve(
        state, P, b, lu_solve(factor, b), condition, factor, drift, fields,
        point, con_point
    )


def p_matrix(model, con, q):
    """Matrix with entries mu^b(q)(Y^a); raises when not invertible."""
    check_pair(model, con)

    point = model.point(q)
    P = con.point(q).S.dot(point.input_fields())
    report = assess(point.q, P, 'P')

    if not report.ok:
        raise violation(report)

    return P


def b_vector(model, con, state):
    """Right-hand side -d phi(G) of the control equation."""
    check_pair(model, con)
    model.check_state(state)

    point = model.point(state.q)
    drift = point.drift(state.qdot, model.external_force_at(state))

    return -con.point(state.q).rate(state.qdot, drift)


def tau_star(model, con, state):
    return solve_control(model, con, state).tau


def closed_loop_acceleration(model, con, state):
    return solve_control(model, con, state).acceleration


def tangency_defect(model, con, state, u=None):
    """d phi applied to the controlled vector field with input `u`.

    Without `u` the feedback law is used, and the result vanishes up to
    rounding.
    """
    if u is None:
        acceleration = closed_loop_acceleration(model, con, state)
    else:
        acceleration = controlled_acceleration(model, state, u)

    dq, dqdot = con.phi_gradients(state)

    return dq.dot(state.qdot) + dqdot.dot(acceleration)
