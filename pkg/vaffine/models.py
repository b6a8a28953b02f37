"""Bundled systems.

The main fixture is a boat carrying a payload in a position-dependent sea
current C = (C1, C2). The current forces W1, W2 are built by differentiating
the drift velocity fields symbolically, so the boat model needs nothing beyond
the expression module.

The currents in `FIXTURE_CURRENTS` are test fixtures chosen to exercise
constant, linear and trigonometric fields.
"""

import logging
import math

from .constraint import AffineConstraint, check_pair
from .errors import ModelError
from .expr import (
    Constant, Symbol, add, as_expr, diff, mul, parse, substitute,
    velocity_name
)
from .geometry import MechanicalModel

logger = logging.getLogger(__name__)


BOAT_COORDINATES = ('x', 'y', 'theta')

FIXTURE_CURRENTS = {
    'still': ('0', '0'),
    'shear': ('0.3', '0.1*x'),
    'swirl': ('sin(y)', 'cos(x)')
}

# Velocity the current imposes on the boat, per axis.
DRIFT_X = 'sin(theta)^2*C1 - sin(theta)*cos(theta)*C2'
DRIFT_Y = '-sin(theta)*cos(theta)*C1 + cos(theta)^2*C2'


def current_exprs(C1, C2):
    C1, C2 = as_expr(C1), as_expr(C2)

    for name, component in (('C1', C1), ('C2', C2)):
        extra = component.symbols - {'x', 'y'}

        if extra:
            raise ModelError(
                'current may only depend on x and y, found {}'.format(
                    ', '.join(sorted(extra))
                ), name
            )

    return C1, C2


def boat_drift_velocity(C1, C2):
    """Expressions for the x and y velocities the current imposes."""
    C1, C2 = current_exprs(C1, C2)
    bindings = {'C1': C1, 'C2': C2}

    return (
        substitute(parse(DRIFT_X), bindings),
        substitute(parse(DRIFT_Y), bindings)
    )


def differential(expr, coordinates):
    """d(expr) applied to the velocity: sum_j d expr / d q^j qdot^j."""
    total = Constant(0)

    for coordinate in coordinates:
        total = add(
            total,
            mul(diff(expr, coordinate), Symbol(velocity_name(coordinate)))
        )

    return total


def build_boat(C1=0, C2=0, m=1.0, I=1.0):  # noqa: E741
    """Boat in the current (C1, C2), with mass `m` and inertia `I`.

    Returns the mechanical model and the affine constraint
    sin(theta) xd - cos(theta) yd + cos(theta) C2 - sin(theta) C1 = 0.
    """
    if not m > 0 or not I > 0:
        raise ModelError(
            'mass and inertia must be positive (m={}, I={})'.format(m, I),
            'parameters'
        )

    C1, C2 = current_exprs(C1, C2)
    drift_x, drift_y = boat_drift_velocity(C1, C2)
    mass = Symbol('m')

    model = MechanicalModel(
        BOAT_COORDINATES,
        metric=[['m', 0, 0], [0, 'm', 0], [0, 0, 'I']],
        potential=0,
        external_force=[
            mul(mass, differential(drift_x, BOAT_COORDINATES)),
            mul(mass, differential(drift_y, BOAT_COORDINATES)),
            0
        ],
        input_coframe=[['sin(theta)', '-cos(theta)', 1]],
        parameters={'m': float(m), 'I': float(I)},
        name='boat'
    )

    con = AffineConstraint(
        BOAT_COORDINATES,
        mu=[['sin(theta)', '-cos(theta)', 0]],
        Z=[substitute(
            parse('cos(theta)*C2 - sin(theta)*C1'), {'C1': C1, 'C2': C2}
        )],
        parameters=model.parameters,
        name='boat'
    )

    check_pair(model, con)

    return model, con


def build_linear_fixture():
    """Knife edge: Euclidean metric, linear constraint (Z = 0), one input."""
    model = MechanicalModel(
        BOAT_COORDINATES,
        metric=[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        input_coframe=[['sin(theta)', '-cos(theta)', 1]],
        name='linear'
    )

    con = AffineConstraint(
        BOAT_COORDINATES, mu=[['sin(theta)', '-cos(theta)', 0]],
        name='linear'
    )

    check_pair(model, con)

    return model, con


def build_degenerate_fixture():
    """Plane with constraint dx and input dy: the input lies in ker S."""
    model = MechanicalModel(
        ('x', 'y'),
        metric=[[1, 0], [0, 1]],
        input_coframe=[[0, 1]],
        name='degenerate'
    )

    con = AffineConstraint(('x', 'y'), mu=[[1, 0]], name='degenerate')

    check_pair(model, con)

    return model, con


def build_polar_fixture(omega=0.5):
    """Free particle in polar coordinates spinning at the rate `omega`.

    Metric diag(1, r^2); constraint thetad = omega, actuated by a torque.
    """
    parameters = {'omega': float(omega)}

    model = MechanicalModel(
        ('r', 'theta'),
        metric=[[1, 0], [0, 'r^2']],
        input_coframe=[[0, 1]],
        parameters=parameters,
        name='polar'
    )

    con = AffineConstraint(
        ('r', 'theta'), mu=[[0, 1]], Z=['-omega'], parameters=parameters,
        name='polar'
    )

    check_pair(model, con)

    return model, con


def boat_feedback_law(state, m=1.0):
    """Closed form of the boat control: -m thetad (cos theta xd + sin
    theta yd)."""
    x, y, theta = state.q
    xd, yd, thetad = state.qdot

    return -m * thetad * (math.cos(theta) * xd + math.sin(theta) * yd)


FIXTURES = ('boat', 'linear', 'degenerate', 'polar')


def build_fixture(name, current='still', parameters=None):
    """Build a bundled fixture by name."""
    parameters = dict(parameters or {})

    logger.debug('building fixture {} (current {}, parameters {})'.format(
        name, current, parameters
    ))

    try:
        if name == 'boat':
            if current not in FIXTURE_CURRENTS:
                raise ModelError(
                    'unknown current `{}`, use one of {}'.format(
                        current, ', '.join(sorted(FIXTURE_CURRENTS))
                    ), 'current'
                )

            return build_boat(*FIXTURE_CURRENTS[current], **parameters)

        if name == 'polar':
            return build_polar_fixture(**parameters)

        if name == 'linear':
            return build_linear_fixture(**parameters)

        if name == 'degenerate':
            return build_degenerate_fixture(**parameters)
    except TypeError as err:
        raise ModelError(str(err), 'parameters')

    raise ModelError(
        'unknown fixture `{}`, use one of {}'.format(
            name, ', '.join(FIXTURES)
        ), 'fixture'
    )
