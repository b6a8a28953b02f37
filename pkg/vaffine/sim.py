"""Fixed-step integration of the closed-loop system.

The state is integrated as the first-order system (q, qdot)' = (qdot, a),
with classical fourth-order Runge-Kutta. The feedback is re-solved at every
stage evaluation. Samples record the state, the control, phi and the energy.
"""

import logging
import math

from collections import namedtuple

import numpy as np

from .constraint import check_pair
from .control import control_solve
from .errors import FatalError, IntegrationAbort
from .geometry import (
    State, controlled_acceleration, kinetic_energy, potential_energy
)
from .utils import wrap_angle

logger = logging.getLogger(__name__)


class Trajectory:
    """Time-stamped samples of a closed-loop run."""
    def __init__(self, coordinates, times, q, qdot, controls, phis, kinetic,
                 energy, steps):
        self.coordinates = tuple(coordinates)
        self.times = np.asarray(times)
        self.q = np.asarray(q)
        self.qdot = np.asarray(qdot)
        self.controls = np.asarray(controls)
        self.phis = np.asarray(phis)
        self.kinetic = np.asarray(kinetic)
        self.energy = np.asarray(energy)
        self.steps = np.asarray(steps)

    def __len__(self):
        return self.times.size

    @property
    def states(self):
        return [State(q, qdot) for q, qdot in zip(self.q, self.qdot)]

    @property
    def drift_report(self):
        """Per constraint, max over samples of |phi(t) - phi(0)|."""
        return np.max(np.abs(self.phis - self.phis[0]), axis=0)

    @property
    def max_phi(self):
        """Per constraint, max over samples of |phi(t)|."""
        return np.max(np.abs(self.phis), axis=0)

    @property
    def final_state(self):
        return State(self.q[-1], self.qdot[-1])

    def wrapped(self, indices):
        """Copy of `q` with the listed columns wrapped to (-pi, pi]."""
        q = np.array(self.q)

        for index in indices:
            q[:, index] = [wrap_angle(value) for value in q[:, index]]

        return q


# One field evaluation; `point` and `con_point` are the evaluations at the
# state's configuration when the field computed them, else None.
Evaluation = namedtuple(
    'Evaluation', ['acceleration', 'u', 'point', 'con_point']
)


def vector_field(model, con, feedback='virtual'):
    """Second-order field as a function `state -> Evaluation`.

    The field does not validate the pair or the state; `integrate` and
    `rk4_step` do that once.
    """
    if feedback == 'virtual':
        def field(state):
            solve = control_solve(model, con, state)

            return Evaluation(
                solve.acceleration, solve.tau, solve.point, solve.con_point
            )

        return field

    if feedback == 'none':
        zero = np.zeros(model.m)

        def field(state):
            point = model.point(state.q)
            acceleration = point.drift(
                state.qdot, model.external_force_at(state)
            )

            return Evaluation(acceleration, zero, point, None)

        return field

    if callable(feedback):
        def field(state):
            u = np.asarray(feedback(state), dtype=float)
            point = model.point(state.q)

            return Evaluation(
                controlled_acceleration(model, state, u, point), u, point,
                None
            )

        return field

    raise ValueError('unknown feedback {!r}'.format(feedback))


def evaluate_stage(field, state, time, step):
    try:
        if not state.is_finite():
            raise ValueError('non-finite state')

        return field(state)
    except FatalError as err:
        raise IntegrationAbort(
            err.message, time, step, state=state, cause=err
        )
    except (ValueError, ArithmeticError) as err:
        raise IntegrationAbort(str(err), time, step, state=state)


def rk4_step(model, con, state, h, feedback='virtual', field=None,
             first=None, time=0.0, step=0):
    """One classical Runge-Kutta step of size `h`.

    `first` is an already computed field evaluation at `state`.
    """
    if not h > 0:
        raise ValueError('step size must be positive, got {}'.format(h))

    if field is None:
        check_pair(model, con)
        model.check_state(state)
        field = vector_field(model, con, feedback)

    def stage(q, qdot, offset):
        return evaluate_stage(field, State(q, qdot), time + offset, step)[0]

    q, v = state.q, state.qdot

    a1 = first[0] if first is not None else stage(q, v, 0.0)

    v2 = v + 0.5 * h * a1
    a2 = stage(q + 0.5 * h * v, v2, 0.5 * h)

    v3 = v + 0.5 * h * a2
    a3 = stage(q + 0.5 * h * v2, v3, 0.5 * h)

    v4 = v + h * a3
    a4 = stage(q + h * v3, v4, h)

    return State(
        q + h / 6.0 * (v + 2 * v2 + 2 * v3 + v4),
        v + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4)
    )


def step_count(t_end, h):
    return max(1, int(math.ceil(t_end / h - 1e-9)))


def integrate(model, con, state0, t_end, h, sample_every=1,
              feedback='virtual'):
    """Integrate from `state0` up to `t_end` with fixed steps `h`.

    Samples are taken every `sample_every` steps, plus the final one. The last
    step is shortened when `t_end` is not a multiple of `h`.
    """
    if not t_end > 0:
        raise ValueError('t_end must be positive, got {}'.format(t_end))

    if not h > 0:
        raise ValueError('step size must be positive, got {}'.format(h))

    if sample_every < 1:
        raise ValueError(
            'sample_every must be at least 1, got {}'.format(sample_every)
        )

    check_pair(model, con)
    model.check_state(state0)

    field = vector_field(model, con, feedback)
    steps = step_count(t_end, h)

    logger.debug('integrating {} steps of {} up to t = {}'.format(
        steps, h, t_end
    ))

    samples = []
    state = state0

    def record(state, time, step, evaluation):
        con_point = evaluation.con_point or con.point(state.q)
        kinetic = kinetic_energy(model, state, evaluation.point)

        samples.append((
            time, state.q, state.qdot, evaluation.u,
            con_point.phi(state.qdot),
            kinetic, kinetic + potential_energy(model, state.q), step
        ))

    time = 0.0

    try:
        for step in range(steps):
            first = evaluate_stage(field, state, time, step)

            if step % sample_every == 0:
                record(state, time, step, first)

            size = h
            if step == steps - 1:
                size = min(h, t_end - step * h)

            state = rk4_step(
                model, con, state, size, field=field, first=first,
                time=time, step=step
            )

            time = t_end if step == steps - 1 else (step + 1) * h

        last = evaluate_stage(field, state, time, steps)
    except IntegrationAbort as err:
        err.last_sample = len(samples) - 1
        raise

    record(state, time, steps, last)

    logger.debug('integration done, {} samples'.format(len(samples)))

    columns = list(zip(*samples))

    return Trajectory(
        model.coordinates, columns[0], columns[1], columns[2], columns[3],
        columns[4], columns[5], columns[6], columns[7]
    )


def endpoint_error(model, con, state0, t_end, h, reference):
    final = integrate(
        model, con, state0, t_end, h, sample_every=step_count(t_end, h)
    ).final_state

    return np.linalg.norm(final.as_vector() - reference.as_vector())


def convergence_ratio(model, con, state0, t_end, h):
    """Ratio of endpoint errors of runs at `h` and `h / 2`.

    The reference solution uses steps `h / 100`; fourth order gives a ratio
    near 16.
    """
    fine = h / 100
    reference = integrate(
        model, con, state0, t_end, fine,
        sample_every=step_count(t_end, fine)
    ).final_state

    coarse = endpoint_error(model, con, state0, t_end, h, reference)
    half = endpoint_error(model, con, state0, t_end, h / 2, reference)

    return coarse / half
