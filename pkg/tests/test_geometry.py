import math
import numpy as np
import pytest

from vaffine.errors import DomainError, MetricError, ModelError
from vaffine.expr import evaluate, finite_difference
from vaffine.geometry import (
    MechanicalModel, State, christoffel_at, controlled_acceleration,
    drift_acceleration, external_force_field, flat, grad_potential,
    input_rank_check, input_vector_fields, kinetic_energy, lagrangian,
    metric_at, potential_energy, sharp
)
from vaffine.models import build_boat, build_polar_fixture


def euclidean(potential=0, **kwargs):
    return MechanicalModel(
        ('x', 'y'), [[1, 0], [0, 1]], potential=potential, **kwargs
    )


def warped():
    """Non-constant, non-diagonal metric used for the oracles."""
    return MechanicalModel(
        ('x', 'y'),
        [['2 + sin(x)*y', '0.3*cos(y)'], ['0.3*cos(y)', '1 + x^2']],
        potential='x*y^2',
        external_force=['-0.1*xd', 'x*yd'],
        input_coframe=[['1', 'y']]
    )


def test_metric_at():
    model, con = build_boat()

    assert np.array_equal(metric_at(model, [0.3, -1, 2]), np.eye(3))
    assert np.array_equal(metric_at(euclidean(), [1, 2]), np.eye(2))

    model = MechanicalModel(('x', 'y'), [['1+x^2', '0'], ['0', '1']])

    assert np.array_equal(metric_at(model, [2, 0]), [[5, 0], [0, 1]])


def test_metric_not_positive_definite():
    model = MechanicalModel(('x', 'y'), [['x', '0'], ['0', '1']])

    with pytest.raises(MetricError) as info:
        metric_at(model, [-1, 0])

    assert info.value.exit_code == 1
    assert info.value.eigenvalues[0] < 0
    assert any('eigenvalues' in line for line in info.value.details())


def test_metric_ill_conditioned():
    model = MechanicalModel(('x', 'y'), [['x', '0'], ['0', '1']])

    with pytest.raises(MetricError):
        metric_at(model, [1e-14, 0])


def test_metric_must_be_symmetric():
    with pytest.raises(ModelError) as info:
        MechanicalModel(('x', 'y'), [['1', 'x'], ['y', '1']])

    assert info.value.location == 'metric[1][0]'


def test_metric_symmetry_after_folding():
    model = MechanicalModel(('x', 'y'), [['2', '0*y + x/10'], ['x/10', '2']])

    assert metric_at(model, [1, 0])[0, 1] == 0.1


def test_metric_keeps_domain_of_vanishing_terms():
    model = MechanicalModel(('x', 'y'), [['1', '0'], ['0', '1 + 0*log(x)']])

    assert np.array_equal(metric_at(model, [1, 0]), np.eye(2))

    with pytest.raises(DomainError) as info:
        metric_at(model, [-1, 0])

    assert info.value.subexpression == 'log(x)'


def test_constant_metric_is_shared():
    model, con = build_boat(m=2)
    first, second = model.point([0, 0, 0]), model.point([1, 2, 3])

    assert first.G is second.G
    assert not first.G.flags.writeable
    assert np.array_equal(first.G, np.diag([2.0, 2.0, 1.0]))
    assert first.condition == pytest.approx(2)

    model = MechanicalModel(('x', 'y'), [['1+x^2', '0'], ['0', '1']])

    assert model.point([0, 0]).G is not model.point([0, 0]).G
    assert model.point([3, 0]).condition == pytest.approx(10)


def test_velocity_free():
    with pytest.raises(ModelError) as info:
        MechanicalModel(('x', 'y'), [[1, 0], [0, 1]],
                        input_coframe=[['xd', '1']])

    assert 'velocities' in info.value.message

    with pytest.raises(ModelError):
        MechanicalModel(('x', 'y'), [['1 + yd^2', 0], [0, 1]])


def test_validation():
    with pytest.raises(ModelError):
        MechanicalModel(('x', 'y'), [[1, 0], [0, 1]],
                        input_coframe=[[1, 0], [0, 1]])

    with pytest.raises(ModelError):
        MechanicalModel(('x', 'x'), [[1, 0], [0, 1]])

    with pytest.raises(ModelError):
        MechanicalModel(('x', 'y'), [[1, 0], [0, 1]], potential='z')

    with pytest.raises(ModelError) as info:
        MechanicalModel(('x', 'y'), [[1, 0]])

    assert info.value.location == 'metric'

    with pytest.raises(ModelError) as info:
        MechanicalModel(('x', 'y'), [[1, 0], [0, 'sin(']])

    assert info.value.location == 'metric[1][1]'
    assert 'byte 4' in info.value.message


def test_parameters():
    model = MechanicalModel(
        ('x',), [['m']], potential='k*x^2/2', parameters={'m': 2, 'k': 3}
    )

    assert metric_at(model, [0])[0, 0] == 2
    assert potential_energy(model, [2]) == 6

    heavier = model.with_parameters(m=5)

    assert metric_at(heavier, [0])[0, 0] == 5
    assert metric_at(model, [0])[0, 0] == 2

    with pytest.raises(ModelError):
        model.with_parameters(c=1)


def test_christoffel_constant_metric():
    model, con = build_boat(m=2, I=3)

    assert not np.any(christoffel_at(model, [0.1, 0.2, 0.3]))


def test_christoffel_polar():
    model, con = build_polar_fixture()
    gamma = christoffel_at(model, [2.0, 0.7])

    assert gamma[0, 1, 1] == pytest.approx(-2)
    assert gamma[1, 0, 1] == pytest.approx(0.5)
    assert gamma[1, 1, 0] == pytest.approx(0.5)

    gamma[0, 1, 1] = gamma[1, 0, 1] = gamma[1, 1, 0] = 0

    assert np.allclose(gamma, 0, atol=1e-15)


def christoffel_oracle(model, q, h=1e-6):
    """Christoffel symbols from finite differences of the metric."""
    n = model.n
    dG = np.empty((n, n, n))

    for k in range(n):
        step = np.zeros(n)
        step[k] = h

        dG[k] = (metric_at(model, q + step) - metric_at(model, q - step)) \
            / (2 * h)

    ginv = np.linalg.inv(metric_at(model, q))
    gamma = np.empty((n, n, n))

    for k in range(n):
        for i in range(n):
            for j in range(n):
                gamma[k, i, j] = 0.5 * sum(
                    ginv[k, p] * (dG[i, j, p] + dG[j, i, p] - dG[p, i, j])
                    for p in range(n)
                )

    return gamma


def test_christoffel_oracle(rng):
    model = warped()

    for i in range(100):
        q = rng.uniform(-1, 1, 2)
        gamma = christoffel_at(model, q)

        assert np.allclose(
            gamma, christoffel_oracle(model, q), rtol=1e-6, atol=1e-6
        )
        assert np.array_equal(gamma, gamma.transpose(0, 2, 1))


def test_sharp_flat(rng):
    model = warped()

    for i in range(100):
        q = rng.uniform(-1, 1, 2)
        omega = rng.uniform(-2, 2, 2)

        assert np.max(np.abs(flat(model, q, sharp(model, q, omega)) - omega)) \
            <= 1e-12
        assert np.max(np.abs(sharp(model, q, flat(model, q, omega)) - omega)) \
            <= 1e-12


def test_sharp_boat():
    model, con = build_boat(m=2, I=3)
    theta = 0.4
    Y = input_vector_fields(model, [0, 0, theta])

    assert np.allclose(
        Y[:, 0], [math.sin(theta) / 2, -math.cos(theta) / 2, 1 / 3],
        rtol=0, atol=1e-15
    )


def test_grad_potential(rng):
    assert not np.any(grad_potential(euclidean(), [1, 2]))
    assert np.array_equal(grad_potential(euclidean('x^2'), [3, 0]), [6, 0])

    model = warped()

    for i in range(20):
        q = rng.uniform(-1, 1, 2)
        grad = grad_potential(model, q)
        G = metric_at(model, q)
        env = {'x': q[0], 'y': q[1]}

        for k, name in enumerate(('x', 'y')):
            dV = finite_difference(model.potential, name, env)

            assert G.dot(grad)[k] == pytest.approx(dV, rel=1e-6, abs=1e-9)


def test_drift_flat():
    state = State([1, 2], [0.3, -0.4])

    assert not np.any(drift_acceleration(euclidean(), state))


def test_drift_boat_still_water(rng):
    model, con = build_boat(0, 0, 1, 1)

    for i in range(10):
        state = State(rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 3))

        assert not np.any(drift_acceleration(model, state))


def test_drift_boat_constant_current():
    model, con = build_boat(1, 0, 1, 1)
    state = State([0, 0, math.pi / 2], [0, 0, 1])

    assert np.allclose(
        drift_acceleration(model, state), [0, 1, 0], atol=1e-15
    )


def test_drift_against_lagrangian(rng):
    """G a = F - dV - lower(qdot, qdot) checked with the Euler-Lagrange
    equations computed by finite differences."""
    model = warped()
    h = 1e-5

    for i in range(10):
        q = rng.uniform(-1, 1, 2)
        qdot = rng.uniform(-1, 1, 2)
        state = State(q, qdot)
        a = drift_acceleration(model, state)

        # d/dt (G qdot) along the motion, minus dL/dq, equals F.
        def momentum(t):
            s = State(q + t * qdot + 0.5 * t * t * a, qdot + t * a)

            return metric_at(model, s.q).dot(s.qdot)

        dp = (momentum(h) - momentum(-h)) / (2 * h)

        dL = np.empty(2)
        for k in range(2):
            step = np.zeros(2)
            step[k] = h
            dL[k] = (
                lagrangian(model, State(q + step, qdot))
                - lagrangian(model, State(q - step, qdot))
            ) / (2 * h)

        force = [-0.1 * qdot[0], q[0] * qdot[1]]

        assert np.allclose(dp - dL, force, atol=1e-6)


def test_energies():
    model = euclidean('x*y')
    state = State([2, 3], [1, 2])

    assert kinetic_energy(model, state) == 2.5
    assert potential_energy(model, state.q) == 6
    assert lagrangian(model, state) == -3.5


def test_external_force_field():
    model = warped()
    state = State([0.2, 0.5], [1, 2])
    G = metric_at(model, state.q)

    assert np.allclose(
        G.dot(external_force_field(model, state)), [-0.1, 0.4]
    )


def test_controlled_acceleration():
    model = warped()
    state = State([0.2, 0.5], [1, 2])
    Y = input_vector_fields(model, state.q)

    assert np.allclose(
        controlled_acceleration(model, state, [2.0]),
        drift_acceleration(model, state) + 2 * Y[:, 0]
    )


def test_input_rank():
    model = MechanicalModel(
        ('x', 'y', 'z'), np.eye(3).tolist(),
        input_coframe=[['1', 'x', '0'], ['2', '2*x', '0']]
    )

    assert input_rank_check(model, [1, 0, 0]).rank == 1
    assert not input_rank_check(model, [1, 0, 0]).ok
    assert input_rank_check(warped(), [0, 0]).ok


def test_state():
    with pytest.raises(ValueError):
        State([1, 2], [1])

    state = State([1, 2], [3, 4])

    assert State.from_vector(state.as_vector()) == state
    assert not State([1, float('nan')], [0, 0]).is_finite()

    with pytest.raises(ValueError):
        drift_acceleration(euclidean(), State([1, 2, 3], [0, 0, 0]))

    assert evaluate(warped().metric[1][1], {'x': 2}) == 5
