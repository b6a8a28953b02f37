import math
import numpy as np
import pytest

from vaffine.constraint import (
    AffineConstraint, check_pair, distribution_transversality_check,
    factorize, lu_det, lu_solve, model_distribution_basis, on_distribution,
    phi, project_onto_A, rank_check, transversality_check
)
from vaffine.errors import ModelError, RankDefect
from vaffine.geometry import MechanicalModel, State, metric_at
from vaffine.models import (
    build_boat, build_degenerate_fixture, build_linear_fixture
)


def test_phi_boat():
    model, con = build_boat('0.3', '0.1*x', 1, 1)

    # theta = 0: phi = -yd + C2
    state = State([2, 1, 0], [0.7, 0.2, -1])

    assert phi(con, state)[0] == pytest.approx(0)

    state = State([0.5, -1, 0.8], [1, 2, 3])
    theta = 0.8
    expected = math.sin(theta) * 1 - math.cos(theta) * 2 \
        + math.cos(theta) * 0.05 - math.sin(theta) * 0.3

    assert phi(con, state)[0] == pytest.approx(expected, abs=1e-12)


def test_phi_linear_at_rest():
    model, con = build_linear_fixture()

    assert not np.any(phi(con, State([1, 2, 3], [0, 0, 0])))


def test_rank_check():
    model, con = build_boat()

    for theta in np.linspace(-4, 4, 17):
        report = rank_check(con, [0, 0, theta])

        assert report.ok
        assert report.rank == 1

    con = AffineConstraint(('x', 'y', 'z'), [['0', '0', '0']])
    report = rank_check(con, [1, 2, 3])

    assert not report.ok
    assert report.rank == 0

    con = AffineConstraint(
        ('x', 'y', 'z'), [['2*x', '2', '0'], ['x', '1', '0']]
    )
    report = rank_check(con, [1, 2, 3])

    assert not report.ok
    assert report.rank == 1
    assert report.as_dict()['expected'] == 2


def test_rank_check_scale_invariant(rng):
    for i in range(50):
        rows = rng.uniform(-1, 1, (2, 3))

        if i % 2:
            rows[1] = 3 * rows[0] + 1e-12 * rows[1]

        small = AffineConstraint(('x', 'y', 'z'), rows.tolist())
        large = AffineConstraint(('x', 'y', 'z'), (1e3 * rows).tolist())

        assert rank_check(small, [0, 0, 0]).ok == \
            rank_check(large, [0, 0, 0]).ok


def test_transversality_boat():
    for m in (0.5, 1, 2):
        model, con = build_boat('sin(y)', 'cos(x)', m, 1)
        report = transversality_check(con, model, [0.3, 0.1, 1.2])

        assert report.ok
        assert report.matrix[0, 0] == pytest.approx(1 / m)
        assert report.condition == 1


def test_transversality_degenerate():
    model, con = build_degenerate_fixture()
    report = transversality_check(con, model, [0, 0])

    assert not report.ok
    assert report.matrix[0, 0] == 0
    assert report.det == 0
    assert 'singular' in report.reason

    assert not distribution_transversality_check(con, model, [0, 0]).ok


def test_transversality_rank_defect():
    model = MechanicalModel(
        ('x', 'y'), [[1, 0], [0, 1]], input_coframe=[['1', '0']]
    )
    con = AffineConstraint(('x', 'y'), [['x', '0']])

    report = transversality_check(con, model, [0, 0])

    assert not report.ok
    assert 'rank' in report.reason


def random_model(rng, n, m, mix=False):
    A = rng.uniform(-1, 1, (n, n))
    G = A.dot(A.T) + 0.5 * np.eye(n)
    G = 0.5 * (G + G.T)
    coframe = rng.uniform(-1, 1, (m, n))
    mu = rng.uniform(-1, 1, (m, n))

    if mix:
        # Push one input into ker S: f = G k with S k = 0.
        kernel = np.linalg.svd(mu)[2][m:].T
        coframe[0] = G.dot(kernel.dot(rng.uniform(-1, 1, n - m)))

    names = ['q{}'.format(i) for i in range(n)]

    model = MechanicalModel(
        names, G.tolist(), input_coframe=coframe.tolist()
    )
    con = AffineConstraint(names, mu.tolist(), Z=rng.uniform(-1, 1, m))

    return model, con, G, coframe, mu


def test_transversality_against_determinant(rng):
    for i in range(50):
        model, con, G, coframe, mu = random_model(rng, 3, 1)
        P = mu.dot(np.linalg.solve(G, coframe.T))
        report = transversality_check(con, model, [0, 0, 0])

        assert report.ok
        assert report.det == pytest.approx(np.linalg.det(P))


def test_transversality_oracle_agreement(rng):
    disagreements = 0
    violations = 0

    for i in range(200):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, min(2, n - 1) + 1))

        model, con, G, coframe, mu = random_model(rng, n, m, mix=i % 3 == 0)
        q = np.zeros(n)

        fast = transversality_check(con, model, q)
        brute = distribution_transversality_check(con, model, q)

        disagreements += fast.ok != brute.ok
        violations += not fast.ok

    assert disagreements == 0
    assert violations > 0


def test_model_distribution_basis():
    model, con = build_boat()
    theta = 0.6
    basis = model_distribution_basis(con, [0, 0, theta])

    assert basis.shape == (3, 2)
    assert np.allclose(
        np.array([math.sin(theta), -math.cos(theta), 0]).dot(basis), 0
    )
    assert np.allclose(basis.T.dot(basis), np.eye(2))


def test_project_onto_A():
    model, con = build_boat(0, 0.5, 1, 1)
    state = project_onto_A(con, model, State([0, 0, 0], [1, 0, 0]))

    assert np.allclose(state.qdot, [1, 0.5, 0], rtol=0, atol=1e-15)


def test_project_onto_A_properties(boat, states, rng):
    model, con = boat

    for state in states(rng, 3, 50):
        projected = project_onto_A(con, model, state)
        residual = np.max(np.abs(phi(con, projected)))

        assert residual <= 1e-12 * (1 + np.linalg.norm(state.qdot))
        assert on_distribution(con, projected)
        assert np.array_equal(projected.q, state.q)

        again = project_onto_A(con, model, projected)

        assert np.allclose(again.qdot, projected.qdot, rtol=0, atol=1e-12)


def test_project_is_metric_orthogonal(rng):
    model, con, G, coframe, mu = random_model(rng, 4, 2)
    state = State(np.zeros(4), rng.uniform(-1, 1, 4))
    projected = project_onto_A(con, model, state)

    correction = state.qdot - projected.qdot
    basis = model_distribution_basis(con, state.q)
    G = metric_at(model, state.q)

    # The correction is G-orthogonal to the model distribution.
    assert np.allclose(basis.T.dot(G.dot(correction)), 0, atol=1e-12)


def test_project_rank_defect():
    model = MechanicalModel(
        ('x', 'y'), [[1, 0], [0, 1]], input_coframe=[['1', '0']]
    )
    con = AffineConstraint(('x', 'y'), [['x', '0']])

    with pytest.raises(RankDefect) as info:
        project_onto_A(con, model, State([0, 0], [1, 1]))

    assert info.value.exit_code == 1


def test_from_vector_field():
    con = AffineConstraint.from_vector_field(
        ('x', 'y', 'theta'), [['sin(theta)', '-cos(theta)', '0']],
        ['0.3', '0.1*x', '0']
    )
    model, boat = build_boat('0.3', '0.1*x')

    for q in ([0, 0, 0], [1, -2, 0.7], [0.3, 0.3, -2]):
        assert np.allclose(con.point(q).Z, boat.point(q).Z, atol=1e-14)


def test_velocity_free():
    with pytest.raises(ModelError):
        AffineConstraint(('x', 'y'), [['xd', '0']])

    with pytest.raises(ModelError):
        AffineConstraint(('x', 'y'), [['1', '0']], Z=['yd'])

    with pytest.raises(ModelError):
        AffineConstraint(('x', 'y'), [['1', '0']], Z=['1', '2'])


def test_check_pair():
    model, con = build_boat()
    other = AffineConstraint(('x', 'y', 'psi'), [['1', '0', '0']])

    with pytest.raises(ModelError):
        check_pair(model, other)

    two = AffineConstraint(('x', 'y', 'theta'), [[1, 0, 0], [0, 1, 0]])

    with pytest.raises(ModelError) as info:
        check_pair(model, two)

    assert 'number of inputs' in info.value.message


def test_rate_matches_finite_difference(boat, states, rng):
    model, con = boat
    h = 1e-6

    for state in states(rng, 3, 20):
        acceleration = rng.uniform(-1, 1, 3)

        def value(t):
            q = state.q + t * state.qdot + 0.5 * t * t * acceleration
            qdot = state.qdot + t * acceleration

            return con.point(q).phi(qdot)

        approx = (value(h) - value(-h)) / (2 * h)
        exact = con.point(state.q).rate(state.qdot, acceleration)

        assert np.allclose(exact, approx, rtol=1e-6, atol=1e-6)


def test_factorize():
    matrix = np.array([[0.0, 2.0], [1.0, 1.0]])
    factor, condition = factorize(matrix)

    assert lu_det(factor) == pytest.approx(-2)
    assert lu_solve(factor, np.array([2.0, 3.0])) == pytest.approx([2, 1])
    assert condition == pytest.approx(
        np.linalg.cond(matrix, 1), rel=1e-6
    )

    factor, condition = factorize(np.array([[-4.0]]))

    assert condition == 1
    assert lu_det(factor) == -4
    assert lu_solve(factor, np.array([2.0])) == pytest.approx([-0.5])

    for singular in ([[0.0]], [[math.nan]], [[1.0, 2.0], [2.0, 4.0]]):
        assert factorize(np.array(singular))[1] == math.inf


def test_phi_gradients(boat, states, rng):
    model, con = boat
    h = 1e-6

    for state in states(rng, 3, 10):
        dq, dqdot = con.phi_gradients(state)

        assert np.allclose(dqdot, con.point(state.q).S, rtol=0, atol=1e-12)

        for j in range(3):
            step = np.eye(3)[j] * h
            approx = (
                phi(con, State(state.q + step, state.qdot))
                - phi(con, State(state.q - step, state.qdot))
            ) / (2 * h)

            assert np.allclose(dq[:, j], approx, rtol=1e-6, atol=1e-6)
