import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import graphs, thetas, unit
from gwalk.errors import SolverError
from gwalk.graph import build_graph, complete_graph, cycle_graph, matrices, path_graph
from gwalk.laplacian import (
    build_L,
    epon_unit_angles,
    is_singular_matrix,
    j_minus,
    j_plus,
    kernel_basis,
    sigma_per,
    singular_set,
    solve_L,
)
from gwalk.oracle import build_internal_evolution

THETA_STAR_4 = np.arccos(-1 / 3)


def test_j_at_special_points():
    assert (j_plus(1), j_minus(1)) == (1, 0)
    assert (j_plus(-1), j_minus(-1)) == (-1, 0)
    assert j_plus(1j) == pytest.approx(0) and j_minus(1j) == pytest.approx(1j)
    with pytest.raises(ValueError):
        j_plus(0)
    with pytest.raises(ValueError):
        j_minus(0)


@given(thetas)
def test_j_on_unit_circle(theta):
    z = unit(theta)
    assert j_plus(z) == pytest.approx(np.cos(theta), abs=1e-14)
    assert j_minus(z) == pytest.approx(1j * np.sin(theta), abs=1e-14)
    assert j_minus(1 / z) == pytest.approx(-j_minus(z), abs=1e-14)


@given(graphs())
def test_L_at_plus_minus_one(g):
    m = matrices(g)
    np.testing.assert_allclose(build_L(g, 1).matrix, m.adjacency - m.degree)
    np.testing.assert_allclose(build_L(g, -1).matrix, m.adjacency + m.degree)


@given(thetas)
def test_p2_laplacian(theta):
    z = unit(theta)
    L = build_L(path_graph(2, 2), z).matrix
    np.testing.assert_allclose(L, [[-1 / z, 1], [1, -1 / z]], atol=1e-14)


@given(graphs(), thetas)
def test_L_symmetric_and_conjugation(g, theta):
    z = unit(theta)
    L = build_L(g, z).matrix
    np.testing.assert_allclose(L, L.T)
    np.testing.assert_allclose(build_L(g, np.conj(z)).matrix, np.conj(L), atol=1e-14)


@given(graphs(), st.complex_numbers(min_magnitude=0.2, max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_determinant_identity(g, z):
    # det((z^2+1) I - 2 z T - 2 Pi D~^{-1}) = (-2z)^N det(D~)^{-1} det(L_{1/z})
    m = matrices(g)
    dt = g.tailed_degree
    T = m.adjacency / np.sqrt(np.outer(dt, dt))
    n = g.n_vertices
    lhs = np.linalg.det((z * z + 1) * np.eye(n) - 2 * z * T - 2 * m.boundary_projection / dt)
    rhs = (-2 * z) ** n / np.prod(dt) * np.linalg.det(build_L(g, 1 / z).matrix)
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-10)


@pytest.mark.parametrize("N, ell", [(4, 1), (4, 2), (5, 1), (5, 3), (6, 2)])
def test_complete_graph_singular_set(N, ell):
    ts = np.arccos(-1 / (N - 1))
    ss = singular_set(complete_graph(N, ell))
    np.testing.assert_allclose(ss.angles, [-ts, 0, ts, np.pi], atol=1e-10)
    assert unit(ts) in ss and unit(-ts) in ss and 1 in ss and -1 in ss


def test_p2_singular_set_only_pm1():
    ss = singular_set(path_graph(2, 2))
    np.testing.assert_allclose(ss.angles, [0, np.pi])
    assert ss.nontrivial().size == 0


def test_k4_ell3_has_no_permanent_spectrum():
    g = complete_graph(4, 3)
    assert sigma_per(g) == []
    np.testing.assert_allclose(singular_set(g).angles, [0, np.pi])


@given(graphs())
def test_singular_set_symmetric_and_contains_pm1(g):
    ang = singular_set(g).angles
    assert np.any(np.isclose(ang, 0)) and np.any(np.isclose(ang, np.pi))
    for t in ang:
        if not np.isclose(abs(t), np.pi):
            assert np.min(np.abs(ang + t)) < 1e-9


@given(graphs())
def test_two_computations_agree(g):
    ss = singular_set(g)
    nontriv = ss.nontrivial()
    epon = [t for t in epon_unit_angles(g) if min(abs(t), abs(abs(t) - np.pi)) > 1e-8]
    for t in epon:
        assert np.min(np.abs(nontriv - t)) < 1e-8
    for t in nontriv:
        assert np.min(np.abs(np.asarray(epon) - t)) < 1e-8


@given(graphs(), thetas)
def test_detL_vanishes_exactly_on_singular_set(g, theta):
    z = unit(theta)
    ss = singular_set(g)
    dist = np.min(np.abs(ss.points - z))
    sing = is_singular_matrix(build_L(g, z).matrix)
    if dist > 1e-4:
        assert not sing
    for w in ss.nontrivial():
        assert is_singular_matrix(build_L(g, unit(w)).matrix)


def test_kernel_basis_k4():
    mu = kernel_basis(complete_graph(4, 2), unit(THETA_STAR_4))
    assert mu.shape == (4, 1)
    v = mu[:, 0] / mu[2, 0]
    np.testing.assert_allclose(v, [0, 0, 1, -1], atol=1e-12)
    assert kernel_basis(complete_graph(4, 1), unit(THETA_STAR_4)).shape[1] == 2


def test_kernel_basis_errors():
    with pytest.raises(SolverError):
        kernel_basis(complete_graph(4, 3), unit(THETA_STAR_4))
    with pytest.raises(ValueError):
        kernel_basis(complete_graph(4, 2), 1.0)


@given(graphs())
def test_kernel_basis_orthonormal_and_interior(g):
    for th in singular_set(g).nontrivial():
        mu = kernel_basis(g, unit(th))
        np.testing.assert_allclose(mu.T @ mu, np.eye(mu.shape[1]), atol=1e-10)
        assert np.all(np.abs(mu[list(g.boundary)]) < 1e-12)
        P = matrices(g).transition
        np.testing.assert_allclose(P @ mu, np.cos(th) * mu, atol=1e-9)


def _zero_in_spec(g):
    E = build_internal_evolution(g, np.zeros(g.n_boundary)).E
    return np.linalg.svd(E, compute_uv=False)[-1] < 1e-9


@pytest.mark.parametrize(
    "g, leaf",
    [
        (build_graph(3, [(0, 1), (1, 2)], [0]), True),
        (build_graph(3, [(0, 1), (1, 2)], [1]), False),
        (build_graph(4, [(0, 1), (1, 2), (2, 0), (2, 3)], [3]), True),
        (build_graph(4, [(0, 1), (1, 2), (2, 0), (2, 3)], [0, 1]), False),
        (cycle_graph(5, 2), False),
        (path_graph(2, 2), True),
    ],
)
def test_leaf_iff_zero_eigenvalue(g, leaf):
    assert g.has_boundary_leaf() == leaf
    assert _zero_in_spec(g) == leaf


@given(graphs())
def test_leaf_iff_zero_eigenvalue_random(g):
    assert _zero_in_spec(g) == g.has_boundary_leaf()


def test_lambda1_reported():
    ss = singular_set(complete_graph(4, 2))
    assert 0 < ss.lambda1 < 1


def _mp_solve(g, theta, rhs):
    import mpmath as mp

    mp.mp.dps = 40
    z = mp.exp(1j * mp.mpf(theta))
    jp, jm = (z + 1 / z) / 2, (z - 1 / z) / 2
    m = matrices(g)
    n = g.n_vertices
    L = mp.matrix(n, n)
    for i in range(n):
        for j in range(n):
            L[i, j] = int(m.adjacency[i, j]) - jp * int(m.degree[i, j]) + jm * int(m.boundary_projection[i, j])
    x = mp.lu_solve(L, mp.matrix([complex(v) for v in rhs]))
    return np.array([complex(x[i]) for i in range(n)])


@pytest.mark.parametrize("g", [complete_graph(4, 2), cycle_graph(6, 2), build_graph(4, [(0, 1), (1, 2), (2, 3)], [0])])
@pytest.mark.parametrize("theta", [3e-8, -2e-6, 1e-3, np.pi - 4e-8, -np.pi + 1e-5, 0.9])
def test_solve_L_near_pm1_matches_high_precision(g, theta):
    pytest.importorskip("mpmath")
    rhs = np.arange(1, g.n_vertices + 1) * (1 + 0.5j)
    sol = solve_L(g, unit(theta), rhs)
    ref = _mp_solve(g, theta, rhs)
    # scaled by j-, the solution is O(1) and must be accurate to roundoff
    scale = 1j * np.sin(theta)
    np.testing.assert_allclose(sol.combine(scale), scale * ref, rtol=0, atol=1e-12)
    if sol.kernel is not None:
        assert abs(sol.kernel @ sol.y) < 1e-12


def test_solve_L_split_choice():
    assert solve_L(cycle_graph(6, 2), unit(1e-4), np.ones(6)).sign == 1
    assert solve_L(cycle_graph(6, 2), unit(np.pi - 1e-4), np.ones(6)).sign == -1
    # odd cycle: L_{-1} is invertible, nothing to split
    assert solve_L(cycle_graph(5, 2), unit(np.pi - 1e-4), np.ones(5)).kernel is None
    assert solve_L(cycle_graph(6, 2), unit(1.0), np.ones(6)).kernel is None


@given(graphs(), st.floats(1e-9, 1e-2), st.sampled_from([1, -1]), st.sampled_from([1, -1]))
def test_solve_L_residual_near_pm1(g, eps, side, s):
    z = s * unit(side * eps)
    rhs = g.embed_boundary(np.ones(g.n_boundary))
    sol = solve_L(g, z, rhs)
    L = build_L(g, z).matrix
    # residual of the O(1) quantity j- x
    res = L @ sol.combine(sol.j_minus) - sol.j_minus * rhs
    assert np.max(np.abs(res)) < 1e-12 * max(1.0, np.max(np.abs(sol.combine(sol.j_minus))))
