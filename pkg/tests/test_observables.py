import numpy as np
import pytest
from hypothesis import assume, given

from conftest import graph_and_inflow, graphs, grover, oracle_is_fast, thetas, unit
from gwalk.errors import SolverError
from gwalk.graph import bipartite_partition, complete_graph, path_graph
from gwalk.laplacian import singular_set
from gwalk.observables import (
    ComfortabilityResult,
    comfortability,
    outflow,
    scattering_matrix,
    transmitting_rate,
)
from gwalk.oracle import iterate_to_stationary

THETA_STAR_4 = np.arccos(-1 / 3)
E1 = [1.0, 0.0]


@given(graphs())
def test_s_at_one_is_grover(g):
    np.testing.assert_allclose(scattering_matrix(g, 1.0).S, grover(g.n_boundary), atol=1e-9)


@given(graphs())
def test_s_at_minus_one_dichotomy(g):
    S = scattering_matrix(g, -1.0).S
    part = bipartite_partition(g)
    if part is None:
        target = np.eye(g.n_boundary)
    else:
        D = np.diag(g.restrict_boundary(part.sign))
        target = -D @ grover(g.n_boundary) @ D
    np.testing.assert_allclose(S, target, atol=1e-9)


@given(thetas)
def test_p2_scattering_is_swap(theta):
    z = unit(theta)
    S = scattering_matrix(path_graph(2, 2), z).S
    np.testing.assert_allclose(S, z * z * np.array([[0, 1], [1, 0]]), atol=1e-9)
    assert transmitting_rate(S, 0, 1) == pytest.approx(1.0)


@pytest.mark.parametrize("N", [4, 5, 6, 7])
@pytest.mark.parametrize("sign", [1, -1])
def test_perfect_reflection_at_theta_star(N, sign):
    ts = sign * np.arccos(-1 / (N - 1))
    for ell in range(1, N - 1):
        S = scattering_matrix(complete_graph(N, ell), unit(ts))
        np.testing.assert_allclose(S.S, unit(ts) * np.eye(ell), atol=1e-9)
        assert S.method == "columns"


@pytest.mark.parametrize("theta, rate", [(0.0, 1.0), (np.pi, 0.0), (THETA_STAR_4, 0.0), (-THETA_STAR_4, 0.0)])
def test_k4_transmitting_rate(theta, rate):
    S = scattering_matrix(complete_graph(4, 2), unit(theta))
    assert transmitting_rate(S, 1, 0) == pytest.approx(rate, abs=1e-12)


def test_transmitting_rate_rejects_diagonal():
    with pytest.raises(ValueError):
        transmitting_rate(np.eye(2), 1, 1)


@pytest.mark.parametrize("theta, value", [(0.0, 13 / 8), (np.pi, 5 / 12), (THETA_STAR_4, 9 / 2)])
def test_k4_comfortability(theta, value):
    res = comfortability(complete_graph(4, 2), unit(theta), E1)
    assert isinstance(res, ComfortabilityResult)
    assert res.value == pytest.approx(value, abs=1e-10)
    if theta in (0.0, np.pi):
        assert res.quadratic_form is None
    else:
        assert res.discrepancy < 1e-8


def test_p2_comfortability_at_i():
    res = comfortability(path_graph(2, 2), 1j, E1)
    assert res.value == pytest.approx(0.5)
    assert res.quadratic_form == pytest.approx(0.5)


@given(graph_and_inflow(), thetas)
def test_comfortability_paths_agree_and_positive(gi, theta):
    g, alpha = gi
    res = comfortability(g, unit(theta), alpha)
    assert res.discrepancy < 1e-8 * max(1, res.value)
    if np.linalg.norm(alpha) > 1e-6:
        assert res.value > 0


def test_outflow_examples():
    g = complete_graph(4, 2)
    np.testing.assert_allclose(outflow(g, 1.0, E1), [0, 1], atol=1e-12)
    np.testing.assert_array_equal(outflow(g, unit(0.3), [0, 0]), [0, 0])
    for N in (4, 5, 6):
        ts = np.arccos(-1 / (N - 1))
        a = np.array([0.2 + 0.1j, -0.7, 1j][: N - 2])
        np.testing.assert_allclose(outflow(complete_graph(N, len(a)), unit(ts), a), unit(ts) * a, atol=1e-9)


@given(graph_and_inflow(), thetas)
def test_outflow_matches_scattering_and_norm(gi, theta):
    g, alpha = gi
    z = unit(theta)
    beta = outflow(g, z, alpha)
    np.testing.assert_allclose(beta, scattering_matrix(g, z).S @ alpha, atol=1e-9)
    assert np.linalg.norm(beta) == pytest.approx(np.linalg.norm(alpha), abs=1e-9)


@given(graphs(), thetas)
def test_unitarity_random(g, theta):
    assert scattering_matrix(g, unit(theta)).unitarity_defect() < 1e-9


@given(graphs())
def test_unitarity_at_singular_points(g):
    for th in singular_set(g).angles:
        assert scattering_matrix(g, unit(th)).unitarity_defect() < 1e-9


@given(graphs())
def test_scattering_is_limit_at_singular_points(g):
    for th in singular_set(g).nontrivial():
        at = scattering_matrix(g, unit(th)).S
        near = scattering_matrix(g, unit(th + 1e-6))
        assert near.method == "closed"
        assert np.max(np.abs(at - near.S)) < 1e-4


@given(graph_and_inflow(), thetas)
def test_response_semantics(gi, theta):
    # tail output of one coin step at the stationary orbit equals S alpha
    g, alpha = gi
    assume(oracle_is_fast(g))
    z = unit(theta)
    phi = iterate_to_stationary(g, alpha, z).values
    b = list(g.boundary)
    arriving = g.in_sum(phi)[b] + alpha
    tail_out = z * ((2 / g.tailed_degree[b]) * arriving - alpha)
    np.testing.assert_allclose(tail_out, scattering_matrix(g, z).S @ alpha, atol=1e-7)


def test_scattering_rejects_off_circle():
    with pytest.raises(ValueError):
        scattering_matrix(path_graph(2, 2), 0.9)


def test_unitarity_failure_raises(monkeypatch):
    import gwalk.observables as obs

    monkeypatch.setattr(obs, "UNITARITY_TOL", -1.0)
    with pytest.raises(SolverError):
        obs.scattering_matrix(path_graph(2, 2), 1j)


def test_scattering_array_protocol():
    S = scattering_matrix(path_graph(2, 2), 1j)
    assert np.asarray(S).shape == (2, 2)
