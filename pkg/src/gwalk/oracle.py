"""
Brute-force ground truth: iterate the truncated Grover walk.

Nothing here touches the generalized Laplacian.  The internal part of the
walk obeys ``psi_{n+1} = E psi_n + z^{-n} rho`` with ``psi_0 = 0``; the
rescaled iterates ``phi_n = z^n psi_n`` converge to the stationary state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gwalk import _accel
from gwalk.errors import ConvergenceError, SingularFrequencyError
from gwalk.graph import SymmetricDigraph
from gwalk.stationary import ArcState

__all__ = [
    "TruncatedEvolution",
    "build_internal_evolution",
    "injection",
    "iterate_to_stationary",
    "neumann_stationary",
    "eigen_residual",
    "tail_shell_operator",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10**6


@dataclass(frozen=True)
class TruncatedEvolution:
    """
    Principal submatrix ``E = chi U chi*`` of the Grover walk on internal arcs.

    Attributes
    ----------
    E : ndarray, shape (|A0|, |A0|)
        Real evolution matrix.
    rho : ndarray, shape (|A0|,)
        Inflow injection, supported on arcs leaving the boundary.
    """

    E: np.ndarray
    rho: np.ndarray

    def spectral_radius(self) -> float:
        if self.E.size == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvals(self.E))))

    def lambda1(self, tol: float = 1e-9) -> float:
        """Largest eigenvalue modulus strictly inside the unit disc."""
        if self.E.size == 0:
            return 0.0
        mods = np.abs(np.linalg.eigvals(self.E))
        inside = mods[mods < 1.0 - tol]
        return float(inside.max()) if inside.size else 0.0


def injection(g: SymmetricDigraph, alpha) -> np.ndarray:
    """``rho(a) = 2 alpha(o(a)) / d~(o(a))``: the tail amplitude after one Grover step."""
    a_v = g.embed_boundary(alpha)
    o = g.origin
    return 2.0 * a_v[o] / g.tailed_degree[o]


def build_internal_evolution(g: SymmetricDigraph, alpha) -> TruncatedEvolution:
    n_arcs = g.n_arcs
    E = np.zeros((n_arcs, n_arcs))
    coef = 2.0 / g.tailed_degree
    o, t = g.origin, g.terminus
    # E[a, b] = 2/d~(o(a)) whenever t(b) = o(a); minus one on the inverse arc
    same = o[:, None] == t[None, :]
    E[same] = np.broadcast_to(coef[o][:, None], same.shape)[same]
    E[np.arange(n_arcs), g.inverse] -= 1.0
    return TruncatedEvolution(E, injection(g, alpha))


def iterate_to_stationary(
    g: SymmetricDigraph,
    alpha,
    z: complex,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    backend: str | None = None,
) -> ArcState:
    """
    Iterate ``phi <- z (E phi + rho)`` from zero until the sup-norm step < ``tol``.

    Parameters
    ----------
    g : SymmetricDigraph
    alpha : array_like
        Inflow amplitudes in boundary order.
    z : complex
        Inflow frequency on the unit circle.
    tol : float
        Stopping threshold on ``max |phi_{n+1} - phi_n|``.
    max_iter : int
    backend : {"cython", "python"}, optional
        Force a kernel backend; defaults to the one selected at import.

    Raises
    ------
    ConvergenceError
        When ``max_iter`` steps pass without meeting ``tol``.
    """
    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-12:
        raise ValueError(f"|z| must be 1, got {abs(z)}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    kernel = _accel.BACKENDS[backend] if backend else _accel
    rho = np.ascontiguousarray(injection(g, alpha), dtype=complex)
    coef = np.ascontiguousarray(2.0 / g.tailed_degree)
    phi, n_iter, diff = kernel.iterate_walk(
        g.origin, g.terminus, g.inverse, coef, rho, z, g.n_vertices, float(tol), int(max_iter)
    )
    if not diff < tol:
        raise ConvergenceError(
            f"walk iteration not converged after {n_iter} steps (last step {diff:.3e})",
            iterations=n_iter,
            last_diff=diff,
        )
    return ArcState(np.asarray(phi), z, iterations=int(n_iter))


def neumann_stationary(g: SymmetricDigraph, alpha, z: complex, rcond: float = 1e-12) -> ArcState:
    """Closed geometric sum ``phi = z (I - z E)^{-1} rho``."""
    z = complex(z)
    ev = build_internal_evolution(g, alpha)
    A = np.eye(g.n_arcs) - z * ev.E
    s = np.linalg.svd(A, compute_uv=False)
    if s.size and s[-1] < rcond * s[0]:
        raise SingularFrequencyError(
            f"I - zE is singular at z={z:.6g}: 1/z is an eigenvalue of E"
        )
    return ArcState(z * np.linalg.solve(A, ev.rho), z)


def eigen_residual(g: SymmetricDigraph, alpha, z: complex, phi) -> float:
    """
    Sup-norm of ``U phi~ - z^{-1} phi~`` on internal arcs, where ``phi~``
    extends ``phi`` by the inflow on the tail arcs entering the boundary.
    """
    phi = np.asarray(getattr(phi, "values", phi))
    a_v = g.embed_boundary(alpha)
    into = g.in_sum(phi) + a_v
    o = g.origin
    U_phi = 2.0 / g.tailed_degree[o] * into[o] - phi[g.inverse]
    return float(np.max(np.abs(U_phi - phi / complex(z)))) if phi.size else 0.0


def tail_shell_operator(g: SymmetricDigraph):
    """
    One full Grover step on internal arcs plus the first arc pair of each tail.

    Returns ``(U, labels)``.  Labels are ``("int", a)``, ``("in", j)`` for the
    tail arc entering ``u_j`` and ``("out", j)`` for the one leaving it.  The
    matrix is exact on states that vanish on the ``("out", j)`` arcs.
    """
    n_arcs = g.n_arcs
    r = g.n_boundary
    size = n_arcs + 2 * r
    idx_in = {u: n_arcs + j for j, u in enumerate(g.boundary)}
    idx_out = {u: n_arcs + r + j for j, u in enumerate(g.boundary)}
    U = np.zeros((size, size))
    o, t = g.origin, g.terminus
    dt = g.tailed_degree

    def feed(target, u):
        # target arc leaves u: receives 2/d~(u) * (everything entering u)
        c = 2.0 / dt[u]
        for b in np.flatnonzero(t == u):
            U[target, b] += c
        if u in idx_in:
            U[target, idx_in[u]] += c

    for a in range(n_arcs):
        feed(a, o[a])
        U[a, g.inverse[a]] -= 1.0
    for u in g.boundary:
        feed(idx_out[u], u)
        U[idx_out[u], idx_in[u]] -= 1.0
    labels = [("int", a) for a in range(n_arcs)]
    labels += [("in", j) for j in range(r)] + [("out", j) for j in range(r)]
    return U, labels
