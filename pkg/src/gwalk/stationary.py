"""
Potentials and stationary states on the whole unit circle.

The stationary state is the twisted gradient of a vertex potential::

    j-(z) phi(a) = z nu(t(a)) - nu(o(a)),      L_z nu = j-(z) alpha_in.

Regular frequencies use a direct solve.  Non-trivial singular frequencies add
degree-weighted orthogonality to ``K_z`` to pin ``nu`` down.  ``z = +-1`` go
through the electric-circuit limits, which avoid the ``0/0`` in ``1/j-(z)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from gwalk.errors import SingularFrequencyError, SolverError
from gwalk.graph import SymmetricDigraph, bipartite_partition, flat_arc, flat_vertex, matrices
from gwalk.laplacian import (
    SplitSolution,
    build_L,
    is_singular_matrix,
    j_minus,
    kernel_basis,
    singular_set,
    solve_L,
)

__all__ = [
    "ArcState",
    "VertexPotential",
    "ElectricSolution",
    "DerivativeCheck",
    "SINGULAR_RADIUS",
    "classify_frequency",
    "twisted_coboundary",
    "split_coboundary",
    "pi_inner",
    "solve_potential",
    "solve_potential_singular",
    "stationary_state",
    "stationary_at_pm1",
    "electric_current",
    "averaged_potential",
    "potential",
    "potential_derivative_check",
]

SINGULAR_RADIUS = 1e-8
PM1_GUARD = 1e-4


@dataclass(frozen=True)
class ArcState:
    """Complex function on internal arcs (arc order of the graph)."""

    values: np.ndarray
    z: complex
    iterations: Optional[int] = None

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


@dataclass(frozen=True)
class VertexPotential:
    values: np.ndarray
    z: complex


@dataclass(frozen=True)
class ElectricSolution:
    """
    Unit-resistance network on ``G0`` fed through the tails.

    ``current[a] = potential[t(a)] - potential[o(a)]`` on internal arcs and
    ``tail_current[k]`` is the current entering boundary vertex ``u_k``.
    """

    current: np.ndarray
    tail_current: np.ndarray
    potential: np.ndarray
    ave: complex = 0.0
    ave_flat: Optional[complex] = None


def twisted_coboundary(g: SymmetricDigraph, f, z: complex) -> np.ndarray:
    """
    ``(d_z^* f)(a) = z f(t(a)) - f(o(a))``.

    Evaluated as ``s (f(t) - s f(o)) + (z - s) f(t)`` with ``s = +-1`` the
    nearer of the two, and ``z - s`` taken from the angle, so that a large
    flat component of ``f`` cancels exactly when ``z`` is close to ``s``.
    """
    f = np.asarray(f)
    z = complex(z)
    ft, fo = f[g.terminus], f[g.origin]
    if z.real >= 0:
        return (ft - fo) + np.expm1(1j * np.angle(z)) * ft
    return -(ft + fo) - np.expm1(1j * np.angle(-z)) * ft


def split_coboundary(g: SymmetricDigraph, sol: SplitSolution, z: complex) -> np.ndarray:
    """``d_z^*`` of ``kernel * c + y`` with the kernel part taken in closed form."""
    out = twisted_coboundary(g, sol.y, z)
    if sol.kernel is None:
        return out
    z = complex(z)
    # d_z^* 1 = z - 1; d_z^* s = -(z + 1) s(o) for bipartite signs s
    if sol.sign == 1:
        return out + np.expm1(1j * np.angle(z)) * sol.c
    return out + np.expm1(1j * np.angle(-z)) * sol.kernel[g.origin] * sol.c


def pi_inner(g: SymmetricDigraph, f, h) -> complex:
    """Degree-weighted inner product ``sum conj(f) h d``."""
    return complex(np.sum(np.conj(f) * np.asarray(h) * g.degree))


def _check_residual(L, nu, rhs, what):
    res = np.linalg.norm(L @ nu - rhs)
    scale = np.linalg.norm(rhs) + np.linalg.norm(L, 2) * np.linalg.norm(nu)
    if res > 1e-10 * max(scale, 1e-300):
        raise SolverError(f"{what}: residual {res:.3e} too large (scale {scale:.3e})")


def solve_potential(g: SymmetricDigraph, z: complex, alpha) -> VertexPotential:
    """
    Solve ``L_z nu = j-(z) alpha_in`` at a regular frequency.

    Raises
    ------
    SingularFrequencyError
        When ``L_z`` is numerically singular.
    """
    lap = build_L(g, z)
    near_pm1 = min(abs(z - 1), abs(z + 1)) < PM1_GUARD
    if not near_pm1 and is_singular_matrix(lap.matrix):
        raise SingularFrequencyError(f"L_z is singular at z={complex(z):.6g}")
    sol = solve_L(g, z, g.embed_boundary(alpha))
    nu = sol.combine(sol.j_minus)
    rhs = sol.j_minus * g.embed_boundary(alpha)
    _check_residual(lap.matrix, nu, rhs, "Poisson solve")
    return VertexPotential(nu, complex(z))


def solve_potential_singular(g: SymmetricDigraph, z: complex, alpha) -> VertexPotential:
    """
    Potential at ``z`` in the singular set (``z != +-1``).

    Least squares on ``L_z`` stacked with the rows ``<mu_k, . >_pi = 0``;
    the stacked system has full column rank.
    """
    z = complex(z)
    lap = build_L(g, z)
    mu = kernel_basis(g, z)
    constraint = (mu * g.degree[:, None]).conj().T
    A = np.vstack([lap.matrix, constraint])
    rhs_top = lap.j_minus * g.embed_boundary(alpha)
    rhs = np.concatenate([rhs_top, np.zeros(mu.shape[1], dtype=complex)])
    nu, _, rank, _ = np.linalg.lstsq(A, rhs, rcond=None)
    if rank < g.n_vertices:
        raise SolverError(f"augmented system rank {rank} < {g.n_vertices}")
    _check_residual(lap.matrix, nu, rhs_top, "constrained Poisson solve")
    orth = np.abs(constraint @ nu)
    if orth.size and orth.max() > 1e-10 * max(1.0, np.linalg.norm(nu)):
        raise SolverError(f"orthogonality to K_z violated: {orth.max():.3e}")
    return VertexPotential(nu, z)


def electric_current(g: SymmetricDigraph, injections) -> ElectricSolution:
    """
    Currents of the unit-resistance network with tail injections.

    ``injections`` is indexed by boundary order and must sum to zero.  The
    potential is gauge-fixed by ``sum_u d(u) p(u) = 0``.
    """
    inj = np.asarray(injections, dtype=complex).reshape(-1)
    total = inj.sum()
    if abs(total) > 1e-12 * max(1.0, float(np.abs(inj).sum())):
        raise ValueError(f"injections must sum to zero, got {total:.3e}")
    n = g.n_vertices
    mats = matrices(g)
    lap = mats.adjacency - mats.degree
    d = g.degree
    K = np.zeros((n + 1, n + 1))
    K[:n, :n] = lap
    K[:n, n] = d
    K[n, :n] = d
    rhs = np.zeros(n + 1, dtype=complex)
    rhs[:n] = g.embed_boundary(inj)
    p = np.linalg.solve(K, rhs)[:n]
    current = p[g.terminus] - p[g.origin]
    return ElectricSolution(current=current, tail_current=inj, potential=p)


def stationary_at_pm1(g: SymmetricDigraph, alpha, sign: int) -> ArcState:
    """
    Stationary state at ``z = sign`` from the electric-circuit limits.

    ``z = 1``: ``phi = j + ave(alpha)``.  ``z = -1`` on a bipartite graph:
    the same construction on flattened data, flattened back.  ``z = -1``
    otherwise: ``phi = d_{-1}^* (M0 + D0)^{-1} alpha_in``.
    """
    alpha = np.asarray(alpha, dtype=complex).reshape(-1)
    if sign == 1:
        ave = alpha.mean()
        sol = electric_current(g, alpha - ave)
        return ArcState(sol.current + ave, 1.0 + 0j)
    if sign != -1:
        raise ValueError("sign must be +1 or -1")
    part = bipartite_partition(g)
    if part is None:
        mats = matrices(g)
        Q = mats.adjacency + mats.degree
        x = np.linalg.solve(Q, g.embed_boundary(alpha))
        return ArcState(twisted_coboundary(g, x, -1.0), -1.0 + 0j)
    a_flat = g.restrict_boundary(flat_vertex(g, g.embed_boundary(alpha), part))
    ave = a_flat.mean()
    sol = electric_current(g, a_flat - ave)
    return ArcState(flat_arc(g, sol.current + ave, part), -1.0 + 0j)


def classify_frequency(g: SymmetricDigraph, z: complex, radius: float):
    """Classify z: ``("pm1", +-1)``, ``("singular", z*)`` or ``("regular", z)``."""
    if abs(z - 1) < radius:
        return "pm1", 1
    if abs(z + 1) < radius:
        return "pm1", -1
    hit = singular_set(g).nearest(z, radius)
    if hit is not None:
        return "singular", hit
    return "regular", z


def stationary_state(
    g: SymmetricDigraph, z: complex, alpha, radius: float = SINGULAR_RADIUS
) -> ArcState:
    """
    Stationary state for any ``|z| = 1``.

    Frequencies within ``radius`` of a singular point are evaluated at that
    point through the constrained or electric path.
    """
    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-12:
        raise ValueError(f"|z| must be 1, got {abs(z)}")
    kind, w = classify_frequency(g, z, radius)
    if kind == "pm1":
        return stationary_at_pm1(g, alpha, w)
    if kind == "singular":
        nu = solve_potential_singular(g, w, alpha).values
        return ArcState(twisted_coboundary(g, nu, w) / j_minus(w), w)
    lap = build_L(g, z)
    # near +-1 the conditioning of L_z is poor but the pole cancels in the
    # coboundary; only flag near-singularity elsewhere
    near_pm1 = min(abs(z - 1), abs(z + 1)) < PM1_GUARD
    if not near_pm1 and is_singular_matrix(lap.matrix):
        raise SingularFrequencyError(
            f"L_z singular at z={z:.6g} but z is not in the computed singular set"
        )
    sol = solve_L(g, z, g.embed_boundary(alpha))
    return ArcState(split_coboundary(g, sol, z), z)


def averaged_potential(g: SymmetricDigraph, alpha, phi) -> np.ndarray:
    """``nu(u)``: mean of the stationary state over all arcs of the tailed graph entering u."""
    phi = np.asarray(getattr(phi, "values", phi))
    return (g.in_sum(phi) + g.embed_boundary(alpha)) / g.tailed_degree


def potential(g: SymmetricDigraph, z: complex, alpha, radius: float = SINGULAR_RADIUS) -> VertexPotential:
    """Potential for any ``|z| = 1``, dispatched like :func:`stationary_state`."""
    z = complex(z)
    kind, w = classify_frequency(g, z, radius)
    if kind == "pm1":
        phi = stationary_at_pm1(g, alpha, w)
        return VertexPotential(averaged_potential(g, alpha, phi), complex(w))
    if kind == "singular":
        return solve_potential_singular(g, w, alpha)
    return solve_potential(g, z, alpha)


@dataclass(frozen=True)
class DerivativeCheck:
    """Residuals of the electric Poisson equation for finite-difference ``nu'``."""

    theta0: float
    steps: tuple
    residuals: tuple
    q0: np.ndarray

    @property
    def orders(self) -> tuple:
        """Observed convergence orders between consecutive steps."""
        out = []
        for (h0, r0), (h1, r1) in zip(
            zip(self.steps, self.residuals), zip(self.steps[1:], self.residuals[1:])
        ):
            if r0 > 0 and r1 > 0:
                out.append(float(np.log(r0 / r1) / np.log(h0 / h1)))
            else:
                out.append(float("inf"))
        return tuple(out)


def potential_derivative_check(
    g: SymmetricDigraph, alpha, theta0: float = 0.0, steps=(1e-3, 1e-4)
) -> DerivativeCheck:
    """
    Central-difference ``nu'(theta0)`` against the electric Poisson equation.

    At ``theta0 = 0`` the residual is ``||(P0 - I)(-i nu'(0)) - q0||`` with
    ``q0 = D0^{-1}(alpha_in - Pi nu(0))``.  At ``theta0 = pi`` (bipartite
    graphs only) both sides are flattened.
    """
    if theta0 not in (0.0, np.pi):
        raise ValueError("theta0 must be 0 or pi")
    part = None
    if theta0 == np.pi:
        part = bipartite_partition(g)
        if part is None:
            raise ValueError("the theta0 = pi check needs a bipartite graph")
    mats = matrices(g)
    n = g.n_vertices
    A = mats.transition - np.eye(n)
    a_v = g.embed_boundary(alpha)
    z0 = np.exp(1j * theta0)
    nu0 = potential(g, z0, alpha).values
    q0 = (a_v - g.boundary_mask * nu0) / g.degree
    residuals = []
    for h in steps:
        nu_p = potential(g, np.exp(1j * (theta0 + h)), alpha).values
        nu_m = potential(g, np.exp(1j * (theta0 - h)), alpha).values
        p = -1j * (nu_p - nu_m) / (2 * h)
        if part is None:
            residuals.append(float(np.linalg.norm(A @ p - q0)))
        else:
            residuals.append(float(np.linalg.norm(A @ (part.sign * p) - part.sign * q0)))
    return DerivativeCheck(float(theta0), tuple(steps), tuple(residuals), q0)
