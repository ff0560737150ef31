"""
Boundary observables: scattering matrix, outflow, transmission, comfortability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from gwalk.errors import SolverError
from gwalk.graph import SymmetricDigraph
from gwalk.laplacian import SplitSolution, j_minus, solve_L
from gwalk.stationary import (
    SINGULAR_RADIUS,
    classify_frequency,
    averaged_potential,
    stationary_state,
)

__all__ = [
    "ScatteringMatrix",
    "ComfortabilityResult",
    "UNITARITY_TOL",
    "scattering_matrix",
    "transmitting_rate",
    "comfortability",
    "outflow",
]

# a larger defect than this means a solver went wrong, not roundoff
UNITARITY_TOL = 1e-6
PATH_TOL = 1e-6


@dataclass(frozen=True)
class ScatteringMatrix:
    """
    Boundary-to-boundary scattering matrix.

    Rows and columns follow the graph's boundary order.  ``method`` is
    ``"closed"`` for the Laplacian formula and ``"columns"`` when assembled
    from stationary responses at a singular frequency.
    """

    S: np.ndarray
    z: complex
    method: str = "closed"

    def unitarity_defect(self) -> float:
        r = self.S.shape[0]
        return float(np.max(np.abs(self.S @ self.S.conj().T - np.eye(r))))

    def __array__(self, dtype=None, copy=None):
        return self.S if dtype is None else self.S.astype(dtype)


@dataclass(frozen=True)
class ComfortabilityResult:
    """
    Comfortability ``E_z = ||phi_z||^2 / 2`` with its cross-check.

    ``quadratic_form`` is ``None`` at ``z = +-1`` where it is undefined.
    """

    value: float
    z: complex
    state_norm: float
    quadratic_form: Optional[float]
    discrepancy: float

    def __float__(self) -> float:
        return self.value


def _response_columns(g: SymmetricDigraph, z: complex, radius: float) -> np.ndarray:
    # column v = outflow when a unit amplitude enters at boundary v
    r = g.n_boundary
    S = np.empty((r, r), dtype=complex)
    for v in range(r):
        alpha = np.zeros(r, dtype=complex)
        alpha[v] = 1.0
        phi = stationary_state(g, z, alpha, radius)
        nu = g.restrict_boundary(averaged_potential(g, alpha, phi))
        S[:, v] = 2 * phi.z * nu - phi.z * alpha
    return S


def scattering_matrix(
    g: SymmetricDigraph, z: complex, radius: float = SINGULAR_RADIUS
) -> ScatteringMatrix:
    """
    Scattering matrix at ``|z| = 1``.

    Regular ``z`` uses ``S = z (2 j-(z) L_z^{-1} - I)`` on the boundary
    block.  Within ``radius`` of a singular point the matrix is assembled
    column by column from stationary responses at that point.

    Raises
    ------
    SolverError
        If the result deviates from unitarity by more than ``1e-6``.
    """
    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-12:
        raise ValueError(f"|z| must be 1, got {abs(z)}")
    kind, w = classify_frequency(g, z, radius)
    if kind == "regular":
        b = list(g.boundary)
        sol = solve_L(g, z, np.eye(g.n_vertices)[:, b])
        S = z * (2 * sol.combine(sol.j_minus)[b, :] - np.eye(g.n_boundary))
        out = ScatteringMatrix(S, z, "closed")
    else:
        out = ScatteringMatrix(_response_columns(g, w, radius), complex(w), "columns")
    defect = out.unitarity_defect()
    if defect > UNITARITY_TOL:
        raise SolverError(f"scattering matrix not unitary at z={z:.6g}: defect {defect:.3e}")
    return out


def transmitting_rate(S, i: int, j: int) -> float:
    """``|S_ij|^2`` for ``i != j``."""
    if i == j:
        raise ValueError("transmitting rate needs distinct boundary indices")
    S = np.asarray(S)
    return float(abs(S[i, j]) ** 2)


def outflow(g: SymmetricDigraph, z: complex, alpha, radius: float = SINGULAR_RADIUS) -> np.ndarray:
    """
    Outgoing boundary amplitudes ``beta = S_z alpha``.

    Computed from the stationary state itself: ``beta(u) = 2 z nu(u) - z alpha(u)``.
    """
    alpha = np.asarray(alpha, dtype=complex).reshape(-1)
    phi = stationary_state(g, z, alpha, radius)
    nu = g.restrict_boundary(averaged_potential(g, alpha, phi))
    return 2 * phi.z * nu - phi.z * alpha


def _quadratic_form(g: SymmetricDigraph, z: complex, f) -> float:
    # <f, (D0 - cos M0) f> as an edge sum: |f(u) -+ f(v)|^2 plus a cross term
    # scaled by the half-angle offset from the nearer of +-1.  The kernel part
    # of a SplitSolution drops out of the first sum, so only y enters there.
    u, v = (np.array(x, dtype=np.intp) for x in zip(*g.edges))
    s = 1 if z.real >= 0 else -1
    if isinstance(f, SplitSolution):
        full = f.combine()
        edge = f.y if f.sign == s else full
    else:
        full = edge = np.asarray(f)
    cross = 2.0 * float(np.sum(np.real(np.conj(full[u]) * full[v])))
    head = float(np.sum(np.abs(edge[u] - s * edge[v]) ** 2))
    return head + s * 2.0 * np.sin(np.angle(s * z) / 2) ** 2 * cross


def comfortability(
    g: SymmetricDigraph, z: complex, alpha, radius: float = SINGULAR_RADIUS
) -> ComfortabilityResult:
    """
    Comfortability at ``|z| = 1``.

    The returned value is the state norm.  Away from ``+-1`` the quadratic
    form ``<f, (D0 - cos(theta) M0) f>`` with ``f = L_z^{-1} alpha`` (or
    ``nu / j-(z)`` at a singular point) is computed alongside.

    Raises
    ------
    SolverError
        If the two paths disagree by more than ``1e-6``.
    """
    z = complex(z)
    alpha = np.asarray(alpha, dtype=complex).reshape(-1)
    phi = stationary_state(g, z, alpha, radius)
    e_norm = 0.5 * phi.norm2()
    kind, w = classify_frequency(g, z, radius)
    qf = None
    if kind == "regular":
        qf = _quadratic_form(g, z, solve_L(g, z, g.embed_boundary(alpha)))
    elif kind == "singular":
        f = averaged_potential(g, alpha, phi) / j_minus(w)
        qf = _quadratic_form(g, w, f)
    disc = 0.0 if qf is None else abs(qf - e_norm)
    if disc > PATH_TOL * max(1.0, e_norm):
        raise SolverError(
            f"comfortability paths disagree at z={z:.6g}: {e_norm!r} vs {qf!r}"
        )
    return ComfortabilityResult(e_norm, phi.z, e_norm, qf, disc)
