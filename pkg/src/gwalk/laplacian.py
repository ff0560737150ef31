"""
Generalized Laplacian ``L_z = M0 - j+(z) D0 + j-(z) Pi`` and its singular set.

``L_1`` is the graph Laplacian ``M0 - D0`` and ``L_{-1}`` the signless
Laplacian ``M0 + D0``.  On the unit circle ``L_z`` fails to be invertible
exactly at ``j+^{-1}(sigma_per)`` and possibly at ``+-1``; these frequencies
(plus ``+-1`` unconditionally) form the singular set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from gwalk.errors import SolverError
from gwalk.graph import SymmetricDigraph, bipartite_partition, matrices

__all__ = [
    "j_plus",
    "j_minus",
    "GeneralizedLaplacian",
    "SingularSet",
    "build_L",
    "sigma_per",
    "epon_unit_angles",
    "singular_set",
    "kernel_basis",
    "is_singular_matrix",
    "SplitSolution",
    "solve_L",
]

SINGULAR_RTOL = 1e-9
# within this distance of +-1 the kernel of L_{+-1} is split off before solving
SPLIT_RADIUS = 1e-2


def j_plus(z: complex) -> complex:
    z = complex(z)
    if z == 0:
        raise ValueError("j_plus undefined at z = 0")
    return (z + 1.0 / z) / 2.0


def j_minus(z: complex) -> complex:
    z = complex(z)
    if z == 0:
        raise ValueError("j_minus undefined at z = 0")
    return (z - 1.0 / z) / 2.0


@dataclass(frozen=True)
class GeneralizedLaplacian:
    z: complex
    matrix: np.ndarray
    j_plus: complex
    j_minus: complex


def build_L(g: SymmetricDigraph, z: complex) -> GeneralizedLaplacian:
    jp, jm = j_plus(z), j_minus(z)
    mats = matrices(g)
    L = mats.adjacency - jp * mats.degree + jm * mats.boundary_projection
    return GeneralizedLaplacian(complex(z), L.astype(complex), jp, jm)


@dataclass(frozen=True)
class SplitSolution:
    """
    Solution of ``L_z x = b`` stored as ``x = kernel * c + y``.

    Near ``z = s`` (``s = +-1``) with ``L_s`` singular, ``c`` is of size
    ``1/|z - s|`` while ``y`` stays bounded and satisfies ``kernel^T y = 0``.
    Keeping the parts apart lets callers cancel the large flat component
    exactly.  ``kernel`` is ``None`` (and ``c`` zero) away from ``+-1``.

    Attributes
    ----------
    y : ndarray
        Bounded part, shape of ``b``.
    c : ndarray
        Kernel coefficients, one per right-hand side.
    kernel : ndarray or None
        All-ones at ``+1``, bipartite signs at ``-1``.
    sign : int
        The nearer of ``+-1``; 0 when no split was made.
    j_minus : complex
        ``j-(z)`` computed from ``Im z`` to full relative accuracy.
    """

    y: np.ndarray
    c: np.ndarray
    kernel: Optional[np.ndarray]
    sign: int
    j_minus: complex

    def combine(self, scale: complex = 1.0) -> np.ndarray:
        """``scale * x``, forming ``scale * c`` before adding the kernel part."""
        out = scale * self.y
        if self.kernel is None:
            return out
        sc = scale * self.c
        return out + (np.multiply.outer(self.kernel, sc) if self.y.ndim == 2 else self.kernel * sc)


def solve_L(g: SymmetricDigraph, z: complex, rhs) -> SplitSolution:
    """
    Solve ``L_z x = rhs`` for ``|z| = 1``, accurately also close to ``+-1``.

    Near ``s = +-1`` with a kernel ``k`` of ``L_s`` the bordered system::

        [ L_z     (L_z - L_s) k ] [y]   [rhs]
        [ k^T     0             ] [c] = [ 0 ]

    is solved, whose last column is formed from ``sin^2`` of the angular
    offset instead of differences of nearly equal numbers.
    """
    z = complex(z)
    rhs = np.asarray(rhs, dtype=complex)
    lap = build_L(g, z)
    s = 1 if z.real >= 0 else -1
    kernel = None
    if abs(z - s) < SPLIT_RADIUS:
        if s == 1:
            kernel = np.ones(g.n_vertices)
        else:
            kernel = _bipartite_signs(g)
    jm = 1j * z.imag / abs(z)
    if kernel is None:
        y = np.linalg.solve(lap.matrix, rhs)
        c = np.zeros(rhs.shape[1:], dtype=complex)
        return SplitSolution(y, c, None, 0, lap.j_minus)
    mats = matrices(g)
    h = 2.0 * np.sin(np.angle(s * z) / 2.0) ** 2
    # (L_z - L_s) k = s h D0 k + j- Pi k
    col = s * h * g.degree * kernel + jm * mats.boundary_projection.diagonal() * kernel
    n = g.n_vertices
    A = np.zeros((n + 1, n + 1), dtype=complex)
    A[:n, :n] = lap.matrix
    A[:n, n] = col
    A[n, :n] = kernel
    b = np.zeros((n + 1,) + rhs.shape[1:], dtype=complex)
    b[:n] = rhs
    sol = np.linalg.solve(A, b)
    return SplitSolution(sol[:n], sol[n], kernel, s, jm)


def _bipartite_signs(g: SymmetricDigraph):
    part = bipartite_partition(g)
    return None if part is None else np.asarray(part.sign, dtype=float)


def is_singular_matrix(A: np.ndarray, rtol: float = SINGULAR_RTOL) -> bool:
    """Min singular value below ``rtol * ||A||_2``."""
    s = np.linalg.svd(A, compute_uv=False)
    return bool(s[-1] < rtol * max(s[0], 1.0))


def _interior_kernel(g: SymmetricDigraph, lam: float, rtol: float) -> np.ndarray:
    """Orthonormal basis of ``{f in ker(lam - P0) : supp f in interior}``."""
    interior = g.interior
    n = g.n_vertices
    if interior.size == 0:
        return np.zeros((n, 0))
    P = matrices(g).transition
    A = (lam * np.eye(n) - P)[:, interior]
    _, s, vh = np.linalg.svd(A)
    scale = max(s[0] if s.size else 0.0, 1.0)
    rank = int(np.sum(s > rtol * scale))
    null = vh[rank:].conj().T
    basis = np.zeros((n, null.shape[1]))
    basis[interior] = null.real
    return basis


def _p0_eigenvalues(g: SymmetricDigraph, merge: float = 1e-9) -> list:
    # P0 is similar to the symmetric D^{-1/2} M D^{-1/2}
    mats = matrices(g)
    dinv = 1.0 / np.sqrt(g.degree)
    T = dinv[:, None] * mats.adjacency * dinv[None, :]
    ev = np.sort(np.linalg.eigvalsh(T))
    groups = []
    for lam in ev:
        if groups and abs(lam - groups[-1][-1]) < merge:
            groups[-1].append(lam)
        else:
            groups.append([lam])
    return [float(np.mean(grp)) for grp in groups]


def sigma_per(g: SymmetricDigraph, rtol: float = SINGULAR_RTOL) -> list:
    """
    Eigenvalues of ``P0`` owning an eigenvector that vanishes on the boundary.

    Returns a list of ``(lambda, multiplicity)`` where multiplicity is the
    dimension of the internally supported part of the eigenspace.
    """
    out = []
    for lam in _p0_eigenvalues(g):
        lam = float(np.clip(lam, -1.0, 1.0))
        dim = _interior_kernel(g, lam, rtol).shape[1]
        if dim:
            out.append((lam, dim))
    return out


def epon_unit_angles(g: SymmetricDigraph, tol: float = SINGULAR_RTOL) -> np.ndarray:
    """Angles of ``1/lambda`` for unit-modulus eigenvalues ``lambda`` of E."""
    from gwalk.oracle import build_internal_evolution

    E = build_internal_evolution(g, np.zeros(g.n_boundary)).E
    ev = np.linalg.eigvals(E)
    unit = ev[np.abs(np.abs(ev) - 1.0) < tol]
    return np.sort(np.angle(1.0 / unit))


def _wrap(theta):
    return (np.asarray(theta) + np.pi) % (2 * np.pi) - np.pi


def _angle_dist(a, b):
    return np.abs(_wrap(np.asarray(a) - np.asarray(b)))


def _is_pm1_angle(theta, tol):
    return _angle_dist(theta, 0.0) < tol or _angle_dist(theta, np.pi) < tol


@dataclass(frozen=True)
class SingularSet:
    """
    Unit-circle members of the singular set, as angles in ``(-pi, pi]``.

    ``angles`` always contains ``0`` and ``pi``.  ``multiplicity`` is the
    dimension of the internally supported eigenspace for non-trivial members
    (``0`` for the adjoined ``+-1``).  ``epon_angles`` holds the second,
    independent computation from the truncated evolution.
    """

    angles: np.ndarray
    multiplicity: np.ndarray
    epon_angles: np.ndarray = field(repr=False)
    lambda1: float = 0.0

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def nontrivial(self) -> np.ndarray:
        keep = [not _is_pm1_angle(t, 1e-12) for t in self.angles]
        return self.angles[np.asarray(keep, dtype=bool)]

    def nearest(self, z: complex, radius: float = 1e-8):
        """Member within ``radius`` of ``z`` (as a complex point) or ``None``."""
        pts = self.points
        d = np.abs(pts - complex(z))
        k = int(np.argmin(d))
        return complex(pts[k]) if d[k] < radius else None

    def __contains__(self, z) -> bool:
        return self.nearest(z) is not None


@lru_cache(maxsize=256)
def singular_set(g: SymmetricDigraph, tol: float = SINGULAR_RTOL) -> SingularSet:
    """
    Unit-circle singular frequencies, computed two ways and reconciled.

    (i) ``j+^{-1}`` of eigenvalues of ``P0`` with an internally supported
    eigenvector; (ii) reciprocals of unit-modulus eigenvalues of ``E``.
    ``+-1`` are always appended.

    Raises
    ------
    SolverError
        If the two computations disagree by more than ``100 * tol``
        (with a floor of ``1e-8``) after discarding ``+-1``.
    """
    from gwalk.oracle import build_internal_evolution

    angles, mult = [0.0, np.pi], [0, 0]
    for lam, dim in sigma_per(g, tol):
        if abs(abs(lam) - 1.0) < 1e-12:
            continue
        th = float(np.arccos(lam))
        angles += [th, -th]
        mult += [dim, dim]

    epon = epon_unit_angles(g, tol)
    match_tol = max(100 * tol, 1e-8)
    from_p0 = [t for t in angles if not _is_pm1_angle(t, match_tol)]
    from_e = [t for t in epon if not _is_pm1_angle(t, match_tol)]
    for t in from_p0:
        if not from_e or np.min(_angle_dist(from_e, t)) > match_tol:
            raise SolverError(f"angle {t:.12g} from sigma_per has no E-eigenvalue partner")
    for t in from_e:
        if not from_p0 or np.min(_angle_dist(from_p0, t)) > match_tol:
            raise SolverError(f"E-eigenvalue angle {t:.12g} has no sigma_per partner")

    ang = _wrap(np.asarray(angles))
    ang[ang <= -np.pi + 1e-15] = np.pi
    order = np.argsort(ang, kind="stable")
    lam1 = build_internal_evolution(g, np.zeros(g.n_boundary)).lambda1(tol)
    return SingularSet(
        angles=ang[order],
        multiplicity=np.asarray(mult)[order],
        epon_angles=np.asarray(epon),
        lambda1=lam1,
    )


def kernel_basis(g: SymmetricDigraph, z: complex, rtol: float = SINGULAR_RTOL) -> np.ndarray:
    """
    Orthonormal basis (columns) of ``K_z``: internally supported vectors in
    ``ker(j+(z) - P0)``.

    Raises
    ------
    ValueError
        For ``z = +-1`` (outside the domain of this construction).
    SolverError
        If ``K_z`` is trivial, i.e. ``z`` is not a non-trivial singular point.
    """
    z = complex(z)
    if abs(z - 1) < 1e-12 or abs(z + 1) < 1e-12:
        raise ValueError("kernel basis is defined for singular z other than +-1")
    basis = _interior_kernel(g, float(j_plus(z).real), rtol)
    if basis.shape[1] == 0:
        raise SolverError(f"K_z is trivial at z={z:.6g}; z is not in the singular set")
    return basis
