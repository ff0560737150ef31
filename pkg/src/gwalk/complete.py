"""
Closed forms for the complete graph ``K_N`` with ``ell`` boundary vertices.

Boundary vertices are ``0..ell-1`` and the inflow enters at vertex 0 with unit
amplitude.  With ``alpha = -1 - (N-1) cos(theta)`` and
``beta = alpha + i sin(theta)`` the Laplacian is ``J + diag(beta I_ell, alpha I_m)``
(``m = N - ell``).  Everything here follows from that structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from gwalk import _accel
from gwalk.errors import SingularFrequencyError
from gwalk.observables import ScatteringMatrix

__all__ = [
    "CompleteGraphParams",
    "theta_star",
    "closed_det",
    "closed_inverse",
    "closed_scattering",
    "ell1_phase",
    "comfortability_pqr",
    "comfortability_rational",
    "closed_comfortability",
    "special_values",
    "binomial_forest_sum",
    "exact_forest_counts",
    "ForestReport",
    "default_grid",
    "spanning_forest_check",
    "ExtremesReport",
    "monotonicity_and_extremes",
    "asymptotic_ratios",
]

ANGLE_TOL = 1e-12


def theta_star(N: int) -> float:
    """Non-trivial singular angle ``arccos(-1/(N-1))``."""
    return float(np.arccos(-1.0 / (N - 1)))


def _wrap(theta):
    return (np.asarray(theta, dtype=float) + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True)
class CompleteGraphParams:
    """
    ``K_N`` with ``ell`` tails at frequency ``theta``.

    Parameters
    ----------
    N : int
        Vertex count, at least 3.
    ell : int
        Number of boundary vertices, ``1 <= ell <= N``.
    theta : float
        Inflow frequency in radians.
    """

    N: int
    ell: int
    theta: float

    def __post_init__(self):
        if self.N < 3:
            raise ValueError(f"N must be at least 3, got {self.N}")
        if not 1 <= self.ell <= self.N:
            raise ValueError(f"ell must be in [1, {self.N}], got {self.ell}")

    @property
    def m(self) -> int:
        return self.N - self.ell

    @property
    def alpha(self) -> float:
        return -1.0 - (self.N - 1) * np.cos(self.theta)

    @property
    def beta(self) -> complex:
        return self.alpha + 1j * np.sin(self.theta)

    @property
    def theta_star(self) -> float:
        return theta_star(self.N)

    @property
    def z(self) -> complex:
        return complex(np.exp(1j * self.theta))

    def near(self, target: float, tol: float = ANGLE_TOL) -> bool:
        return bool(abs(_wrap(self.theta - target)) < tol)


def closed_det(p: CompleteGraphParams) -> complex:
    """``det L = beta^ell alpha^m + ell beta^(ell-1) alpha^m + m beta^ell alpha^(m-1)``."""
    a, b, ell, m = p.alpha, p.beta, p.ell, p.m
    out = b**ell * a**m + ell * b ** (ell - 1) * a**m
    if m:
        out += m * b**ell * a ** (m - 1)
    return complex(out)


def _sm_scalar(p: CompleteGraphParams) -> complex:
    # 1 + 1^T Lambda^{-1} 1 from Sherman-Morrison
    s = 1.0 + p.ell / p.beta
    if p.m:
        s += p.m / p.alpha
    return s


def closed_inverse(p: CompleteGraphParams) -> np.ndarray:
    """
    Entry-wise closed inverse of ``L(theta)``.

    Five cases: boundary diagonal, boundary off-diagonal, mixed, interior
    diagonal, interior off-diagonal.

    Raises
    ------
    SingularFrequencyError
        At ``theta = 0`` and, when ``m >= 1``, at ``theta = +-theta*``.
    """
    a, b, ell, N = p.alpha, p.beta, p.ell, p.N
    eps = 1e-12 * N
    if abs(b) < eps or (p.m and abs(a) < eps):
        raise SingularFrequencyError(f"L(theta) singular at theta={p.theta}")
    s = _sm_scalar(p)
    if abs(s) < eps:
        raise SingularFrequencyError(f"L(theta) singular at theta={p.theta}")
    lam = np.array([b] * ell + [a] * p.m, dtype=complex)
    inv = -1.0 / (s * np.outer(lam, lam))
    inv[np.diag_indices(N)] += 1.0 / lam
    return inv


def closed_scattering(p: CompleteGraphParams) -> ScatteringMatrix:
    """
    ``e^{-i theta} S = 2 i x sin(theta) J + (2 i y sin(theta) - 1) I``.

    Special frequencies return exact limit values: ``(2/ell) J - I`` at 0,
    ``I`` at pi, ``e^{+-i theta*} I`` at ``+-theta*`` when ``m >= 1``.
    """
    ell, z = p.ell, p.z
    J, I = np.ones((ell, ell)), np.eye(ell)
    if p.near(0.0):
        return ScatteringMatrix((2.0 / ell) * J - I, 1.0 + 0j, "limit")
    if p.near(np.pi):
        return ScatteringMatrix(I.astype(complex), -1.0 + 0j, "limit")
    if p.m and (p.near(p.theta_star) or p.near(-p.theta_star)):
        zs = np.exp(1j * np.sign(_wrap(p.theta)) * p.theta_star)
        return ScatteringMatrix(zs * I, complex(zs), "limit")
    a, b, sn = p.alpha, p.beta, np.sin(p.theta)
    if p.m:
        x = -(a / b) / (a * b + a * ell + b * p.m)
    else:
        x = -1.0 / (b * (b + ell))
    y = 1.0 / b
    S = z * (2j * x * sn * J + (2j * y * sn - 1.0) * I)
    return ScatteringMatrix(S, z, "closed")


def ell1_phase(N: int, theta: float) -> complex:
    """
    Scalar scattering for ``ell = 1`` as ``e^{i(theta + theta~)}``.

    ``theta~`` is given by explicit rational expressions in ``alpha``.
    """
    a = -1.0 - (N - 1) * np.cos(theta)
    den = (a + N - 1) ** 2 * (N - 2 - a) + a**2 * (a + N) * (N - 1) ** 2
    c = ((a + N - 1) ** 2 * (N - 2 - a) - a**2 * (a + N) * (N - 1) ** 2) / den
    s = 2 * a * (a + N - 1) * (N - 1) ** 2 * np.sin(theta) / den
    return complex(np.exp(1j * theta) * (c + 1j * s))


def comfortability_pqr(p: CompleteGraphParams) -> float:
    """
    ``(N-1+cos) (|p|^2 + (ell-1)|q|^2 + m|r|^2) - cos |p + (ell-1) q + m r|^2``.

    Uses the first column ``(p, q.., r..)`` of the closed inverse, so it is
    undefined where ``L(theta)`` is singular.
    """
    col = closed_inverse(p)[:, 0]
    pp, q = col[0], (col[1] if p.ell > 1 else 0.0)
    r = col[p.ell] if p.m else 0.0
    c = np.cos(p.theta)
    norm2 = abs(pp) ** 2 + (p.ell - 1) * abs(q) ** 2 + p.m * abs(r) ** 2
    total = pp + (p.ell - 1) * q + p.m * r
    return float((p.N - 1 + c) * norm2 - c * abs(total) ** 2)


def _f123(a, N):
    f1 = (N - 1) ** 2 * (a * (N * N - 4 * N + 2) + (N - 2) * (N * N - N + 1))
    f2 = (a - N + 2) * (a - N * N + 2 * N)
    f3 = N * (N - 2) * a + N**3 - 2 * N * N + 2 * N - 2
    return f1, f2, f3


def comfortability_rational(N: int, ell: int, theta):
    """
    Rational form of the comfortability in ``alpha``; vectorized over theta.

    Covers ``theta = 0`` and ``+-theta*`` directly.  For ``m = 0`` the common
    factor ``alpha^2`` is cancelled, otherwise ``theta*`` would be ``0/0``.
    """
    m = N - ell
    a = -1.0 - (N - 1) * np.cos(np.asarray(theta, dtype=float))
    f1, f2, f3 = _f123(a, N)
    outer = N * (N - 2) * (a * a + 1) - 2 * a
    if m == 0:
        return (N - 1) * f1 / (outer * f3)
    num = (N - 1) * (a * a * f1 + m * (2 * a + m + 1) * f2)
    return num / (outer * (a * a * f3 - m * (a - N + 2) * (2 * a + m)))


def closed_comfortability(p: CompleteGraphParams) -> float:
    return float(comfortability_rational(p.N, p.ell, p.theta))


def special_values(N: int, ell: int) -> dict:
    """Exact comfortability at ``0``, ``pi/2``, ``theta*`` and ``pi`` as fractions."""
    m = N - ell
    e0 = Fraction(N * (N - 1), 2 * ell * ell) + Fraction(ell - 1, ell * N)
    e_half = Fraction(
        (N - 1) * (N * N - 3 * N + 4 + m * (m - 1)), 2 * ((N - 1) ** 2 + (m - 1) ** 2)
    )
    if m:
        e_star = Fraction((m + 1) * (N - 1), m)
    else:
        e_star = Fraction((N - 1) ** 3 * (N * N - N + 1), N * (N**3 - 2 * N * N + 2 * N - 2))
    e_pi = Fraction(2 * N - 3, 2 * (N - 1) * (N - 2))
    return {"0": e0, "pi/2": e_half, "theta_star": e_star, "pi": e_pi}


# spanning forests -------------------------------------------------------------

def binomial_forest_sum(N: int) -> int:
    """``sum_{k=1}^{N-1} C(N-2, k-1) k^(k-2) (N-k)^(N-k-2)`` in exact arithmetic."""
    total = Fraction(0)
    for k in range(1, N):
        total += math.comb(N - 2, k - 1) * Fraction(k) ** (k - 2) * Fraction(N - k) ** (N - k - 2)
    if total.denominator != 1:
        raise ArithmeticError(f"non-integer binomial forest sum {total}")
    return int(total)


def _bareiss_det(rows) -> int:
    """Fraction-free integer determinant."""
    A = [list(r) for r in rows]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def exact_forest_counts(n: int, edges, a: int, b: int) -> tuple:
    """
    Spanning trees and two-tree forests separating ``a`` from ``b``.

    Both are Laplacian minors: delete one vertex for trees, delete ``a`` and
    ``b`` for the separating forests.
    """
    lap = [[0] * n for _ in range(n)]
    for u, v in edges:
        lap[u][v] -= 1
        lap[v][u] -= 1
        lap[u][u] += 1
        lap[v][v] += 1

    def minor(drop):
        keep = [i for i in range(n) if i not in drop]
        return _bareiss_det([[lap[i][j] for j in keep] for i in keep])

    return minor({a}), minor({a, b})


@dataclass(frozen=True)
class ForestReport:
    N: int
    chi1: int
    chi2: int
    method: str
    binomial_sum: int
    e0_closed: float
    e0_forest: float

    @property
    def cayley_ok(self) -> bool:
        return self.chi1 == self.N ** (self.N - 2)

    @property
    def chi2_ok(self) -> bool:
        return self.chi2 == 2 * self.N ** (self.N - 3)

    @property
    def binomial_ok(self) -> bool:
        return self.binomial_sum == 2 * self.N ** (self.N - 3)

    @property
    def e0_residual(self) -> float:
        return abs(self.e0_closed - self.e0_forest)

    @property
    def passed(self) -> bool:
        return self.cayley_ok and self.chi2_ok and self.binomial_ok and self.e0_residual < 1e-12


def spanning_forest_check(N: int, method: str = "auto") -> ForestReport:
    """
    Forest counts of ``K_N`` against Cayley, ``chi2 = 2 N^(N-3)`` and ``E(0)``.

    ``method="enumerate"`` walks all edge subsets (default for ``N <= 5``);
    ``method="minor"`` uses exact Laplacian minors (default above 5).
    """
    if N < 3:
        raise ValueError("N must be at least 3")
    if method == "auto":
        method = "enumerate" if N <= 5 else "minor"
    edges = [(u, v) for u in range(N) for v in range(u + 1, N)]
    if method == "enumerate":
        eu = np.array([e[0] for e in edges], dtype=np.int64)
        ev = np.array([e[1] for e in edges], dtype=np.int64)
        chi1, chi2 = _accel.count_forests(N, eu, ev, 0, N - 1)
    elif method == "minor":
        chi1, chi2 = exact_forest_counts(N, edges, 0, N - 1)
    else:
        raise ValueError(f"unknown method {method!r}")
    e0 = closed_comfortability(CompleteGraphParams(N, 2, 0.0))
    e0_forest = 0.25 * (chi2 / chi1 + len(edges))
    return ForestReport(N, int(chi1), int(chi2), method, binomial_forest_sum(N), e0, e0_forest)


# extremes and asymptotics ------------------------------------------------------

def default_grid(n: int = 720) -> np.ndarray:
    """``n`` equally spaced angles in ``(-pi, pi]`` containing 0 and pi when n is even."""
    return -np.pi + 2 * np.pi * np.arange(1, n + 1) / n


@dataclass
class ExtremesReport:
    """
    Outcome of the grid checks on ``K_N``.

    ``argmin_asserted`` is False for ``N = 3``, where the minimum is reported
    but not required to sit at pi.
    """

    N: int
    thetas: np.ndarray = field(repr=False)
    bottom_violations: list = field(default_factory=list)
    argmin: dict = field(default_factory=dict)
    argmin_asserted: bool = True
    argmin_violations: list = field(default_factory=list)
    theta_star_chain: list = field(default_factory=list)
    chain_ok: bool = True

    @property
    def passed(self) -> bool:
        return not self.bottom_violations and not self.argmin_violations and self.chain_ok


def monotonicity_and_extremes(N: int, thetas=None, rtol: float = 1e-12) -> ExtremesReport:
    """
    Grid verification of the comfortability landscape of ``K_N``.

    (a) ``ell = N`` is the pointwise bottom curve; (b) for ``N >= 4`` every
    ``ell`` attains its minimum at pi; (c) at ``theta*`` the values decrease
    along ``m = 1, 2, .., N-1`` and drop further at ``m = 0``.
    """
    if N < 3:
        raise ValueError("N must be at least 3")
    thetas = default_grid() if thetas is None else np.asarray(thetas, dtype=float)
    rep = ExtremesReport(N, thetas, argmin_asserted=N >= 4)
    curves = {ell: comfortability_rational(N, ell, thetas) for ell in range(1, N + 1)}
    bottom = curves[N]
    for s in range(1, N):
        diff = curves[s] - bottom
        bad = np.flatnonzero(diff < -rtol * np.abs(bottom))
        rep.bottom_violations += [(float(thetas[k]), s, N, float(diff[k])) for k in bad]
    step = 2 * np.pi / max(len(thetas), 1)
    for ell, curve in curves.items():
        th = float(thetas[int(np.argmin(curve))])
        rep.argmin[ell] = th
        if rep.argmin_asserted and abs(_wrap(th - np.pi)) > step * (1 + 1e-9):
            rep.argmin_violations.append((th, ell, N))
    ts = theta_star(N)
    chain = [float(comfortability_rational(N, N - m, ts)) for m in list(range(1, N)) + [0]]
    rep.theta_star_chain = chain
    rep.chain_ok = all(x > y for x, y in zip(chain, chain[1:]))
    return rep


def asymptotic_ratios(
    N: int, ells=(1, 2, 10), off_spike=(np.pi / 4, np.pi / 3, 2 * np.pi / 3, 3 * np.pi / 4, np.pi)
) -> list:
    """
    Ratios of exact comfortability to the large-``N`` asymptotics.

    Returns ``(label, ell, theta, ratio)`` tuples for ``E(0) 2 ell^2 / N^2``,
    ``E(pi/2) / (N/2)`` and ``N cos^2(theta) E(theta)``.
    """
    out = []
    for ell in ells:
        if not 1 <= ell <= N:
            continue
        out.append(("zero", ell, 0.0, float(comfortability_rational(N, ell, 0.0)) * 2 * ell**2 / N**2))
        out.append(("half_pi", ell, np.pi / 2, float(comfortability_rational(N, ell, np.pi / 2)) / (N / 2)))
        for th in off_spike:
            e = float(comfortability_rational(N, ell, th))
            out.append(("off_spike", ell, float(th), N * np.cos(th) ** 2 * e))
    return out
