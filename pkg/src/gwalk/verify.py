"""
Self-verification suite behind ``gw verify``.

Each check returns a :class:`Check`; a suite is a list of checks and the
report is ``{"suite": name, "checks": [{"name", "pass", "detail"}, ...]}``.
Exceptions raised inside a check are recorded as failures, never propagated.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from gwalk import complete as kc
from gwalk.graph import (
    SymmetricDigraph,
    bipartite_partition,
    complete_graph,
    cycle_graph,
    path_graph,
    random_connected_graph,
)
from gwalk.laplacian import build_L, singular_set
from gwalk.observables import comfortability, scattering_matrix
from gwalk.oracle import build_internal_evolution, iterate_to_stationary
from gwalk.stationary import potential_derivative_check, stationary_state

__all__ = [
    "Check",
    "random_ensemble",
    "ensemble_thetas",
    "grover",
    "run_suite",
    "SUITES",
]


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "detail": self.detail}


def random_ensemble(count: int = 20, seed: int = 20240601, n_range=(3, 8), bipartite=None) -> list:
    """Reproducible list of random connected graphs with random boundaries."""
    rng = np.random.default_rng(seed)
    lo, hi = n_range
    return [
        random_connected_graph(rng, int(rng.integers(lo, hi + 1)), bipartite=bipartite)
        for _ in range(count)
    ]


def ensemble_thetas(g: SymmetricDigraph, n_grid: int = 72) -> np.ndarray:
    """Uniform grid on ``(-pi, pi]`` merged with the graph's singular angles."""
    grid = -np.pi + 2 * np.pi * np.arange(1, n_grid + 1) / n_grid
    return np.unique(np.concatenate([grid, singular_set(g).angles]))


def grover(r: int) -> np.ndarray:
    return (2.0 / r) * np.ones((r, r)) - np.eye(r)


def _guard(name: str, fn: Callable[[], Check]) -> Check:
    try:
        return fn()
    except Exception as exc:  # a crashing check is a failing check
        return Check(name, False, f"{type(exc).__name__}: {exc}")


# core checks --------------------------------------------------------------------

def check_k4_values() -> Check:
    g = complete_graph(4, 2)
    alpha = [1.0, 0.0]
    worst = 0.0
    parts = []
    for label, th, exact in [("0", 0.0, 13 / 8), ("pi", np.pi, 5 / 12), ("theta*", kc.theta_star(4), 4.5)]:
        z = np.exp(1j * th)
        vals = [
            comfortability(g, z, alpha).value,
            0.5 * iterate_to_stationary(g, alpha, z).norm2(),
            kc.closed_comfortability(kc.CompleteGraphParams(4, 2, th)),
        ]
        err = max(abs(v - exact) for v in vals)
        worst = max(worst, err)
        parts.append(f"E({label})={vals[0]:.12g}")
    return Check("k4_special_values", worst < 1e-8, ", ".join(parts) + f"; max err {worst:.2e}")


def check_oracle_equivalence(graphs, n_grid) -> Check:
    worst, where = 0.0, None
    rng = np.random.default_rng(7)
    for k, g in enumerate(graphs):
        alpha = rng.normal(size=g.n_boundary) + 1j * rng.normal(size=g.n_boundary)
        for th in ensemble_thetas(g, n_grid):
            z = np.exp(1j * th)
            a = stationary_state(g, z, alpha).values
            b = iterate_to_stationary(g, alpha, z).values
            err = float(np.max(np.abs(a - b)))
            if err > worst:
                worst, where = err, (k, float(th))
    return Check("oracle_equivalence", worst < 1e-6, f"max |closed - oracle| = {worst:.2e} at {where}")


def check_unitarity(graphs, n_grid) -> Check:
    worst, where = 0.0, None
    for k, g in enumerate(graphs):
        for th in ensemble_thetas(g, n_grid):
            d = scattering_matrix(g, np.exp(1j * th)).unitarity_defect()
            if d > worst:
                worst, where = d, (k, float(th))
    return Check("unitarity", worst < 1e-9, f"max |S S^H - I| = {worst:.2e} at {where}")


def check_s_pm1(count: int = 10) -> Check:
    worst = 0.0
    for bip in (True, False):
        for g in random_ensemble(count, seed=11 if bip else 12, bipartite=bip):
            r = g.n_boundary
            worst = max(worst, np.max(np.abs(scattering_matrix(g, 1.0).S - grover(r))))
            part = bipartite_partition(g)
            if part is None:
                target = np.eye(r)
            else:
                D = np.diag(g.restrict_boundary(part.sign))
                target = -D @ grover(r) @ D
            worst = max(worst, np.max(np.abs(scattering_matrix(g, -1.0).S - target)))
    return Check("s_plus_minus_one", worst < 1e-8, f"max deviation {worst:.2e}")


def check_singular_sets(graphs) -> Check:
    bad = []
    for k, g in enumerate(graphs):
        singular_set(g)
        E = build_internal_evolution(g, np.zeros(g.n_boundary)).E
        # rank test: a zero eigenvalue may be defective
        has_zero = bool(np.linalg.svd(E, compute_uv=False)[-1] < 1e-9) if E.size else False
        if has_zero != g.has_boundary_leaf():
            bad.append(k)
    return Check("singular_set_and_leaf", not bad, f"leaf/zero-eigenvalue mismatches: {bad}")


def check_derivatives() -> Check:
    cases = [
        ("P2", path_graph(2, 2), 0.0),
        ("P2", path_graph(2, 2), np.pi),
        ("C4", cycle_graph(4, 3), np.pi),
        ("C4", cycle_graph(4, 3), 0.0),
        ("K4", complete_graph(4, 2), 0.0),
    ]
    ok, parts = True, []
    for name, g, t0 in cases:
        alpha = np.zeros(g.n_boundary)
        alpha[0] = 1.0
        rep = potential_derivative_check(g, alpha, t0, (1e-2, 1e-3, 1e-4))
        order = rep.orders[0]
        ok &= rep.residuals[-1] < 1e-6 and 1.8 < order < 2.2
        parts.append(f"{name}@{t0:.3g}: r={rep.residuals[-1]:.1e} p={order:.2f}")
    return Check("potential_derivative", ok, "; ".join(parts))


# complete-graph checks ----------------------------------------------------------

def check_complete_vs_generic(n_values) -> Check:
    worst = 0.0
    rng = np.random.default_rng(5)
    for N in n_values:
        for _ in range(8):
            ell = int(rng.integers(1, N + 1))
            th = float(rng.uniform(-np.pi, np.pi))
            p = kc.CompleteGraphParams(N, ell, th)
            g = complete_graph(N, ell)
            alpha = np.zeros(ell)
            alpha[0] = 1.0
            worst = max(
                worst,
                np.max(np.abs(kc.closed_scattering(p).S - scattering_matrix(g, p.z).S)),
                abs(kc.closed_comfortability(p) - comfortability(g, p.z, alpha).value),
                np.max(np.abs(kc.closed_inverse(p) - np.linalg.inv(build_L(g, p.z).matrix))),
            )
    return Check("complete_closed_forms", worst < 1e-8, f"max deviation {worst:.2e}")


def check_forests(n_values) -> Check:
    reps = [kc.spanning_forest_check(N) for N in n_values]
    detail = ", ".join(f"N={r.N}: chi1={r.chi1} chi2={r.chi2} ({r.method})" for r in reps)
    return Check("spanning_forests", all(r.passed for r in reps), detail)


def check_extremes(n_values) -> Check:
    reps = [kc.monotonicity_and_extremes(N) for N in n_values]
    bad = [
        (r.N, r.bottom_violations[:1], r.argmin_violations[:1], r.chain_ok)
        for r in reps
        if not r.passed
    ]
    return Check("comfortability_extremes", not bad, f"failures: {bad}" if bad else "all N passed")


def check_perfect_reflection(n_values) -> Check:
    bad = []
    for N in n_values:
        ts = kc.theta_star(N)
        for ell in range(2, N - 1):
            g = complete_graph(N, ell)
            off = ~np.eye(ell, dtype=bool)
            for th in (np.pi, ts, -ts):
                S = scattering_matrix(g, np.exp(1j * th)).S
                if np.max(np.abs(S[off])) >= 1e-8:
                    bad.append((N, ell, th, "on"))
                for d in (-0.05, 0.05):
                    S = scattering_matrix(g, np.exp(1j * (th + d))).S
                    if np.max(np.abs(S[off])) <= 1e-3:
                        bad.append((N, ell, th + d, "off"))
    return Check("perfect_reflection", not bad, f"violations: {bad[:3]}" if bad else "ok")


def _core() -> list:
    graphs = random_ensemble(20)
    n_grid = 72
    return [
        ("k4_special_values", check_k4_values),
        ("unitarity", lambda: check_unitarity(graphs, n_grid)),
        ("oracle_equivalence", lambda: check_oracle_equivalence(graphs, n_grid)),
        ("s_plus_minus_one", lambda: check_s_pm1(10)),
        ("singular_set_and_leaf", lambda: check_singular_sets(graphs)),
        ("potential_derivative", check_derivatives),
    ]


def _complete(n_values: Iterable[int]) -> list:
    n_values = list(n_values)
    return [
        ("complete_closed_forms", lambda: check_complete_vs_generic(n_values)),
        ("spanning_forests", lambda: check_forests([N for N in n_values if N <= 7])),
        ("comfortability_extremes", lambda: check_extremes(n_values)),
        ("perfect_reflection", lambda: check_perfect_reflection(n_values)),
    ]


SUITES = ("all", "core", "complete")


def run_suite(suite: str = "all", n_values=range(4, 7)) -> dict:
    """
    Run a verification suite.

    Parameters
    ----------
    suite : {"all", "core", "complete"}
    n_values : iterable of int
        Complete-graph sizes for the ``complete`` checks.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    plan = []
    if suite in ("all", "core"):
        plan += _core()
    if suite in ("all", "complete"):
        plan += _complete(n_values)
    checks = []
    for name, fn in plan:
        t0 = time.perf_counter()
        c = _guard(name, fn)
        c.detail += f" [{time.perf_counter() - t0:.2f}s]"
        checks.append(c)
    return {"suite": suite, "checks": [c.as_dict() for c in checks]}
