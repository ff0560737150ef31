"""Pure-Python/numpy fallbacks with the same signatures as ``_ckernels``."""

import itertools

import numpy as np


def iterate_walk(origin, terminus, inverse, coef, rho, z, n_vertices, tol, max_iter):
    origin = np.asarray(origin)
    terminus = np.asarray(terminus)
    inverse = np.asarray(inverse)
    coef_o = np.asarray(coef)[origin]
    rho = np.asarray(rho, dtype=complex)
    phi = np.zeros(origin.shape[0], dtype=complex)
    diff = 0.0
    it = 0
    while it < max_iter:
        it += 1
        sums = np.bincount(terminus, weights=phi.real, minlength=n_vertices) + 1j * np.bincount(
            terminus, weights=phi.imag, minlength=n_vertices
        )
        new = z * (coef_o * sums[origin] - phi[inverse] + rho)
        diff = float(np.max(np.abs(new - phi))) if new.size else 0.0
        phi = new
        if diff < tol:
            break
    return phi, it, diff


def _components(n, edge_list):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for u, v in edge_list:
        ru, rv = find(u), find(v)
        if ru == rv:
            return None, None
        parent[ru] = rv
        comps -= 1
    return comps, find


def count_forests(n, eu, ev, a, b):
    edges = list(zip((int(x) for x in eu), (int(x) for x in ev)))
    trees = 0
    for subset in itertools.combinations(edges, n - 1):
        comps, _ = _components(n, subset)
        if comps == 1:
            trees += 1
    forests = 0
    if n >= 2:
        for subset in itertools.combinations(edges, n - 2):
            comps, find = _components(n, subset)
            if comps == 2 and find(a) != find(b):
                forests += 1
    return trees, forests
