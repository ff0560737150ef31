# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: truncated walk iteration and forest enumeration."""

import numpy as np

from libc.math cimport sqrt

cdef extern from *:
    int __builtin_popcountl(unsigned long) nogil


cdef inline double cabs2(double complex w) nogil:
    return w.real * w.real + w.imag * w.imag


def iterate_walk(const Py_ssize_t[::1] origin,
                 const Py_ssize_t[::1] terminus,
                 const Py_ssize_t[::1] inverse,
                 const double[::1] coef,
                 const double complex[::1] rho,
                 double complex z,
                 Py_ssize_t n_vertices,
                 double tol,
                 long max_iter):
    """Run phi <- z (E phi + rho) from phi = 0 until the sup-step is < tol.

    Returns (phi, iterations, last_sup_step).
    """
    cdef Py_ssize_t n_arcs = origin.shape[0]
    cdef Py_ssize_t a, u
    cdef long it = 0
    cdef double diff2 = 0.0, d2, tol2 = tol * tol
    cdef double complex w
    phi_arr = np.zeros(n_arcs, dtype=np.complex128)
    new_arr = np.zeros(n_arcs, dtype=np.complex128)
    sums_arr = np.zeros(n_vertices, dtype=np.complex128)
    cdef double complex[::1] phi = phi_arr
    cdef double complex[::1] new = new_arr
    cdef double complex[::1] sums = sums_arr
    cdef double complex[::1] tmp

    with nogil:
        while it < max_iter:
            it += 1
            for u in range(n_vertices):
                sums[u] = 0
            for a in range(n_arcs):
                sums[terminus[a]] += phi[a]
            diff2 = 0.0
            for a in range(n_arcs):
                u = origin[a]
                w = z * (coef[u] * sums[u] - phi[inverse[a]] + rho[a])
                new[a] = w
                d2 = cabs2(w - phi[a])
                if d2 > diff2:
                    diff2 = d2
            tmp = phi
            phi = new
            new = tmp
            if diff2 < tol2:
                break
    return np.asarray(phi).copy(), it, sqrt(diff2)


cdef inline int _find(int* parent, int x) nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def count_forests(int n, const long[::1] eu, const long[::1] ev, int a, int b):
    """Count spanning trees and 2-tree spanning forests separating a and b.

    Exhaustive over all 2**|E| edge subsets; feasible for |E| <= 24.
    """
    cdef int n_edges = eu.shape[0]
    if n_edges > 24:
        raise ValueError("exhaustive enumeration limited to 24 edges")
    cdef unsigned long mask, total = 1UL << n_edges
    cdef long long trees = 0, forests = 0
    cdef int k, size, comps, ru, rv
    cdef int parent[32]
    with nogil:
        for mask in range(total):
            size = __builtin_popcountl(mask)
            if size != n - 1 and size != n - 2:
                continue
            for k in range(n):
                parent[k] = k
            comps = n
            for k in range(n_edges):
                if mask & (1UL << k):
                    ru = _find(parent, eu[k])
                    rv = _find(parent, ev[k])
                    if ru == rv:
                        comps = -1
                        break
                    parent[ru] = rv
                    comps -= 1
            if comps == 1:
                trees += 1
            elif comps == 2 and _find(parent, a) != _find(parent, b):
                forests += 1
    return trees, forests

