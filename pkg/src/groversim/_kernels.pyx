# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot loops.

Bit-identical twins of ``_kernels_py`` (same operation order, built with
-ffp-contract=off so no fused multiply-adds sneak in).  The compressed
quantum step scales by exact powers of two through ldexp, which keeps the
recurrence valid far past the point where 2^n or 2^(1-n) stop being
representable doubles.
"""

from libc.math cimport fabs, ldexp, sqrt

import numpy as np

COMPILED = True


cdef inline int _parity64(unsigned long long v) noexcept nogil:
    v ^= v >> 32
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return <int>(v & 1ULL)


cdef inline double _half_power(int k) noexcept nogil:
    # 2^(-k/2); one correctly-rounded sqrt when k is odd
    if k % 2 == 0:
        return ldexp(1.0, -(k // 2))
    return ldexp(sqrt(0.5), -(k // 2))


def ud_steps(int n, long long m, double vx, double va, long long steps):
    """Advance the two-amplitude state by `steps` Grover iterations."""
    cdef int shift_up = n
    cdef int shift_down = 1 - n
    cdef double md = <double>m
    cdef double u, s, mean2
    cdef long long k
    with nogil:
        for k in range(steps):
            u = -vx
            s = md * (u - va) + ldexp(va, shift_up)
            mean2 = ldexp(s, shift_down)
            vx = mean2 - u
            va = mean2 - va
    return vx, va


def best_of_steps(int n, long long m, double vx, double va, long long vi,
                  double mvx, double mva, long long mvi, long long steps):
    """Advance `steps` iterations while tracking the best |vx| seen."""
    cdef int shift_up = n
    cdef int shift_down = 1 - n
    cdef double md = <double>m
    cdef double u, s, mean2
    cdef long long k
    with nogil:
        for k in range(steps):
            u = -vx
            s = md * (u - va) + ldexp(va, shift_up)
            mean2 = ldexp(s, shift_down)
            vx = mean2 - u
            va = mean2 - va
            vi += 1
            if fabs(vx) > fabs(mvx):
                mvx = vx
                mva = va
                mvi = vi
    return vx, va, vi, mvx, mva, mvi


def run_until_turnover(int n, long long m, double vx, double va, long long vi,
                       double mvx, double mva, long long mvi, long long max_steps):
    """Iterate until |vx| first fails to improve on the stored best."""
    cdef int shift_up = n
    cdef int shift_down = 1 - n
    cdef double md = <double>m
    cdef double u, s, mean2
    cdef long long executed = 0
    cdef bint turned = False
    with nogil:
        while max_steps <= 0 or executed < max_steps:
            u = -vx
            s = md * (u - va) + ldexp(va, shift_up)
            mean2 = ldexp(s, shift_down)
            vx = mean2 - u
            va = mean2 - va
            vi += 1
            executed += 1
            if fabs(vx) > fabs(mvx):
                mvx = vx
                mva = va
                mvi = vi
            else:
                turned = True
                break
    return vx, va, vi, mvx, mva, mvi, turned


def apply_sp_on_demand(const double[::1] x, int n):
    """Walsh-Hadamard product from the per-element sign rule (naive rows)."""
    cdef long long dim = 1LL << (n + 1)
    cdef double hc = _half_power(n + 1)
    out = np.empty(dim)
    cdef double[::1] y = out
    cdef long long i, j
    cdef double acc
    with nogil:
        for i in range(dim):
            acc = 0.0
            for j in range(dim):
                if _parity64(<unsigned long long>(i & j)):
                    acc -= x[j]
                else:
                    acc += x[j]
            y[i] = hc * acc
    return out


def apply_ent_on_demand(const double[::1] x, const unsigned char[::1] marked_mask, int n):
    """Oracle permutation product, element by element (naive rows)."""
    cdef long long dim = 1LL << (n + 1)
    out = np.empty(dim)
    cdef double[::1] y = out
    cdef long long i, j, r
    cdef double acc
    with nogil:
        for i in range(dim):
            r = i >> 1
            acc = 0.0
            if marked_mask[r]:
                # row has its unit entry at the flipped-ancilla column
                for j in range(dim):
                    if (j >> 1) == r and ((i ^ j) & 1) == 1:
                        acc += x[j]
            else:
                for j in range(dim):
                    if j == i:
                        acc += x[j]
            y[i] = acc
    return out


def apply_int_on_demand(const double[::1] x, int n):
    """Diffusion product from the element rule (naive rows)."""
    cdef long long dim = 1LL << (n + 1)
    cdef double dc2 = ldexp(1.0, 1 - n)
    cdef double dc1 = dc2 - 1.0
    out = np.empty(dim)
    cdef double[::1] y = out
    cdef long long i, j
    cdef double acc
    with nogil:
        for i in range(dim):
            acc = 0.0
            for j in range(i & 1, dim, 2):
                if j == i:
                    acc += dc1 * x[j]
                else:
                    acc += dc2 * x[j]
            y[i] = acc
    return out
