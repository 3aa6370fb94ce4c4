# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled interference kernel.

Fuses arrival accumulation, distance, path loss and Neumaier summation for
one chunk of a Poisson disc sample.
"""

from libc.math cimport exp, fabs, pow, sqrt, NAN

cdef enum:
    STRETCHED_EXP = 0
    SINGLE_SLOPE = 1
    DISC = 2
    MULTI_SLOPE = 3


cdef inline double _gain(int code, const double[::1] p, double r) noexcept nogil:
    cdef Py_ssize_t k, nseg
    if code == STRETCHED_EXP:
        return exp(-p[0] * pow(r, p[1]))
    if code == SINGLE_SLOPE:
        if r <= p[1]:
            return p[0]
        return p[0] * pow(r / p[1], -p[2])
    if code == DISC:
        return p[0] if r <= p[1] else 0.0
    # MULTI_SLOPE: [l0, K, b_1..b_K, e_1..e_K, c_1..c_K]
    nseg = <Py_ssize_t>p[1]
    k = nseg - 1
    while k >= 0:
        if r >= p[2 + k]:
            return p[2 + 2 * nseg + k] * pow(r, -p[2 + nseg + k])
        k -= 1
    return p[0]


def gain_array(int code, const double[::1] params, const double[::1] r):
    import numpy as np
    out = np.empty(r.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(r.shape[0]):
            o[i] = _gain(code, params, r[i])
    return out


def disc_chunk(const double[::1] gaps, const double[::1] gains, double offset,
               double target, double inv_pi_lam, Py_ssize_t index0, Py_ssize_t skip,
               int code, const double[::1] params):
    """Accumulate one chunk of arrivals.

    Arrivals are ``offset + gaps[0] + ... + gaps[i]`` (left to right); the
    point lies in the disc while its arrival does not exceed ``target``.
    Points with global index below ``skip`` contribute no interference.

    Returns ``(count, last_arrival, first_radius, sum, compensation)``.
    """
    cdef Py_ssize_t m = gaps.shape[0]
    cdef Py_ssize_t i, n = 0
    cdef double a = offset, a_next, r, x, s = 0.0, c = 0.0, t
    cdef double first = NAN
    with nogil:
        for i in range(m):
            a_next = a + gaps[i]
            if a_next > target:
                break
            a = a_next
            n += 1
            r = sqrt(a * inv_pi_lam)
            if i == 0:
                first = r
            if index0 + i < skip:
                continue
            x = _gain(code, params, r) * gains[i]
            t = s + x
            if fabs(s) >= fabs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
    return n, a, first, s, c
