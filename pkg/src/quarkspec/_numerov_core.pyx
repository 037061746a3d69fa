# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Numerov kernels; same contract as ``_numerov_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef double RESCALE_AT = 1e150


cdef inline int _sign(double x) nogil:
    return (x > 0) - (x < 0)


def shoot(double[::1] f, double u0, double u1):
    cdef Py_ssize_t n = f.shape[0], i
    cdef double up = u0, uc = u1, un
    cdef long nodes = 0
    cdef int last_sign = _sign(uc), sign
    if last_sign == 0:
        last_sign = _sign(up)
    with nogil:
        for i in range(1, n - 1):
            un = ((12.0 - 10.0 * f[i]) * uc - f[i - 1] * up) / f[i + 1]
            if un > RESCALE_AT or un < -RESCALE_AT:
                uc /= RESCALE_AT
                un /= RESCALE_AT
            sign = _sign(un)
            if sign != 0:
                if last_sign != 0 and sign != last_sign:
                    nodes += 1
                last_sign = sign
            up = uc
            uc = un
    return uc, nodes


def profile(double[::1] f, double u0, double u1):
    cdef Py_ssize_t n = f.shape[0], i, j
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] u = out
    cdef double un
    u[0] = u0
    u[1] = u1
    with nogil:
        for i in range(1, n - 1):
            un = ((12.0 - 10.0 * f[i]) * u[i] - f[i - 1] * u[i - 1]) / f[i + 1]
            if un > RESCALE_AT or un < -RESCALE_AT:
                for j in range(i + 1):
                    u[j] /= RESCALE_AT
                un /= RESCALE_AT
            u[i + 1] = un
    return out
