# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled escape-time kernels (scalar loops; fast twin of _impl_py)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double complex csqrt(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)

cdef double M_E = 2.718281828459045235360287
cdef double BRANCH_POINT = -1.0 / 2.718281828459045235360287
cdef double W_TOL = 1e-14


cdef inline double complex _w0_seed(double complex z) noexcept nogil:
    cdef double az = cabs(z)
    cdef double complex p, L1, L2
    if az < 0.2:
        return z * (1.0 - z + 1.5 * z * z)
    if cabs(z - BRANCH_POINT) < 0.75:
        p = csqrt(2.0 * (M_E * z + 1.0))
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    if az <= 4.0:
        # log(1+z) interpolates z (small) and log z (large)
        return clog(1.0 + z)
    L1 = clog(z)
    L2 = clog(L1)
    return L1 - L2 + L2 / L1


cdef inline double complex _lambert_w0(double complex z) noexcept nogil:
    cdef double complex w, ew, f, denom
    cdef int i
    if z == 0:
        return 0
    w = _w0_seed(z)
    for i in range(64):
        ew = cexp(w)
        f = w * ew - z
        if cabs(f) <= W_TOL * (1.0 + cabs(z)):
            break
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        if denom == 0:
            denom = ew * (w + 1.0)
            if denom == 0:
                break
        w = w - f / denom
    return w


def lambert_w0(z):
    """Principal-branch Lambert W on a complex scalar or array."""
    arr = np.ascontiguousarray(np.atleast_1d(z), dtype=np.complex128)
    shape = arr.shape
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = arr.ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty_like(zz)
    cdef Py_ssize_t i, n = zz.shape[0]
    for i in range(n):
        out[i] = _lambert_w0(zz[i])
    res = out.reshape(shape)
    if np.asarray(z).shape == ():
        return complex(res[0])
    return res


cdef inline bint _on_cut(double complex z) noexcept nogil:
    return (cimag(z) < 1e-12 and cimag(z) > -1e-12
            and creal(z) <= BRANCH_POINT + 1e-12)


cdef inline bint _in_closure(double complex w) noexcept nogil:
    cdef double complex zz, phi
    if w == 0:
        return False
    zz = -1.0 / _lambert_w0(-1.0 / w)
    if cabs(zz) < 1.0 - 1e-9:
        return False
    phi = zz * cexp(1.0 / zz)
    return cabs(phi - w) <= 1e-8 * (1.0 + cabs(w))


cdef inline double complex _sigma(double complex w) noexcept nogil:
    cdef double complex V = _lambert_w0(-1.0 / conj(w))
    return -V * cexp(-1.0 / V)


def teardrop_escape_grid(double x0, double y0, double x1, double y1,
                         int nx, int ny, int max_iter):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] escaped = np.zeros((ny, nx), dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] fault = np.zeros((ny, nx), dtype=np.uint8)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] iters = np.full((ny, nx), max_iter, dtype=np.int32)
    cdef Py_ssize_t i, j
    cdef int t
    cdef double complex w, arg
    cdef double dx = (x1 - x0) / nx, dy = (y1 - y0) / ny
    for j in range(ny):
        for i in range(nx):
            w = (x0 + (i + 0.5) * dx) + 1j * (y0 + (j + 0.5) * dy)
            if not _in_closure(w):
                escaped[j, i] = 1
                iters[j, i] = 0
                continue
            for t in range(1, max_iter + 1):
                if w == 0:
                    fault[j, i] = 1
                    break
                arg = -1.0 / conj(w)
                if _on_cut(arg):
                    fault[j, i] = 1
                    break
                w = _sigma(w)
                if not _in_closure(w):
                    escaped[j, i] = 1
                    iters[j, i] = t
                    break
    return escaped, iters, fault


def exp_escape_grid(double x0, double y0, double x1, double y1,
                    int nx, int ny, int max_iter, double escape_radius=50.0):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] escaped = np.zeros((ny, nx), dtype=np.uint8)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] iters = np.full((ny, nx), max_iter, dtype=np.int32)
    cdef Py_ssize_t i, j
    cdef int t
    cdef double complex w
    cdef double dx = (x1 - x0) / nx, dy = (y1 - y0) / ny
    for j in range(ny):
        for i in range(nx):
            w = (x0 + (i + 0.5) * dx) + 1j * (y0 + (j + 0.5) * dy)
            for t in range(0, max_iter + 1):
                if creal(w) > escape_radius:
                    escaped[j, i] = 1
                    iters[j, i] = t
                    break
                if t < max_iter:
                    w = cexp(conj(w) - 1.0)
    return escaped, iters
