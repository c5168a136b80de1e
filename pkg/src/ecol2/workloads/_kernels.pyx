# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-stepping kernels.

Drop-in for _kernels_py: same functions, same update order.  The FFT is
an iterative radix-2 transform, so spectral states must have power-of-two
length (the solvers guarantee that for internal grids).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, cos, fabs, sin
from libc.stdlib cimport free, malloc

cnp.import_array()

ctypedef double complex dcomplex


cdef struct FftPlan:
    Py_ssize_t n
    Py_ssize_t* rev
    dcomplex* twf   # forward twiddles exp(-2 pi i j / n), j < n/2
    dcomplex* twi   # conjugates


cdef bint _is_pow2(Py_ssize_t n) nogil:
    return n >= 2 and (n & (n - 1)) == 0


cdef int _plan_init(FftPlan* plan, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, bits, half
    cdef double ang
    plan.n = n
    plan.rev = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    half = n >> 1
    plan.twf = <dcomplex*> malloc(half * sizeof(dcomplex))
    plan.twi = <dcomplex*> malloc(half * sizeof(dcomplex))
    if plan.rev == NULL or plan.twf == NULL or plan.twi == NULL:
        return -1
    bits = 0
    i = n
    while i > 1:
        bits += 1
        i >>= 1
    plan.rev[0] = 0
    for i in range(1, n):
        plan.rev[i] = (plan.rev[i >> 1] >> 1) | ((i & 1) << (bits - 1))
    for i in range(half):
        ang = -2.0 * M_PI * i / n
        plan.twf[i] = cos(ang) + 1j * sin(ang)
        plan.twi[i] = cos(ang) - 1j * sin(ang)
    return 0


cdef void _plan_free(FftPlan* plan) nogil:
    free(plan.rev)
    free(plan.twf)
    free(plan.twi)


cdef void _fft(FftPlan* plan, dcomplex* a, bint inverse) nogil:
    """In-place transform; inverse scales by 1/n (numpy convention)."""
    cdef Py_ssize_t n = plan.n
    cdef Py_ssize_t i, j, m, half, step, base
    cdef dcomplex t, w
    cdef dcomplex* tw = plan.twi if inverse else plan.twf
    cdef double inv_n
    for i in range(n):
        j = plan.rev[i]
        if j > i:
            t = a[i]
            a[i] = a[j]
            a[j] = t
    m = 2
    while m <= n:
        half = m >> 1
        step = n // m
        base = 0
        while base < n:
            for j in range(half):
                w = tw[j * step]
                t = w * a[base + j + half]
                a[base + j + half] = a[base + j] - t
                a[base + j] = a[base + j] + t
            base += m
        m <<= 1
    if inverse:
        inv_n = 1.0 / n
        for i in range(n):
            a[i] = a[i] * inv_n


cdef void _nonlinear(FftPlan* plan, dcomplex* buf, dcomplex* g, dcomplex* out) nogil:
    """out = g * fft(real(ifft(buf))^2); buf is clobbered."""
    cdef Py_ssize_t i, n = plan.n
    cdef double re
    _fft(plan, buf, True)
    for i in range(n):
        re = buf[i].real
        buf[i] = re * re
    _fft(plan, buf, False)
    for i in range(n):
        out[i] = g[i] * buf[i]


def spectral_evolve(v_in, e_half_in, e_full_in, g_in, Py_ssize_t nsub):
    """Advance a spectral state nsub integrating-factor RK4 steps."""
    cdef cnp.ndarray[dcomplex, ndim=1] v_arr = np.array(
        v_in, dtype=np.complex128, copy=True, order="C"
    )
    cdef cnp.ndarray[dcomplex, ndim=1] eh_arr = np.ascontiguousarray(
        e_half_in, dtype=np.complex128
    )
    cdef cnp.ndarray[dcomplex, ndim=1] ef_arr = np.ascontiguousarray(
        e_full_in, dtype=np.complex128
    )
    cdef cnp.ndarray[dcomplex, ndim=1] g_arr = np.ascontiguousarray(
        g_in, dtype=np.complex128
    )
    cdef Py_ssize_t n = v_arr.shape[0]
    if not _is_pow2(n):
        raise ValueError(f"spectral state length must be a power of two, got {n}")
    if eh_arr.shape[0] != n or ef_arr.shape[0] != n or g_arr.shape[0] != n:
        raise ValueError("coefficient arrays must match the state length")
    cdef dcomplex* v = <dcomplex*> v_arr.data
    cdef dcomplex* eh = <dcomplex*> eh_arr.data
    cdef dcomplex* ef = <dcomplex*> ef_arr.data
    cdef dcomplex* g = <dcomplex*> g_arr.data
    cdef FftPlan plan
    cdef dcomplex* work
    cdef dcomplex* a
    cdef dcomplex* b
    cdef dcomplex* c
    cdef dcomplex* d
    cdef Py_ssize_t i, it
    with nogil:
        if _plan_init(&plan, n) != 0:
            with gil:
                raise MemoryError()
        work = <dcomplex*> malloc(4 * n * sizeof(dcomplex))
        if work == NULL:
            _plan_free(&plan)
            with gil:
                raise MemoryError()
        a = work
        b = work + n
        c = work + 2 * n
        d = work + 3 * n
        for it in range(nsub):
            # stage a: nonlinear term of the current state
            for i in range(n):
                d[i] = v[i]
            _nonlinear(&plan, d, g, a)
            # stage b
            for i in range(n):
                d[i] = eh[i] * (v[i] + 0.5 * a[i])
            _nonlinear(&plan, d, g, b)
            # stage c
            for i in range(n):
                d[i] = eh[i] * v[i] + 0.5 * b[i]
            _nonlinear(&plan, d, g, c)
            # stage d
            for i in range(n):
                d[i] = ef[i] * v[i] + eh[i] * c[i]
            _nonlinear(&plan, d, g, d)
            for i in range(n):
                v[i] = ef[i] * v[i] + (
                    ef[i] * a[i] + 2.0 * (eh[i] * (b[i] + c[i])) + d[i]
                ) / 6.0
        free(work)
        _plan_free(&plan)
    return v_arr


def to_physical(v_in):
    """Physical field and the imaginary residue discarded on the way."""
    cdef cnp.ndarray[dcomplex, ndim=1] buf_arr = np.array(
        v_in, dtype=np.complex128, copy=True, order="C"
    )
    cdef Py_ssize_t n = buf_arr.shape[0]
    if not _is_pow2(n):
        raise ValueError(f"spectral state length must be a power of two, got {n}")
    cdef cnp.ndarray[double, ndim=1] u_arr = np.empty(n, dtype=np.float64)
    cdef dcomplex* buf = <dcomplex*> buf_arr.data
    cdef double* u = <double*> u_arr.data
    cdef FftPlan plan
    cdef Py_ssize_t i
    cdef double residue = 0.0
    cdef double im
    with nogil:
        if _plan_init(&plan, n) != 0:
            with gil:
                raise MemoryError()
        _fft(&plan, buf, True)
        for i in range(n):
            u[i] = buf[i].real
            im = fabs(buf[i].imag)
            if im > residue:
                residue = im
        _plan_free(&plan)
    return u_arr, residue


def from_physical(u_in):
    cdef cnp.ndarray[double, ndim=1] u_arr = np.ascontiguousarray(
        u_in, dtype=np.float64
    )
    cdef Py_ssize_t n = u_arr.shape[0]
    if not _is_pow2(n):
        raise ValueError(f"field length must be a power of two, got {n}")
    cdef cnp.ndarray[dcomplex, ndim=1] v_arr = np.empty(n, dtype=np.complex128)
    cdef dcomplex* v = <dcomplex*> v_arr.data
    cdef double* u = <double*> u_arr.data
    cdef FftPlan plan
    cdef Py_ssize_t i
    with nogil:
        if _plan_init(&plan, n) != 0:
            with gil:
                raise MemoryError()
        for i in range(n):
            v[i] = u[i]
        _fft(&plan, v, False)
        _plan_free(&plan)
    return v_arr


def advection_upwind(u_in, double nu, Py_ssize_t nsub):
    """First-order upwind for u_t + beta u_x = 0, periodic, nu = beta dt/dx."""
    cdef cnp.ndarray[double, ndim=1] cur = np.array(
        u_in, dtype=np.float64, copy=True, order="C"
    )
    cdef cnp.ndarray[double, ndim=1] nxt = np.empty_like(cur)
    cdef Py_ssize_t n = cur.shape[0]
    cdef double* a = <double*> cur.data
    cdef double* b = <double*> nxt.data
    cdef double* tmp
    cdef Py_ssize_t i, it
    with nogil:
        for it in range(nsub):
            b[0] = a[0] - nu * (a[0] - a[n - 1])
            for i in range(1, n):
                b[i] = a[i] - nu * (a[i] - a[i - 1])
            tmp = a
            a = b
            b = tmp
    if a == <double*> cur.data:
        return cur
    return nxt


def advection_lax_wendroff(u_in, double nu, Py_ssize_t nsub):
    """Second-order Lax-Wendroff, periodic, nu = beta dt/dx."""
    cdef cnp.ndarray[double, ndim=1] cur = np.array(
        u_in, dtype=np.float64, copy=True, order="C"
    )
    cdef cnp.ndarray[double, ndim=1] nxt = np.empty_like(cur)
    cdef Py_ssize_t n = cur.shape[0]
    cdef double* a = <double*> cur.data
    cdef double* b = <double*> nxt.data
    cdef double* tmp
    cdef double left, right
    cdef Py_ssize_t i, it
    with nogil:
        for it in range(nsub):
            for i in range(n):
                left = a[n - 1] if i == 0 else a[i - 1]
                right = a[0] if i == n - 1 else a[i + 1]
                b[i] = (
                    a[i]
                    - 0.5 * nu * (right - left)
                    + 0.5 * nu * nu * (right - 2.0 * a[i] + left)
                )
            tmp = a
            a = b
            b = tmp
    if a == <double*> cur.data:
        return cur
    return nxt


def wave_leapfrog(u_prev_in, u_curr_in, double s2, Py_ssize_t nsub):
    """Leapfrog for u_tt = beta u_xx with pinned ends, s2 = beta (dt/dx)^2."""
    cdef cnp.ndarray[double, ndim=1] p_arr = np.array(
        u_prev_in, dtype=np.float64, copy=True, order="C"
    )
    cdef cnp.ndarray[double, ndim=1] c_arr = np.array(
        u_curr_in, dtype=np.float64, copy=True, order="C"
    )
    cdef Py_ssize_t n = c_arr.shape[0]
    cdef cnp.ndarray[double, ndim=1] n_arr = np.empty_like(c_arr)
    cdef double* up = <double*> p_arr.data
    cdef double* uc = <double*> c_arr.data
    cdef double* un = <double*> n_arr.data
    cdef double* tmp
    cdef Py_ssize_t i, it
    with nogil:
        for it in range(nsub):
            un[0] = 0.0
            un[n - 1] = 0.0
            for i in range(1, n - 1):
                un[i] = (
                    2.0 * uc[i]
                    - up[i]
                    + s2 * (uc[i + 1] - 2.0 * uc[i] + uc[i - 1])
                )
            tmp = up
            up = uc
            uc = un
            un = tmp
    # map the rotated pointers back to their arrays
    arrays = {
        <size_t> p_arr.data: p_arr,
        <size_t> c_arr.data: c_arr,
        <size_t> n_arr.data: n_arr,
    }
    return arrays[<size_t> up], arrays[<size_t> uc]


def reaction_rk4(u_in, double rate, double dt, Py_ssize_t nsub):
    """Classical RK4 on the pointwise logistic ODE u' = rate u (1 - u)."""
    cdef cnp.ndarray[double, ndim=1] u_arr = np.array(
        u_in, dtype=np.float64, copy=True, order="C"
    )
    cdef Py_ssize_t n = u_arr.shape[0]
    cdef double* u = <double*> u_arr.data
    cdef double k1, k2, k3, k4, mid, val
    cdef Py_ssize_t i, it
    with nogil:
        for it in range(nsub):
            for i in range(n):
                val = u[i]
                k1 = rate * val * (1.0 - val)
                mid = val + 0.5 * dt * k1
                k2 = rate * mid * (1.0 - mid)
                mid = val + 0.5 * dt * k2
                k3 = rate * mid * (1.0 - mid)
                mid = val + dt * k3
                k4 = rate * mid * (1.0 - mid)
                u[i] = val + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u_arr
