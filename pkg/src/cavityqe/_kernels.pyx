# cython: language_level=3, boundscheck=False, wraparound=False
# cython: cdivision=True, initializedcheck=False
"""Compiled inner loops: RK4 trajectory integration and the trapezoid
Fourier transform behind the numeric spectrum.

Operation-for-operation twin of ``_kernels_py``; keep the two in sync so
the backends agree to rounding.
"""

from libc.math cimport cos, sin


def rk4_trajectory(double g0, double kappa, double gamma, double delta,
                   double dt, Py_ssize_t n_steps,
                   double complex e0, double complex c0,
                   double p_out0, double p_spont0, double t0,
                   double complex[::1] e_arr, double complex[::1] c_arr,
                   double[::1] po_arr, double[::1] ps_arr):
    """Classical RK4 on the coupled amplitude equations, filling node arrays.

    Channel probabilities ride along as extra state integrated from the
    stage rates; the rotating phase is evaluated at exact stage times.
    Arrays must have length ``n_steps + 1``; node 0 gets the initial state.
    """
    cdef double complex J = 1j
    cdef double complex e = e0
    cdef double complex c = c0
    cdef double po = p_out0
    cdef double ps = p_spont0
    cdef double complex mig = -J * g0
    cdef double two_kappa = 2.0 * kappa
    cdef double two_gamma = 2.0 * gamma
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef bint resonant = delta == 0.0
    cdef Py_ssize_t i
    cdef double t, a, ca, sa
    cdef double complex p1, p2, p4, q1, q2, q4
    cdef double complex de1, dc1, de2, dc2, de3, dc3, de4, dc4
    cdef double complex e2, c2, e3, c3, e4, c4
    cdef double po1, ps1, po2, ps2, po3, ps3, po4, ps4

    e_arr[0] = e
    c_arr[0] = c
    po_arr[0] = po
    ps_arr[0] = ps

    p1 = p2 = p4 = 1.0
    q1 = q2 = q4 = 1.0

    with nogil:
        for i in range(n_steps):
            t = t0 + i * dt
            if not resonant:
                a = delta * t
                ca = cos(a)
                sa = sin(a)
                p1 = ca + J * sa
                q1 = ca - J * sa
                a = delta * (t + half)
                ca = cos(a)
                sa = sin(a)
                p2 = ca + J * sa
                q2 = ca - J * sa
                a = delta * (t + dt)
                ca = cos(a)
                sa = sin(a)
                p4 = ca + J * sa
                q4 = ca - J * sa

            de1 = mig * (p1 * c) - gamma * e
            dc1 = mig * (q1 * e) - kappa * c
            po1 = two_kappa * (c.real * c.real + c.imag * c.imag)
            ps1 = two_gamma * (e.real * e.real + e.imag * e.imag)

            e2 = e + half * de1
            c2 = c + half * dc1
            de2 = mig * (p2 * c2) - gamma * e2
            dc2 = mig * (q2 * e2) - kappa * c2
            po2 = two_kappa * (c2.real * c2.real + c2.imag * c2.imag)
            ps2 = two_gamma * (e2.real * e2.real + e2.imag * e2.imag)

            e3 = e + half * de2
            c3 = c + half * dc2
            de3 = mig * (p2 * c3) - gamma * e3
            dc3 = mig * (q2 * e3) - kappa * c3
            po3 = two_kappa * (c3.real * c3.real + c3.imag * c3.imag)
            ps3 = two_gamma * (e3.real * e3.real + e3.imag * e3.imag)

            e4 = e + dt * de3
            c4 = c + dt * dc3
            de4 = mig * (p4 * c4) - gamma * e4
            dc4 = mig * (q4 * e4) - kappa * c4
            po4 = two_kappa * (c4.real * c4.real + c4.imag * c4.imag)
            ps4 = two_gamma * (e4.real * e4.real + e4.imag * e4.imag)

            e = e + sixth * (de1 + 2.0 * (de2 + de3) + de4)
            c = c + sixth * (dc1 + 2.0 * (dc2 + dc3) + dc4)
            po = po + sixth * (po1 + 2.0 * (po2 + po3) + po4)
            ps = ps + sixth * (ps1 + 2.0 * (ps2 + ps3) + ps4)

            e_arr[i + 1] = e
            c_arr[i + 1] = c
            po_arr[i + 1] = po
            ps_arr[i + 1] = ps


def fourier_trapezoid(double complex[::1] c_vals, double dt,
                      double[::1] deltas, double complex[::1] out):
    """Trapezoid-weighted Fourier transform of a sampled amplitude.

    ``out[j] = dt * sum_k' c_vals[k] * exp(1j*deltas[j]*k*dt)`` with half
    weights on the end samples; the phase advances by recurrence.
    """
    cdef Py_ssize_t n = c_vals.shape[0]
    cdef Py_ssize_t m = deltas.shape[0]
    cdef Py_ssize_t j, k
    cdef double complex J = 1j
    cdef double complex acc, ph, rot
    cdef double a

    if n <= 1:
        for j in range(m):
            out[j] = 0.0
        return

    with nogil:
        for j in range(m):
            a = deltas[j] * dt
            rot = cos(a) + J * sin(a)
            ph = 1.0
            acc = 0.5 * c_vals[0]
            for k in range(1, n - 1):
                ph = ph * rot
                acc = acc + ph * c_vals[k]
            ph = ph * rot
            acc = acc + 0.5 * (ph * c_vals[n - 1])
            out[j] = dt * acc
