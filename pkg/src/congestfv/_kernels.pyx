# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same signatures and conventions as ``_kernels_py``."""
import numpy as np

from libc.math cimport pow

BACKEND = "cython"


cdef inline double _p(double r, double eps, double g) nogil:
    cdef double z = r / (1.0 - r)
    if g == 2.0:
        return eps * z * z
    return eps * pow(z, g)


cdef inline double _dp(double r, double eps, double g) nogil:
    cdef double s = 1.0 - r
    if g == 2.0:
        return 2.0 * eps * r / (s * s * s)
    return eps * g * pow(r, g - 1.0) / pow(s, g + 1.0)


cdef inline double _max0(double a) nogil:
    return a if a > 0.0 else 0.0


cdef inline double _min0(double a) nogil:
    return a if a < 0.0 else 0.0


def mass_residual_1d(const double[::1] rho, const double[::1] rho_n, const double[::1] u,
                     const double[::1] eta, double dt, double dx, double eps, double gamma):
    cdef Py_ssize_t m = rho.shape[0], i, k
    R_ = np.empty(m)
    F_ = np.empty(m)
    du_ = np.empty(m)
    p_ = np.empty(m)
    cdef double[::1] R = R_, F = F_, du = du_, p = p_
    cdef double up, um
    with nogil:
        for i in range(m):
            p[i] = _p(rho[i], eps, gamma)
        for i in range(m):
            k = i + 1 if i + 1 < m else 0
            du[i] = eta[i] * dt * (p[k] - p[i]) / dx
            up = _max0(u[i]) - _min0(du[i])
            um = _min0(u[i]) - _max0(du[i])
            F[i] = rho[i] * up + rho[k] * um
        for i in range(m):
            k = i - 1 if i > 0 else m - 1
            R[i] = (rho[i] - rho_n[i]) / dt + (F[i] - F[k]) / dx
    return R_, F_, du_


def mass_jacobian_1d(const double[::1] rho, const double[::1] u, const double[::1] eta,
                     double dt, double dx, double eps, double gamma):
    cdef Py_ssize_t m = rho.shape[0], i, k
    diag_ = np.empty(m)
    upper_ = np.empty(m)
    lower_ = np.empty(m)
    a_ = np.empty(m)
    b_ = np.empty(m)
    p_ = np.empty(m)
    dp_ = np.empty(m)
    cdef double[::1] diag = diag_, upper = upper_, lower = lower_
    cdef double[::1] a = a_, b = b_, p = p_, dp = dp_
    cdef double du, up, um, c, s
    with nogil:
        for i in range(m):
            p[i] = _p(rho[i], eps, gamma)
            dp[i] = _dp(rho[i], eps, gamma)
        for i in range(m):
            k = i + 1 if i + 1 < m else 0
            c = eta[i] * dt / dx
            du = c * (p[k] - p[i])
            up = _max0(u[i]) - _min0(du)
            um = _min0(u[i]) - _max0(du)
            s = rho[i] if du < 0.0 else (rho[k] if du > 0.0 else 0.0)
            a[i] = up + s * c * dp[i]
            b[i] = um - s * c * dp[k]
        for i in range(m):
            k = i - 1 if i > 0 else m - 1
            diag[i] = 1.0 / dt + (a[i] - b[k]) / dx
            upper[i] = b[i] / dx
            lower[i] = -a[k] / dx
    return diag_, upper_, lower_


def momentum_update_1d(const double[::1] u, const double[::1] rho_next, const double[::1] F,
                       const double[::1] p_next, double dt, double dx, double floor):
    cdef Py_ssize_t m = u.shape[0], i, ip, im, ipp
    out_ = np.empty(m)
    cdef double[::1] out = out_
    cdef double fc, fc_next, rf, conv, grad
    with nogil:
        for i in range(m):
            ip = i + 1 if i + 1 < m else 0
            im = i - 1 if i > 0 else m - 1
            rf = 0.5 * (rho_next[i] + rho_next[ip])
            if rf < floor:
                out[i] = u[i]
                continue
            fc = 0.5 * (F[i] + F[im])
            fc_next = 0.5 * (F[ip] + F[i])
            conv = (_min0(fc_next) * (u[ip] - u[i]) - _max0(fc) * (u[im] - u[i])) / dx
            grad = (p_next[ip] - p_next[i]) / dx
            out[i] = u[i] - dt * (conv + grad) / rf
    return out_


cdef void _pressure2d(const double[:, ::1] rho, double[:, ::1] p, double[:, ::1] dp,
                      double eps, double gamma, bint deriv) nogil:
    cdef Py_ssize_t i, j
    for i in range(rho.shape[0]):
        for j in range(rho.shape[1]):
            p[i, j] = _p(rho[i, j], eps, gamma)
            if deriv:
                dp[i, j] = _dp(rho[i, j], eps, gamma)


def mass_residual_2d(const double[:, ::1] rho, const double[:, ::1] rho_n,
                     const double[:, ::1] u, const double[:, ::1] v,
                     const double[:, ::1] eta_x, const double[:, ::1] eta_y,
                     double dt, double dx, double dy, double eps, double gamma):
    cdef Py_ssize_t mx = rho.shape[0], my = rho.shape[1], i, j, ie, jn, iw, js
    R_ = np.empty((mx, my))
    F_ = np.empty((mx, my))
    G_ = np.empty((mx, my))
    du_ = np.empty((mx, my))
    dv_ = np.empty((mx, my))
    p_ = np.empty((mx, my))
    cdef double[:, ::1] R = R_, F = F_, G = G_, du = du_, dv = dv_, p = p_
    cdef double up, um
    with nogil:
        _pressure2d(rho, p, p, eps, gamma, False)
        for i in range(mx):
            ie = i + 1 if i + 1 < mx else 0
            for j in range(my):
                jn = j + 1 if j + 1 < my else 0
                du[i, j] = eta_x[i, j] * dt * (p[ie, j] - p[i, j]) / dx
                up = _max0(u[i, j]) - _min0(du[i, j])
                um = _min0(u[i, j]) - _max0(du[i, j])
                F[i, j] = rho[i, j] * up + rho[ie, j] * um
                dv[i, j] = eta_y[i, j] * dt * (p[i, jn] - p[i, j]) / dy
                up = _max0(v[i, j]) - _min0(dv[i, j])
                um = _min0(v[i, j]) - _max0(dv[i, j])
                G[i, j] = rho[i, j] * up + rho[i, jn] * um
        for i in range(mx):
            iw = i - 1 if i > 0 else mx - 1
            for j in range(my):
                js = j - 1 if j > 0 else my - 1
                R[i, j] = ((rho[i, j] - rho_n[i, j]) / dt + (F[i, j] - F[iw, j]) / dx
                           + (G[i, j] - G[i, js]) / dy)
    return R_, F_, G_, du_, dv_


def mass_jacobian_2d(const double[:, ::1] rho, const double[:, ::1] u, const double[:, ::1] v,
                     const double[:, ::1] eta_x, const double[:, ::1] eta_y,
                     double dt, double dx, double dy, double eps, double gamma):
    cdef Py_ssize_t mx = rho.shape[0], my = rho.shape[1], i, j, ie, jn, iw, js
    shape = (mx, my)
    diag_ = np.empty(shape)
    east_ = np.empty(shape)
    west_ = np.empty(shape)
    north_ = np.empty(shape)
    south_ = np.empty(shape)
    ax_ = np.empty(shape)
    bx_ = np.empty(shape)
    ay_ = np.empty(shape)
    by_ = np.empty(shape)
    p_ = np.empty(shape)
    dp_ = np.empty(shape)
    cdef double[:, ::1] diag = diag_, east = east_, west = west_, north = north_, south = south_
    cdef double[:, ::1] ax = ax_, bx = bx_, ay = ay_, by = by_, p = p_, dp = dp_
    cdef double d, up, um, c, s
    with nogil:
        _pressure2d(rho, p, dp, eps, gamma, True)
        for i in range(mx):
            ie = i + 1 if i + 1 < mx else 0
            for j in range(my):
                jn = j + 1 if j + 1 < my else 0
                c = eta_x[i, j] * dt / dx
                d = c * (p[ie, j] - p[i, j])
                up = _max0(u[i, j]) - _min0(d)
                um = _min0(u[i, j]) - _max0(d)
                s = rho[i, j] if d < 0.0 else (rho[ie, j] if d > 0.0 else 0.0)
                ax[i, j] = up + s * c * dp[i, j]
                bx[i, j] = um - s * c * dp[ie, j]
                c = eta_y[i, j] * dt / dy
                d = c * (p[i, jn] - p[i, j])
                up = _max0(v[i, j]) - _min0(d)
                um = _min0(v[i, j]) - _max0(d)
                s = rho[i, j] if d < 0.0 else (rho[i, jn] if d > 0.0 else 0.0)
                ay[i, j] = up + s * c * dp[i, j]
                by[i, j] = um - s * c * dp[i, jn]
        for i in range(mx):
            iw = i - 1 if i > 0 else mx - 1
            for j in range(my):
                js = j - 1 if j > 0 else my - 1
                diag[i, j] = (1.0 / dt + (ax[i, j] - bx[iw, j]) / dx
                              + (ay[i, j] - by[i, js]) / dy)
                east[i, j] = bx[i, j] / dx
                west[i, j] = -ax[iw, j] / dx
                north[i, j] = by[i, j] / dy
                south[i, j] = -ay[i, js] / dy
    return diag_, east_, west_, north_, south_


def momentum_update_2d(const double[:, ::1] u, const double[:, ::1] v,
                       const double[:, ::1] rho_next, const double[:, ::1] F,
                       const double[:, ::1] G, const double[:, ::1] p_next,
                       double dt, double dx, double dy, double floor):
    cdef Py_ssize_t mx = u.shape[0], my = u.shape[1], i, j, ie, iw, jn, js
    un_ = np.empty((mx, my))
    vn_ = np.empty((mx, my))
    cdef double[:, ::1] un = un_, vn = vn_
    cdef double rf, fc, fc_e, gt, gb, gc, gc_n, fr, fl, conv
    with nogil:
        for i in range(mx):
            ie = i + 1 if i + 1 < mx else 0
            iw = i - 1 if i > 0 else mx - 1
            for j in range(my):
                jn = j + 1 if j + 1 < my else 0
                js = j - 1 if j > 0 else my - 1
                # x-momentum on face (i+1/2, j)
                rf = 0.5 * (rho_next[i, j] + rho_next[ie, j])
                if rf < floor:
                    un[i, j] = u[i, j]
                else:
                    fc = 0.5 * (F[i, j] + F[iw, j])
                    fc_e = 0.5 * (F[ie, j] + F[i, j])
                    gt = 0.5 * (G[i, j] + G[ie, j])
                    gb = 0.5 * (G[i, js] + G[ie, js])
                    conv = ((_min0(fc_e) * (u[ie, j] - u[i, j])
                             - _max0(fc) * (u[iw, j] - u[i, j])) / dx
                            + (_min0(gt) * (u[i, jn] - u[i, j])
                               - _max0(gb) * (u[i, js] - u[i, j])) / dy)
                    un[i, j] = u[i, j] - dt * (conv + (p_next[ie, j] - p_next[i, j]) / dx) / rf
                # y-momentum on face (i, j+1/2)
                rf = 0.5 * (rho_next[i, j] + rho_next[i, jn])
                if rf < floor:
                    vn[i, j] = v[i, j]
                else:
                    gc = 0.5 * (G[i, j] + G[i, js])
                    gc_n = 0.5 * (G[i, jn] + G[i, j])
                    fr = 0.5 * (F[i, j] + F[i, jn])
                    fl = 0.5 * (F[iw, j] + F[iw, jn])
                    conv = ((_min0(gc_n) * (v[i, jn] - v[i, j])
                             - _max0(gc) * (v[i, js] - v[i, j])) / dy
                            + (_min0(fr) * (v[ie, j] - v[i, j])
                               - _max0(fl) * (v[iw, j] - v[i, j])) / dx)
                    vn[i, j] = v[i, j] - dt * (conv + (p_next[i, jn] - p_next[i, j]) / dy) / rf
    return un_, vn_
