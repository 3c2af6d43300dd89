"""Pure numpy kernels.  ``_kernels.pyx`` mirrors these signatures loop by loop.

Conventions (periodic): face ``k`` joins cells ``k`` and ``k+1``.  Mass
residuals are in rate form ``(rho - rho_n)/dt + div(F)``.  Jacobians are
returned as stencil coefficients: in 1D ``(diag, upper, lower)`` with
``upper[i] = dR_i/drho_{i+1}`` and ``lower[i] = dR_i/drho_{i-1}``; in 2D
``(diag, east, west, north, south)`` analogously.
"""
import numpy as np

BACKEND = "python"


def _p(r, eps, gamma):
    return eps * (r / (1.0 - r)) ** gamma


def _dp(r, eps, gamma):
    return eps * gamma * r ** (gamma - 1.0) / (1.0 - r) ** (gamma + 1.0)


def _face_flux(rl, rr, pl, pr, u, eta, dt, h):
    du = eta * dt * (pr - pl) / h
    up = np.maximum(u, 0.0) - np.minimum(du, 0.0)
    um = np.minimum(u, 0.0) - np.maximum(du, 0.0)
    return rl * up + rr * um, du, up, um


def _face_flux_derivs(rl, rr, dpl, dpr, du, up, um, eta, dt, h):
    c = eta * dt / h
    s = np.where(du < 0.0, rl, 0.0) + np.where(du > 0.0, rr, 0.0)
    return up + s * c * dpl, um - s * c * dpr


def mass_residual_1d(rho, rho_n, u, eta, dt, dx, eps, gamma):
    """Return ``(R, F, du)`` for the implicit 1D mass balance."""
    p = _p(rho, eps, gamma)
    rr = np.roll(rho, -1)
    F, du, _, _ = _face_flux(rho, rr, p, np.roll(p, -1), u, eta, dt, dx)
    R = (rho - rho_n) / dt + (F - np.roll(F, 1)) / dx
    return R, F, du


def mass_jacobian_1d(rho, u, eta, dt, dx, eps, gamma):
    p = _p(rho, eps, gamma)
    dp = _dp(rho, eps, gamma)
    rr = np.roll(rho, -1)
    _, du, up, um = _face_flux(rho, rr, p, np.roll(p, -1), u, eta, dt, dx)
    a, b = _face_flux_derivs(rho, rr, dp, np.roll(dp, -1), du, up, um, eta, dt, dx)
    diag = 1.0 / dt + (a - np.roll(b, 1)) / dx
    upper = b / dx
    lower = -np.roll(a, 1) / dx
    return diag, upper, lower


def momentum_update_1d(u, rho_next, F, p_next, dt, dx, floor):
    """Explicit velocity update written through the dual mass balance."""
    Fc = 0.5 * (F + np.roll(F, 1))  # cell-centred mass flux
    Fc_next = np.roll(Fc, -1)
    rf = 0.5 * (rho_next + np.roll(rho_next, -1))
    conv = (np.minimum(Fc_next, 0.0) * (np.roll(u, -1) - u)
            - np.maximum(Fc, 0.0) * (np.roll(u, 1) - u)) / dx
    grad = (np.roll(p_next, -1) - p_next) / dx
    ok = rf >= floor
    unew = u.copy()
    unew[ok] = u[ok] - dt * (conv[ok] + grad[ok]) / rf[ok]
    return unew


def mass_residual_2d(rho, rho_n, u, v, eta_x, eta_y, dt, dx, dy, eps, gamma):
    """Return ``(R, F, G, du, dv)`` for the implicit 2D mass balance."""
    p = _p(rho, eps, gamma)
    re = np.roll(rho, -1, axis=0)
    rn = np.roll(rho, -1, axis=1)
    F, du, _, _ = _face_flux(rho, re, p, np.roll(p, -1, axis=0), u, eta_x, dt, dx)
    G, dv, _, _ = _face_flux(rho, rn, p, np.roll(p, -1, axis=1), v, eta_y, dt, dy)
    R = ((rho - rho_n) / dt + (F - np.roll(F, 1, axis=0)) / dx
         + (G - np.roll(G, 1, axis=1)) / dy)
    return R, F, G, du, dv


def mass_jacobian_2d(rho, u, v, eta_x, eta_y, dt, dx, dy, eps, gamma):
    p = _p(rho, eps, gamma)
    dp = _dp(rho, eps, gamma)
    re = np.roll(rho, -1, axis=0)
    rn = np.roll(rho, -1, axis=1)
    _, du, upx, umx = _face_flux(rho, re, p, np.roll(p, -1, axis=0), u, eta_x, dt, dx)
    _, dv, upy, umy = _face_flux(rho, rn, p, np.roll(p, -1, axis=1), v, eta_y, dt, dy)
    ax, bx = _face_flux_derivs(rho, re, dp, np.roll(dp, -1, axis=0), du, upx, umx, eta_x, dt, dx)
    ay, by = _face_flux_derivs(rho, rn, dp, np.roll(dp, -1, axis=1), dv, upy, umy, eta_y, dt, dy)
    diag = (1.0 / dt + (ax - np.roll(bx, 1, axis=0)) / dx
            + (ay - np.roll(by, 1, axis=1)) / dy)
    east = bx / dx
    west = -np.roll(ax, 1, axis=0) / dx
    north = by / dy
    south = -np.roll(ay, 1, axis=1) / dy
    return diag, east, west, north, south


def momentum_update_2d(u, v, rho_next, F, G, p_next, dt, dx, dy, floor):
    """Explicit x- and y-velocity updates on the 2D MAC grid."""
    def sh(a, k, ax):
        return np.roll(a, -k, axis=ax)

    # x-momentum on face (i+1/2, j)
    Fc = 0.5 * (F + sh(F, -1, 0))          # F_{i,j}
    Fc_e = sh(Fc, 1, 0)                    # F_{i+1,j}
    Gt = 0.5 * (G + sh(G, 1, 0))           # G_{i+1/2,j+1/2}
    Gb = sh(Gt, -1, 1)                     # G_{i+1/2,j-1/2}
    rfx = 0.5 * (rho_next + sh(rho_next, 1, 0))
    conv_u = ((np.minimum(Fc_e, 0.0) * (sh(u, 1, 0) - u)
               - np.maximum(Fc, 0.0) * (sh(u, -1, 0) - u)) / dx
              + (np.minimum(Gt, 0.0) * (sh(u, 1, 1) - u)
                 - np.maximum(Gb, 0.0) * (sh(u, -1, 1) - u)) / dy)
    gx = (sh(p_next, 1, 0) - p_next) / dx

    # y-momentum on face (i, j+1/2)
    Gc = 0.5 * (G + sh(G, -1, 1))          # G_{i,j}
    Gc_n = sh(Gc, 1, 1)                    # G_{i,j+1}
    Fr = 0.5 * (F + sh(F, 1, 1))           # F_{i+1/2,j+1/2}
    Fl = sh(Fr, -1, 0)                     # F_{i-1/2,j+1/2}
    rfy = 0.5 * (rho_next + sh(rho_next, 1, 1))
    conv_v = ((np.minimum(Gc_n, 0.0) * (sh(v, 1, 1) - v)
               - np.maximum(Gc, 0.0) * (sh(v, -1, 1) - v)) / dy
              + (np.minimum(Fr, 0.0) * (sh(v, 1, 0) - v)
                 - np.maximum(Fl, 0.0) * (sh(v, -1, 0) - v)) / dx)
    gy = (sh(p_next, 1, 1) - p_next) / dy

    unew = u.copy()
    vnew = v.copy()
    okx = rfx >= floor
    oky = rfy >= floor
    unew[okx] = u[okx] - dt * (conv_u[okx] + gx[okx]) / rfx[okx]
    vnew[oky] = v[oky] - dt * (conv_v[oky] + gy[oky]) / rfy[oky]
    return unew, vnew
