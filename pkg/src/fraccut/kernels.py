"""Hot numeric kernels.

Each kernel exists twice: a numba version (``*_nb``) and a vectorised numpy
version (``*_np``). The public name dispatches on :func:`_accel.numba_enabled`
at import time; tests call both variants directly.
"""
import numpy as np

from ._accel import njit, numba_enabled

USE_NUMBA = numba_enabled()


# ---------------------------------------------------------------------------
# area of an axis-aligned grid cell intersected with the halfplane a x + b y + c >= 0
# ---------------------------------------------------------------------------

@njit
def _cell_clip_area(hx, hy, a, b, gc):
    # cell centred at the origin; gc is the functional value at the centre
    ex = 0.5 * abs(a) * hx + 0.5 * abs(b) * hy
    if gc - ex >= 0.0:
        return hx * hy
    if gc + ex <= 0.0:
        return 0.0
    vx = np.empty(4)
    vy = np.empty(4)
    vx[0] = -0.5 * hx; vy[0] = -0.5 * hy
    vx[1] = 0.5 * hx; vy[1] = -0.5 * hy
    vx[2] = 0.5 * hx; vy[2] = 0.5 * hy
    vx[3] = -0.5 * hx; vy[3] = 0.5 * hy
    acc = 0.0
    exit_x = 0.0; exit_y = 0.0; entry_x = 0.0; entry_y = 0.0
    for k in range(4):
        px = vx[k]; py = vy[k]
        qx = vx[(k + 1) % 4]; qy = vy[(k + 1) % 4]
        gp = a * px + b * py + gc
        gq = a * qx + b * qy + gc
        if gp >= 0.0 and gq >= 0.0:
            acc += px * qy - py * qx
        elif gp >= 0.0:
            t = gp / (gp - gq)
            xx = px + t * (qx - px); xy = py + t * (qy - py)
            acc += px * xy - py * xx
            exit_x = xx; exit_y = xy
        elif gq >= 0.0:
            t = gp / (gp - gq)
            yx = px + t * (qx - px); yy = py + t * (qy - py)
            acc += yx * qy - yy * qx
            entry_x = yx; entry_y = yy
    acc += exit_x * entry_y - exit_y * entry_x
    return 0.5 * acc


@njit
def rect_halfplane_mass_nb(values, x0, y0, hx, hy, a, b, c):
    ny, nx = values.shape
    total = 0.0
    for j in range(ny):
        cy = y0 + (j + 0.5) * hy
        for i in range(nx):
            v = values[j, i]
            if v == 0.0:
                continue
            cx = x0 + (i + 0.5) * hx
            gc = a * cx + b * cy + c
            total += v * _cell_clip_area(hx, hy, a, b, gc)
    return total


def rect_halfplane_mass_np(values, x0, y0, hx, hy, a, b, c):
    ny, nx = values.shape
    cx = x0 + (np.arange(nx) + 0.5) * hx
    cy = y0 + (np.arange(ny) + 0.5) * hy
    gc = (a * cx[None, :] + b * cy[:, None] + c).ravel()
    vals = values.ravel()
    ex = 0.5 * abs(a) * hx + 0.5 * abs(b) * hy
    full = gc - ex >= 0.0
    cut = ~full & (gc + ex > 0.0) & (vals != 0.0)
    total = float(vals[full].sum()) * hx * hy
    if not cut.any():
        return total
    g = gc[cut]
    vx = np.array([-0.5, 0.5, 0.5, -0.5]) * hx
    vy = np.array([-0.5, -0.5, 0.5, 0.5]) * hy
    gv = a * vx[None, :] + b * vy[None, :] + g[:, None]
    acc = np.zeros(g.size)
    exit_x = np.zeros(g.size); exit_y = np.zeros(g.size)
    entry_x = np.zeros(g.size); entry_y = np.zeros(g.size)
    for k in range(4):
        kk = (k + 1) % 4
        px, py, qx, qy = vx[k], vy[k], vx[kk], vy[kk]
        gp, gq = gv[:, k], gv[:, kk]
        pin, qin = gp >= 0.0, gq >= 0.0
        acc += np.where(pin & qin, px * qy - py * qx, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = gp / (gp - gq)
        xx = px + t * (qx - px)
        xy = py + t * (qy - py)
        out_edge = pin & ~qin
        in_edge = ~pin & qin
        acc += np.where(out_edge, px * xy - py * xx, 0.0)
        acc += np.where(in_edge, xx * qy - xy * qx, 0.0)
        exit_x = np.where(out_edge, xx, exit_x)
        exit_y = np.where(out_edge, xy, exit_y)
        entry_x = np.where(in_edge, xx, entry_x)
        entry_y = np.where(in_edge, xy, entry_y)
    acc += exit_x * entry_y - exit_y * entry_x
    return total + float(np.dot(vals[cut], 0.5 * acc))


@njit
def rect_halfplane_mass_many_nb(values, x0, y0, hx, hy, coeffs):
    out = np.empty(coeffs.shape[0])
    for k in range(coeffs.shape[0]):
        out[k] = rect_halfplane_mass_nb(values, x0, y0, hx, hy,
                                        coeffs[k, 0], coeffs[k, 1], coeffs[k, 2])
    return out


def rect_halfplane_mass_many_np(values, x0, y0, hx, hy, coeffs):
    return np.array([rect_halfplane_mass_np(values, x0, y0, hx, hy, *row) for row in coeffs])


# ---------------------------------------------------------------------------
# generalised Voronoi cell weights for f_i(y) = a0 + a1 y1 + a2 y2 + b |y|^2
# ---------------------------------------------------------------------------

@njit
def cell_measures_nb(points, weights, funcs, pixel, soft):
    """Per-cell mass of every measure, shape (m, K)."""
    S = points.shape[0]
    m = funcs.shape[0]
    K = weights.shape[1]
    out = np.zeros((m, K))
    f = np.empty(m)
    w = np.empty(m)
    for s in range(S):
        x = points[s, 0]; y = points[s, 1]
        r2 = x * x + y * y
        for i in range(m):
            f[i] = funcs[i, 0] + funcs[i, 1] * x + funcs[i, 2] * y + funcs[i, 3] * r2
        if soft:
            tot = 0.0
            for i in range(m):
                marg = 1e300
                for j in range(m):
                    if j == i:
                        continue
                    gx = funcs[j, 1] - funcs[i, 1] + 2.0 * (funcs[j, 3] - funcs[i, 3]) * x
                    gy = funcs[j, 2] - funcs[i, 2] + 2.0 * (funcs[j, 3] - funcs[i, 3]) * y
                    gn = np.sqrt(gx * gx + gy * gy)
                    if gn < 1e-12:
                        gn = 1e-12
                    d = (f[j] - f[i]) / gn
                    if d < marg:
                        marg = d
                v = 0.5 + marg / pixel
                if v < 0.0:
                    v = 0.0
                elif v > 1.0:
                    v = 1.0
                w[i] = v
                tot += v
            for i in range(m):
                wi = w[i] / tot
                if wi != 0.0:
                    for k in range(K):
                        out[i, k] += wi * weights[s, k]
        else:
            best = 0
            for i in range(1, m):
                if f[i] < f[best]:
                    best = i
            for k in range(K):
                out[best, k] += weights[s, k]
    return out


def cell_weights_np(points, funcs, pixel, soft):
    """Per-sample membership weights, shape (S, m); rows sum to one."""
    x = points[:, 0:1]
    y = points[:, 1:2]
    a0, a1, a2, b = funcs[:, 0], funcs[:, 1], funcs[:, 2], funcs[:, 3]
    f = a0[None, :] + a1[None, :] * x + a2[None, :] * y + b[None, :] * (x * x + y * y)
    m = funcs.shape[0]
    if not soft:
        idx = np.argmin(f, axis=1)  # first minimum -> lowest-index tie-break
        out = np.zeros((points.shape[0], m))
        out[np.arange(points.shape[0]), idx] = 1.0
        return out
    db = b[None, :] - b[:, None]  # [i, j] = b_j - b_i
    gx = (a1[None, :] - a1[:, None])[None] + 2.0 * db[None] * x[:, :, None]
    gy = (a2[None, :] - a2[:, None])[None] + 2.0 * db[None] * y[:, :, None]
    gn = np.maximum(np.sqrt(gx * gx + gy * gy), 1e-12)
    d = (f[:, None, :] - f[:, :, None]) / gn
    d[:, np.arange(m), np.arange(m)] = np.inf
    marg = d.min(axis=2)
    w = np.clip(0.5 + marg / pixel, 0.0, 1.0)
    return w / w.sum(axis=1, keepdims=True)


def cell_measures_np(points, weights, funcs, pixel, soft):
    return cell_weights_np(points, funcs, pixel, soft).T @ weights


if USE_NUMBA:
    rect_halfplane_mass = rect_halfplane_mass_nb
    rect_halfplane_mass_many = rect_halfplane_mass_many_nb
    cell_measures = cell_measures_nb
else:
    rect_halfplane_mass = rect_halfplane_mass_np
    rect_halfplane_mass_many = rect_halfplane_mass_many_np
    cell_measures = cell_measures_np
