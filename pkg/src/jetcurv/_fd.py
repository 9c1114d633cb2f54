"""Central finite differences in complex coordinates.

All stencils are second-order central differences followed by one
Richardson halving, ``(4 D(h/2) - D(h)) / 3``, so the error is O(h^4).
Functions take a complex point ``z`` and may return arrays of any shape.
"""

import numpy as np


def default_step(z, base=1e-3):
    return base * max(1.0, float(np.linalg.norm(z)))


def _shift(z, axis, h):
    n = len(z)
    out = np.array(z, dtype=complex)
    if axis < n:
        out[axis] += h
    else:
        out[axis - n] += 1j * h
    return out


def _richardson(coarse, fine):
    return (4.0 * fine - coarse) / 3.0


def real_gradient(f, z, h):
    """Derivatives along the 2n real axes (Re z_1..Re z_n, Im z_1..Im z_n)."""
    z = np.asarray(z, dtype=complex)
    grads = []
    for axis in range(2 * len(z)):
        est = []
        for step in (h, h / 2):
            fp = np.asarray(f(_shift(z, axis, step)))
            fm = np.asarray(f(_shift(z, axis, -step)))
            est.append((fp - fm) / (2 * step))
        grads.append(_richardson(*est))
    return np.array(grads)


def wirtinger_gradient(f, z, h):
    """Return ``(d, dbar)`` with ``d[k] = df/dz_k`` and ``dbar[k] = df/dzbar_k``."""
    n = len(z)
    g = real_gradient(f, z, h)
    dx, dy = g[:n], g[n:]
    return 0.5 * (dx - 1j * dy), 0.5 * (dx + 1j * dy)


def real_hessian(f, z, h):
    """Second derivatives along the 2n real axes, shape (2n, 2n, *out)."""
    z = np.asarray(z, dtype=complex)
    m = 2 * len(z)
    f0 = np.asarray(f(z))
    est = []
    for step in (h, h / 2):
        hess = np.empty((m, m) + f0.shape, dtype=np.result_type(f0, float))
        for a in range(m):
            fp = np.asarray(f(_shift(z, a, step)))
            fm = np.asarray(f(_shift(z, a, -step)))
            hess[a, a] = (fp - 2 * f0 + fm) / step**2
            for b in range(a + 1, m):
                pp = np.asarray(f(_shift(_shift(z, a, step), b, step)))
                pm = np.asarray(f(_shift(_shift(z, a, step), b, -step)))
                mp = np.asarray(f(_shift(_shift(z, a, -step), b, step)))
                mm = np.asarray(f(_shift(_shift(z, a, -step), b, -step)))
                hess[a, b] = hess[b, a] = (pp - pm - mp + mm) / (4 * step**2)
        est.append(hess)
    return _richardson(*est)


def ddbar(f, z, h):
    """``out[k, l] = d^2 f / dz_k dzbar_l``."""
    n = len(z)
    hess = real_hessian(f, z, h)
    xx = hess[:n, :n]
    yy = hess[n:, n:]
    xy = hess[:n, n:]
    yx = hess[n:, :n]
    return 0.25 * (xx + yy + 1j * (xy - yx))
