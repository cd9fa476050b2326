"""Pure numpy implementations of the sampling kernels.

Used when the compiled extension is unavailable or disabled. Signatures and
results match :mod:`reflectwalk._accel` exactly.
"""
import numpy as np


def coupled_paths(uniforms, down_lo, next_down_lo, next_up_lo,
                  down_hi, next_down_hi, next_up_hi, start_lo, start_hi):
    """Advance two table-driven chains with a shared uniform per step.

    At step n a chain in state code s moves to ``next_down[n, s]`` when the
    uniform is below ``down[n, s]`` and to ``next_up[n, s]`` otherwise.
    """
    n_paths, n_steps = uniforms.shape
    lo = np.empty((n_paths, n_steps + 1), dtype=np.int64)
    hi = np.empty((n_paths, n_steps + 1), dtype=np.int64)
    lo[:, 0] = start_lo
    hi[:, 0] = start_hi
    for n in range(n_steps):
        u = uniforms[:, n]
        s = lo[:, n]
        lo[:, n + 1] = np.where(u < down_lo[n, s], next_down_lo[n, s], next_up_lo[n, s])
        s = hi[:, n]
        hi[:, n + 1] = np.where(u < down_hi[n, s], next_down_hi[n, s], next_up_hi[n, s])
    return lo, hi


def walk_functionals(z, drifts, scale):
    """Running max and terminal value of |scale * cumsum(z + drift)| per drift.

    Returns two arrays of shape (n_paths, n_drifts).
    """
    n_paths = z.shape[0]
    sup = np.empty((n_paths, len(drifts)))
    term = np.empty((n_paths, len(drifts)))
    for j, d in enumerate(drifts):
        path = np.cumsum(z + d, axis=1)
        np.abs(path, out=path)
        sup[:, j] = path.max(axis=1) * scale
        term[:, j] = path[:, -1] * scale
    return sup, term
