"""Pure numpy implementation of the hot iteration kernels.

Mirrors :mod:`imcergo._speedups`; the two must agree to floating-point
noise.  All functions take a compiled model (see :mod:`imcergo.kernels`)
holding the packed row data.
"""

import numpy as np

BACKEND = "pure"


def apply_upper(cm, h: np.ndarray) -> np.ndarray:
    out = np.empty(cm.n)
    if cm.vrows.size:
        dots = cm.verts @ h
        out[cm.vrows] = np.maximum.reduceat(dots, cm.vstarts[:-1])
    if cm.irows.size:
        order = np.argsort(-h, kind="stable")
        hs = h[order]
        lo = cm.low[:, order]
        up = cm.upp[:, order]
        # suffix[:, j] = mass the states after position j still require
        suffix = np.zeros((cm.irows.size, cm.n + 1))
        suffix[:, :-1] = np.cumsum(lo[:, ::-1], axis=1)[:, ::-1]
        mass = np.zeros(cm.irows.size)
        value = np.zeros(cm.irows.size)
        for j in range(cm.n):
            cap = 1.0 - mass - suffix[:, j + 1]
            p = np.minimum(up[:, j], cap)
            p = np.maximum(p, lo[:, j])
            value += p * hs[j]
            mass += p
        out[cm.irows] = value
    return out


def run_iterate(cm, f: np.ndarray, k: int) -> np.ndarray:
    h = f.copy()
    for _ in range(k):
        h = apply_upper(cm, h)
    return h


def run_average(cm, f: np.ndarray, k: int, trace: np.ndarray | None = None) -> np.ndarray:
    m = f.copy()
    if trace is not None:
        trace[0] = m
    for j in range(1, k):
        m = f + apply_upper(cm, m)
        if trace is not None:
            trace[j] = m
    return m


def run_power(cm, f: np.ndarray, tol: float, cap: int):
    """Iterate the upper transition operator on ``f`` until it flattens.

    Returns ``(vector, iterations, converged)``; convergence means both the
    spread (max - min) and the last sup-norm step are within ``tol``.
    """
    v = f.copy()
    it = 0
    for it in range(1, cap + 1):
        w = apply_upper(cm, v)
        spread = float(np.max(w) - np.min(w))
        delta = float(np.max(np.abs(w - v)))
        v = w
        if spread <= tol and delta <= tol:
            return v, it, True
    return v, it, False


def run_eigen(cm, f: np.ndarray, h0: np.ndarray, tol: float, cap: int):
    """Damped fixed-point iteration for the additive eigenpair of ``f + T(.)``.

    Plain iteration can cycle on periodic top classes, so each step averages
    the iterate with its image (the induced lazy operator is aperiodic) and
    re-anchors the minimum at zero.  The reported residual is the sup-norm
    defect of the undamped eigen equation.

    Returns ``(eigvec, mu, residual, iterations, converged)``.
    """
    h = h0 - np.min(h0)
    mu = 0.0
    res = np.inf
    it = 0
    for it in range(1, cap + 1):
        raw = f + apply_upper(cm, h)
        g = raw - h
        mu = float(np.mean(g))
        res = float(np.max(np.abs(g - mu)))
        if res <= tol:
            return h, mu, res, it, True
        h = 0.5 * (h + raw)
        h -= np.min(h)
    return h, mu, res, it, False
