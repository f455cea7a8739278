"""Numeric kernels with optional numba acceleration.

The experiment loops evaluate the same handful of dense operations tens of
thousands of times per run: the block quadratic form and its gradient, the
stabilized log-sum-exp / softmax pair, and the momentum update itself.  Each
kernel exists twice, as a pure-numpy implementation and as an ``@njit``
twin that fuses the passes and avoids temporaries.

Which path is active is decided once, at import time, from the
``SHBOPT_NUMBA`` environment variable:

    SHBOPT_NUMBA=1      require numba (raises if it cannot be imported)
    SHBOPT_NUMBA=0      pure-numpy fallback
    unset or "auto"     numba when importable, numpy otherwise

``benchmarks/bench_kernels.py`` times the two paths against each other.
Both paths are deterministic; they may differ in the last couple of bits
because summation order differs.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("SHBOPT_NUMBA", "auto").strip().lower()
if _FLAG in ("1", "true", "yes", "on"):
    from numba import njit  # hard requirement when forced on

    NUMBA_ENABLED = True
elif _FLAG in ("0", "false", "no", "off"):
    NUMBA_ENABLED = False
else:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def block_quad_grad_numpy(x: np.ndarray, h: np.ndarray):
    """Quadratic form x:Ax and gradient 2Ax for block-diagonal A.

    ``x`` has shape (blocks, m) and ``h`` is the shared (m, m) symmetric
    block; A itself is never materialized.
    """
    xh = x @ h
    quad = float(np.sum(xh * x))
    return quad, 2.0 * xh


def block_quad_numpy(x: np.ndarray, h: np.ndarray) -> float:
    xh = x @ h
    return float(np.sum(xh * x))


def logsumexp_softmax_numpy(theta: np.ndarray):
    """Max-shifted log-sum-exp and the matching softmax vector."""
    m = float(np.max(theta))
    e = np.exp(theta - m)
    s = float(np.sum(e))
    return m + np.log(s), e / s


def logsumexp_numpy(theta: np.ndarray) -> float:
    m = float(np.max(theta))
    return m + float(np.log(np.sum(np.exp(theta - m))))


def heavy_ball_update_numpy(theta, theta_prev, phi, alpha, mu):
    """theta + alpha*phi + mu*(theta - theta_prev), as a new array."""
    return theta + alpha * phi + mu * (theta - theta_prev)


# ---------------------------------------------------------------------------
# numba twins
# ---------------------------------------------------------------------------

if NUMBA_ENABLED:

    @njit(cache=True)
    def _block_quad_grad_nb(x, h):
        nb, m = x.shape
        grad = np.empty_like(x)
        quad = 0.0
        for b in range(nb):
            for i in range(m):
                s = 0.0
                for j in range(m):
                    s += h[i, j] * x[b, j]
                grad[b, i] = 2.0 * s
                quad += x[b, i] * s
        return quad, grad

    @njit(cache=True)
    def _block_quad_nb(x, h):
        nb, m = x.shape
        quad = 0.0
        for b in range(nb):
            for i in range(m):
                s = 0.0
                for j in range(m):
                    s += h[i, j] * x[b, j]
                quad += x[b, i] * s
        return quad

    @njit(cache=True)
    def _logsumexp_softmax_nb(theta):
        n = theta.shape[0]
        m = theta[0]
        for i in range(1, n):
            if theta[i] > m:
                m = theta[i]
        out = np.empty(n)
        s = 0.0
        for i in range(n):
            e = np.exp(theta[i] - m)
            out[i] = e
            s += e
        inv = 1.0 / s
        for i in range(n):
            out[i] *= inv
        return m + np.log(s), out

    @njit(cache=True)
    def _logsumexp_nb(theta):
        n = theta.shape[0]
        m = theta[0]
        for i in range(1, n):
            if theta[i] > m:
                m = theta[i]
        s = 0.0
        for i in range(n):
            s += np.exp(theta[i] - m)
        return m + np.log(s)

    @njit(cache=True)
    def _heavy_ball_update_nb(theta, theta_prev, phi, alpha, mu):
        n = theta.shape[0]
        out = np.empty(n)
        for i in range(n):
            out[i] = theta[i] + alpha * phi[i] + mu * (theta[i] - theta_prev[i])
        return out

    def block_quad_grad_numba(x, h):
        quad, grad = _block_quad_grad_nb(x, h)
        return float(quad), grad

    def block_quad_numba(x, h):
        return float(_block_quad_nb(x, h))

    def logsumexp_softmax_numba(theta):
        v, s = _logsumexp_softmax_nb(theta)
        return float(v), s

    def logsumexp_numba(theta):
        return float(_logsumexp_nb(theta))

    heavy_ball_update_numba = _heavy_ball_update_nb

    block_quad_grad = block_quad_grad_numba
    block_quad = block_quad_numba
    logsumexp_softmax = logsumexp_softmax_numba
    logsumexp = logsumexp_numba
    heavy_ball_update = _heavy_ball_update_nb
else:
    block_quad_grad = block_quad_grad_numpy
    block_quad = block_quad_numpy
    logsumexp_softmax = logsumexp_softmax_numpy
    logsumexp = logsumexp_numpy
    heavy_ball_update = heavy_ball_update_numpy


def active_path() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
