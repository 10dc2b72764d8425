"""Shared test helpers: independent oracles, finite differences, error metrics."""

import math

import numpy as np


def oracle_gasf(z):
    """Literal double loop over cos(psi_i + psi_j)."""
    psi = [math.acos(v) for v in z]
    return np.array([[math.cos(a + b) for b in psi] for a in psi])


def oracle_gadf(z):
    """Literal double loop over sin(psi_i - psi_j)."""
    psi = [math.acos(v) for v in z]
    return np.array([[math.sin(a - b) for b in psi] for a in psi])


def oracle_mtf(values, q):
    """Brute-force: rank bins via python sort, count transitions, normalize, expand."""
    n = len(values)
    order = sorted(range(n), key=lambda i: (values[i], i))
    bins = [0] * n
    for rank, idx in enumerate(order):
        bins[idx] = rank * q // n + 1
    counts = [[0] * q for _ in range(q)]
    for t in range(1, n):
        counts[bins[t - 1] - 1][bins[t] - 1] += 1
    w = [[0.0] * q for _ in range(q)]
    for a in range(q):
        total = sum(counts[a])
        for b in range(q):
            w[a][b] = counts[a][b] / total if total else 1.0 / q
    return np.array([[w[bins[i] - 1][bins[j] - 1] for j in range(n)] for i in range(n)])


def numerical_gradient(f, x, h=1e-5):
    """Central finite differences of scalar-valued f() w.r.t. array x (in place)."""
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        ix = it.multi_index
        original = x[ix]
        x[ix] = original + h
        f_plus = f()
        x[ix] = original - h
        f_minus = f()
        x[ix] = original
        grad[ix] = (f_plus - f_minus) / (2.0 * h)
    return grad


def max_rel_error(analytic, numeric):
    """Largest elementwise |a - n| / max(|a| + |n|, 1e-6).

    The 1e-6 floor reflects the oracle's resolution, not a loosened check:
    central differences at h=1e-5 in float64 carry ~1e-10 absolute noise, so
    components smaller than ~1e-6 cannot be resolved to 1e-4 relative error
    by any correct gradient. A genuinely wrong gradient still fails, since
    the floor only matters when analytic and numeric are both tiny.
    """
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    gap = np.abs(analytic - numeric)
    scale = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-6)
    return float(np.max(gap / scale))


def check_gradients(f, arrays, analytic_grads, tol=1e-4, h=1e-5):
    """Assert every analytic gradient matches central differences within tol."""
    for arr, grad in zip(arrays, analytic_grads):
        err = max_rel_error(grad, numerical_gradient(f, arr, h))
        assert err <= tol, f"gradient mismatch: rel error {err:.3e} > {tol}"
