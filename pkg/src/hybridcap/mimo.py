"""Multi-antenna sum-rate primitives (b/s/Hz).

Uplink channels are passed as ``l x U`` matrices whose columns are the
per-user receive vectors; downlink channels as ``U x l`` matrices whose rows
are the per-user row vectors.
"""

import numpy as np

__all__ = ["log2det", "mac_sum_rate", "sic_stream_rates", "bc_dual_sum_rate"]


def log2det(a):
    """``log2 det(a)`` for a Hermitian positive-definite matrix.

    Raises ``LinAlgError`` when the Cholesky factorization fails.
    """
    c = np.linalg.cholesky(a)
    return float(2.0 * np.sum(np.log2(np.abs(np.diagonal(c)))))


def _powers(powers, count):
    p = np.broadcast_to(np.asarray(powers, dtype=float), (count,))
    if np.any(p < 0):
        raise ValueError("powers must be nonnegative")
    return p


def mac_sum_rate(h, powers, k):
    """Joint-decoding sum rate ``log2 det(I + K^-1 H diag(p) H^H)``.

    Parameters
    ----------
    h : (l, U) complex array
        Receive vectors of the ``U`` users.
    powers : float or (U,) array
        Transmit powers.
    k : (l, l) complex array
        Interference-plus-noise covariance.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape[1] == 0:
        return 0.0
    p = _powers(powers, h.shape[1])
    s = (h * p) @ h.conj().T
    return log2det(k + s) - log2det(k)


def sic_stream_rates(h, powers, k):
    """Per-user rates of MMSE receivers with successive cancellation.

    Users are decoded in column order: user ``i`` sees users ``0..i-1``
    cancelled and users ``i+1..`` as noise, and is detected with the MMSE
    filter ``v_i = (K + sum_{j>i} p_j h_j h_j^H)^-1 h_i``.
    """
    h = np.asarray(h, dtype=complex)
    u = h.shape[1]
    p = _powers(powers, u)
    rates = np.empty(u)
    # covariance seen by the last user, grown backwards
    a = np.array(k, dtype=complex)
    for i in range(u - 1, -1, -1):
        hi = h[:, i]
        v = np.linalg.solve(a, hi)
        signal = p[i] * abs(np.vdot(v, hi)) ** 2
        noise = np.vdot(v, a @ v).real
        rates[i] = np.log2(1.0 + signal / noise) if noise > 0 else 0.0
        a = a + p[i] * np.outer(hi, hi.conj())
    return rates


def bc_dual_sum_rate(g, powers, noise):
    """DPC sum rate reached through the dual multiple-access channel.

    Parameters
    ----------
    g : (U, l) complex array
        Downlink row channels.
    powers : float or (U,) array
        Dual uplink powers; their sum is the BS power budget.
    noise : float or (U,) array
        Noise-plus-interference power at each user.

    Returns
    -------
    float
        ``log2 det(I_l + sum_k p_k g_k^H g_k / noise_k)``.
    """
    g = np.asarray(g, dtype=complex)
    u, l = g.shape
    if u == 0:
        return 0.0
    p = _powers(powers, u)
    w = p / np.broadcast_to(np.asarray(noise, dtype=float), (u,))
    s = (g.conj().T * w) @ g
    return log2det(np.eye(l) + s)
