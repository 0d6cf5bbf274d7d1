"""Reference computations that do not share code with the package."""

import numpy as np


def random_channel(rng, l, u, scale=1.0):
    return scale * (rng.normal(size=(l, u)) + 1j * rng.normal(size=(l, u))) / np.sqrt(2)


def dpc_from_mac(h, p, noise):
    """Explicit DPC downlink matching an uplink with SIC in column order.

    The uplink decodes user 0 first.  The downlink encodes in the reverse
    order, so user ``k`` is interfered only by users ``j < k``.  Beams are
    the unit-norm uplink MMSE filters; downlink powers are solved user by
    user so every downlink SINR equals its uplink counterpart.

    Returns the downlink powers and the downlink sum rate (bits), computed
    from the downlink SINRs.
    """
    l, u = h.shape
    beams, targets = [], []
    for k in range(u):
        a = noise * np.eye(l) + sum(p[j] * np.outer(h[:, j], h[:, j].conj()) for j in range(k + 1, u))
        f = np.linalg.solve(a, h[:, k])
        beams.append(f / np.linalg.norm(f))
        targets.append(p[k] * np.real(h[:, k].conj() @ f))
    g = h.conj().T  # downlink rows
    q = np.zeros(u)
    for k in range(u):
        interference = sum(q[j] * abs(g[k] @ beams[j]) ** 2 for j in range(k))
        q[k] = targets[k] * (noise + interference) / abs(g[k] @ beams[k]) ** 2
    rates = []
    for k in range(u):
        interference = sum(q[j] * abs(g[k] @ beams[j]) ** 2 for j in range(k))
        rates.append(np.log2(1 + q[k] * abs(g[k] @ beams[k]) ** 2 / (noise + interference)))
    return q, float(np.sum(rates))
