"""Slow per-realisation rate model written out receiver by receiver.

Serves as an oracle for the batched kernels: every SINR is formed from
explicit received powers |h^H v|^2 P, with no shared arrays.
"""

import math


def rx_power(h, v, p):
    amp = sum(hc.conjugate() * vc for hc, vc in zip(h, v))
    return p * abs(amp) ** 2


def log2p1(x):
    return math.log2(1.0 + x)


def rates(h, common_v, private_v, degraded_v, p_common, p_private, p_degraded, m,
          k0_at_kalpha):
    """Returns (private list, common, degraded list) for one realisation."""
    k = len(h)
    n0 = len(degraded_v)

    def alpha_block(u):
        total = rx_power(h[u], common_v, p_common)
        for i in range(m):
            total += rx_power(h[u], private_v[i], p_private[i])
        return total

    degraded = []
    for layer in range(n0):
        receivers = (list(range(m)) if k0_at_kalpha else []) + [m + j for j in range(layer, n0)]
        caps = []
        for u in receivers:
            below = sum(rx_power(h[u], degraded_v[j], p_degraded[j]) for j in range(layer + 1, n0))
            sig = rx_power(h[u], degraded_v[layer], p_degraded[layer])
            caps.append(log2p1(sig / (1.0 + below + alpha_block(u))))
        degraded.append(min(caps))

    if p_common > 0:
        caps = []
        for u in range(m):
            interf = sum(rx_power(h[u], private_v[i], p_private[i]) for i in range(m))
            caps.append(log2p1(rx_power(h[u], common_v, p_common) / (1.0 + interf)))
        common = min(caps)
    else:
        common = 0.0

    private = []
    for u in range(m):
        own = rx_power(h[u], private_v[u], p_private[u])
        interf = sum(rx_power(h[u], private_v[i], p_private[i]) for i in range(m) if i != u)
        private.append(log2p1(own / (1.0 + interf)))
    return private, common, degraded
