"""Vectorised numpy implementation of the hot kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``.
Arrays carry a leading trial axis ``n`` so one call covers a whole batch.

Stream layout used by :func:`stream_gains` and :func:`layered_rates`:
index 0 is the common symbol, ``1..m`` the private symbols of the CSIT
group and ``m+1..m+n0`` the degraded symbols of the no-CSIT group.
"""

import numpy as np

LN2 = np.log(2.0)
PHASE_TOL = 1e-12


def _phase_normalize(v):
    mag = np.abs(v)
    first = np.argmax(mag > PHASE_TOL, axis=1)
    rows = np.arange(v.shape[0])
    pivot = v[rows, first]
    pm = np.abs(pivot)
    rot = np.where(pm > PHASE_TOL, np.conj(pivot) / np.where(pm > 0, pm, 1.0), 1.0)
    return v * rot[:, None]


def _project_out(x, q, qmask):
    # two passes of modified Gram-Schmidt against the accepted columns
    for _ in range(2):
        for j in range(q.shape[1]):
            coef = np.einsum("nd,nd->n", q[:, j].conj(), x)
            x = x - np.where(qmask[:, j], coef, 0.0)[:, None] * q[:, j]
    return x


def null_directions(basis, rank_tol=1e-6):
    """Unit vectors orthogonal to each batch row's basis.

    ``basis`` has shape (n, r, d). Returns ``(out, ok)`` where ``out`` is
    (n, d) complex and ``ok[i]`` is False when the basis of row ``i`` spans
    the whole space.
    """
    basis = np.asarray(basis, dtype=np.complex128)
    n, r, d = basis.shape
    q = np.zeros((n, r, d), dtype=np.complex128)
    qmask = np.zeros((n, r), dtype=bool)
    for j in range(r):
        b = basis[:, j]
        bnorm = np.linalg.norm(b, axis=1)
        res = _project_out(b, q[:, :j], qmask[:, :j])
        rnorm = np.linalg.norm(res, axis=1)
        keep = (bnorm > 0) & (rnorm > rank_tol * bnorm)
        q[:, j] = np.where(keep[:, None], res / np.where(keep, rnorm, 1.0)[:, None], 0.0)
        qmask[:, j] = keep

    out = np.zeros((n, d), dtype=np.complex128)
    ok = np.zeros(n, dtype=bool)
    for i in range(d):
        probe = np.zeros((n, d), dtype=np.complex128)
        probe[:, i] = 1.0
        res = _project_out(probe, q, qmask)
        rnorm = np.linalg.norm(res, axis=1)
        take = (~ok) & (rnorm > rank_tol)
        out[take] = res[take] / rnorm[take, None]
        ok |= take
    return _phase_normalize(out), ok


def stream_gains(h, v):
    """|h_k^H v_s|^2 for every user k and stream s, shape (n, K, S)."""
    amp = np.einsum("nkm,nsm->nks", np.conj(h), v)
    return amp.real ** 2 + amp.imag ** 2


def _log2p1(x):
    return np.log1p(x) / LN2


def layered_rates(gains, p_common, p_private, p_degraded, m, k0_at_kalpha):
    """Per-trial rates of the superposed transmit structure.

    The no-CSIT layers are decoded first (layer 0 first) with all lower
    layers and the whole CSIT-group signal as noise. A layer's rate is the
    minimum over every receiver that must remove it: the intended user,
    the no-CSIT users of later layers and, when ``k0_at_kalpha`` is set,
    every CSIT-group user. The CSIT group then decodes the common symbol
    with the private symbols as noise, removes it, and decodes its own
    private symbol.

    Returns ``(private (n, m), common (n,), degraded (n, n0), margins)``.
    Margins are ``cap - assigned rate`` for each decodability constraint:
    first the m common constraints, then per layer the constraints of its
    required receivers in user order.
    """
    g = np.asarray(gains, dtype=np.float64)
    pp = np.asarray(p_private, dtype=np.float64)
    pd = np.asarray(p_degraded, dtype=np.float64)
    n, k, _ = g.shape
    n0 = pd.shape[0]

    priv_rx = g[:, :, 1:m + 1] * pp            # (n, K, m)
    priv_total = priv_rx.sum(axis=2)            # (n, K)
    alpha_block = p_common * g[:, :, 0] + priv_total

    deg_rx = g[:, :, m + 1:m + 1 + n0] * pd     # (n, K, n0)
    # power of layers strictly below each layer, summed bottom-up
    below = np.zeros_like(deg_rx)
    for layer in range(n0):
        for j in range(n0 - 1, layer, -1):
            below[:, :, layer] += deg_rx[:, :, j]

    degraded = np.zeros((n, n0))
    margin_blocks = []
    for layer in range(n0):
        rx = list(range(m)) if k0_at_kalpha else []
        rx += [m + j for j in range(layer, n0)]
        rx = np.array(rx, dtype=np.intp)
        sinr = deg_rx[:, rx, layer] / (1.0 + below[:, rx, layer] + alpha_block[:, rx])
        caps = _log2p1(sinr)
        rate = caps.min(axis=1)
        degraded[:, layer] = rate
        margin_blocks.append(caps - rate[:, None])

    own = np.diagonal(priv_rx[:, :m, :], axis1=1, axis2=2)   # (n, m)
    if p_common > 0:
        sinr_c = p_common * g[:, :m, 0] / (1.0 + priv_total[:, :m])
        caps_c = _log2p1(sinr_c)
        common = caps_c.min(axis=1)
        margin_blocks.insert(0, caps_c - common[:, None])
    else:
        common = np.zeros(n)
        margin_blocks.insert(0, np.zeros((n, m)))

    private = _log2p1(own / (1.0 + priv_total[:, :m] - own))
    margins = np.concatenate(margin_blocks, axis=1)
    return private, common, degraded, margins
