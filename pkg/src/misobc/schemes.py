"""Achievable rates of the time-partitioning and power-partitioning schemes.

Noise variance is 1, so ``p`` is the transmit SNR. Rates are in bits per
channel use under Gaussian signalling, ``log2(1 + SINR)``.

Power rules (exponents from the DoF analysis, constants chosen here):

* time partitioning, phase 1: privates ``p**alpha / m`` each, common takes
  the rest ``p - p**alpha``; phase 2: the no-CSIT users share a degraded
  ladder over exponents ``[0, 1]``.
* power partitioning: the no-CSIT users get ``P0 = p - p**beta`` on a
  ladder over ``[beta, 1]``; the CSIT group gets the remaining block with
  privates ``min(p**alpha, block) / m`` each and the common symbol the
  rest. A common power below the noise level is dropped and folded into
  the privates.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .precoding import PrecoderSet


@dataclass(frozen=True)
class PowerSplit:
    p_common: float
    p_private: np.ndarray
    p_degraded: np.ndarray
    p0: float = 0.0
    q: np.ndarray = None

    @property
    def total(self):
        return float(self.p_common + np.sum(self.p_private) + np.sum(self.p_degraded))


@dataclass(frozen=True)
class TimePartitionConfig:
    b: float
    alpha: float

    def __post_init__(self):
        _check_unit("b", self.b)
        _check_unit("alpha", self.alpha)


@dataclass(frozen=True)
class PowerPartitionConfig:
    beta: float
    alpha: float

    def __post_init__(self):
        _check_unit("beta", self.beta)
        _check_unit("alpha", self.alpha)

    @property
    def a_exponent(self):
        return min(self.alpha, self.beta)


def _check_unit(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def _check_power(p):
    if p < 1:
        raise ValueError(f"power ladder needs p >= 1, got {p}")


def tp_phase1_power_split(p, alpha, m):
    _check_power(p)
    _check_unit("alpha", alpha)
    p_alpha = p ** alpha
    return PowerSplit(
        p_common=max(p - p_alpha, 0.0),
        p_private=np.full(m, p_alpha / m),
        p_degraded=np.zeros(0),
    )


def degraded_ladder(p, beta_floor, n0):
    """Superposition ladder for ``n0`` degraded layers above ``p**beta_floor``.

    Layer ``j`` (0-based, decoded first) spans the exponent band
    ``[1 - (j+1)w, 1 - j w]`` with ``w = (1 - beta_floor) / n0`` and gets
    power ``p**upper - p**lower``. Returns ``(powers, spans)``.
    """
    if n0 < 1:
        raise ValueError(f"need at least one layer, got n0={n0}")
    _check_power(p)
    _check_unit("beta_floor", beta_floor)
    width = (1.0 - beta_floor) / n0
    spans = [(1.0 - (j + 1) * width, 1.0 - j * width) for j in range(n0)]
    # pin the band edges to avoid round-off at the floor and at 1
    spans[0] = (spans[0][0], 1.0)
    spans[-1] = (beta_floor, spans[-1][1])
    powers = np.array([p ** hi - p ** lo for lo, hi in spans])
    return powers, spans


def pp_power_split(p, alpha, beta, m, n0, p0_override=None):
    """Power allocation of the power-partitioning scheme.

    With ``p0_override`` the no-CSIT group gets exactly that power, split
    with the nominal ladder proportions, and the CSIT group the remainder.
    """
    _check_power(p)
    _check_unit("alpha", alpha)
    _check_unit("beta", beta)
    ladder, _ = degraded_ladder(p, beta, n0)
    nominal = float(ladder.sum())
    q = ladder / nominal if nominal > 0 else np.full(n0, 1.0 / n0)
    if p0_override is None:
        p0 = nominal
        block = p ** beta
    else:
        p0 = float(p0_override)
        if p0 < 0 or p0 > p * (1 + 1e-12):
            raise ValueError(f"power budget violation: P0={p0} with total power {p}")
        block = max(p - p0, 0.0)
    private_total = min(p ** alpha, block)
    common = block - private_total
    if common < 1.0:
        private_total, common = block, 0.0
    return PowerSplit(
        p_common=common,
        p_private=np.full(m, private_total / m),
        p_degraded=p0 * q,
        p0=p0,
        q=q,
    )


@dataclass(frozen=True)
class RateBreakdown:
    """Per-user rate components; arrays may carry a leading trial axis.

    ``margins`` are the slacks (decoding capacity minus assigned rate) of
    every decodability constraint, common-symbol constraints first.
    """

    private: np.ndarray
    common_share: np.ndarray
    degraded: np.ndarray
    common_total: np.ndarray
    margins: np.ndarray

    FIELDS = ("private", "common_share", "degraded", "common_total", "margins")

    @property
    def total(self):
        return self.private + self.common_share + self.degraded

    def __getitem__(self, index):
        return RateBreakdown(*(getattr(self, f)[index] for f in self.FIELDS))

    def __len__(self):
        return self.private.shape[0]

    def reduce(self, fn):
        return RateBreakdown(*(fn(getattr(self, f)) for f in self.FIELDS))

    def to_json(self):
        out = {"total": np.asarray(self.total).tolist()}
        for f in self.FIELDS:
            out[f] = np.asarray(getattr(self, f)).tolist()
        return out


def _common_weights(weights, m):
    if weights is None:
        return np.full(m, 1.0 / m)
    w = np.asarray(weights, dtype=float)
    if w.shape != (m,) or np.any(w < 0) or not np.isclose(w.sum(), 1.0):
        raise ValueError("common weights must be m non-negative numbers summing to 1")
    return w


def _assemble(private, common, degraded, margins, m, weights):
    n = private.shape[0]
    zeros_k0 = np.zeros((n, degraded.shape[1]))
    zeros_ka = np.zeros((n, m))
    return RateBreakdown(
        private=np.concatenate([private, zeros_k0], axis=1),
        common_share=np.concatenate([common[:, None] * weights, zeros_k0], axis=1),
        degraded=np.concatenate([zeros_ka, degraded], axis=1),
        common_total=common,
        margins=margins,
    )


def gains_of(realization, precoders):
    """|h_k^H v_s|^2 over the batch, streams in kernel order."""
    return kernels.stream_gains(realization.true_channels, precoders.stacked())


def _batched(realization, precoders):
    if realization.true_channels.ndim == 3:
        return realization, precoders, False
    realization = type(realization)(
        realization.true_channels[None], realization.estimates[None],
        realization.errors[None], realization.error_variances)
    precoders = PrecoderSet(precoders.common[None], precoders.private[None],
                            precoders.degraded[None])
    return realization, precoders, True


def tp_rates_from_gains(gains, cfg, p, m, weights=None):
    n0 = gains.shape[1] - m
    split = tp_phase1_power_split(p, cfg.alpha, m)
    ladder, _ = degraded_ladder(p, 0.0, n0)
    priv, common, _, marg1 = kernels.layered_rates(
        gains, split.p_common, split.p_private, np.zeros(n0), m, False)
    _, _, degraded, marg2 = kernels.layered_rates(
        gains, 0.0, np.zeros(m), ladder, m, False)
    b = cfg.b
    margins = np.concatenate([b * marg1[:, :m], (1.0 - b) * marg2[:, m:]], axis=1)
    return _assemble(b * priv, b * common, (1.0 - b) * degraded, margins, m,
                     _common_weights(weights, m))


def pp_rates_from_gains(gains, cfg, p, m, p0_override=None, weights=None):
    n0 = gains.shape[1] - m
    split = pp_power_split(p, cfg.alpha, cfg.beta, m, n0, p0_override)
    priv, common, degraded, margins = kernels.layered_rates(
        gains, split.p_common, split.p_private, split.p_degraded, m, True)
    return _assemble(priv, common, degraded, margins, m, _common_weights(weights, m))


def tp_instant_rates(realization, cfg, p, precoders, weights=None):
    """Time-partitioning rates for one realisation (or a batch)."""
    _check_power(p)
    realization, precoders, single = _batched(realization, precoders)
    m = precoders.private.shape[-1]
    out = tp_rates_from_gains(gains_of(realization, precoders), cfg, p, m, weights)
    return out[0] if single else out


def pp_instant_rates(realization, cfg, p, precoders, p0_override=None, weights=None):
    """Power-partitioning rates for one realisation (or a batch)."""
    _check_power(p)
    realization, precoders, single = _batched(realization, precoders)
    m = precoders.private.shape[-1]
    out = pp_rates_from_gains(gains_of(realization, precoders), cfg, p, m,
                              p0_override, weights)
    return out[0] if single else out
