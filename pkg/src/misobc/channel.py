"""Channel realisations under the scaled CSIT-error model.

Users ``0..m-1`` form the partial-CSIT group (quality ``alpha``) and users
``m..k-1`` the no-CSIT group. For a partial-CSIT user the error variance is
``min(1, P**-alpha)``; a no-CSIT user has error variance 1 and a zero
estimate. A per-user long-term gain ``g = 10**(gain_db/10)`` scales both
estimate and error variances.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .numerics import SeededRng, standard_cn

# sub-streams of a trial's Philox key
SUB_ESTIMATE = 0
SUB_ERROR = 1
SUB_COMMON = 2
SUB_DEGRADED = 3


class Group(str, Enum):
    ALPHA = "alpha"
    ZERO = "zero"


@dataclass(frozen=True)
class SystemConfig:
    m: int
    k: int
    alpha: float
    gain_db: tuple = field(default=None)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.k <= self.m:
            raise ValueError(f"overloaded regime needs k > m, got k={self.k}, m={self.m}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        gains = (0.0,) * self.k if self.gain_db is None else tuple(float(x) for x in self.gain_db)
        if len(gains) != self.k:
            raise ValueError(f"gain_db needs {self.k} entries, got {len(gains)}")
        object.__setattr__(self, "gain_db", gains)

    @property
    def n0(self):
        """Size of the no-CSIT group."""
        return self.k - self.m

    @property
    def gains(self):
        return 10.0 ** (np.asarray(self.gain_db) / 10.0)

    def group(self, user):
        return Group.ALPHA if user < self.m else Group.ZERO


def csit_error_variance(alpha, p, group):
    """Error variance of one user's channel estimate at power ``p``."""
    if p <= 0:
        raise ValueError(f"power must be positive, got {p}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if Group(group) is Group.ZERO:
        return 1.0
    return min(1.0, p ** (-alpha))


def error_variances(cfg, p):
    return np.array([csit_error_variance(cfg.alpha, p, cfg.group(u)) for u in range(cfg.k)])


@dataclass(frozen=True)
class StandardDraws:
    """Unit-variance samples behind a batch of trials.

    Channels at any power are obtained by scaling these, so one draw serves
    a whole SNR sweep and both schemes of a paired comparison.
    """

    estimate: np.ndarray   # (n, k, m) CN(0, 1)
    error: np.ndarray      # (n, k, m) CN(0, 1)
    common: np.ndarray     # (n, m) CN(0, 1)
    degraded: np.ndarray   # (n, k - m, m) CN(0, 1)

    def __len__(self):
        return self.estimate.shape[0]

    def take(self, index):
        index = np.atleast_1d(index)
        return StandardDraws(self.estimate[index], self.error[index],
                             self.common[index], self.degraded[index])


def draw_trial(cfg, rng):
    """Samples of one trial, each kind on its own sub-stream of ``rng``."""
    m, k = cfg.m, cfg.k
    return (
        standard_cn(rng.generator(SUB_ESTIMATE), (k, m)),
        standard_cn(rng.generator(SUB_ERROR), (k, m)),
        standard_cn(rng.generator(SUB_COMMON), (1, m))[0],
        standard_cn(rng.generator(SUB_DEGRADED), (k - m, m)),
    )


def draw_standard(cfg, base_seed, trials):
    """Draws for the given trial indices, trial ``t`` keyed ``(base_seed, t)``."""
    parts = [draw_trial(cfg, SeededRng(base_seed, int(t))) for t in trials]
    if not parts:
        raise ValueError("need at least one trial")
    return StandardDraws(*(np.stack(x) for x in zip(*parts)))


@dataclass(frozen=True)
class ChannelRealization:
    """True channels, estimates and errors; leading trial axis optional."""

    true_channels: np.ndarray
    estimates: np.ndarray
    errors: np.ndarray
    error_variances: np.ndarray

    def __getitem__(self, index):
        return ChannelRealization(self.true_channels[index], self.estimates[index],
                                  self.errors[index], self.error_variances)

    def to_json(self):
        def pairs(a):
            return np.stack([a.real, a.imag], axis=-1).tolist()

        return {
            "true_channels": pairs(self.true_channels),
            "estimates": pairs(self.estimates),
            "errors": pairs(self.errors),
            "error_variances": self.error_variances.tolist(),
        }


def realize(cfg, p, draws):
    """Scale standard draws into channels at power ``p``."""
    sigma2 = error_variances(cfg, p)
    g = cfg.gains
    est_scale = np.sqrt(g * (1.0 - sigma2))[None, :, None]
    err_scale = np.sqrt(g * sigma2)[None, :, None]
    estimates = est_scale * draws.estimate
    errors = err_scale * draws.error
    return ChannelRealization(estimates + errors, estimates, errors, sigma2)


def generate(cfg, p, rng):
    """One channel realisation at power ``p`` from the stream ``rng``."""
    if p <= 0:
        raise ValueError(f"power must be positive, got {p}")
    parts = draw_trial(cfg, rng)
    draws = StandardDraws(*(x[None] for x in parts))
    return realize(cfg, p, draws)[0]
