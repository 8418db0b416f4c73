"""Zero-forcing private precoders and random unit precoders.

All precoders are unit norm with their first nonzero entry real-positive,
so outputs are reproducible; rates do not depend on that phase.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import SUB_COMMON, SUB_DEGRADED
from .numerics import RANK_TOL, SeededRng, standard_cn, unit_rows


@dataclass(frozen=True)
class PrecoderSet:
    """Precoders of one realisation, or a batch with a leading trial axis."""

    common: np.ndarray     # (..., m)
    private: np.ndarray    # (..., m, m), row k serves CSIT user k
    degraded: np.ndarray   # (..., k - m, m)

    def stacked(self):
        """All streams in kernel order: common, privates, degraded."""
        common = self.common[..., None, :]
        return np.concatenate([common, self.private, self.degraded], axis=-2)


def zf_private_precoders(estimates):
    """ZF precoder per CSIT user, orthogonal to the other users' estimates.

    ``estimates`` is (m, m) or batched (n, m, m); row k is user k's
    estimate. With m = 1 the precoder is the user's own estimate direction
    (e_1 when that estimate is zero).
    """
    est = np.asarray(estimates, dtype=np.complex128)
    single = est.ndim == 2
    if single:
        est = est[None]
    n, m, dim = est.shape
    if m != dim:
        raise ValueError(f"need m estimates of dimension m, got {m} of dimension {dim}")

    if m == 1:
        v = est.copy()
        zero = np.linalg.norm(v[:, 0], axis=1) == 0
        v[zero, 0] = 1.0
        out = unit_rows(v)
    else:
        others = np.array([[j for j in range(m) if j != k] for k in range(m)])
        basis = est[:, others, :].reshape(n * m, m - 1, dim)
        v, ok = kernels.null_directions(basis, RANK_TOL)
        if not ok.all():
            raise ValueError("no null direction")
        out = v.reshape(n, m, dim)
    return out[0] if single else out


def random_unit_precoders(count, dim, rng, substream=SUB_COMMON):
    """``count`` independent vectors uniform on the complex unit sphere."""
    if count < 1 or dim < 1:
        raise ValueError(f"count and dim must be >= 1, got {count}, {dim}")
    gen = rng.generator(substream) if isinstance(rng, SeededRng) else rng
    return unit_rows(standard_cn(gen, (count, dim)))


def build_precoders(realization, draws):
    """Batch of precoder sets from channel estimates and standard draws."""
    return PrecoderSet(
        common=unit_rows(draws.common),
        private=zf_private_precoders(realization.estimates[:, : draws.common.shape[1]]),
        degraded=unit_rows(draws.degraded),
    )


def draw_precoders(estimates, rng, n0):
    """Precoder set for one realisation; random parts from ``rng``'s sub-streams."""
    m = estimates.shape[-1]
    return PrecoderSet(
        common=random_unit_precoders(1, m, rng, SUB_COMMON)[0],
        private=zf_private_precoders(estimates[:m]),
        degraded=random_unit_precoders(n0, m, rng, SUB_DEGRADED),
    )
