"""Complex-vector helpers and counter-based random streams.

Vectors are plain 1-D ``complex128`` numpy arrays.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

RANK_TOL = 1e-6
ORTH_TOL = 1e-9

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeededRng:
    """Key of a Philox stream: ``(seed, stream_id)``.

    Philox is counter based, so the samples depend only on the key and the
    sub-stream, never on how many other streams were consumed before.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= value <= _MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value}")

    def generator(self, substream=0):
        """numpy Generator for one of 2**64 disjoint sub-streams."""
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        counter = np.array([0, 0, substream, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key, counter=counter))


def as_vector(a):
    v = np.asarray(a, dtype=np.complex128)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    return v


def inner(a, b):
    """Inner product a^H b (conjugate-linear in ``a``)."""
    a, b = as_vector(a), as_vector(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    return complex(np.vdot(a, b))


def norm(a):
    return float(np.linalg.norm(as_vector(a)))


def _generator(rng):
    if isinstance(rng, SeededRng):
        return rng.generator()
    return rng


def standard_cn(gen, shape):
    """CN(0, 1) samples of the given shape drawn from ``gen``."""
    z = gen.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def sample_cn(dim, variance, rng):
    """Vector of i.i.d. circularly-symmetric CN(0, variance) entries.

    ``rng`` is a :class:`SeededRng` or an ``np.random.Generator``.
    """
    if variance < 0:
        raise ValueError(f"variance must be non-negative, got {variance}")
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return np.sqrt(variance) * standard_cn(_generator(rng), (dim,))


def unit_rows(x):
    """Normalise the last axis to unit norm, first nonzero entry real-positive."""
    x = np.asarray(x, dtype=np.complex128)
    flat = x.reshape(-1, x.shape[-1])
    nrm = np.linalg.norm(flat, axis=1)
    if np.any(nrm == 0):
        raise ValueError("cannot normalise a zero vector")
    flat = flat / nrm[:, None]
    first = np.argmax(np.abs(flat) > 1e-12, axis=1)
    pivot = flat[np.arange(flat.shape[0]), first]
    return (flat * (np.conj(pivot) / np.abs(pivot))[:, None]).reshape(x.shape)


def unit_orthogonal_complement(basis):
    """Deterministic unit vector orthogonal to every vector in ``basis``.

    Modified Gram-Schmidt over the basis, then over the canonical probes
    e_1, e_2, ...; the first probe whose residual norm exceeds ``RANK_TOL``
    is normalised. The first nonzero entry is made real-positive.
    """
    rows = [as_vector(b) for b in basis]
    if not rows:
        raise ValueError("basis must contain at least one vector")
    dim = rows[0].size
    if any(r.size != dim for r in rows):
        raise ValueError("basis vectors must share one dimension")
    if len(rows) >= dim:
        raise ValueError(f"no null direction: {len(rows)} basis vectors in dim {dim}")
    out, ok = kernels.null_directions(np.stack(rows)[None, :, :], RANK_TOL)
    if not ok[0]:
        raise ValueError("no null direction")
    return out[0]
