"""Closed-form DoF tuples, region polytopes, vertices and certificates.

Users are 0-based here (``0..m-1`` partial CSIT, ``m..k-1`` no CSIT);
labels on half-spaces use 1-based user numbers for display.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

TOL = 1e-9


def _check_dims(m, k):
    if m < 1 or k <= m:
        raise ValueError(f"need k > m >= 1, got m={m}, k={k}")


def _check_unit(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def tp_dof(b, alpha, m, k):
    """Per-user DoF of time partitioning with phase-1 fraction ``b``."""
    _check_dims(m, k)
    _check_unit("b", b)
    _check_unit("alpha", alpha)
    d_alpha = b * (1 + (m - 1) * alpha) / m
    return np.array([d_alpha] * m + [(1 - b) / (k - m)] * (k - m))


def pp_dof(beta, alpha, m, k):
    """Per-user DoF of power partitioning with partition ``beta``."""
    _check_dims(m, k)
    _check_unit("beta", beta)
    _check_unit("alpha", alpha)
    d_alpha = (beta + (m - 1) * min(alpha, beta)) / m
    return np.array([d_alpha] * m + [(1 - beta) / (k - m)] * (k - m))


def pp_gain_over_tp(b, alpha, m, k):
    """TP tuple at ``b`` and PP tuple at ``beta = b`` (same no-CSIT DoF)."""
    return tp_dof(b, alpha, m, k), pp_dof(b, alpha, m, k)


def strict_gain_users(tp, pp, tol=TOL):
    """0-based users whose PP DoF strictly exceeds their TP DoF."""
    return [i for i, (x, y) in enumerate(zip(tp, pp)) if y > x + tol]


@dataclass(frozen=True)
class HalfSpace:
    """``coeffs . d <= bound``."""

    coeffs: tuple
    bound: float
    label: str = ""

    def __post_init__(self):
        if not any(c != 0 for c in self.coeffs):
            raise ValueError("half-space coefficients must not all be zero")

    def slack(self, d):
        return self.bound - float(np.dot(self.coeffs, d))


@dataclass(frozen=True)
class Polytope:
    halfspaces: tuple
    dim: int
    A: np.ndarray = field(init=False, repr=False, compare=False)
    b: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        hs = tuple(self.halfspaces)
        if any(len(h.coeffs) != self.dim for h in hs):
            raise ValueError("half-space dimension mismatch")
        object.__setattr__(self, "halfspaces", hs)
        object.__setattr__(self, "A", np.array([h.coeffs for h in hs], dtype=float))
        object.__setattr__(self, "b", np.array([h.bound for h in hs], dtype=float))

    def to_json(self):
        return {
            "dim": self.dim,
            "rows": [
                {"label": h.label, "coeffs": list(h.coeffs), "bound": h.bound}
                for h in self.halfspaces
            ],
        }


def _subsets(users):
    for size in range(1, len(users) + 1):
        yield from combinations(users, size)


def subset_label(s):
    return "S={" + ",".join(str(i + 1) for i in s) + "}"


def _nonneg_rows(dim):
    rows = []
    for i in range(dim):
        c = [0.0] * dim
        c[i] = -1.0
        rows.append(HalfSpace(tuple(c), 0.0, f"d{i + 1}>=0"))
    return rows


def theorem1_region(m, k, alpha):
    """Optimum DoF region: non-negativity plus one row per nonempty S."""
    _check_dims(m, k)
    _check_unit("alpha", alpha)
    rows = _nonneg_rows(k)
    for s in _subsets(range(m)):
        c = [0.0] * k
        for i in s:
            c[i] = 1.0
        for i in range(m, k):
            c[i] = 1.0
        rows.append(HalfSpace(tuple(c), 1 + (len(s) - 1) * alpha, subset_label(s)))
    return Polytope(tuple(rows), k)


def lemma1_region(k, alpha):
    """Region of k users with common CSIT quality and as many antennas."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _check_unit("alpha", alpha)
    rows = _nonneg_rows(k)
    for s in _subsets(range(k)):
        c = [0.0] * k
        for i in s:
            c[i] = 1.0
        rows.append(HalfSpace(tuple(c), 1 + (len(s) - 1) * alpha, subset_label(s)))
    return Polytope(tuple(rows), k)


def tp_region(m, k, alpha):
    """Time-partitioning region written as a polytope.

    With ``s0`` the no-CSIT sum, each row ``sum_S d <= (1 - s0) c_S`` is
    linear: ``sum_S d + c_S s0 <= c_S``.
    """
    _check_dims(m, k)
    _check_unit("alpha", alpha)
    rows = _nonneg_rows(k)
    c = [0.0] * m + [1.0] * (k - m)
    rows.append(HalfSpace(tuple(c), 1.0, "K0 sum"))
    for s in _subsets(range(m)):
        cs = 1 + (len(s) - 1) * alpha
        c = [0.0] * k
        for i in s:
            c[i] = 1.0
        for i in range(m, k):
            c[i] = cs
        rows.append(HalfSpace(tuple(c), cs, subset_label(s)))
    return Polytope(tuple(rows), k)


def _as_tuple(d, dim):
    d = np.asarray(d, dtype=float)
    if d.shape != (dim,):
        raise ValueError(f"dimension mismatch: expected {dim} entries, got shape {d.shape}")
    return d


def violated_rows(poly, d, tol=TOL):
    d = _as_tuple(d, poly.dim)
    return [h.label for h in poly.halfspaces if h.slack(d) < -tol]


def contains(poly, d, tol=TOL):
    d = _as_tuple(d, poly.dim)
    return bool(np.all(poly.A @ d <= poly.b + tol))


def tight_rows(poly, d, tol=TOL):
    d = _as_tuple(d, poly.dim)
    return np.flatnonzero(np.abs(poly.A @ d - poly.b) <= tol)


def _combination_batches(n, r, size=200_000):
    """Index arrays of shape (<=size, r) covering every r-subset of range(n)."""
    it = combinations(range(n), r)
    while True:
        flat = np.fromiter((i for c in _take(it, size) for i in c), dtype=np.intp)
        if flat.size == 0:
            return
        yield flat.reshape(-1, r)


def _take(it, size):
    for _, item in zip(range(size), it):
        yield item


def is_bounded(poly, tol=TOL):
    """True when the recession cone ``{y : A y <= 0}`` is ``{0}``.

    A pointed cone is generated by its extreme rays, each the null vector
    of ``dim - 1`` independent rows; all such candidates are tested.
    """
    A, dim = poly.A, poly.dim
    if np.linalg.matrix_rank(A) < dim:
        return False
    if dim == 1:
        return bool(np.any(A[:, 0] > tol) and np.any(A[:, 0] < -tol))
    for idx in _combination_batches(len(A), dim - 1):
        _, sv, vh = np.linalg.svd(A[idx])
        full = sv[:, -1] > 1e-12
        rays = vh[full, -1, :]
        for y in (rays, -rays):
            if np.any(np.all(y @ A.T <= tol, axis=1)):
                return False
    return True


def enumerate_vertices(poly, tol=TOL):
    """All vertices, by solving every ``dim``-subset of rows as equalities.

    Returned sorted lexicographically, duplicates merged at ``tol``.
    """
    if poly.dim > 10:
        raise ValueError(f"vertex enumeration limited to dim <= 10, got {poly.dim}")
    if not is_bounded(poly, tol):
        raise ValueError("polytope is unbounded")
    A, b, dim = poly.A, poly.b, poly.dim
    candidates = []
    for idx in _combination_batches(len(A), dim):
        sub = A[idx]
        regular = np.abs(np.linalg.det(sub)) > 1e-12
        if not regular.any():
            continue
        x = np.linalg.solve(sub[regular], b[idx][regular][..., None])[..., 0]
        feasible = np.all(x @ A.T <= b + tol, axis=1)
        candidates.append(x[feasible])
    pts = np.concatenate(candidates) if candidates else np.zeros((0, dim))
    if len(pts):
        # group on a rounded key but keep a solved (unrounded) representative
        _, first = np.unique(np.round(pts, 9), axis=0, return_index=True)
        pts = pts[np.sort(first)]
    found = []
    for x in pts:
        if not any(np.max(np.abs(x - v)) <= tol for v in found):
            found.append(x)
    # snap round-off near integers and clear signed zeros
    found = [np.where(np.abs(v - np.round(v)) < 1e-12, np.round(v), v) + 0.0 for v in found]
    return sorted((tuple(float(x) for x in v) for v in found))


def tp_region_contains(m, k, alpha, d, tol=TOL):
    """Membership in the time-share of the K0 simplex and the CSIT-group region."""
    _check_dims(m, k)
    d = _as_tuple(d, k)
    if np.any(d < -tol):
        return False
    s0 = float(d[m:].sum())
    if s0 > 1 + tol:
        return False
    for s in _subsets(range(m)):
        if d[list(s)].sum() > (1 - s0) * (1 + (len(s) - 1) * alpha) + tol:
            return False
    return True


def converse_check(d, m, k, alpha, tol=TOL):
    """Sum-DoF outer bound over every nonempty user subset U."""
    _check_dims(m, k)
    d = _as_tuple(d, k)
    for u in _subsets(range(k)):
        n_alpha = sum(1 for i in u if i < m)
        if d[list(u)].sum() > 1 + alpha * max(n_alpha - 1, 0) + tol:
            return False
    return True


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class FacetCertificate:
    """Power-exponent and common-share assignment achieving a facet point.

    CSIT user ``i`` gets a private symbol at power exponent
    ``private_exponents[i]`` and a share ``common_shares[i]`` of the common
    symbol; the no-CSIT users split ``d_sigma = 1 - beta`` as ``k0_split``.
    """

    subset_s: tuple
    alpha: float
    beta: float
    private_exponents: tuple
    common_shares: tuple
    d_sigma: float
    k0_split: tuple

    def reconstruct(self):
        ka = np.add(self.private_exponents, self.common_shares)
        return np.concatenate([ka, self.k0_split])

    def check(self, tol=TOL):
        """Raise when the assignment is not a valid power-partitioning instance."""
        a_level = min(self.alpha, self.beta)
        problems = []
        if abs(self.beta + self.d_sigma - 1) > tol:
            problems.append("beta != 1 - d_sigma")
        if abs(sum(self.k0_split) - self.d_sigma) > tol:
            problems.append("no-CSIT split does not sum to d_sigma")
        if any(c < -tol for c in self.common_shares):
            problems.append("negative common share")
        if abs(sum(self.common_shares) - (self.beta - a_level)) > tol:
            problems.append("common shares do not sum to beta - min(alpha, beta)")
        if any(a > a_level + tol or a < -tol for a in self.private_exponents):
            problems.append("private exponent outside [0, min(alpha, beta)]")
        if problems:
            raise CertificateError("; ".join(problems))

    def to_json(self):
        return {
            "subset_s": [i + 1 for i in self.subset_s],
            "beta": self.beta,
            "private_exponents": list(self.private_exponents),
            "common_shares": list(self.common_shares),
            "d_sigma": self.d_sigma,
            "k0_split": list(self.k0_split),
        }


def facet_certificate(d, subset_s, m, k, alpha, tol=TOL):
    """Certificate for a point on the facet of ``subset_s`` (0-based users).

    Users in S get private exponent ``min(alpha, d_i)`` and the rest of
    their DoF as common share; users outside S get exponent ``d_i``.
    For |S| >= 2 the facet requires ``d_i >= alpha`` on S; for |S| = 1
    there is no lower bound and ``beta = d_j`` may fall below ``alpha``.
    """
    _check_dims(m, k)
    d = _as_tuple(d, k)
    s = tuple(sorted(set(int(i) for i in subset_s)))
    if not s or any(i < 0 or i >= m for i in s):
        raise CertificateError(f"subset must be a nonempty subset of users 1..{m}")
    poly = theorem1_region(m, k, alpha)
    bad = violated_rows(poly, d, tol)
    if bad:
        raise CertificateError(f"not a facet point: outside the region, violates {', '.join(bad)}")
    d_sigma = float(d[m:].sum())
    bound = 1 + (len(s) - 1) * alpha
    if abs(d[list(s)].sum() + d_sigma - bound) > tol:
        raise CertificateError(f"not a facet point: row {subset_label(s)} is not tight")

    problems = []
    if len(s) >= 2:
        problems += [f"d{i + 1} < alpha" for i in s if d[i] < alpha - tol]
    problems += [f"d{i + 1} > alpha" for i in range(m) if i not in s and d[i] > alpha + tol]
    if problems:
        raise CertificateError("facet conditions violated: " + ", ".join(problems))

    beta = 1.0 - d_sigma
    exps, shares = [], []
    for i in range(m):
        if i in s:
            a = min(alpha, float(d[i]))
            exps.append(a)
            shares.append(max(float(d[i]) - a, 0.0))
        else:
            exps.append(max(float(d[i]), 0.0))
            shares.append(0.0)
    cert = FacetCertificate(s, alpha, beta, tuple(exps), tuple(shares), d_sigma,
                            tuple(float(x) for x in d[m:]))
    cert.check(tol)
    return cert


def certify_vertex(v, m, k, alpha, tol=TOL):
    """First facet certificate found for ``v`` (subsets in size order), or None."""
    for s in _subsets(range(m)):
        try:
            return facet_certificate(v, s, m, k, alpha, tol)
        except CertificateError:
            continue
    return None


def convex_decomposition(poly, d, vertices=None, tol=TOL):
    """Write ``d`` as a convex combination of polytope vertices.

    Ray shooting: from a vertex of the minimal face containing ``d``, move
    through ``d`` to the face boundary and recurse on the exit point, which
    lies on a strictly smaller face. Returns ``[(weight, vertex), ...]``.
    """
    d = _as_tuple(d, poly.dim)
    bad = violated_rows(poly, d, tol)
    if bad:
        raise ValueError(f"point outside region, violates {', '.join(bad)}")
    if vertices is None:
        vertices = enumerate_vertices(poly, tol)
    verts = [np.array(v) for v in vertices]

    weights = {}

    def add(w, v):
        key = tuple(float(x) for x in v)
        weights[key] = weights.get(key, 0.0) + w

    scale = 1.0
    point = d
    for _ in range(poly.dim + 1):
        for v in verts:
            if np.max(np.abs(v - point)) <= tol:
                add(scale, v)
                return sorted(((w, v) for v, w in weights.items()), key=lambda x: (-x[0], x[1]))
        tight = tight_rows(poly, point, tol)
        face = [v for v in verts
                if np.all(np.abs(poly.A[tight] @ v - poly.b[tight]) <= tol)]
        start = next(v for v in face if np.max(np.abs(v - point)) > tol)
        u = point - start
        au = poly.A @ u
        slack = poly.b - poly.A @ point
        mask = au > tol
        mask[tight] = False
        if not mask.any():
            raise RuntimeError("ray left the polytope; vertex list incomplete?")
        t = max(float(np.min(slack[mask] / au[mask])), 0.0)
        exit_point = point + t * u
        add(scale * t / (1 + t), start)
        scale *= 1 / (1 + t)
        point = exit_point
    raise RuntimeError("decomposition did not terminate")
