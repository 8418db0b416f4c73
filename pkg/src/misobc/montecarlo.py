"""Ergodic rates, SNR sweeps, DoF slopes and the P0 rate-matching experiment.

Trial ``t`` always draws from the Philox key ``(base_seed, t)``, so a batch
gives the same numbers whether it is computed serially or in chunks on a
thread pool. Per-trial arrays are concatenated in trial order before any
reduction.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import StandardDraws, SystemConfig, draw_standard, realize
from .precoding import build_precoders
from .schemes import (
    PowerPartitionConfig,
    RateBreakdown,
    TimePartitionConfig,
    pp_rates_from_gains,
    tp_rates_from_gains,
)
from . import kernels

log = logging.getLogger(__name__)

CHUNK = 2048
SCHEMES = ("tp", "pp")


def db_to_power(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def _chunks(trials):
    return [range(lo, min(lo + CHUNK, trials)) for lo in range(0, trials, CHUNK)]


def _map(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


class TrialBatch:
    """Standard draws for ``trials`` trials plus a cache of stream gains.

    Draws depend only on ``(m, k)``, so one batch serves every SNR, gain
    offset and scheme of a paired comparison.
    """

    def __init__(self, m, k, base_seed, trials, workers=1):
        if trials < 1:
            raise ValueError(f"trials must be >= 1, got {trials}")
        shape_cfg = SystemConfig(m, k, 0.0)
        parts = _map(lambda r: draw_standard(shape_cfg, base_seed, r), _chunks(trials), workers)
        self.draws = StandardDraws(*(np.concatenate(x) for x in zip(
            *((d.estimate, d.error, d.common, d.degraded) for d in parts))))
        self.m, self.k, self.base_seed, self.trials = m, k, base_seed, trials
        self._gains = {}

    def gains(self, cfg, p):
        key = (cfg.alpha, cfg.gain_db, float(p))
        if key not in self._gains:
            real = realize(cfg, p, self.draws)
            pre = build_precoders(real, self.draws)
            self._gains[key] = kernels.stream_gains(real.true_channels, pre.stacked())
        return self._gains[key]


@dataclass(frozen=True)
class SweepSpec:
    alpha: float
    scheme: str
    partition: float
    snr_points_db: tuple
    trials: int = 10_000
    base_seed: int = 0
    m: int = 2
    k: int = 3
    gain_db: tuple = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        snr = tuple(float(x) for x in self.snr_points_db)
        if not snr or any(b <= a for a, b in zip(snr, snr[1:])):
            raise ValueError("SNR points must be non-empty and strictly increasing")
        object.__setattr__(self, "snr_points_db", snr)
        if not 0.0 <= self.partition <= 1.0:
            raise ValueError(f"partition must lie in [0, 1], got {self.partition}")
        object.__setattr__(self, "gain_db", self.system.gain_db)

    @property
    def system(self):
        return SystemConfig(self.m, self.k, self.alpha, self.gain_db)

    @property
    def scheme_config(self):
        if self.scheme == "tp":
            return TimePartitionConfig(self.partition, self.alpha)
        return PowerPartitionConfig(self.partition, self.alpha)


@dataclass(frozen=True)
class ErgodicReport:
    """Averaged rate breakdowns (and standard errors) per SNR point."""

    spec: SweepSpec
    mean: tuple
    stderr: tuple
    trials: int
    sum_stderr: tuple = field(default=())

    @property
    def snr_db(self):
        return self.spec.snr_points_db

    def at(self, i):
        spec = replace(self.spec, snr_points_db=(self.spec.snr_points_db[i],))
        return ErgodicReport(spec, (self.mean[i],), (self.stderr[i],), self.trials,
                             (self.sum_stderr[i],))

    def sum_rate_kalpha(self, i=0):
        return float(np.sum(self.mean[i].total[: self.spec.m]))


def scheme_rates(scheme, gains, cfg, p, m, p0_override=None):
    if isinstance(cfg, TimePartitionConfig):
        return tp_rates_from_gains(gains, cfg, p, m)
    return pp_rates_from_gains(gains, cfg, p, m, p0_override)


def _summarize(rates, m):
    n = len(rates)
    mean = rates.reduce(lambda a: a.mean(axis=0))
    if n > 1:
        stderr = rates.reduce(lambda a: a.std(axis=0, ddof=1) / np.sqrt(n))
        sum_se = float(rates.total[:, :m].sum(axis=1).std(ddof=1) / np.sqrt(n))
    else:
        stderr = rates.reduce(np.zeros_like)[0]
        sum_se = 0.0
    return mean, stderr, sum_se


def _concat(parts):
    return RateBreakdown(*(np.concatenate([getattr(p, f) for p in parts])
                           for f in RateBreakdown.FIELDS))


def ergodic_rates(spec, workers=1):
    """Average per-trial rates of ``spec`` at every SNR point."""
    cfg = spec.system
    scfg = spec.scheme_config
    powers = db_to_power(spec.snr_points_db)
    for p in powers:
        if p < 1:
            raise ValueError(f"SNR points must be >= 0 dB, got {10 * np.log10(p):.3g} dB")

    def run(trial_range):
        draws = draw_standard(cfg, spec.base_seed, trial_range)
        out = []
        for p in powers:
            real = realize(cfg, p, draws)
            gains = kernels.stream_gains(real.true_channels, build_precoders(real, draws).stacked())
            out.append(scheme_rates(spec.scheme, gains, scfg, p, spec.m))
        return out

    per_chunk = _map(run, _chunks(spec.trials), workers)
    means, errs, sums = [], [], []
    for i in range(len(powers)):
        mean, se, sum_se = _summarize(_concat([c[i] for c in per_chunk]), spec.m)
        means.append(mean)
        errs.append(se)
        sums.append(sum_se)
    return ErgodicReport(spec, tuple(means), tuple(errs), spec.trials, tuple(sums))


def dof_slope(report_lo, report_hi):
    """Per-user rate slope between two single-SNR reports, in DoF units."""
    if len(report_lo.snr_db) != 1 or len(report_hi.snr_db) != 1:
        raise ValueError("dof_slope takes single-SNR reports; use report.at(i)")
    p1, p2 = db_to_power(report_lo.snr_db[0]), db_to_power(report_hi.snr_db[0])
    if p2 <= p1:
        raise ValueError(f"need P2 > P1, got P1={p1:g}, P2={p2:g}")
    return (report_hi.mean[0].total - report_lo.mean[0].total) / (np.log2(p2) - np.log2(p1))


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class Calibration:
    p0: float
    rate: float
    iterations: int


def _pp_user_rate(batch, cfg, pp_cfg, p, user, p0):
    rates = pp_rates_from_gains(batch.gains(cfg, p), pp_cfg, p, cfg.m, p0)
    return float(rates.total[:, user].mean())


def calibrate(batch, cfg, pp_cfg, p, user, target_rate, tol=1e-3, max_iter=40):
    """Bisection on log P0 so that ``user``'s ergodic PP rate hits ``target_rate``.

    The search runs over ``(0, p - p**beta]``. The rate is checked to be
    non-decreasing on a coarse P0 grid before bisecting.
    """
    if target_rate < 0:
        raise ValueError(f"target rate must be non-negative, got {target_rate}")
    if not cfg.m <= user < cfg.k:
        raise ValueError(f"user {user} is not in the no-CSIT group")
    if target_rate <= tol:
        return Calibration(0.0, 0.0, 0)

    def rate(p0):
        return _pp_user_rate(batch, cfg, pp_cfg, p, user, p0)

    hi = p - p ** pp_cfg.beta
    if hi <= 0:
        raise CalibrationError("infeasible target: no power left for the no-CSIT group")
    r_hi = rate(hi)
    if abs(r_hi - target_rate) <= tol:
        return Calibration(hi, r_hi, 0)
    if r_hi < target_rate:
        raise CalibrationError(
            f"infeasible target: {target_rate:.6g} bits/use exceeds {r_hi:.6g} at P0={hi:.6g}")

    grid = hi * np.logspace(-6, 0, 9)
    curve = [rate(x) for x in grid]
    if np.any(np.diff(curve) < -1e-12):
        raise CalibrationError("rate is not monotone in P0 on this batch")

    lo, r_lo = hi * 1e-12, None
    r_lo = rate(lo)
    if r_lo > target_rate + tol:
        raise CalibrationError("target below the search range")
    best = (abs(r_hi - target_rate), hi, r_hi)
    log_lo, log_hi = np.log(lo), np.log(hi)
    for it in range(1, max_iter + 1):
        mid = float(np.exp(0.5 * (log_lo + log_hi)))
        r_mid = rate(mid)
        best = min(best, (abs(r_mid - target_rate), mid, r_mid))
        if abs(r_mid - target_rate) <= tol:
            return Calibration(mid, r_mid, it)
        if r_mid < target_rate:
            log_lo = np.log(mid)
        else:
            log_hi = np.log(mid)
    raise CalibrationError(
        f"bisection did not reach {tol} bits/use in {max_iter} iterations "
        f"(closest {best[2]:.6g} at P0={best[1]:.6g})")


def calibrate_p0(target_user, target_rate, pp_cfg, p, trials, seed, m=2, k=3,
                 gain_db=None, tol=1e-3, batch=None):
    """P0 for which ``target_user``'s ergodic PP rate matches ``target_rate``."""
    cfg = SystemConfig(m, k, pp_cfg.alpha, gain_db)
    if batch is None:
        batch = TrialBatch(m, k, seed, trials)
    return calibrate(batch, cfg, pp_cfg, p, target_user, target_rate, tol).p0


FIG3_COLUMNS = ("snr_db", "scheme", "offset_db")


@dataclass(frozen=True)
class Fig3Row:
    snr_db: float
    scheme: str
    offset_db: float
    rates: tuple
    sum_rate_kalpha: float
    stderr: float
    p0: float = None
    calibrated: bool = None


def _row(snr, scheme, offset, rates, m, p0=None, calibrated=None):
    mean, _, sum_se = _summarize(rates, m)
    return Fig3Row(float(snr), scheme, float(offset), tuple(float(x) for x in mean.total),
                   float(np.sum(mean.total[:m])), sum_se, p0, calibrated)


def fig3_experiment(alpha, b, snr_grid_db, offsets_db, trials, seed, m=2, k=3,
                    workers=1, target_user=None, tol=1e-3):
    """Paired TP/PP comparison with the no-CSIT user's rate held equal.

    For every offset (gain of the no-CSIT users relative to the CSIT group)
    and SNR: time partitioning runs at ``b``; power partitioning runs at
    ``beta = b`` with P0 calibrated so that ``target_user`` (default: the
    first no-CSIT user) gets its TP rate. Both schemes use the same draws.
    When the target exceeds what ``P0 = p - p**beta`` gives, P0 is clamped
    there and the row is flagged ``calibrated=False``.
    """
    user = m if target_user is None else target_user
    batch = TrialBatch(m, k, seed, trials, workers)
    tp_cfg = TimePartitionConfig(b, alpha)
    pp_cfg = PowerPartitionConfig(b, alpha)
    rows = []
    for offset in offsets_db:
        cfg = SystemConfig(m, k, alpha, (0.0,) * m + (float(offset),) * (k - m))
        tp_rows, pp_rows = [], []
        for snr in snr_grid_db:
            p = float(db_to_power(snr))
            gains = batch.gains(cfg, p)
            tp = tp_rates_from_gains(gains, tp_cfg, p, m)
            target = float(tp.total[:, user].mean())
            try:
                cal = calibrate(batch, cfg, pp_cfg, p, user, target, tol)
                p0, ok = cal.p0, True
            except CalibrationError as err:
                log.warning("offset %s dB, SNR %s dB: %s", offset, snr, err)
                p0, ok = p - p ** b, False
            pp = pp_rates_from_gains(gains, pp_cfg, p, m, p0)
            tp_rows.append(_row(snr, "tp", offset, tp, m))
            pp_rows.append(_row(snr, "pp", offset, pp, m, p0, ok))
        rows += tp_rows + pp_rows
    return rows


def report_rows(report):
    """Sweep report flattened into rows shaped like the fig3 table."""
    spec = report.spec
    offset = spec.gain_db[spec.m]
    rows = []
    for i, snr in enumerate(spec.snr_points_db):
        total = report.mean[i].total
        p0 = None
        if spec.scheme == "pp":
            p = float(db_to_power(snr))
            p0 = p - p ** spec.partition
        rows.append(Fig3Row(snr, spec.scheme, offset, tuple(float(x) for x in total),
                            float(np.sum(total[: spec.m])), report.sum_stderr[i], p0, None))
    return rows
