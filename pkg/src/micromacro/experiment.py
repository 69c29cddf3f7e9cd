"""Micro-Macro trials, coincidence tallies and the figures of merit.

Trials are generated in fixed-size blocks.  Block ``b`` of scan point ``k``
draws from the stream ``(seed, stream_id(namespace, k, b))``, so the tallies
depend only on the configuration and never on the worker count.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .dense import build_dense_state, photon_statistics
from .detection import (
    DetectionParams,
    OFOutcome,
    ideal_difference_array,
    ideal_parity_array,
    pm_response,
    thin_binomial,
)
from .entanglement import bell_diagonal_state, minimal_v1, wootters_concurrence
from .macrostate import GainParams, MacroLabel, make_gain, wrap_phase
from .rng import RngStream, as_generator, stream_id
from .sampling import (
    AliceOutcome,
    MarginalTables,
    build_marginal_tables,
    draw_indices,
    occupations_from_indices,
)

# Equatorial phase of each analysis basis: 2 -> R/L (R = (H - iV)/sqrt2), 3 -> +/-.
BASIS_PHASE = {2: 1.5 * math.pi, 3: 0.0}


class Discriminator(str, Enum):
    ORTHOGONALITY_FILTER = "orthogonality_filter"
    IDEAL_PARITY = "ideal_parity"
    IDEAL_DIFFERENCE = "ideal_difference"


class NoDataError(RuntimeError):
    """An estimator was asked for a value with no events to base it on."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One run of the apparatus.

    ``trials`` counts trials per scan point.  When ``threshold_multiple`` is
    set the filter threshold is that multiple of the mean detected arm signal
    measured over the run's own trial pool; otherwise ``detection.threshold``
    is used as an absolute value.  ``decorrelate`` replaces Alice's reported
    outcome with an independent fair coin (separable control).
    ``ideal_difference`` analyses both sides in the H/V basis with the dense
    oracle; the equatorial phases are ignored there.
    """

    gain: GainParams
    detection: DetectionParams = field(default_factory=DetectionParams)
    phi_B: float = 0.0
    phi_A_list: Tuple[float, ...] = (0.0,)
    trials: int = 100_000
    seed: int = 0
    discriminator: Discriminator = Discriminator.ORTHOGONALITY_FILTER
    threshold_multiple: Optional[float] = 8.0
    block_size: int = 1 << 16
    workers: int = 1
    decorrelate: bool = False
    table_epsilon: float = 1e-12
    dense_cutoff: int = 40

    def __post_init__(self):
        if isinstance(self.gain, (int, float)):
            object.__setattr__(self, "gain", make_gain(self.gain))
        object.__setattr__(self, "discriminator", Discriminator(self.discriminator))
        object.__setattr__(self, "phi_A_list", tuple(float(p) for p in self.phi_A_list))
        if self.trials <= 0:
            raise ValueError("trials must be > 0")
        if not self.phi_A_list:
            raise ValueError("phi_A_list must not be empty")
        if not all(math.isfinite(p) for p in self.phi_A_list + (self.phi_B,)):
            raise ValueError("scan phases must be finite")
        if self.block_size <= 0 or self.workers <= 0:
            raise ValueError("block_size and workers must be > 0")
        if self.threshold_multiple is not None and self.threshold_multiple < 0:
            raise ValueError("threshold_multiple must be >= 0")


@dataclass(frozen=True)
class CoincidenceCounts:
    n_pp: int = 0
    n_pm: int = 0
    n_mp: int = 0
    n_mm: int = 0
    n_inconclusive: int = 0
    n_total: int = 0

    def __post_init__(self):
        vals = (self.n_pp, self.n_pm, self.n_mp, self.n_mm, self.n_inconclusive, self.n_total)
        if any(v < 0 for v in vals):
            raise ValueError("counts must be nonnegative")
        if self.triggered > self.n_total:
            raise ValueError("more recorded events than trials")

    @property
    def conclusive(self) -> int:
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm

    @property
    def triggered(self) -> int:
        return self.conclusive + self.n_inconclusive

    def __add__(self, other: "CoincidenceCounts") -> "CoincidenceCounts":
        return CoincidenceCounts(*(a + b for a, b in zip(self.as_tuple(), other.as_tuple())))

    def as_tuple(self):
        return (self.n_pp, self.n_pm, self.n_mp, self.n_mm, self.n_inconclusive, self.n_total)

    @classmethod
    def from_row(cls, row, n_total: int) -> "CoincidenceCounts":
        r = [int(v) for v in row]
        return cls(r[_kernels.PP], r[_kernels.PM], r[_kernels.MP], r[_kernels.MM],
                   r[_kernels.INCONCLUSIVE], int(n_total))


@dataclass(frozen=True)
class VisibilityEstimate:
    value: float
    stderr: float
    basis: Optional[int] = None


@dataclass(frozen=True)
class TrialBatch:
    """Raw per-trial data.  ``alice`` is +1/-1, or 0 for an untriggered trial.

    ``occ_plus``/``occ_minus`` are photon numbers before loss in Bob's
    analysis pair; ``det_*`` are PM signals.  ``bob`` carries the ideal
    discriminator's verdict and is ``None`` for the orthogonality filter,
    which is applied later so one pool can be re-filtered per threshold.
    """

    alice: np.ndarray
    perp: np.ndarray
    occ_plus: np.ndarray
    occ_minus: np.ndarray
    det_plus: np.ndarray
    det_minus: np.ndarray
    bob: Optional[np.ndarray] = None


@dataclass(frozen=True)
class TrialRecord:
    alice: Optional[AliceOutcome]
    bob: OFOutcome
    detected_plus: float
    detected_minus: float


@lru_cache(maxsize=16)
def _tables(g: float, eps: float) -> MarginalTables:
    return build_marginal_tables(make_gain(g), eps)


@lru_cache(maxsize=8)
def _hv_grids(g: float, cutoff: int):
    """Normalised cumulative H/V photon tables for the amplified |H> and |V>."""
    gain = make_gain(g)
    s = 1.0 / math.sqrt(2.0)
    out = []
    for sign in (1.0, -1.0):
        st = build_dense_state([(s, MacroLabel.plus(0.0)), (sign * s, MacroLabel.plus(math.pi))],
                               gain, cutoff)
        cdf = np.cumsum(photon_statistics(st).ravel())
        cdf.setflags(write=False)
        out.append(cdf)
    return tuple(out)


def _mixture_parallel_prob(phi_A: float, phi_B: float, alice: np.ndarray) -> np.ndarray:
    half = 0.5 * (phi_B - phi_A)
    s2, c2 = math.sin(half) ** 2, math.cos(half) ** 2
    return np.where(alice > 0, s2, c2)


def simulate_block(config: ExperimentConfig, phi_A: float, rng, n: int) -> TrialBatch:
    """Simulate ``n`` trials at Alice phase ``phi_A``."""
    gen = as_generator(rng)
    det = config.detection
    u = gen.random((n, 4))
    # the outcome that steers Bob's state
    alice = np.where(u[:, 0] < 0.5, 1, -1).astype(np.int8)
    reported = alice
    if config.decorrelate:
        reported = np.where(gen.random(n) < 0.5, 1, -1).astype(np.int8)
    if det.eta_A < 1.0:
        reported = np.where(gen.random(n) < det.eta_A, reported, 0).astype(np.int8)

    if config.discriminator is Discriminator.IDEAL_DIFFERENCE:
        # H/V analysis on both sides: Alice H (+1) leaves Bob in the amplified |V>
        cdf_h, cdf_v = _hv_grids(config.gain.g, config.dense_cutoff)
        size = config.dense_cutoff + 1
        perp = alice > 0
        flat = np.where(perp,
                        _kernels.cdf_lookup(cdf_v, u[:, 2] * cdf_v[-1]),
                        _kernels.cdf_lookup(cdf_h, u[:, 2] * cdf_h[-1]))
        occ_plus, occ_minus = np.divmod(flat, size)
    else:
        w_par = _mixture_parallel_prob(phi_A, config.phi_B, alice)
        perp = u[:, 1] >= w_par
        i, j = draw_indices(_tables(config.gain.g, config.table_epsilon), u[:, 2], u[:, 3])
        occ_plus, occ_minus = occupations_from_indices(i, j, perp)

    cnt_plus = thin_binomial(occ_plus, det.eta_B, gen)
    cnt_minus = thin_binomial(occ_minus, det.eta_B, gen)
    det_plus = pm_response(cnt_plus, det, gen)
    det_minus = pm_response(cnt_minus, det, gen)

    bob = None
    if config.discriminator is Discriminator.IDEAL_PARITY:
        bob = ideal_parity_array(cnt_plus)
    elif config.discriminator is Discriminator.IDEAL_DIFFERENCE:
        bob = ideal_difference_array(cnt_plus, cnt_minus)
    return TrialBatch(reported, perp, occ_plus, occ_minus, det_plus, det_minus, bob)


def single_trial_threshold(config: ExperimentConfig) -> float:
    """Threshold for isolated trials: relative thresholds use the expected arm signal."""
    if config.threshold_multiple is None:
        return config.detection.threshold
    mean_total = 4.0 * config.gain.mbar + 1.0
    return config.threshold_multiple * 0.5 * config.detection.eta_B * mean_total


def run_trial(config: ExperimentConfig, phi_A: float, rng) -> TrialRecord:
    b = simulate_block(config, phi_A, rng, 1)
    a = int(b.alice[0])
    if b.bob is not None:
        bob = OFOutcome(int(b.bob[0]))
    else:
        t = single_trial_threshold(config)
        d = b.det_plus[0] - b.det_minus[0]
        bob = OFOutcome.PLUS if d > t else OFOutcome.MINUS if -d > t else OFOutcome.INCONCLUSIVE
    return TrialRecord(AliceOutcome(a) if a else None, bob,
                       float(b.det_plus[0]), float(b.det_minus[0]))


# --------------------------------------------------------------------------
# pooled runs
# --------------------------------------------------------------------------

@dataclass
class _Tally:
    counts: np.ndarray           # (T, 5)
    accepted_signal: np.ndarray  # (T,)
    n_total: int
    n_triggered: int
    signal_sum: float
    signal_sumsq: float

    def __iadd__(self, other):
        self.counts = self.counts + other.counts
        self.accepted_signal = self.accepted_signal + other.accepted_signal
        self.n_total += other.n_total
        self.n_triggered += other.n_triggered
        self.signal_sum += other.signal_sum
        self.signal_sumsq += other.signal_sumsq
        return self


def _tally_outcomes(alice, bob, total_signal):
    keep = alice != 0
    a, b, tot = alice[keep], bob[keep], total_signal[keep]
    row = np.zeros((1, 5), dtype=np.int64)
    row[0, _kernels.PP] = np.count_nonzero((a > 0) & (b > 0))
    row[0, _kernels.PM] = np.count_nonzero((a > 0) & (b < 0))
    row[0, _kernels.MP] = np.count_nonzero((a < 0) & (b > 0))
    row[0, _kernels.MM] = np.count_nonzero((a < 0) & (b < 0))
    row[0, _kernels.INCONCLUSIVE] = np.count_nonzero(b == 0)
    return row, np.array([tot[b != 0].sum()])


def _block_tally(config, namespace, point, phi_A, block, n, thresholds):
    batch = simulate_block(config, phi_A, RngStream(config.seed, stream_id(namespace, point, block)), n)
    trig = batch.alice != 0
    tot = batch.det_plus + batch.det_minus
    t_tot = tot[trig]
    if thresholds is None:
        counts, acc = np.zeros((0, 5), dtype=np.int64), np.zeros(0)
    elif batch.bob is not None:
        counts, acc = _tally_outcomes(batch.alice, batch.bob, tot)
    else:
        counts, acc = _kernels.classify_counts(batch.alice, batch.det_plus, batch.det_minus,
                                               np.asarray(thresholds, dtype=np.float64))
    return _Tally(counts, acc, n, int(trig.sum()), float(t_tot.sum()), float((t_tot ** 2).sum()))


def _map(config, fn, tasks):
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def _block_plan(config):
    plan = []
    for k, phi in enumerate(config.phi_A_list):
        remaining, b = config.trials, 0
        while remaining > 0:
            n = min(config.block_size, remaining)
            plan.append((k, phi, b, n))
            remaining -= n
            b += 1
    return plan


@dataclass(frozen=True)
class PoolResult:
    """Per-threshold, per-phase coincidence tallies from one trial pool."""

    config: ExperimentConfig
    thresholds: np.ndarray                       # absolute thresholds applied
    counts: List[List[CoincidenceCounts]]        # [threshold][phase]
    accepted_signal: np.ndarray                  # [threshold][phase] sum of det_plus + det_minus
    n_triggered: np.ndarray                      # [phase]
    signal_sum: np.ndarray                       # [phase]
    signal_sumsq: np.ndarray                     # [phase]
    mean_arm_signal: float

    def pooled_counts(self, t: int = 0) -> CoincidenceCounts:
        out = CoincidenceCounts()
        for c in self.counts[t]:
            out = out + c
        return out


def run_pool(config: ExperimentConfig, thresholds: Optional[Sequence[float]] = None,
             relative: Optional[bool] = None, namespace: int = 0) -> PoolResult:
    """Run every scan point and tally against one or more thresholds.

    ``thresholds`` defaults to the config's single threshold.  With
    ``relative`` (default: whether the config uses a threshold multiple) the
    values are multiples of the mean detected arm signal, measured over this
    pool in a first pass that regenerates the identical trials.
    """
    if thresholds is None:
        if config.threshold_multiple is not None:
            thresholds, relative = [config.threshold_multiple], True
        else:
            thresholds, relative = [config.detection.threshold], False
    elif relative is None:
        relative = config.threshold_multiple is not None
    thresholds = np.asarray(thresholds, dtype=np.float64)
    if thresholds.ndim != 1 or thresholds.size == 0 or np.any(thresholds < 0):
        raise ValueError("thresholds must be a nonempty list of nonnegative values")
    plan = _block_plan(config)
    n_pts = len(config.phi_A_list)
    uses_filter = config.discriminator is Discriminator.ORTHOGONALITY_FILTER

    def run(th):
        parts = _map(config, lambda t: _block_tally(config, namespace, *t, th), plan)
        per_point = [None] * n_pts
        for (k, *_), part in zip(plan, parts):
            if per_point[k] is None:
                per_point[k] = part
            else:
                per_point[k] += part
        return per_point

    mean_arm = math.nan
    if relative and uses_filter:
        calib = run(None)
        trig = sum(t.n_triggered for t in calib)
        if trig == 0:
            raise NoDataError("no triggered trials to calibrate the threshold")
        mean_arm = sum(t.signal_sum for t in calib) / (2.0 * trig)
        abs_thresholds = thresholds * mean_arm
    else:
        abs_thresholds = thresholds
    per_point = run(abs_thresholds if uses_filter else np.zeros(1))
    trig = sum(t.n_triggered for t in per_point)
    if trig:
        mean_arm = sum(t.signal_sum for t in per_point) / (2.0 * trig)
    n_thr = abs_thresholds.size if uses_filter else 1
    counts = [[CoincidenceCounts.from_row(per_point[k].counts[m], per_point[k].n_total)
               for k in range(n_pts)] for m in range(n_thr)]
    if not uses_filter:
        counts = counts * abs_thresholds.size
    acc = np.array([[per_point[k].accepted_signal[min(m, n_thr - 1)] for k in range(n_pts)]
                    for m in range(abs_thresholds.size)])
    return PoolResult(
        config=config,
        thresholds=abs_thresholds,
        counts=counts,
        accepted_signal=acc,
        n_triggered=np.array([t.n_triggered for t in per_point]),
        signal_sum=np.array([t.signal_sum for t in per_point]),
        signal_sumsq=np.array([t.signal_sumsq for t in per_point]),
        mean_arm_signal=mean_arm,
    )


@dataclass(frozen=True)
class FringeScan:
    phi_A: Tuple[float, ...]
    counts: List[CoincidenceCounts]
    threshold: float
    pool: PoolResult


def run_fringe_scan(config: ExperimentConfig, namespace: int = 0) -> FringeScan:
    pool = run_pool(config, namespace=namespace)
    return FringeScan(config.phi_A_list, pool.counts[0], float(pool.thresholds[0]), pool)


# --------------------------------------------------------------------------
# estimators
# --------------------------------------------------------------------------

def estimate_visibility(counts: CoincidenceCounts, basis: Optional[int] = None) -> VisibilityEstimate:
    """|P(++) + P(--) - P(+-) - P(-+)| over conclusive events only."""
    n = counts.conclusive
    if n == 0:
        raise NoDataError("no conclusive events; lower the threshold or run more trials")
    e = (counts.n_pp + counts.n_mm - counts.n_pm - counts.n_mp) / n
    v = abs(e)
    return VisibilityEstimate(v, math.sqrt(max(0.0, 1.0 - e * e) / n), basis)


def s_statistic(vs: Sequence[VisibilityEstimate]) -> Tuple[float, float]:
    """Sum of visibilities over distinct bases; absent bases contribute 0."""
    if not 1 <= len(vs) <= 3:
        raise ValueError("need one to three visibility estimates")
    bases = [v.basis for v in vs if v.basis is not None]
    if len(set(bases)) != len(bases):
        raise ValueError(f"duplicate bases in {bases}")
    s = math.fsum(v.value for v in vs)
    err = math.sqrt(math.fsum(v.stderr ** 2 for v in vs))
    return s, err


def filtering_probability(counts: CoincidenceCounts) -> Tuple[float, float]:
    """Fraction of triggered trials that pass the filter, with binomial error."""
    if counts.n_total <= 0:
        raise ValueError("no trials")
    n = counts.triggered
    if n == 0:
        raise NoDataError("no triggered trials")
    p = counts.conclusive / n
    return p, math.sqrt(p * (1.0 - p) / n)


def inferred_source_photons(records: TrialBatch, eta: float, threshold: Optional[float] = None):
    """Mean of (det_plus + det_minus) / eta with its standard error.

    With ``threshold`` only filter-accepted triggered trials enter; without
    it, every triggered trial does.
    """
    if not eta > 0:
        raise ValueError("eta must be > 0")
    keep = records.alice != 0
    if threshold is not None:
        d = records.det_plus - records.det_minus
        keep &= np.abs(d) > threshold
    tot = (records.det_plus + records.det_minus)[keep] / eta
    if tot.size == 0:
        raise NoDataError("no accepted trials")
    err = tot.std(ddof=1) / math.sqrt(tot.size) if tot.size > 1 else math.nan
    return float(tot.mean()), float(err)


def pooled_inferred_photons(pool: PoolResult, eta: float, t: int = 0):
    """(unfiltered mean, its stderr, accepted mean) of source photons from pooled sums."""
    n = int(pool.n_triggered.sum())
    if n == 0:
        raise NoDataError("no triggered trials")
    s = float(pool.signal_sum.sum())
    ss = float(pool.signal_sumsq.sum())
    mean = s / n
    var = max(0.0, ss / n - mean * mean) * n / max(1, n - 1)
    n_acc = sum(c.conclusive for c in pool.counts[t])
    acc = float(pool.accepted_signal[t].sum()) / n_acc / eta if n_acc else math.nan
    return mean / eta, math.sqrt(var / n) / eta, acc


# --------------------------------------------------------------------------
# fringe fitting
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FringeFit:
    offset: float
    amplitude: float
    phase: float
    r2: float
    period: float
    period_err: float


def fit_fringe(phases: Sequence[float], y: Sequence[float]) -> FringeFit:
    """Least-squares fit y = A + B cos(phi + delta), plus a free-period refit."""
    from scipy.optimize import curve_fit

    phi = np.asarray(phases, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    X = np.column_stack([np.ones_like(phi), np.cos(phi), np.sin(phi)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    a, c, s = coef
    amp = math.hypot(c, s)
    delta = math.atan2(-s, c)
    resid = y - X @ coef
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 0.0

    period, period_err = math.nan, math.nan
    if phi.size >= 5 and amp > 0:
        model = lambda x, A, B, w, d: A + B * np.cos(w * x + d)
        try:
            popt, pcov = curve_fit(model, phi, y, p0=[a, amp, 1.0, delta], maxfev=10_000)
            w, w_err = popt[2], math.sqrt(max(0.0, pcov[2, 2]))
            period = 2 * math.pi / abs(w)
            period_err = period * w_err / abs(w)
        except RuntimeError:
            pass
    return FringeFit(float(a), float(amp), wrap_phase(delta), r2, period, period_err)


# --------------------------------------------------------------------------
# witness and sweep
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessResult:
    V2: VisibilityEstimate
    V3: VisibilityEstimate
    S: float
    S_err: float
    p_filter: float
    p_filter_err: float
    inferred_N_unfiltered: float
    inferred_N_unfiltered_err: float
    inferred_N_accepted: float
    thresholds: Tuple[float, float]
    V1_min: float
    concurrence: float
    pools: Tuple[PoolResult, PoolResult]

    @property
    def significance(self) -> float:
        if self.S_err == 0:
            return math.inf if self.S > 1 else (0.0 if self.S == 1 else -math.inf)
        return (self.S - 1.0) / self.S_err

    @property
    def violated(self) -> bool:
        return self.significance >= 3.0


def basis_config(config: ExperimentConfig, basis: int) -> ExperimentConfig:
    phi = BASIS_PHASE[basis]
    return replace(config, phi_B=phi, phi_A_list=(phi,))


def _bell_concurrence(v2: float, v3: float) -> Tuple[float, float]:
    v1 = minimal_v1(v2, v3)
    return v1, wootters_concurrence(bell_diagonal_state(v1, v2, v3))


def run_witness(config: ExperimentConfig) -> WitnessResult:
    """Same-basis runs in the R/L and +/- bases and the separability statistic."""
    pools = tuple(run_pool(basis_config(config, b), namespace=b) for b in (2, 3))
    vis = [estimate_visibility(p.counts[0][0], b) for p, b in zip(pools, (2, 3))]
    s, s_err = s_statistic(vis)
    pooled = pools[0].counts[0][0] + pools[1].counts[0][0]
    p, p_err = filtering_probability(pooled)
    eta = config.detection.eta_B
    un, un_err, acc = (math.nan, math.nan, math.nan)
    if eta > 0:
        stats = [pooled_inferred_photons(pl, eta) for pl in pools]
        n = [int(pl.n_triggered.sum()) for pl in pools]
        un = (stats[0][0] * n[0] + stats[1][0] * n[1]) / sum(n)
        un_err = math.sqrt(sum((st[1] * k) ** 2 for st, k in zip(stats, n))) / sum(n)
        n_acc = [pl.counts[0][0].conclusive for pl in pools]
        if sum(n_acc):
            acc = float(sum(pl.accepted_signal[0].sum() for pl in pools)) / sum(n_acc) / eta
    v1, conc = _bell_concurrence(min(1.0, vis[0].value), min(1.0, vis[1].value))
    return WitnessResult(vis[0], vis[1], s, s_err, p, p_err, un, un_err, acc,
                         (float(pools[0].thresholds[0]), float(pools[1].thresholds[0])),
                         v1, conc, pools)


@dataclass(frozen=True)
class SweepPoint:
    threshold: float
    absolute_threshold: Tuple[float, float]
    p: float
    p_err: float
    V2: float
    V2_err: float
    V3: float
    V3_err: float
    S: float
    S_err: float


def threshold_sweep(config: ExperimentConfig, thresholds: Sequence[float],
                    relative: Optional[bool] = None) -> List[SweepPoint]:
    """Re-filter one shared trial pool per basis at every threshold."""
    thresholds = [float(t) for t in thresholds]
    if any(t < 0 for t in thresholds) or thresholds != sorted(thresholds):
        raise ValueError("thresholds must be nonnegative and sorted")
    pools = [run_pool(basis_config(config, b), thresholds, relative, namespace=b) for b in (2, 3)]
    out = []
    for m, t in enumerate(thresholds):
        c2, c3 = pools[0].counts[m][0], pools[1].counts[m][0]
        p, p_err = filtering_probability(c2 + c3)
        try:
            v2, v3 = estimate_visibility(c2, 2), estimate_visibility(c3, 3)
            s, s_err = s_statistic([v2, v3])
            vals = (v2.value, v2.stderr, v3.value, v3.stderr, s, s_err)
        except NoDataError:
            vals = (math.nan,) * 6
        out.append(SweepPoint(t, (float(pools[0].thresholds[m]), float(pools[1].thresholds[m])),
                              p, p_err, *vals))
    return out
