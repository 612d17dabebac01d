"""Path simulation and Monte Carlo estimates of every analytic quantity.

Simulation of the supremum time theta on an infinite horizon uses a
drawdown truncation rule: once the drawdown exceeds
``g = log(1/eps_tail)/Phi(0) + y_margin`` the supremum only increases
again with probability ``eps_tail * exp(-Phi(0) * y_margin)``, so the
path is cut there and flagged cleanly truncated. Paths that hit
``horizon_cap`` first are flagged unclean; estimators discard them (with
a logged count) and refuse to proceed if they exceed 1% of the sample.

Reproducibility: path ``p`` always draws from the substream
``SeedSequence(seed, spawn_key=(p,))``, and aggregation is by path index,
so results are bit-identical for any worker count.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from . import _kernels
from .families import (
    BrownianDrift,
    CompoundPoissonDrift,
    JumpDiffusion,
    expected_theta,
    phi,
)

__all__ = [
    "PathConfig",
    "SimulatedPath",
    "McEstimate",
    "ObjectiveEstimate",
    "SweepObjective",
    "SupremumFit",
    "OccupationEstimate",
    "SimulationQualityError",
    "cutoff_level",
    "simulate_path",
    "extract_theta",
    "reflected_first_passage",
    "estimate_theta",
    "estimate_objective",
    "sweep_objective",
    "estimate_supremum_cdf",
    "estimate_atom_mass",
    "occupation_histogram",
    "sqrt_dt_allowance",
]

logger = logging.getLogger(__name__)

MAX_UNCLEAN_FRACTION = 0.01

_EMPTY = np.empty(0, dtype=np.float64)


class SimulationQualityError(RuntimeError):
    """Too many paths hit horizon_cap before the drawdown cutoff."""


@dataclass(frozen=True)
class PathConfig:
    """Simulation controls.

    ``drawdown_cutoff`` is the tail probability eps_tail of the truncation
    rule (not a level); ``y_margin`` widens the cutoff level so that first
    passage over every threshold under study is observed before the cut.
    """

    dt: float = 1e-3
    horizon_cap: float = 10_000.0
    drawdown_cutoff: float = 1e-9
    y_margin: float = 0.0
    store_full_path: bool = False

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.horizon_cap > 0.0:
            raise ValueError(f"horizon_cap must be > 0, got {self.horizon_cap}")
        if not 0.0 < self.drawdown_cutoff <= 1e-3:
            raise ValueError(
                f"drawdown_cutoff must lie in (0, 1e-3], got {self.drawdown_cutoff}"
            )
        if self.y_margin < 0.0:
            raise ValueError(f"y_margin must be >= 0, got {self.y_margin}")


@dataclass(frozen=True)
class SimulatedPath:
    """One simulated path; arrays are None unless store_full_path was set."""

    times: object
    values: object
    running_sup: object
    theta_hat: float
    truncated_cleanly: bool
    end_time: float


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int


@dataclass(frozen=True)
class ObjectiveEstimate:
    """Monte Carlo value of E|theta - tau_y| for one threshold y.

    ``direct`` averages |theta_hat - tau_hat|; ``representation`` averages
    the payoff-integral form (the running integral of 2F(drawdown)-1 up to
    tau_hat, plus the analytic E[theta]); ``paired_gap`` is the per-path
    difference of the two, whose stderr is the sharp yardstick for their
    agreement.
    """

    y: float
    direct: McEstimate
    representation: McEstimate
    paired_gap: McEstimate
    n_discarded: int
    seed: int


@dataclass(frozen=True)
class SweepObjective:
    ys: np.ndarray
    estimates: tuple
    direct_matrix: np.ndarray
    repr_matrix: np.ndarray
    n_discarded: int
    seed: int

    def paired_difference(self, i, j):
        """McEstimate of E|theta-tau_{y_i}| - E|theta-tau_{y_j}| from shared paths."""
        return _mc(self.direct_matrix[:, i] - self.direct_matrix[:, j], self.seed)


@dataclass(frozen=True)
class SupremumFit:
    suprema: np.ndarray
    ks_statistic: float
    ks_pvalue: float
    mass_at_zero: float
    empirical_median: float
    phi0: float
    n: int
    n_discarded: int
    seed: int


@dataclass(frozen=True)
class OccupationEstimate:
    bin_edges: np.ndarray
    bin_means: np.ndarray
    bin_stderrs: np.ndarray
    atom: McEstimate
    passage_time: McEstimate
    n: int
    n_discarded: int
    seed: int


def cutoff_level(family, cfg, extra_margin=0.0):
    """Drawdown level ending a path: log(1/eps_tail)/Phi(0) plus the margin."""
    margin = max(cfg.y_margin, extra_margin)
    return math.log(1.0 / cfg.drawdown_cutoff) / phi(family, 0.0) + margin


def _substream(seed, p):
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(p),)))


def _parallel(n, workers, fn):
    if workers <= 1:
        for p in range(n):
            fn(p)
        return
    bounds = np.linspace(0, n, workers + 1).astype(np.int64)

    def run(lo, hi):
        for p in range(lo, hi):
            fn(p)

    with ThreadPoolExecutor(max_workers=workers) as ex:
        futures = [
            ex.submit(run, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for f in futures:
            f.result()


def _mc(values, seed):
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 samples for an estimate, got {n}")
    return McEstimate(
        mean=float(values.mean()),
        stderr=float(values.std(ddof=1) / math.sqrt(n)),
        n=int(n),
        seed=int(seed),
    )


def _clean_mask(clean, context):
    clean = np.asarray(clean, dtype=bool)
    n_bad = int((~clean).sum())
    frac = n_bad / clean.shape[0]
    if frac > MAX_UNCLEAN_FRACTION:
        raise SimulationQualityError(
            f"{context}: {n_bad}/{clean.shape[0]} paths hit horizon_cap before the "
            f"drawdown cutoff ({100 * frac:.2f}% > {100 * MAX_UNCLEAN_FRACTION:.0f}%); "
            "increase horizon_cap"
        )
    if n_bad:
        logger.warning("%s: discarding %d/%d unclean paths", context, n_bad, clean.shape[0])
    return clean


def _sweep_kernel_call(family, gen, cfg, cut, phi0, ys, want_l, taus, ls):
    if isinstance(family, BrownianDrift):
        return _kernels.bm_sweep(
            gen, family.mu, family.sigma, cfg.dt, cut, cfg.horizon_cap, phi0, ys, want_l, taus, ls
        )
    if isinstance(family, JumpDiffusion):
        return _kernels.jd_sweep(
            gen, family.mu, family.sigma, family.lam, family.eta,
            cfg.dt, cut, cfg.horizon_cap, phi0, ys, want_l, taus, ls,
        )
    if isinstance(family, CompoundPoissonDrift):
        return _kernels.cp_sweep(
            gen, family.mu, family.lam, family.eta, cut, cfg.horizon_cap, phi0, ys, want_l, taus, ls
        )
    raise TypeError(f"unsupported family: {family!r}")


def simulate_path(family, cfg, seed, path_index=0):
    """One path from the substream (seed, path_index).

    With cfg.store_full_path, all epochs (grid points plus exact jump
    epochs; pre- and post-jump values share an epoch) are recorded and
    returned; otherwise only the summary fields are filled. Either way the
    same substream yields the identical path.
    """
    cut = cutoff_level(family, cfg)
    phi0 = phi(family, 0.0)
    if not cfg.store_full_path:
        gen = _substream(seed, path_index)
        taus = np.empty(0)
        theta, sup, t_end, clean = _sweep_kernel_call(
            family, gen, cfg, cut, phi0, _EMPTY, False, taus, taus
        )
        return SimulatedPath(None, None, None, float(theta), bool(clean), float(t_end))

    capacity = 1 << 14
    while True:
        times = np.empty(capacity)
        values = np.empty(capacity)
        sups = np.empty(capacity)
        gen = _substream(seed, path_index)
        if isinstance(family, BrownianDrift):
            theta, sup, t_end, clean, n_rec = _kernels.bm_store(
                gen, family.mu, family.sigma, cfg.dt, cut, cfg.horizon_cap, times, values, sups
            )
        elif isinstance(family, JumpDiffusion):
            theta, sup, t_end, clean, n_rec = _kernels.jd_store(
                gen, family.mu, family.sigma, family.lam, family.eta,
                cfg.dt, cut, cfg.horizon_cap, times, values, sups,
            )
        elif isinstance(family, CompoundPoissonDrift):
            theta, sup, t_end, clean, n_rec = _kernels.cp_store(
                gen, family.mu, family.lam, family.eta, cut, cfg.horizon_cap, times, values, sups
            )
        else:
            raise TypeError(f"unsupported family: {family!r}")
        if n_rec >= 0:
            return SimulatedPath(
                times[:n_rec].copy(),
                values[:n_rec].copy(),
                sups[:n_rec].copy(),
                float(theta),
                bool(clean),
                float(t_end),
            )
        capacity *= 2
        if capacity > 1 << 27:
            raise MemoryError("path exceeds storage bounds; lower horizon_cap or raise dt")


def extract_theta(path, allow_unclean=False):
    """First epoch at which the running supremum equals its final value."""
    if not path.truncated_cleanly and not allow_unclean:
        raise SimulationQualityError(
            "theta estimate from a path that hit horizon_cap is biased low; "
            "increase horizon_cap or pass allow_unclean=True"
        )
    if path.times is None:
        return path.theta_hat
    final = path.running_sup[-1]
    idx = int(np.argmax(path.running_sup >= final))
    return float(path.times[idx])


def reflected_first_passage(path, y):
    """First epoch with drawdown >= y, or None if never reached ("open")."""
    if y < 0.0:
        raise ValueError(f"y must be >= 0, got {y}")
    if path.times is None:
        raise ValueError("reflected_first_passage needs store_full_path=True")
    hits = np.nonzero(path.running_sup - path.values >= y)[0]
    if hits.size == 0:
        return None
    return float(path.times[hits[0]])


def _summaries(family, n, cfg, seed, workers, extra_margin=0.0):
    cut = cutoff_level(family, cfg, extra_margin)
    phi0 = phi(family, 0.0)
    theta = np.empty(n)
    sup = np.empty(n)
    end = np.empty(n)
    clean = np.empty(n, dtype=bool)

    def one(p):
        gen = _substream(seed, p)
        taus = np.empty(0)
        theta[p], sup[p], end[p], clean[p] = _sweep_kernel_call(
            family, gen, cfg, cut, phi0, _EMPTY, False, taus, taus
        )

    _parallel(n, workers, one)
    return theta, sup, end, clean


def estimate_theta(family, n, cfg, seed, workers=1):
    """Monte Carlo mean of the supremum-time estimate theta_hat."""
    theta, _, _, clean = _summaries(family, n, cfg, seed, workers)
    mask = _clean_mask(clean, "estimate_theta")
    return _mc(theta[mask], seed)


def sweep_objective(family, ys, n, cfg, seed, workers=1):
    """E|theta - tau_y| for several thresholds evaluated on shared paths.

    Sharing paths across the sweep makes between-threshold comparisons
    paired, which is what resolves the minimum near y*.
    """
    ys = np.atleast_1d(np.asarray(ys, dtype=np.float64))
    if n < 100:
        raise ValueError(f"n must be >= 100, got {n}")
    if np.any(ys < 0.0):
        raise ValueError("thresholds must be >= 0")
    order = np.argsort(ys, kind="stable")
    ys_sorted = np.ascontiguousarray(ys[order])
    cut = cutoff_level(family, cfg, extra_margin=float(ys_sorted[-1]))
    phi0 = phi(family, 0.0)
    etheta = expected_theta(family)
    nys = ys.shape[0]
    taus = np.empty((n, nys))
    payoff = np.empty((n, nys))
    theta = np.empty(n)
    clean = np.empty(n, dtype=bool)

    def one(p):
        gen = _substream(seed, p)
        trow = np.empty(nys)
        lrow = np.empty(nys)
        theta[p], _, _, clean[p] = _sweep_kernel_call(
            family, gen, cfg, cut, phi0, ys_sorted, True, trow, lrow
        )
        taus[p] = trow
        payoff[p] = lrow

    _parallel(n, workers, one)
    mask = _clean_mask(clean, "sweep_objective")
    n_disc = int(n - mask.sum())
    inv = np.empty_like(order)
    inv[order] = np.arange(nys)
    taus_c = taus[mask][:, inv]
    payoff_c = payoff[mask][:, inv]
    direct = np.abs(theta[mask][:, None] - taus_c)
    representation = payoff_c + etheta
    estimates = []
    for j in range(nys):
        estimates.append(
            ObjectiveEstimate(
                y=float(ys[j]),
                direct=_mc(direct[:, j], seed),
                representation=_mc(representation[:, j], seed),
                paired_gap=_mc(direct[:, j] - representation[:, j], seed),
                n_discarded=n_disc,
                seed=int(seed),
            )
        )
    return SweepObjective(
        ys=ys,
        estimates=tuple(estimates),
        direct_matrix=direct,
        repr_matrix=representation,
        n_discarded=n_disc,
        seed=int(seed),
    )


def estimate_objective(family, y, n, cfg, seed, workers=1):
    """Monte Carlo E|theta - tau_y| with its payoff-representation companion."""
    return sweep_objective(family, [y], n, cfg, seed, workers=workers).estimates[0]


def estimate_supremum_cdf(family, n, cfg, seed, workers=1):
    """Empirical law of the ultimate supremum against Exp(Phi(0))."""
    if n < 1000:
        raise ValueError(f"n must be >= 1000, got {n}")
    _, sup, _, clean = _summaries(family, n, cfg, seed, workers)
    mask = _clean_mask(clean, "estimate_supremum_cdf")
    sups = np.sort(sup[mask])
    phi0 = phi(family, 0.0)
    ks = stats.kstest(sups, "expon", args=(0.0, 1.0 / phi0))
    return SupremumFit(
        suprema=sups,
        ks_statistic=float(ks.statistic),
        ks_pvalue=float(ks.pvalue),
        mass_at_zero=float(np.mean(sups == 0.0)),
        empirical_median=float(np.median(sups)),
        phi0=phi0,
        n=int(sups.shape[0]),
        n_discarded=int(n - mask.sum()),
        seed=int(seed),
    )


def estimate_atom_mass(family, n, cfg, seed, workers=1):
    """Fraction of paths whose supremum is exactly 0.

    Each path stops as soon as it goes positive (then its supremum is not
    0) or reaches drawdown log(1/eps_tail)/Phi(0) below the start (then it
    stays negative except with probability eps_tail), so fine grids are
    affordable here. The compound Poisson family rises at slope mu > 0
    immediately, so its mass is identically zero with no simulation.
    """
    if isinstance(family, CompoundPoissonDrift):
        return McEstimate(mean=0.0, stderr=0.0, n=int(n), seed=int(seed))
    g = math.log(1.0 / cfg.drawdown_cutoff) / phi(family, 0.0)
    never = np.empty(n, dtype=bool)
    clean = np.empty(n, dtype=bool)

    def one(p):
        gen = _substream(seed, p)
        if isinstance(family, BrownianDrift):
            never[p], clean[p] = _kernels.bm_never_positive(
                gen, family.mu, family.sigma, cfg.dt, g, cfg.horizon_cap
            )
        else:
            never[p], clean[p] = _kernels.jd_never_positive(
                gen, family.mu, family.sigma, family.lam, family.eta,
                cfg.dt, g, cfg.horizon_cap,
            )

    _parallel(n, workers, one)
    mask = _clean_mask(clean, "estimate_atom_mass")
    frac = never[mask].astype(np.float64)
    return _mc(frac, seed) if frac.shape[0] >= 2 else McEstimate(0.0, 0.0, 0, int(seed))


def occupation_histogram(family, y, a, bins, n, cfg, seed, workers=1):
    """Mean occupation time of the reflected process per bin before first
    passage over a, plus the mean time spent at exactly 0 (nonzero only for
    the compound Poisson family, which sits at its maximum for stretches)."""
    if not a > 0.0:
        raise ValueError(f"a must be > 0, got {a}")
    if not 0.0 <= y < a:
        raise ValueError(f"y must lie in [0, a), got {y}")
    if bins < 10:
        raise ValueError(f"bins must be >= 10, got {bins}")
    width = a / bins
    edges = np.linspace(0.0, a, bins + 1)
    occ = np.zeros((n, bins))
    atom = np.zeros(n)
    passage = np.empty(n)
    clean = np.empty(n, dtype=bool)

    def one(p):
        gen = _substream(seed, p)
        row = occ[p]
        if isinstance(family, BrownianDrift):
            passage[p], clean[p] = _kernels.bm_occupation(
                gen, family.mu, family.sigma, cfg.dt, y, a, width, bins, cfg.horizon_cap, row
            )
        elif isinstance(family, JumpDiffusion):
            passage[p], clean[p] = _kernels.jd_occupation(
                gen, family.mu, family.sigma, family.lam, family.eta,
                cfg.dt, y, a, width, bins, cfg.horizon_cap, row,
            )
        elif isinstance(family, CompoundPoissonDrift):
            passage[p], atom[p], clean[p] = _kernels.cp_occupation(
                gen, family.mu, family.lam, family.eta, y, a, width, bins, cfg.horizon_cap, row
            )
        else:
            raise TypeError(f"unsupported family: {family!r}")

    _parallel(n, workers, one)
    mask = _clean_mask(clean, "occupation_histogram")
    occ_c = occ[mask]
    n_clean = occ_c.shape[0]
    return OccupationEstimate(
        bin_edges=edges,
        bin_means=occ_c.mean(axis=0),
        bin_stderrs=occ_c.std(axis=0, ddof=1) / math.sqrt(n_clean),
        atom=_mc(atom[mask], seed),
        passage_time=_mc(passage[mask], seed),
        n=n_clean,
        n_discarded=int(n - mask.sum()),
        seed=int(seed),
    )


def sqrt_dt_allowance(coarse_mean, fine_mean, ratio=2.0):
    """Discretization allowance for the finer of two runs.

    Models the grid bias as c * sqrt(dt); from runs at dt and dt/ratio the
    residual bias of the finer run is |coarse - fine| / (sqrt(ratio) - 1).
    """
    if ratio <= 1.0:
        raise ValueError(f"ratio must exceed 1, got {ratio}")
    return abs(coarse_mean - fine_mean) / (math.sqrt(ratio) - 1.0)
