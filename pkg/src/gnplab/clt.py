"""Monte Carlo harness for the giant-component and k-core central limit theorems."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._parallel import map_trials
from ._validation import (DegenerateInputError, ParameterError, check_int, check_positive,
                          size_threshold)
from .decomposition import components, kcore, remainder
from .graph import RngStream, sample_gnp
from .local import (core_local_indicators, default_truncation, giant_local_indicators,
                    tree_masks)
from .stats import fit_geometric_decay, normality
from .threshold import solve_c_hat


class HypothesisRefused(ParameterError):
    """Requested parameters lie outside the regime the theorem covers."""


@dataclass(frozen=True)
class CltTrial:
    trial: int
    n: int
    z: int
    z_tilde: tuple = ()
    z_hat: tuple = ()

    def row(self):
        return (self.trial, self.n, self.z) + tuple(self.z_tilde) + tuple(self.z_hat)


def trial_columns(ells):
    return (("trial", "n", "z") + tuple(f"z_tilde_{e}" for e in ells)
            + tuple(f"z_hat_{e}" for e in ells))


def check_regime(mode, c, k=3, force=False):
    """Refuse parameters outside c > 1 (giant) or c > c_hat_k (core)."""
    c = check_positive(c, "c")
    if mode == "giant":
        if c <= 1.0 and not force:
            raise HypothesisRefused(
                f"c={c} <= 1: the giant-component CLT needs a supercritical graph (c > 1); "
                "pass force to run anyway")
    elif mode == "core":
        k = check_int(k, "k", minimum=2)
        ch = solve_c_hat(k).c_hat
        if c <= ch and not force:
            raise HypothesisRefused(
                f"c={c} <= c_hat_{k}={ch:.10g}: the k-core CLT is only established for "
                f"c > c_hat_k; pass force to run anyway")
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    return c


def _clt_trial(mode, n, c, k, ells, t, seed, i):
    rng = RngStream(seed, i, key=(n,)).generator()
    g = sample_gnp(n, c / n, rng)
    if mode == "giant":
        lab = components(g)
        z = lab.largest_size
        phis = [giant_local_indicators(g, ell, labeling=lab) for ell in ells]
    else:
        core = kcore(g, k)
        z = core.size
        phis = [core_local_indicators(g, ell, k, core=core) for ell in ells]
    masks = tree_masks(g, ells, t)
    zt = tuple(int(phi.sum()) for phi in phis)
    zh = tuple(int(phi[masks[ell]].sum()) for phi, ell in zip(phis, ells))
    return CltTrial(trial=i, n=n, z=int(z), z_tilde=zt, z_hat=zh)


def iter_clt_trials(mode, n, c, k=3, ells=(), trials=2000, seed=0, t=None, start=0,
                    n_jobs=None):
    """Yield CltTrial for trial indices ``start..trials-1`` at one n.

    Trial i at size n uses ``RngStream(seed, i, key=(n,))``, so resuming from
    ``start`` reproduces exactly what an uninterrupted run would produce.
    """
    n = check_int(n, "n", minimum=2)
    ells = tuple(int(e) for e in ells)
    if t is None:
        ts = tuple(default_truncation(c, e, n) for e in ells)
    else:
        ts = tuple(int(t) for _ in ells)
    func = partial(_clt_trial, mode, n, float(c), int(k), ells, ts, int(seed))
    yield from map_trials(func, range(start, trials), n_jobs)


def run_clt(mode, n_grid, c, k=3, ell=(), trials=2000, seed=0, t=None, force=False,
            n_jobs=None):
    """``{n: [CltTrial, ...]}`` over the grid of vertex counts."""
    check_regime(mode, c, k, force)
    trials = check_int(trials, "trials", minimum=1)
    if trials < 100 and not force:
        raise ParameterError("at least 100 trials are needed for a normality report")
    ells = (ell,) if isinstance(ell, int) else tuple(ell)
    return {int(n): list(iter_clt_trials(mode, n, c, k, ells, trials, seed, t, n_jobs=n_jobs))
            for n in n_grid}


@dataclass(frozen=True)
class VarianceScaling:
    rows: list
    max_ratio: float
    flagged: bool
    drift_limit: float = 1.4
    notes: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def variance_scaling(per_n, drift_limit=1.4, min_points=3, min_span=8.0):
    """Var(Z)/n per n with a flag when the ratios drift apart.

    ``per_n`` maps n to a sample array (or to a NormalityReport).  Flagged
    when any ratio is zero or when max/min exceeds ``drift_limit``; a grid
    with fewer than ``min_points`` values of n or spanning less than
    ``min_span`` is reported with a note.
    """
    rows = []
    for n in sorted(per_n):
        v = per_n[n]
        var = float(v.variance) if hasattr(v, "variance") else float(np.var(np.asarray(v, float), ddof=1))
        rows.append({"n": int(n), "variance": var, "var_over_n": var / n})
    notes = []
    if len(rows) < min_points:
        notes.append(f"only {len(rows)} values of n (want >= {min_points})")
    if rows and rows[-1]["n"] < min_span * rows[0]["n"]:
        notes.append(f"n range spans less than {min_span}x")
    ratios = np.array([r["var_over_n"] for r in rows])
    if ratios.size == 0 or np.any(ratios <= 0):
        return VarianceScaling(rows, float("inf"), True, drift_limit,
                               notes + ["zero variance"])
    mr = float(ratios.max() / ratios.min())
    return VarianceScaling(rows, mr, mr > drift_limit, drift_limit, notes)


def ks_trend(reports, tolerance=0.01):
    """True iff KS distance does not increase by more than ``tolerance`` as n grows."""
    ns = sorted(reports)
    ks = [reports[n].ks_distance for n in ns]
    return all(b <= a + tolerance for a, b in zip(ks, ks[1:]))


def clt_report(results, ells=(), drift_limit=1.4):
    """Normality per n, variance scaling, and approximation diagnostics."""
    per_n = {}
    z_by_n = {}
    for n, trials in sorted(results.items()):
        z = np.array([tr.z for tr in trials], dtype=float)
        z_by_n[n] = z
        entry = {"normality": _safe_normality(z)}
        approx = []
        # sweeps may evaluate ell only at some n
        evaluated = all(len(tr.z_tilde) == len(ells) for tr in trials)
        for j, ell in enumerate(ells if evaluated else ()):
            zt = np.array([tr.z_tilde[j] for tr in trials], dtype=float)
            zh = np.array([tr.z_hat[j] for tr in trials], dtype=float)
            vz = z.var(ddof=1)
            approx.append({
                "ell": int(ell),
                "var_z_minus_z_tilde_over_n": float(np.var(z - zt, ddof=1) / n),
                "var_z_tilde_minus_z_hat_over_n": float(np.var(zt - zh, ddof=1) / n),
                "var_z_hat_over_var_z": float(zh.var(ddof=1) / vz) if vz > 0 else None,
            })
        entry["approximation"] = approx
        per_n[str(n)] = entry
    scaling = variance_scaling(z_by_n, drift_limit) if len(z_by_n) else None
    reps = {n: normality(z) for n, z in z_by_n.items() if z.size >= 100 and z.std() > 0}
    return {
        "per_n": per_n,
        "variance_scaling": scaling.to_dict() if scaling else None,
        "ks_non_increasing": ks_trend(reps) if len(reps) > 1 else None,
    }


def _safe_normality(z):
    try:
        return normality(z).to_dict()
    except (DegenerateInputError, ParameterError) as exc:
        return {"error": str(exc)}


@dataclass(frozen=True)
class MantleProfile:
    mode: str
    n: int
    threshold: int
    max_sizes: list
    histogram: dict
    fraction_below: float
    decay_fit: dict
    predicted_base: float | None

    def to_dict(self):
        d = asdict(self)
        d["histogram"] = {str(k): v for k, v in sorted(self.histogram.items())}
        return d


def mantle_histogram(g, mode, k=3):
    """``{size: count}`` for the components of G - L (giant) or G - V(K) (core)."""
    if mode == "giant":
        lab = components(g)
        rem = remainder(g, lab.in_largest())
    elif mode == "core":
        rem = kcore(g, k).mantle_labeling
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    return rem.histogram()


def _mantle_trial(mode, n, c, k, seed, i):
    rng = RngStream(seed, i, key=(n,)).generator()
    return mantle_histogram(sample_gnp(n, c / n, rng), mode, k)


def mantle_profile(mode, n, c, k=3, trials=500, seed=0, force=False, n_jobs=None,
                   jmin=3, jmax=30):
    """Component sizes of G - L (giant) or G - V(K) (core) over many samples.

    Reports the per-trial largest component, a pooled size histogram, the
    fraction of trials whose largest piece is below ceil((ln n)^4), and a
    geometric fit of the size-biased frequencies j * count(j), i.e. of the
    size of the piece holding a uniformly chosen vertex.
    """
    c = check_regime(mode, c, k, force)
    n = check_int(n, "n", minimum=2)
    func = partial(_mantle_trial, mode, n, c, int(k), int(seed))
    return profile_from_histograms(mode, n, c, map_trials(func, range(trials), n_jobs),
                                   jmin, jmax)


def profile_from_histograms(mode, n, c, hists, jmin=3, jmax=30):
    """Aggregate per-graph mantle histograms into a MantleProfile."""
    thr = size_threshold(n)
    maxes, pooled = [], {}
    for hist in hists:
        maxes.append(max(hist) if hist else 0)
        for s, cnt in hist.items():
            pooled[s] = pooled.get(s, 0) + cnt
    biased = {s: s * cnt for s, cnt in pooled.items()}
    fit = fit_geometric_decay(biased, jmin, jmax)
    below = float(np.mean(np.array(maxes) < thr)) if maxes else 0.0
    pred = float(c * np.exp(1.0 - c)) if mode == "giant" and c is not None else None
    return MantleProfile(mode=mode, n=n, threshold=thr, max_sizes=maxes, histogram=pooled,
                         fraction_below=below, decay_fit=fit.to_dict(), predicted_base=pred)


class Standardizer(TransformerMixin, BaseEstimator):
    """Centre by the sample mean and scale by the ddof=1 standard deviation."""

    def fit(self, X, y=None):
        X = check_array(X, ensure_2d=False).ravel()
        if X.size < 2:
            raise ParameterError("need at least two samples")
        self.mean_ = float(X.mean())
        self.scale_ = float(X.std(ddof=1))
        if self.scale_ == 0:
            raise DegenerateInputError("samples have zero variance")
        return self

    def transform(self, X):
        check_is_fitted(self, "scale_")
        X = check_array(X, ensure_2d=False).ravel()
        return (X - self.mean_) / self.scale_


class CLTExperiment(BaseEstimator):
    """Estimator-style front end for :func:`run_clt` and :func:`clt_report`.

    ``fit`` samples the graphs and stores ``trials_`` (dict n -> list of
    CltTrial), ``reports_`` (n -> NormalityReport) and ``report_``.
    """

    def __init__(self, mode="giant", n_grid=(10_000,), c=2.0, k=3, ell=(), trials=2000,
                 seed=0, t=None, force=False, n_jobs=None):
        self.mode = mode
        self.n_grid = n_grid
        self.c = c
        self.k = k
        self.ell = ell
        self.trials = trials
        self.seed = seed
        self.t = t
        self.force = force
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        ells = (self.ell,) if isinstance(self.ell, int) else tuple(self.ell)
        self.trials_ = run_clt(self.mode, self.n_grid, self.c, self.k, ells, self.trials,
                               self.seed, self.t, self.force, self.n_jobs)
        self.reports_ = {n: normality([t.z for t in tr]) for n, tr in self.trials_.items()}
        self.report_ = clt_report(self.trials_, ells)
        return self

    def samples(self, n):
        check_is_fitted(self, "trials_")
        return np.array([t.z for t in self.trials_[n]], dtype=float)
