"""Efron-Stein resampling experiment on coupled pairs (G-, G+).

For each trial a G(n, c/n) sample is coupled at f = {u, v}.  The error
``psi = phi - phi_ell`` is evaluated on both graphs; D is the set of vertices
where it changes and W is the union of the remainder (giant mode) or mantle
(core mode) components of u and v in G-.  On the event E the two
structural facts ``D <= W`` and ``|W| < ell => D empty`` must hold exactly,
and a violation aborts the run.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from functools import partial

import numpy as np
from sklearn.base import BaseEstimator

from ._parallel import map_trials
from ._validation import ParameterError, check_int, check_positive, size_threshold
from .decomposition import check_event_E, components, kcore, remainder
from .graph import RngStream, make_coupled_pair, sample_gnp
from .local import core_local_indicators, giant_local_indicators
from .stats import fit_geometric_decay, variance_standard_error

MODES = ("giant", "core")


class ClaimViolation(RuntimeError):
    """A structural claim failed on a trial where E holds."""

    def __init__(self, record, seed):
        self.record = record
        self.seed = seed
        super().__init__(
            f"claim violated on trial {record.trial} (seed={seed}, mode={record.mode}, "
            f"n={record.n}, c={record.c}, ell={record.ell}, k={record.k}): "
            f"subset={record.claim_subset} small={record.claim_small} "
            f"locality={record.claim_locality}"
        )


@dataclass(frozen=True)
class ResampleTrialRecord:
    trial: int
    mode: str
    n: int
    c: float
    ell: int
    k: int
    d_size: int
    w_size: int
    event_E: bool
    claim_subset: bool
    claim_small: bool
    claim_locality: bool
    f_was_edge: bool
    z: int
    z_tilde: int

    @classmethod
    def columns(cls):
        return tuple(f.name for f in fields(cls))

    def row(self):
        return tuple(getattr(self, name) for name in self.columns())

    @property
    def claims_hold(self):
        return self.claim_subset and self.claim_small and self.claim_locality


@dataclass
class _Side:
    phi: np.ndarray
    phil: np.ndarray
    rem: object  # ComponentLabeling of the remainder / mantle
    full: object  # ComponentLabeling of the whole graph (giant mode only)


def _evaluate(g, mode, ell, k, threshold, exact):
    if mode == "giant":
        lab = components(g)
        big = lab.in_largest()
        phil = giant_local_indicators(g, ell, threshold, labeling=lab, exact=exact)
        return _Side(big.astype(np.int8), phil, remainder(g, big), lab)
    core = kcore(g, k)
    phil = core_local_indicators(g, ell, k, core=core, exact=exact)
    return _Side(core.in_core.astype(np.int8), phil, core.mantle_labeling, None)


def _event(minus, plus, mode, n, threshold):
    if mode == "giant":
        return check_event_E([minus.full, plus.full], n, "giant", threshold)
    return check_event_E([minus.rem, plus.rem], n, "mantle", threshold)


def _witness(rem, f):
    u, v = f
    return np.union1d(rem.component_of(u), rem.component_of(v))


def _check_mode(mode, k):
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "core":
        check_int(k, "k", minimum=2)


def compute_D(pair, mode, ell, k=3, threshold=None, exact=False):
    """Vertices where phi - phi_ell differs between G- and G+."""
    _check_mode(mode, k)
    t = size_threshold(pair.base.n) if threshold is None else threshold
    a = _evaluate(pair.minus, mode, ell, k, t, exact)
    b = _evaluate(pair.plus, mode, ell, k, t, exact)
    return np.flatnonzero((a.phi - a.phil) != (b.phi - b.phil))


def compute_W(pair, mode, k=3):
    """C_u- united with C_v- in the remainder (giant) or mantle (core) of G-."""
    _check_mode(mode, k)
    g = pair.minus
    if mode == "giant":
        lab = components(g)
        rem = remainder(g, lab.in_largest())
    else:
        rem = kcore(g, k).mantle_labeling
    return _witness(rem, pair.f)


def resample_trial(pair, mode, ell, k=3, threshold=None, exact=False, trial=0, c=float("nan")):
    """Evaluate D, W, E and the claims on one coupled pair.

    ``z`` and ``z_tilde`` in the record are taken on the original sample,
    i.e. G+ if f was an edge of it and G- otherwise.
    """
    _check_mode(mode, k)
    n = pair.base.n
    t = size_threshold(n) if threshold is None else threshold
    minus = _evaluate(pair.minus, mode, ell, k, t, exact)
    plus = _evaluate(pair.plus, mode, ell, k, t, exact)
    psi_m = minus.phi - minus.phil
    psi_p = plus.phi - plus.phil
    in_d = psi_m != psi_p
    W = _witness(minus.rem, pair.f)
    in_w = np.zeros(n, dtype=bool)
    in_w[W] = True
    d_size = int(in_d.sum())
    subset = bool(not np.any(in_d & ~in_w))
    small = bool(W.size >= ell or d_size == 0)
    outside = ~in_w
    locality = bool(np.array_equal(minus.phi[outside], plus.phi[outside])
                    and np.array_equal(minus.phil[outside], plus.phil[outside]))
    src = plus if pair.f_was_edge else minus
    return ResampleTrialRecord(
        trial=int(trial), mode=mode, n=int(n), c=float(c), ell=int(ell),
        k=int(k) if mode == "core" else 0,
        d_size=d_size, w_size=int(W.size),
        event_E=bool(_event(minus, plus, mode, n, t)),
        claim_subset=subset, claim_small=small, claim_locality=locality,
        f_was_edge=bool(pair.f_was_edge),
        z=int(src.phi.sum()), z_tilde=int(src.phil.sum()),
    )


@dataclass(frozen=True)
class ProbeConfig:
    mode: str = "giant"
    n: int = 10_000
    c: float = 2.0
    ell: int = 5
    k: int = 3
    trials: int = 1000
    seed: int = 0
    random_pair: bool = False
    exact: bool = False
    threshold: int | None = None

    def validate(self):
        _check_mode(self.mode, self.k)
        check_int(self.n, "n", minimum=2)
        check_int(self.ell, "ell", minimum=1)
        check_int(self.trials, "trials", minimum=0)
        c = check_positive(self.c, "c")
        if not c / self.n < 1:
            raise ParameterError("p = c/n must be < 1")
        return self

    def to_dict(self):
        return asdict(self)


def _one_trial(cfg, graph, i):
    rng = RngStream(cfg.seed, i).generator()
    if graph is None:
        g = sample_gnp(cfg.n, cfg.c / cfg.n, rng)
        pair = make_coupled_pair(g, rng, random_pair=cfg.random_pair)
    else:
        pair = make_coupled_pair(graph, rng, random_pair=True)
    return resample_trial(pair, cfg.mode, cfg.ell, cfg.k, cfg.threshold, cfg.exact,
                          trial=i, c=cfg.c)


def run_probe(config, start=0, n_jobs=None, abort=True, graph=None):
    """Yield one ResampleTrialRecord per trial, in trial order.

    With ``abort`` (the default) a claim failure on a trial where E holds
    raises ClaimViolation carrying the trial index and master seed.  When a
    fixed ``graph`` is given every trial resamples a uniformly random pair
    of it instead of drawing a fresh G(n, p).
    """
    cfg = config.validate()
    if graph is not None and graph.n != cfg.n:
        raise ParameterError(f"graph has {graph.n} vertices but config says n={cfg.n}")
    func = partial(_one_trial, cfg, graph)
    for rec in map_trials(func, range(start, cfg.trials), n_jobs):
        if abort and rec.event_E and not rec.claims_hold:
            raise ClaimViolation(rec, cfg.seed)
        yield rec


def es_bound(records, p=None, n=None, M=1.0):
    """2 M^2 p (1 - p) n^2 E|D|^2 with the mean taken over ``records``."""
    records = list(records)
    if not records:
        raise ParameterError("es_bound needs at least one record")
    ns = {r.n for r in records}
    cs = {r.c for r in records}
    if n is None:
        if len(ns) != 1:
            raise ParameterError("records mix several n")
        n = ns.pop()
    if p is None:
        if len(cs) != 1:
            raise ParameterError("records mix several c")
        p = cs.pop() / n
    d2 = np.mean([r.d_size ** 2 for r in records])
    return float(2.0 * M * M * p * (1.0 - p) * n * n * d2)


def tail_profile(records, ell_grid, c=None, jmin=3, jmax=30):
    """E[|W|^2 1{|W| >= ell} 1_E] per ell, plus a geometric fit of P(|W| = j).

    The predicted decay base for the giant is c e^{1 - c}.
    """
    records = list(records)
    w = np.array([r.w_size for r in records], dtype=float)
    ev = np.array([r.event_E for r in records], dtype=bool)
    rows = []
    for ell in ell_grid:
        val = float(np.mean(w * w * (w >= ell) * ev)) if w.size else 0.0
        rows.append({"ell": int(ell), "value": val})
    vals, counts = np.unique(w.astype(int), return_counts=True)
    fit = fit_geometric_decay(dict(zip(vals.tolist(), counts.tolist())), jmin, jmax)
    if c is None and records:
        c = records[0].c
    predicted = float(c * math.exp(1.0 - c)) if c is not None else float("nan")
    return {"rows": rows, "fit": fit.to_dict(), "predicted_base": predicted}


def summarize(records, ell_grid=None):
    """JSON-ready summary of a probe run."""
    records = list(records)
    if not records:
        return {"trials": 0}
    ev = [r for r in records if r.event_E]
    diff = np.array([r.z - r.z_tilde for r in records], dtype=float)
    ell = records[0].ell
    grid = ell_grid or sorted({1, 2, ell, 2 * ell})
    n = records[0].n
    p = records[0].c / n
    return {
        "trials": len(records),
        "event_E_rate": len(ev) / len(records),
        "claim_subset_rate": _rate(ev, "claim_subset"),
        "claim_small_rate": _rate(ev, "claim_small"),
        "claim_locality_rate": _rate(ev, "claim_locality"),
        "mean_d2": float(np.mean([r.d_size ** 2 for r in records])),
        "es_bound": es_bound(records, p=p, n=n),
        "var_z_minus_z_tilde": float(diff.var(ddof=1)) if diff.size > 1 else 0.0,
        "var_se": variance_standard_error(diff),
        "tail": tail_profile(records, grid),
    }


def _rate(records, attr):
    if not records:
        return None
    return sum(bool(getattr(r, attr)) for r in records) / len(records)


class EfronSteinProbe(BaseEstimator):
    """Estimator-style wrapper around :func:`run_probe`.

    ``fit`` runs the trials and stores ``records_`` and ``summary_``.
    """

    def __init__(self, mode="giant", n=10_000, c=2.0, ell=5, k=3, trials=1000, seed=0,
                 random_pair=False, exact=False, threshold=None, n_jobs=None):
        self.mode = mode
        self.n = n
        self.c = c
        self.ell = ell
        self.k = k
        self.trials = trials
        self.seed = seed
        self.random_pair = random_pair
        self.exact = exact
        self.threshold = threshold
        self.n_jobs = n_jobs

    def _config(self):
        return ProbeConfig(mode=self.mode, n=self.n, c=self.c, ell=self.ell, k=self.k,
                           trials=self.trials, seed=self.seed, random_pair=self.random_pair,
                           exact=self.exact, threshold=self.threshold)

    def fit(self, X=None, y=None):
        self.records_ = list(run_probe(self._config(), n_jobs=self.n_jobs))
        self.summary_ = summarize(self.records_)
        return self

    def bound(self):
        return es_bound(self.records_)
