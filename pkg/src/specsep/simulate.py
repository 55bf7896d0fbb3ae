"""Finite-matrix realizations, eigenvalue counts, and verification trials."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import SpectrumError
from .separation import SeparationPrediction
from .spectrum import JointSpectrum, materialize_pairs, validate
from .support import SpectralGap

NOISE_LAWS = ("standard_gaussian", "rademacher", "uniform_standardized")

INSET_FRACTION = 0.05
UNBOUNDED_SPAN = 10.0
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class SimConfig:
    """Inputs for seeded trials of the finite random matrix."""

    spectrum: JointSpectrum
    n: int
    p: int
    noise_law: str = "standard_gaussian"
    trials: int = 1
    seed: int = 0
    complex_entries: bool = False

    def __post_init__(self):
        validate(self.spectrum)
        if not (1 <= self.p <= self.n):
            raise SpectrumError(f"need 1 <= p <= n, got p={self.p}, n={self.n}")
        if self.trials < 1:
            raise SpectrumError(f"trials must be >= 1, got {self.trials}")
        if self.noise_law not in NOISE_LAWS:
            raise SpectrumError(f"unknown noise law {self.noise_law!r}")


@dataclass(frozen=True)
class TrialResult:
    """Eigenvalues and per-gap counts of one seeded trial."""

    trial_index: int
    seed_used: int
    eigenvalues: np.ndarray
    counts: tuple[tuple[int, int, int], ...]


def build_deterministic(spectrum: JointSpectrum, n: int, p: int):
    """Deterministic factors (R, T_diag, pairs) consistent with the spectrum.

    R is p x n with R[j, j] = sqrt(n * u_j) so that (1/n) R R* = diag(u),
    and T_diag[j] = t_j; both are diagonal in the same basis, hence commute.
    """
    if p > n:
        raise SpectrumError(f"need p <= n, got p={p}, n={n}")
    pairs = materialize_pairs(spectrum, p)
    r = np.zeros((p, n))
    t_diag = np.empty(p)
    for j, (u, t) in enumerate(pairs):
        r[j, j] = math.sqrt(n * u)
        t_diag[j] = t
    return r, t_diag, pairs


def _trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    # counter-based substream: child (trial_index,) of the root seed
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial_index,)))


def _draw_noise(rng: np.random.Generator, shape, law: str) -> np.ndarray:
    if law == "standard_gaussian":
        return rng.standard_normal(shape)
    if law == "rademacher":
        return rng.integers(0, 2, size=shape).astype(np.float64) * 2.0 - 1.0
    if law == "uniform_standardized":
        return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size=shape)
    raise SpectrumError(f"unknown noise law {law!r}")


def sample_noise(rng: np.random.Generator, shape, law: str, complex_entries: bool) -> np.ndarray:
    """Standardized noise matrix; complex entries are (xi + i*eta)/sqrt(2)."""
    if complex_entries:
        re = _draw_noise(rng, shape, law)
        im = _draw_noise(rng, shape, law)
        return (re + 1j * im) / math.sqrt(2.0)
    return _draw_noise(rng, shape, law)


def sample_B(simcfg: SimConfig, trial_index: int) -> np.ndarray:
    """One realization of the p x p noncentral covariance matrix.

    The noise stream is derived deterministically from (seed, trial_index);
    identical configurations replay bit-identical matrices.
    """
    rng = _trial_rng(simcfg.seed, trial_index)
    r, t_diag, _pairs = build_deterministic(simcfg.spectrum, simcfg.n, simcfg.p)
    x = sample_noise(rng, (simcfg.p, simcfg.n), simcfg.noise_law, simcfg.complex_entries)
    y_mat = (r + np.sqrt(t_diag)[:, None] * x) / math.sqrt(simcfg.n)
    b = y_mat @ y_mat.conj().T
    return (b + b.conj().T) / 2.0


def eigenvalues(b: np.ndarray, with_vectors: bool = False):
    """Ascending eigenvalues of a Hermitian matrix.

    With with_vectors=True also returns eigenvectors and checks the
    reconstruction residual ||B - V L V*|| / ||B|| < 1e-10.
    """
    scale = max(1.0, float(np.max(np.abs(b))))
    if np.max(np.abs(b - b.conj().T)) > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian within 1e-12")
    if not with_vectors:
        return np.linalg.eigvalsh(b)
    vals, vecs = np.linalg.eigh(b)
    recon = (vecs * vals) @ vecs.conj().T
    rel = np.linalg.norm(b - recon) / max(np.linalg.norm(b), 1e-300)
    if rel > 1e-10:
        raise ValueError(f"eigendecomposition residual {rel:.3e} above 1e-10")
    return vals, vecs


def count_eigs(eigs: np.ndarray, interval) -> tuple[int, int, int]:
    """(below, inside, above) counts against a closed interval [a, b]."""
    a, b = interval
    if not a < b:
        raise ValueError(f"need a < b, got ({a}, {b})")
    eigs = np.asarray(eigs)
    below = int(np.searchsorted(eigs, a, side="left"))
    above = int(len(eigs) - np.searchsorted(eigs, b, side="right"))
    return below, len(eigs) - below - above, above


def counting_interval(gap: SpectralGap) -> tuple[float, float]:
    """Inset interval used when counting eigenvalues against a gap.

    Finite gaps are inset by 5% of their width on both sides; the
    unbounded gap is cut at a + 10 before insetting, so "above" means
    beyond that finite proxy.
    """
    if gap.unbounded:
        b_eff = gap.a + UNBOUNDED_SPAN
        return gap.a + INSET_FRACTION * (b_eff - gap.a), b_eff
    delta = INSET_FRACTION * gap.width
    return gap.a + delta, gap.b - delta


@dataclass(frozen=True)
class GapStats:
    """Aggregates for one gap across trials."""

    gap: SpectralGap
    interval: tuple[float, float]
    inside_zero_frequency: float
    match_frequency: dict
    predicted: dict


@dataclass(frozen=True)
class VerifyReport:
    """Aggregate verification of separation predictions across trials."""

    simcfg: SimConfig
    convention: str
    trials: tuple[TrialResult, ...]
    per_gap: tuple[GapStats, ...]
    all_gaps_match_frequency: dict

    @property
    def active_match_frequency(self) -> float:
        return self.all_gaps_match_frequency[self.convention]


def _worker_count() -> int:
    raw = os.environ.get("SPECSEP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_trials(
    simcfg: SimConfig,
    gaps,
    predictions,
    convention: str = "derivation",
) -> VerifyReport:
    """Seeded trials counting eigenvalues against inset gap intervals.

    For every trial and gap, records (below, inside, above) counts and
    whether they match each side-mapping convention's prediction; the
    overall match frequency of a convention requires all gaps of a trial
    to match simultaneously. Trials run concurrently when SPECSEP_THREADS
    is set above 1; aggregation is order-independent.
    """
    gaps = list(gaps)
    predictions = list(predictions)
    if len(gaps) != len(predictions):
        raise ValueError("need one prediction per gap")
    intervals = [counting_interval(gap) for gap in gaps]

    def one_trial(idx: int) -> TrialResult:
        b = sample_B(simcfg, idx)
        eigs = eigenvalues(b)
        counts = tuple(count_eigs(eigs, iv) for iv in intervals)
        return TrialResult(
            trial_index=idx, seed_used=simcfg.seed, eigenvalues=eigs, counts=counts
        )

    workers = _worker_count()
    indices = range(simcfg.trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(one_trial, indices))
    else:
        trials = [one_trial(i) for i in indices]

    per_gap = []
    per_conv_all = {conv: np.ones(simcfg.trials, dtype=bool) for conv in ("derivation", "theorem")}
    for gi, (gap, pred) in enumerate(zip(gaps, predictions)):
        inside_zero = 0
        match = {"derivation": 0, "theorem": 0}
        for trial in trials:
            below, inside, above = trial.counts[gi]
            if inside == 0:
                inside_zero += 1
            for conv in match:
                want_below, want_above = pred.eigencounts(conv)
                ok = below == want_below and above == want_above
                if ok:
                    match[conv] += 1
                else:
                    per_conv_all[conv][trial.trial_index] = False
        per_gap.append(
            GapStats(
                gap=gap,
                interval=intervals[gi],
                inside_zero_frequency=inside_zero / simcfg.trials,
                match_frequency={c: m / simcfg.trials for c, m in match.items()},
                predicted={c: pred.eigencounts(c) for c in ("derivation", "theorem")},
            )
        )
    all_freq = {conv: float(np.mean(flags)) for conv, flags in per_conv_all.items()}
    return VerifyReport(
        simcfg=simcfg,
        convention=convention,
        trials=tuple(trials),
        per_gap=tuple(per_gap),
        all_gaps_match_frequency=all_freq,
    )


@dataclass(frozen=True)
class ExtremeBoundReport:
    """Observed extreme eigenvalues against the pure-noise support bounds."""

    passed: bool
    lower_bound: float
    upper_bound: float
    min_eigenvalue: float
    max_eigenvalue: float
    min_margin: float
    max_margin: float


def extreme_bound_check(simcfg: SimConfig, eps: float) -> ExtremeBoundReport:
    """Check pure-noise extreme eigenvalues against sigma^2*(1 +/- sqrt(y))^2.

    Requires a pure-noise configuration: every atom has u = 0 and a common
    t = sigma^2.
    """
    u_vals = {a.u for a in simcfg.spectrum.atoms}
    t_vals = {a.t for a in simcfg.spectrum.atoms}
    if u_vals != {0.0} or len(t_vals) != 1:
        raise SpectrumError("extreme bound check needs u = 0 and a single t value")
    sigma2 = t_vals.pop()
    y = simcfg.p / simcfg.n
    lower = sigma2 * (1.0 - math.sqrt(y)) ** 2
    upper = sigma2 * (1.0 + math.sqrt(y)) ** 2

    min_eig = math.inf
    max_eig = -math.inf
    for i in range(simcfg.trials):
        eigs = eigenvalues(sample_B(simcfg, i))
        min_eig = min(min_eig, float(eigs[0]))
        max_eig = max(max_eig, float(eigs[-1]))
    passed = min_eig >= lower - eps and max_eig <= upper + eps
    return ExtremeBoundReport(
        passed=passed,
        lower_bound=lower,
        upper_bound=upper,
        min_eigenvalue=min_eig,
        max_eigenvalue=max_eig,
        min_margin=min_eig - lower,
        max_margin=upper - max_eig,
    )


@dataclass(frozen=True)
class PerturbationReport:
    max_eigenvalue_gap: float
    spectral_norm: float
    holds: bool


def perturbation_check(a: np.ndarray, b: np.ndarray, slack: float = 1e-10) -> PerturbationReport:
    """Check max_k |lambda_k(A) - lambda_k(B)| <= ||A - B|| + slack."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    ea = eigenvalues(a)
    eb = eigenvalues(b)
    gap = float(np.max(np.abs(ea - eb)))
    norm = float(np.linalg.norm(a - b, 2))
    return PerturbationReport(
        max_eigenvalue_gap=gap, spectral_norm=norm, holds=gap <= norm + slack
    )


def write_eigenvalue_csv(trials, path) -> None:
    """One CSV row of ascending eigenvalues per trial, 17 significant digits."""
    with open(path, "w", encoding="ascii") as fh:
        for trial in trials:
            fh.write(",".join(format(v, ".17g") for v in trial.eigenvalues))
            fh.write("\n")
