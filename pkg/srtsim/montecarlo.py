"""
Monte Carlo event simulator, the independent check on the closed forms.

Each trial draws every link's Rayleigh power gain, forms the decoding
set, selects the best relay and counts outage and intercept events on
the same draws. Comparisons happen in the gain domain against the
thresholds alpha and delta, with strict inequalities: a gain exactly at
the threshold is neither an outage nor an intercept, and a relay whose
gain sits exactly at delta has not decoded.

Reproducibility:
  - trials are split into fixed blocks of BLOCK_TRIALS
  - block b draws from a Philox counter-based generator keyed by (seed, b)
  - workers only ever return integer event counts
so (seed, trials, profile, config) fix the result for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy.stats import norm

from srtsim.errors import DomainError
from srtsim.models import ChannelProfile, SystemConfig
from srtsim.numerics import check_count, check_probability

BLOCK_TRIALS = 1 << 16
DEFAULT_CONFIDENCE = 0.999
_MAX_SEED = (1 << 64) - 1


@dataclass(frozen=True)
class ChannelDraw:
    """One realisation of every link's power gain |h|^2."""

    g_sd: float
    g_se: float
    g_si: Tuple[float, ...]
    g_id: Tuple[float, ...]
    g_ie: Tuple[float, ...]


@dataclass(frozen=True)
class McEstimate:
    """
    Event-count estimate of a probability.

    Attributes:
        events: Number of trials in which the event occurred.
        trials: Number of trials run.
        p_hat: events / trials.
        ci_half_width: Normal-approximation half-width at `confidence`.
        seed: Seed that produced the draws.
        confidence: Two-sided confidence level of the interval.
    """

    events: int
    trials: int
    p_hat: float
    ci_half_width: float
    seed: int
    confidence: float = DEFAULT_CONFIDENCE

    @classmethod
    def from_counts(
        cls,
        events: int,
        trials: int,
        seed: int,
        confidence: float = DEFAULT_CONFIDENCE,
    ) -> "McEstimate":
        return cls(
            events=events,
            trials=trials,
            p_hat=events / trials,
            ci_half_width=confidence_interval(events, trials, confidence),
            seed=seed,
            confidence=confidence,
        )

    @property
    def degenerate_ci(self) -> bool:
        """The plug-in interval collapses to zero width when no or every trial hit."""
        return self.events == 0 or self.events == self.trials

    def contains(self, p: float) -> bool:
        """
        Whether `p` lies inside the interval.

        A degenerate interval falls back to the exact one-sided bound for
        zero (or all) events: p <= -ln(1 - confidence) / trials.
        """
        if self.degenerate_ci:
            bound = -math.log1p(-self.confidence) / self.trials
            return p <= bound if self.events == 0 else p >= 1.0 - bound
        return abs(self.p_hat - p) <= self.ci_half_width


def estimate_status(est_out: McEstimate, est_int: McEstimate) -> str:
    """Row status for a pair of estimates: "ok", or which intervals are degenerate."""
    flagged = [name for name, est in (("p_out", est_out), ("p_int", est_int)) if est.degenerate_ci]
    return "degenerate_ci:" + "+".join(flagged) if flagged else "ok"


# ─── Confidence intervals ─────────────────────────────────────


@lru_cache(maxsize=32)
def z_value(confidence_level: float) -> float:
    """Two-sided standard-normal quantile, e.g. 3.29 for 0.999."""
    check_probability(confidence_level, "confidence_level", open_interval=True)
    return float(norm.ppf(0.5 + confidence_level / 2.0))


def confidence_interval(
    events: int,
    trials: int,
    confidence_level: float = DEFAULT_CONFIDENCE,
) -> float:
    """Half-width z * sqrt(p(1-p)/trials) of the normal-approximation interval."""
    trials = check_count(trials, "trials")
    events = check_count(events, "events", minimum=0)
    if events > trials:
        raise DomainError(f"events ({events}) cannot exceed trials ({trials})")
    p_hat = events / trials
    return z_value(confidence_level) * math.sqrt(p_hat * (1.0 - p_hat) / trials)


# ─── Drawing ──────────────────────────────────────────────────


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed <= _MAX_SEED:
        raise DomainError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Generator for trial block `block`; distinct (seed, block) keys never overlap."""
    key = np.array([_check_seed(seed), block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _gain_means(profile: ChannelProfile) -> np.ndarray:
    return np.array(
        (profile.sigma_sd2, profile.sigma_se2)
        + profile.sigma_si2
        + profile.sigma_id2
        + profile.sigma_ie2
    )


def draw_channels(profile: ChannelProfile, rng: np.random.Generator, count: int) -> np.ndarray:
    """
    Draw `count` trials as rows: [g_sd, g_se, g_si..., g_id..., g_ie...].

    Each gain is -sigma^2 ln(U) with U uniform on (0, 1].
    """
    means = _gain_means(profile)
    uniforms = rng.random((count, means.size))
    return -means * np.log1p(-uniforms)


def draw_channel(profile: ChannelProfile, rng: np.random.Generator) -> ChannelDraw:
    row = draw_channels(profile, rng, 1)[0]
    n = profile.n_relays
    return ChannelDraw(
        g_sd=float(row[0]),
        g_se=float(row[1]),
        g_si=tuple(row[2 : 2 + n].tolist()),
        g_id=tuple(row[2 + n : 2 + 2 * n].tolist()),
        g_ie=tuple(row[2 + 2 * n : 2 + 3 * n].tolist()),
    )


# ─── Event logic ──────────────────────────────────────────────


def dt_events(g_sd: np.ndarray, g_se: np.ndarray, alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    """Outage iff g_sd < alpha; intercept iff g_se > alpha."""
    return np.asarray(g_sd) < alpha, np.asarray(g_se) > alpha


def ors_events(draws: np.ndarray, n_relays: int, delta: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Outage and intercept flags per row of `draws` (layout of draw_channels).

    Ties in relay->destination gain go to the lowest relay index.
    """
    draws = np.atleast_2d(draws)
    g_se = draws[:, 1]
    source_intercept = g_se > delta
    if n_relays == 0:
        return np.ones(draws.shape[0], dtype=bool), source_intercept

    n = n_relays
    g_si = draws[:, 2 : 2 + n]
    g_id = draws[:, 2 + n : 2 + 2 * n]
    g_ie = draws[:, 2 + 2 * n : 2 + 3 * n]

    decoded = g_si > delta
    any_decoded = decoded.any(axis=1)
    candidates = np.where(decoded, g_id, -np.inf)
    best = candidates.argmax(axis=1)
    rows = np.arange(draws.shape[0])
    g_bd = g_id[rows, best]
    g_be = g_ie[rows, best]

    outage = ~any_decoded | (g_bd < delta)
    intercept = source_intercept | (any_decoded & (g_be > delta))
    return outage, intercept


def _count_block(
    scheme: str,
    profile: ChannelProfile,
    threshold: float,
    seed: int,
    block: int,
    size: int,
) -> Tuple[int, int]:
    draws = draw_channels(profile, block_generator(seed, block), size)
    if scheme == "dt":
        outage, intercept = dt_events(draws[:, 0], draws[:, 1], threshold)
    else:
        outage, intercept = ors_events(draws, profile.n_relays, threshold)
    return int(outage.sum()), int(intercept.sum())


def _blocks(trials: int) -> List[Tuple[int, int]]:
    full, rest = divmod(trials, BLOCK_TRIALS)
    sizes = [BLOCK_TRIALS] * full + ([rest] if rest else [])
    return list(enumerate(sizes))


def count_events(
    scheme: str,
    profile: ChannelProfile,
    threshold: float,
    trials: int,
    seed: int,
    workers: int = 1,
) -> Tuple[int, int]:
    """Total (outage, intercept) event counts over `trials` trials."""
    trials = check_count(trials, "trials")
    workers = check_count(workers, "workers")
    seed = _check_seed(seed)
    blocks = _blocks(trials)
    args = [(scheme, profile, threshold, seed, b, size) for b, size in blocks]

    if workers == 1 or len(blocks) == 1:
        counts: Iterable[Tuple[int, int]] = (_count_block(*a) for a in args)
        return _reduce(counts)
    with ProcessPoolExecutor(max_workers=min(workers, len(blocks))) as pool:
        return _reduce(pool.map(_count_block, *zip(*args)))


def _reduce(counts: Iterable[Tuple[int, int]]) -> Tuple[int, int]:
    outage = intercept = 0
    for o, i in counts:
        outage += o
        intercept += i
    return outage, intercept


# ─── Public API ───────────────────────────────────────────────


def simulate_dt(
    config: SystemConfig,
    profile: ChannelProfile,
    trials: int,
    seed: int,
    workers: int = 1,
    confidence: float = DEFAULT_CONFIDENCE,
) -> Tuple[McEstimate, McEstimate]:
    """Estimate (outage, intercept) of direct transmission at the config's alpha."""
    outage, intercept = count_events("dt", profile, config.alpha, trials, seed, workers)
    return (
        McEstimate.from_counts(outage, trials, seed, confidence),
        McEstimate.from_counts(intercept, trials, seed, confidence),
    )


def simulate_ors(
    config: SystemConfig,
    profile: ChannelProfile,
    trials: int,
    seed: int,
    workers: int = 1,
    confidence: float = DEFAULT_CONFIDENCE,
) -> Tuple[McEstimate, McEstimate]:
    """Estimate (outage, intercept) of relay selection at the config's delta."""
    outage, intercept = count_events("ors", profile, config.delta, trials, seed, workers)
    return (
        McEstimate.from_counts(outage, trials, seed, confidence),
        McEstimate.from_counts(intercept, trials, seed, confidence),
    )


def simulate(
    scheme: str,
    config: SystemConfig,
    profile: ChannelProfile,
    trials: int,
    seed: int,
    workers: int = 1,
    confidence: Optional[float] = None,
) -> Tuple[McEstimate, McEstimate]:
    run = simulate_dt if scheme == "dt" else simulate_ors
    return run(config, profile, trials, seed, workers, confidence or DEFAULT_CONFIDENCE)
