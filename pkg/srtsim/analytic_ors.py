"""
Opportunistic relay selection with arbitrary per-link gains.

Exact outage and intercept probabilities of decode-and-forward relaying
where the relay with the strongest relay->destination gain among those
that decoded the source is selected, and the eavesdropper keeps the
better of its two received copies.

Two evaluation paths exist:
  - per-set scalar functions and `subset_terms`, which follow the
    closed forms term by term and are meant for inspection and tests
  - `ors_outage` / `ors_intercept`, which build the same terms for all
    2^N decoding sets at once with numpy; the best-relay probabilities
    of every set come from one positive recursion over subsets per relay
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from srtsim.errors import CapacityError, DomainError
from srtsim.models import ChannelProfile, DecodingSet, SrtPoint, all_decoding_sets
from srtsim.numerics import (
    check_nonneg,
    check_positive,
    clip_unit,
    compensated_sum,
    one_minus_exp_neg,
)

# Exact enumeration touches 2^N decoding sets.
ENUMERATION_CAP = 20

# The inclusion-exclusion sum is trusted while it exceeds this fraction of
# the sum of its absolute terms; below that, rounding can flip its sign.
_CANCELLATION_MARGIN = 1e-6


@dataclass(frozen=True)
class SubsetTerm:
    """One decoding set's contribution to the total-probability sums."""

    set: DecodingSet
    weight: float
    conditional_outage: float
    conditional_intercept: float


# ─── Helpers ──────────────────────────────────────────────────


def _check_set(dset: DecodingSet, gains: Sequence[float], name: str) -> None:
    if dset.n_relays != len(gains):
        raise DomainError(
            f"decoding set over {dset.n_relays} relays does not match {len(gains)} {name} entries"
        )


def _check_nonempty(dset: DecodingSet) -> None:
    if dset.is_empty:
        raise DomainError("decoding set must be non-empty; the empty set is handled separately")


def check_enumeration_cap(n_relays: int, cap: int = ENUMERATION_CAP) -> None:
    if n_relays > cap:
        raise CapacityError(n_relays, cap)


# ─── Per-set closed forms ─────────────────────────────────────


def pr_decoding_set_empty(sigma_si2: Sequence[float], delta: float) -> float:
    """Probability that no relay decodes the source. 1 when there are no relays."""
    delta = check_nonneg(delta, "delta")
    return math.prod(one_minus_exp_neg(delta / check_positive(s, "sigma_si2")) for s in sigma_si2)


def pr_decoding_set(dset: DecodingSet, sigma_si2: Sequence[float], delta: float) -> float:
    """Probability that exactly the relays in `dset` decode the source."""
    _check_set(dset, sigma_si2, "sigma_si2")
    delta = check_nonneg(delta, "delta")
    decoded = math.prod(math.exp(-delta / sigma_si2[i]) for i in dset.members)
    failed = math.prod(one_minus_exp_neg(delta / sigma_si2[j]) for j in dset.complement.members)
    return decoded * failed


def pr_best_outage(dset: DecodingSet, sigma_id2: Sequence[float], delta: float) -> float:
    """Probability that the best relay in `dset` cannot reach the destination."""
    _check_set(dset, sigma_id2, "sigma_id2")
    _check_nonempty(dset)
    delta = check_nonneg(delta, "delta")
    return math.prod(one_minus_exp_neg(delta / sigma_id2[i]) for i in dset.members)


def pr_best_is(dset: DecodingSet, i: int, sigma_id2: Sequence[float]) -> float:
    """
    Probability that relay `i` has the largest relay->destination gain in `dset`.

    Inclusion-exclusion over the non-empty subsets A of dset minus i:
        1 + sum_A (-1)^|A| / (1 + sum_{j in A} sigma_id2[i] / sigma_id2[j])
    """
    _check_set(dset, sigma_id2, "sigma_id2")
    if i not in dset:
        raise DomainError(f"relay {i} is not a member of decoding set {dset}")
    others = [j for j in dset.members if j != i]
    ratios = [sigma_id2[i] / sigma_id2[j] for j in others]
    terms = [1.0]
    for k in range(1, len(others) + 1):
        sign = -1.0 if k % 2 else 1.0
        for subset in combinations(ratios, k):
            terms.append(sign / (1.0 + math.fsum(subset)))
    value = compensated_sum(terms)
    if value > _CANCELLATION_MARGIN * compensated_sum(abs(t) for t in terms):
        return value
    # Weak relay among strong ones.
    return float(_selection_given_others(ratios)[-1])


def pr_best_eav_below(
    dset: DecodingSet,
    sigma_id2: Sequence[float],
    sigma_ie2: Sequence[float],
    delta: float,
) -> float:
    """Probability that the selected relay's link to the eavesdropper is below delta."""
    _check_set(dset, sigma_ie2, "sigma_ie2")
    _check_nonempty(dset)
    delta = check_nonneg(delta, "delta")
    return compensated_sum(
        pr_best_is(dset, i, sigma_id2) * one_minus_exp_neg(delta / sigma_ie2[i])
        for i in dset.members
    )


def pr_eav_intercept_given_set(
    dset: DecodingSet,
    sigma_se2: float,
    sigma_id2: Sequence[float],
    sigma_ie2: Sequence[float],
    delta: float,
) -> float:
    """
    Intercept probability when `dset` decoded: E wins if either the source copy
    or the selected relay's copy clears delta.
    """
    sigma_se2 = check_positive(sigma_se2, "sigma_se2")
    source_below = one_minus_exp_neg(delta / sigma_se2)
    return clip_unit(1.0 - source_below * pr_best_eav_below(dset, sigma_id2, sigma_ie2, delta))


def pr_eav_intercept_given_set_printed(
    dset: DecodingSet,
    sigma_se2: float,
    sigma_id2: Sequence[float],
    sigma_ie2: Sequence[float],
    delta: float,
) -> float:
    """Expanded form: sum_i Pr(i best) * [e_ie + e_se - exp(-delta/s_ie - delta/s_se)]."""
    _check_set(dset, sigma_ie2, "sigma_ie2")
    _check_nonempty(dset)
    sigma_se2 = check_positive(sigma_se2, "sigma_se2")
    delta = check_nonneg(delta, "delta")
    e_se = math.exp(-delta / sigma_se2)
    terms = []
    for i in dset.members:
        e_ie = math.exp(-delta / sigma_ie2[i])
        both = math.exp(-delta / sigma_ie2[i] - delta / sigma_se2)
        terms.append(pr_best_is(dset, i, sigma_id2) * (e_ie + e_se - both))
    return clip_unit(compensated_sum(terms))


def subset_terms(
    profile: ChannelProfile,
    delta: float,
    cap: int = ENUMERATION_CAP,
) -> Iterator[SubsetTerm]:
    """Yield every decoding set's term in increasing bitmask order, empty set first."""
    check_enumeration_cap(profile.n_relays, cap)
    delta = check_nonneg(delta, "delta")
    source_intercept = math.exp(-delta / profile.sigma_se2)
    for dset in all_decoding_sets(profile.n_relays):
        if dset.is_empty:
            yield SubsetTerm(
                set=dset,
                weight=pr_decoding_set_empty(profile.sigma_si2, delta),
                conditional_outage=1.0,
                conditional_intercept=source_intercept,
            )
            continue
        yield SubsetTerm(
            set=dset,
            weight=pr_decoding_set(dset, profile.sigma_si2, delta),
            conditional_outage=pr_best_outage(dset, profile.sigma_id2, delta),
            conditional_intercept=pr_eav_intercept_given_set(
                dset, profile.sigma_se2, profile.sigma_id2, profile.sigma_ie2, delta
            ),
        )


# ─── Vectorised tables over all 2^N sets ──────────────────────


def _decoding_weights(sigma_si2: Sequence[float], delta: float) -> np.ndarray:
    """Pr(D = mask) for every mask; bit i of the index is relay i."""
    weights = np.ones(1)
    for s in sigma_si2:
        decoded = math.exp(-delta / s)
        failed = one_minus_exp_neg(delta / s)
        weights = np.concatenate((weights * failed, weights * decoded))
    return weights


def _best_outage_table(sigma_id2: Sequence[float], delta: float) -> np.ndarray:
    table = np.ones(1)
    for s in sigma_id2:
        table = np.concatenate((table, table * one_minus_exp_neg(delta / s)))
    return table


def _selection_given_others(ratios: Sequence[float]) -> np.ndarray:
    """
    Pr(relay i is best) for every subset of the other relays.

    The smallest gain among relay i and the competitors in `mask` belongs
    to competitor j with probability ratios[j] / (1 + sum of mask ratios);
    by memorylessness the rest is the same question on mask minus j. If
    relay i is the smallest it cannot be best. Every term is positive, so
    tiny probabilities keep their relative precision. Masks are filled in
    order of popcount.
    """
    m = len(ratios)
    rates = np.asarray(ratios, dtype=float)
    sums = np.zeros(1)
    for r in ratios:
        sums = np.concatenate((sums, sums + r))
    masks = np.arange(1 << m, dtype=np.int64)
    popcount = np.zeros(1 << m, dtype=np.int64)
    for j in range(m):
        popcount += (masks >> j) & 1

    table = np.zeros(1 << m)
    table[0] = 1.0
    for size in range(1, m + 1):
        layer = masks[popcount == size]
        acc = np.zeros(layer.size)
        for j in range(m):
            # Without j, layer ^ bit is a larger mask, still zero.
            acc += rates[j] * table[layer ^ (1 << j)]
        table[layer] = acc / (1.0 + sums[layer])
    return table


def _selection_tables(sigma_id2: Sequence[float]) -> Iterator[Tuple[int, np.ndarray, np.ndarray]]:
    """Yield (relay, masks containing it, Pr(relay best | mask)) per relay."""
    n = len(sigma_id2)
    masks = np.arange(1 << n, dtype=np.int64)
    for i in range(n):
        ratios = [sigma_id2[i] / sigma_id2[j] for j in range(n) if j != i]
        given_others = _selection_given_others(ratios)
        with_i = masks[(masks >> i) & 1 == 1]
        low = with_i & ((1 << i) - 1)
        high = (with_i >> (i + 1)) << i
        yield i, with_i, given_others[low | high]


@dataclass(frozen=True)
class SubsetTables:
    """Weights and conditional probabilities for all 2^N decoding sets, indexed by mask."""

    weights: np.ndarray
    conditional_outage: np.ndarray
    conditional_intercept: np.ndarray
    selected: Tuple[float, ...]


def subset_tables(
    profile: ChannelProfile,
    delta: float,
    cap: int = ENUMERATION_CAP,
) -> SubsetTables:
    check_enumeration_cap(profile.n_relays, cap)
    delta = check_nonneg(delta, "delta")

    weights = _decoding_weights(profile.sigma_si2, delta)
    cond_out = _best_outage_table(profile.sigma_id2, delta)
    cond_out[0] = 1.0

    eav_above = np.zeros_like(weights)
    selected: List[float] = []
    for i, with_i, best in _selection_tables(profile.sigma_id2):
        eav_above[with_i] += best * math.exp(-delta / profile.sigma_ie2[i])
        selected.append(compensated_sum((weights[with_i] * best).tolist()))

    # 1 - Pr(source copy below) * Pr(relay copy below), composed without
    # subtracting from 1 so tiny intercept levels keep their precision.
    source_above = math.exp(-delta / profile.sigma_se2)
    cond_int = source_above + (1.0 - source_above) * eav_above
    cond_int[0] = source_above

    return SubsetTables(
        weights=weights,
        conditional_outage=cond_out,
        conditional_intercept=np.clip(cond_int, 0.0, 1.0),
        selected=tuple(selected),
    )


# ─── Public API ───────────────────────────────────────────────


def ors_outage(profile: ChannelProfile, delta: float, cap: int = ENUMERATION_CAP) -> float:
    """Total outage: empty decoding set, or the best relay's link below delta."""
    check_enumeration_cap(profile.n_relays, cap)
    delta = check_nonneg(delta, "delta")
    weights = _decoding_weights(profile.sigma_si2, delta)
    cond_out = _best_outage_table(profile.sigma_id2, delta)
    cond_out[0] = 1.0
    return clip_unit(compensated_sum((weights * cond_out).tolist()))


def ors_intercept(profile: ChannelProfile, delta: float, cap: int = ENUMERATION_CAP) -> float:
    """Total intercept probability summed over all decoding sets."""
    tables = subset_tables(profile, delta, cap)
    return clip_unit(compensated_sum((tables.weights * tables.conditional_intercept).tolist()))


def ors_srt(profile: ChannelProfile, delta: float, cap: int = ENUMERATION_CAP) -> SrtPoint:
    tables = subset_tables(profile, delta, cap)
    p_out = compensated_sum((tables.weights * tables.conditional_outage).tolist())
    p_int = compensated_sum((tables.weights * tables.conditional_intercept).tolist())
    return SrtPoint(p_out=clip_unit(p_out), p_int=clip_unit(p_int), provenance="analytic", label="ors")


def pr_selected(profile: ChannelProfile, delta: float, cap: int = ENUMERATION_CAP) -> Tuple[float, ...]:
    """Pr(relay i decodes and is the one selected), per relay."""
    return subset_tables(profile, delta, cap).selected
