"""
Data models for the security-reliability tradeoff engines.

Defines the system configuration (rate and SNR), the per-link average
channel gains, decoding sets and SRT points, together with the
SNR-normalised decoding thresholds every engine works with.

All models are frozen dataclasses validated on construction, so the
engines downstream may assume their invariants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

from srtsim.errors import DomainError
from srtsim.numerics import check_count, check_nonneg, check_positive, check_probability

PROVENANCES = ("analytic", "mc", "asymptotic")


# ─── Threshold operations ─────────────────────────────────────


def alpha_threshold(rate: float, snr: float) -> float:
    """Direct-transmission threshold (2^R - 1) / snr."""
    rate = check_nonneg(rate, "rate")
    snr = check_positive(snr, "snr")
    return math.expm1(rate * math.log(2.0)) / snr


def delta_threshold(rate: float, snr: float) -> float:
    """Two-slot relay threshold (2^(2R) - 1) / snr."""
    rate = check_nonneg(rate, "rate")
    snr = check_positive(snr, "snr")
    return math.expm1(2.0 * rate * math.log(2.0)) / snr


def mer_from_db(db: float) -> float:
    """Convert a ratio in dB to linear scale."""
    db = float(db)
    if not math.isfinite(db):
        raise DomainError(f"dB value must be finite, got {db!r}")
    try:
        return 10.0 ** (db / 10.0)
    except OverflowError:
        raise DomainError(f"{db!r} dB is out of floating-point range") from None


def snr_from_power(power: float, noise: float) -> float:
    """Linear SNR P / N0."""
    return check_positive(power, "power") / check_positive(noise, "noise")


def db_from_linear(value: float) -> float:
    return 10.0 * math.log10(check_positive(value, "linear ratio"))


# ─── System and channel models ────────────────────────────────


@dataclass(frozen=True)
class Thresholds:
    """Decoding thresholds on |h|^2 for one-slot (alpha) and two-slot (delta) links."""

    alpha: float
    delta: float

    def __post_init__(self) -> None:
        check_nonneg(self.alpha, "alpha")
        check_nonneg(self.delta, "delta")


@dataclass(frozen=True)
class SystemConfig:
    """
    Source data rate and transmit SNR.

    Attributes:
        rate: Data rate R_d in bits/s/Hz.
        snr: Linear SNR, P / N0.
    """

    rate: float
    snr: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "rate", check_nonneg(self.rate, "rate"))
        object.__setattr__(self, "snr", check_positive(self.snr, "snr"))

    @classmethod
    def from_db(cls, rate: float, snr_db: float) -> "SystemConfig":
        return cls(rate=rate, snr=mer_from_db(snr_db))

    @classmethod
    def from_power(cls, rate: float, power: float, noise: float) -> "SystemConfig":
        return cls(rate=rate, snr=snr_from_power(power, noise))

    @classmethod
    def from_delta(cls, delta: float, snr: float = 1.0) -> "SystemConfig":
        """Rate at which the two-slot threshold equals `delta` for the given SNR."""
        delta = check_nonneg(delta, "delta")
        snr = check_positive(snr, "snr")
        return cls(rate=0.5 * math.log2(1.0 + delta * snr), snr=snr)

    @property
    def snr_db(self) -> float:
        return db_from_linear(self.snr)

    @property
    def alpha(self) -> float:
        return alpha_threshold(self.rate, self.snr)

    @property
    def delta(self) -> float:
        return delta_threshold(self.rate, self.snr)

    @property
    def thresholds(self) -> Thresholds:
        return Thresholds(alpha=self.alpha, delta=self.delta)


@dataclass(frozen=True)
class ChannelProfile:
    """
    Average channel gains E|h|^2 of every link.

    Attributes:
        sigma_sd2: Source to destination.
        sigma_se2: Source to eavesdropper.
        sigma_si2: Source to relay i, one entry per relay.
        sigma_id2: Relay i to destination.
        sigma_ie2: Relay i to eavesdropper.
    """

    sigma_sd2: float
    sigma_se2: float
    sigma_si2: Tuple[float, ...] = ()
    sigma_id2: Tuple[float, ...] = ()
    sigma_ie2: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "sigma_sd2", check_positive(self.sigma_sd2, "sigma_sd2"))
        object.__setattr__(self, "sigma_se2", check_positive(self.sigma_se2, "sigma_se2"))
        lengths = set()
        for name in ("sigma_si2", "sigma_id2", "sigma_ie2"):
            gains = tuple(
                check_positive(g, f"{name}[{i}]") for i, g in enumerate(getattr(self, name))
            )
            object.__setattr__(self, name, gains)
            lengths.add(len(gains))
        if len(lengths) > 1:
            raise DomainError(
                "per-relay gain lists must have equal length, got "
                f"si={len(self.sigma_si2)}, id={len(self.sigma_id2)}, ie={len(self.sigma_ie2)}"
            )

    @property
    def n_relays(self) -> int:
        return len(self.sigma_si2)

    @property
    def mer(self) -> float:
        """Direct-link main-to-eavesdropper ratio sigma_sd2 / sigma_se2."""
        return self.sigma_sd2 / self.sigma_se2


@dataclass(frozen=True)
class IidProfile:
    """All main links share gain sigma_m2, all wiretap links share sigma_e2."""

    sigma_m2: float
    sigma_e2: float
    n_relays: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "sigma_m2", check_positive(self.sigma_m2, "sigma_m2"))
        object.__setattr__(self, "sigma_e2", check_positive(self.sigma_e2, "sigma_e2"))
        object.__setattr__(self, "n_relays", check_count(self.n_relays, "n_relays"))

    @classmethod
    def from_mer(cls, mer: float, n_relays: int, sigma_m2: float = 1.0) -> "IidProfile":
        mer = check_positive(mer, "mer")
        return cls(sigma_m2=sigma_m2, sigma_e2=sigma_m2 / mer, n_relays=n_relays)

    @property
    def mer(self) -> float:
        return self.sigma_m2 / self.sigma_e2

    def expand(self) -> ChannelProfile:
        n = self.n_relays
        return ChannelProfile(
            sigma_sd2=self.sigma_m2,
            sigma_se2=self.sigma_e2,
            sigma_si2=(self.sigma_m2,) * n,
            sigma_id2=(self.sigma_m2,) * n,
            sigma_ie2=(self.sigma_e2,) * n,
        )


# ─── Decoding sets ────────────────────────────────────────────


@dataclass(frozen=True)
class DecodingSet:
    """
    Relays that decoded the source message, as a bitmask over N relays.

    Bit i set means relay i (0-based) is a member.
    """

    mask: int
    n_relays: int

    def __post_init__(self) -> None:
        check_count(self.n_relays, "n_relays", minimum=0)
        if self.mask < 0 or self.mask >= (1 << self.n_relays):
            raise DomainError(
                f"mask {self.mask} does not describe a subset of {self.n_relays} relays"
            )

    @classmethod
    def from_members(cls, members: Sequence[int], n_relays: int) -> "DecodingSet":
        mask = 0
        for i in members:
            if not 0 <= i < n_relays:
                raise DomainError(f"relay index {i} out of range for N = {n_relays}")
            mask |= 1 << i
        return cls(mask=mask, n_relays=n_relays)

    @property
    def members(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.n_relays) if self.mask >> i & 1)

    @property
    def complement(self) -> "DecodingSet":
        full = (1 << self.n_relays) - 1
        return DecodingSet(mask=full & ~self.mask, n_relays=self.n_relays)

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    def __contains__(self, index: object) -> bool:
        return isinstance(index, int) and 0 <= index < self.n_relays and bool(self.mask >> index & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return self.size

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.members) + "}"


def all_decoding_sets(n_relays: int) -> Iterator[DecodingSet]:
    """Every subset of N relays in increasing bitmask order, empty set first."""
    for mask in range(1 << n_relays):
        yield DecodingSet(mask=mask, n_relays=n_relays)


# ─── Results ──────────────────────────────────────────────────


@dataclass(frozen=True)
class SrtPoint:
    """A paired (outage, intercept) probability and where it came from."""

    p_out: float
    p_int: float
    provenance: str = "analytic"
    label: Optional[str] = None

    def __post_init__(self) -> None:
        check_probability(self.p_out, "p_out")
        check_probability(self.p_int, "p_int")
        if self.provenance not in PROVENANCES:
            raise DomainError(f"unknown provenance {self.provenance!r}")


# ─── Run settings ─────────────────────────────────────────────


@dataclass(frozen=True)
class RunSettings:
    """Defaults for every run, read from config.yaml."""

    log_level: str = "INFO"
    trials: int = 1_000_000
    seed: int = 42
    confidence: float = 0.999
    workers: Optional[int] = None  # None: one per CPU
    output_format: str = "csv"
    enumeration_cap: int = 20

    @property
    def debug(self) -> bool:
        return self.log_level.upper() == "DEBUG"
