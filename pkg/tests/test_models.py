"""
Tests for the data models.

Covers threshold derivation, dB conversion, channel profiles and
decoding-set bookkeeping.
"""

import math

import numpy as np
import pytest

from srtsim.errors import DomainError
from srtsim.models import (
    ChannelProfile,
    DecodingSet,
    IidProfile,
    RunSettings,
    SrtPoint,
    SystemConfig,
    all_decoding_sets,
    alpha_threshold,
    db_from_linear,
    delta_threshold,
    mer_from_db,
)


# ─── Thresholds ───────────────────────────────────────────────


class TestAlphaThreshold:
    def test_zero_rate(self):
        assert alpha_threshold(0.0, 5.0) == 0.0

    def test_unit_rate_unit_snr(self):
        assert alpha_threshold(1.0, 1.0) == pytest.approx(1.0)

    def test_rate_two(self):
        assert alpha_threshold(2.0, 10.0) == pytest.approx(0.3)

    @pytest.mark.parametrize("snr", [0.0, -1.0, math.inf, math.nan])
    def test_bad_snr(self, snr):
        with pytest.raises(DomainError):
            alpha_threshold(1.0, snr)

    def test_negative_rate(self):
        with pytest.raises(DomainError):
            alpha_threshold(-0.5, 1.0)


class TestDeltaThreshold:
    def test_zero_rate(self):
        assert delta_threshold(0.0, 3.0) == 0.0

    def test_unit_rate(self):
        assert delta_threshold(1.0, 1.0) == pytest.approx(3.0)

    def test_half_rate(self):
        assert delta_threshold(0.5, 2.0) == pytest.approx(0.5)

    def test_exceeds_alpha_for_positive_rate(self):
        assert delta_threshold(0.7, 3.0) > alpha_threshold(0.7, 3.0)


class TestThresholdMonotonicity:
    @pytest.mark.parametrize("threshold", [alpha_threshold, delta_threshold])
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_increasing_in_rate(self, threshold, seed):
        rng = np.random.default_rng(seed)
        snr = float(np.exp(rng.uniform(math.log(0.01), math.log(100.0))))
        rates = np.sort(rng.uniform(0.0, 8.0, 40))
        values = [threshold(float(r), snr) for r in rates]
        assert all(b > a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("threshold", [alpha_threshold, delta_threshold])
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_decreasing_in_snr(self, threshold, seed):
        rng = np.random.default_rng(seed)
        rate = float(rng.uniform(0.01, 8.0))
        snrs = np.sort(np.exp(rng.uniform(math.log(1e-3), math.log(1e3), 40)))
        values = [threshold(rate, float(s)) for s in snrs]
        assert all(b < a for a, b in zip(values, values[1:]))


class TestDecibels:
    def test_zero_db(self):
        assert mer_from_db(0.0) == 1.0

    def test_ten_db(self):
        assert mer_from_db(10.0) == pytest.approx(10.0)

    def test_five_db(self):
        assert mer_from_db(5.0) == pytest.approx(3.16227766, rel=1e-9)

    def test_round_trip(self):
        assert db_from_linear(mer_from_db(12.0)) == pytest.approx(12.0)

    def test_out_of_range(self):
        with pytest.raises(DomainError, match="range"):
            mer_from_db(4000.0)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            mer_from_db(math.inf)


# ─── System config ────────────────────────────────────────────


class TestSystemConfig:
    def test_thresholds(self):
        config = SystemConfig(rate=1.0, snr=1.0)
        assert config.alpha == pytest.approx(1.0)
        assert config.delta == pytest.approx(3.0)
        assert config.thresholds.alpha == config.alpha

    def test_from_db(self):
        config = SystemConfig.from_db(1.0, 10.0)
        assert config.snr == pytest.approx(10.0)
        assert config.snr_db == pytest.approx(10.0)

    def test_from_power(self):
        assert SystemConfig.from_power(1.0, 4.0, 2.0).snr == pytest.approx(2.0)

    def test_from_delta_recovers_delta(self):
        config = SystemConfig.from_delta(0.1, 2.0)
        assert config.delta == pytest.approx(0.1, rel=1e-12)
        assert config.snr == 2.0

    def test_rejects_zero_snr(self):
        with pytest.raises(DomainError):
            SystemConfig(rate=1.0, snr=0.0)


# ─── Channel profiles ─────────────────────────────────────────


class TestChannelProfile:
    def test_relay_count_and_mer(self):
        profile = ChannelProfile(2.0, 0.5, (1.0, 1.0), (1.0, 2.0), (0.1, 0.2))
        assert profile.n_relays == 2
        assert profile.mer == pytest.approx(4.0)

    def test_lists_become_tuples(self):
        profile = ChannelProfile(1.0, 1.0, [1.0], [1.0], [1.0])
        assert profile.sigma_si2 == (1.0,)

    def test_unequal_lengths(self):
        with pytest.raises(DomainError, match="equal length"):
            ChannelProfile(1.0, 1.0, (1.0, 1.0), (1.0,), (1.0, 1.0))

    def test_non_positive_gain(self):
        with pytest.raises(DomainError, match=r"sigma_id2\[1\]"):
            ChannelProfile(1.0, 1.0, (1.0, 1.0), (1.0, 0.0), (1.0, 1.0))

    def test_no_relays(self):
        assert ChannelProfile(1.0, 1.0).n_relays == 0


class TestIidProfile:
    def test_from_mer(self):
        iid = IidProfile.from_mer(10.0, 3)
        assert iid.sigma_m2 == 1.0
        assert iid.sigma_e2 == pytest.approx(0.1)
        assert iid.mer == pytest.approx(10.0)

    def test_expand(self):
        profile = IidProfile(2.0, 0.5, 3).expand()
        assert profile.sigma_sd2 == 2.0
        assert profile.sigma_se2 == 0.5
        assert profile.sigma_si2 == (2.0, 2.0, 2.0)
        assert profile.sigma_id2 == (2.0, 2.0, 2.0)
        assert profile.sigma_ie2 == (0.5, 0.5, 0.5)

    def test_needs_a_relay(self):
        with pytest.raises(DomainError):
            IidProfile(1.0, 1.0, 0)


# ─── Decoding sets ────────────────────────────────────────────


class TestDecodingSet:
    def test_from_members(self):
        dset = DecodingSet.from_members([0, 2], 3)
        assert dset.mask == 5
        assert dset.members == (0, 2)
        assert dset.size == 2
        assert len(dset) == 2

    def test_complement(self):
        dset = DecodingSet.from_members([0, 2], 3)
        assert dset.complement.members == (1,)

    def test_membership(self):
        dset = DecodingSet.from_members([1], 3)
        assert 1 in dset
        assert 0 not in dset
        assert 7 not in dset

    def test_str(self):
        assert str(DecodingSet.from_members([0, 2], 3)) == "{0,2}"
        assert str(DecodingSet(0, 2)) == "{}"

    def test_out_of_range_member(self):
        with pytest.raises(DomainError):
            DecodingSet.from_members([3], 3)

    def test_mask_too_large(self):
        with pytest.raises(DomainError):
            DecodingSet(mask=8, n_relays=3)

    def test_all_sets_order(self):
        sets = list(all_decoding_sets(2))
        assert [s.mask for s in sets] == [0, 1, 2, 3]
        assert sets[0].is_empty

    def test_all_sets_count(self):
        assert len(list(all_decoding_sets(4))) == 16


# ─── Results and settings ─────────────────────────────────────


class TestSrtPoint:
    def test_valid(self):
        point = SrtPoint(p_out=0.1, p_int=0.2, provenance="mc")
        assert point.provenance == "mc"

    def test_probability_range(self):
        with pytest.raises(DomainError):
            SrtPoint(p_out=1.5, p_int=0.2)

    def test_unknown_provenance(self):
        with pytest.raises(DomainError):
            SrtPoint(p_out=0.1, p_int=0.2, provenance="guess")


class TestRunSettings:
    def test_defaults(self):
        settings = RunSettings()
        assert settings.trials == 1_000_000
        assert settings.confidence == 0.999
        assert settings.enumeration_cap == 20
        assert not settings.debug

    def test_debug(self):
        assert RunSettings(log_level="debug").debug
