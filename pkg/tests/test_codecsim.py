import itertools
import math

import numpy as np
import pytest

from osdlat import _gf2
from osdlat.codecsim import (
    ConstructionError,
    OsdStats,
    build_ebch,
    decode_distance,
    encode,
    estimate_bler,
    message_from_codeword,
    osd_decode,
    required_snr_sim,
    sweep_csv_rows,
    transmit,
)
from osdlat.fblmath import Snr
from osdlat.oscomplexity import pattern_count


def all_codewords(code):
    words = []
    for bits in itertools.product((0, 1), repeat=code.k):
        words.append(encode(code, np.array(bits, dtype=np.uint8)))
    return np.array(words, dtype=np.uint8)


class TestConstruction:
    @pytest.mark.parametrize("n,k,d_min", [(8, 4, 4), (32, 16, 8), (64, 36, 12), (128, 64, 22)])
    def test_supported_codes(self, n, k, d_min):
        code = build_ebch(n, k)
        assert code.d_min == d_min
        assert code.generator.shape == (k, n)
        assert _gf2.rank(code.generator) == k
        assert code.construction == "ebch"

    def test_overall_parity_column(self, code6436):
        g = code6436.generator
        assert np.array_equal(g[:, -1], g[:, :-1].sum(axis=1) % 2)
        assert np.all(g.sum(axis=1) % 2 == 0)

    def test_extended_hamming_weight_distribution(self, code84):
        weights = np.bincount(all_codewords(code84).sum(axis=1), minlength=9)
        assert weights[0] == 1 and weights[4] == 14 and weights[8] == 1
        assert weights.sum() == 16

    def test_unsupported_parameters(self):
        with pytest.raises(ConstructionError):
            build_ebch(16, 9)
        with pytest.raises(ConstructionError):
            build_ebch(10, 5)
        with pytest.raises(ConstructionError):
            build_ebch(8, 8)


class TestEncode:
    def test_zero_message(self, code3216):
        assert not encode(code3216, np.zeros(16, dtype=np.uint8)).any()

    def test_linearity(self, code6436):
        rng = np.random.default_rng(0)
        for _ in range(50):
            u = rng.integers(0, 2, 36, dtype=np.uint8)
            v = rng.integers(0, 2, 36, dtype=np.uint8)
            assert np.array_equal(encode(code6436, u ^ v), encode(code6436, u) ^ encode(code6436, v))

    def test_length_mismatch(self, code84):
        with pytest.raises(ValueError):
            encode(code84, np.zeros(5, dtype=np.uint8))

    def test_sampled_weights_at_least_dmin(self, code6436):
        rng = np.random.default_rng(1)
        for _ in range(10_000):
            msg = rng.integers(0, 2, 36, dtype=np.uint8)
            if msg.any():
                assert encode(code6436, msg).sum() >= code6436.d_min

    def test_exhaustive_weights_small_code(self, code84):
        words = all_codewords(code84)
        nonzero = words[words.sum(axis=1) > 0]
        assert nonzero.sum(axis=1).min() == code84.d_min

    def test_message_recovery_round_trip(self, code12864):
        rng = np.random.default_rng(2)
        for _ in range(30):
            msg = rng.integers(0, 2, 64, dtype=np.uint8)
            assert np.array_equal(message_from_codeword(code12864, encode(code12864, msg)), msg)


class TestTransmit:
    def test_noiseless_limit(self, code3216):
        rng = np.random.default_rng(0)
        cw = encode(code3216, rng.integers(0, 2, 16, dtype=np.uint8))
        rx = transmit(code3216, cw, Snr(100.0), rng)
        symbols = 1.0 - 2.0 * cw
        assert np.allclose(rx.y, symbols, atol=1e-3)
        assert np.array_equal(np.sign(rx.llr), np.sign(symbols))

    def test_noise_variance(self, code6436):
        rho = Snr(3.0).linear
        rng = np.random.default_rng(42)
        cw = np.zeros(64, dtype=np.uint8)
        samples = []
        for _ in range(16_000):
            rx = transmit(code6436, cw, Snr(3.0), rng)
            samples.append(rx.y - 1.0)
        noise = np.concatenate(samples)
        assert noise.size >= 10**6
        assert noise.var() == pytest.approx(1.0 / rho, rel=0.01)

    def test_llr_convention(self, code84):
        rng = np.random.default_rng(3)
        cw = encode(code84, rng.integers(0, 2, 4, dtype=np.uint8))
        rx = transmit(code84, cw, Snr(1.5), rng)
        sigma2 = 1.0 / Snr(1.5).linear
        assert np.allclose(rx.llr, 2.0 * rx.y / sigma2, rtol=1e-12)

    def test_deterministic_given_seed(self, code84):
        cw = np.zeros(8, dtype=np.uint8)
        a = transmit(code84, cw, Snr(2.0), np.random.default_rng(9))
        b = transmit(code84, cw, Snr(2.0), np.random.default_rng(9))
        assert np.array_equal(a.y, b.y)


class TestOsdDecode:
    def test_noiseless_recovery(self, code6436):
        rng = np.random.default_rng(4)
        for s in (0, 1):
            msg = rng.integers(0, 2, 36, dtype=np.uint8)
            cw = encode(code6436, msg)
            rx = transmit(code6436, cw, Snr(60.0), rng)
            msg_hat, cw_hat = osd_decode(code6436, rx, s)
            assert np.array_equal(msg_hat, msg)
            assert np.array_equal(cw_hat, cw)

    def test_full_order_equals_ml(self, code84):
        words = all_codewords(code84)
        rng = np.random.default_rng(5)
        for _ in range(500):
            msg = rng.integers(0, 2, 4, dtype=np.uint8)
            rx = transmit(code84, encode(code84, msg), Snr(2.0), rng)
            _, cw_hat = osd_decode(code84, rx, 4)
            ml_dist = np.sum((rx.y - (1.0 - 2.0 * words)) ** 2, axis=1)
            assert decode_distance(rx, cw_hat) == pytest.approx(float(ml_dist.min()), abs=1e-9)

    def test_candidate_superset_property(self, code3216):
        rng = np.random.default_rng(6)
        for _ in range(200):
            msg = rng.integers(0, 2, 16, dtype=np.uint8)
            rx = transmit(code3216, encode(code3216, msg), Snr(1.0), rng)
            d0 = decode_distance(rx, osd_decode(code3216, rx, 0)[1])
            d1 = decode_distance(rx, osd_decode(code3216, rx, 1)[1])
            d2 = decode_distance(rx, osd_decode(code3216, rx, 2)[1])
            assert d1 <= d0 + 1e-12
            assert d2 <= d1 + 1e-12

    def test_output_is_codeword(self, code6436):
        h = _gf2.parity_check_matrix(code6436.generator)
        rng = np.random.default_rng(7)
        for _ in range(100):
            msg = rng.integers(0, 2, 36, dtype=np.uint8)
            rx = transmit(code6436, encode(code6436, msg), Snr(-2.0), rng)
            msg_hat, cw_hat = osd_decode(code6436, rx, 1)
            assert not (h.astype(np.int32) @ cw_hat.astype(np.int32) % 2).any()
            assert np.array_equal(encode(code6436, msg_hat), cw_hat)

    def test_pattern_counter_matches_closed_form(self, code3216):
        rng = np.random.default_rng(8)
        msg = rng.integers(0, 2, 16, dtype=np.uint8)
        rx = transmit(code3216, encode(code3216, msg), Snr(2.0), rng)
        for s in (0, 1, 2, 3):
            stats = OsdStats()
            osd_decode(code3216, rx, s, stats=stats)
            assert stats.decodes == 1
            assert stats.patterns_evaluated == pattern_count(16, s)

    def test_order_validation(self, code84):
        rng = np.random.default_rng(9)
        rx = transmit(code84, np.zeros(8, dtype=np.uint8), Snr(2.0), rng)
        with pytest.raises(ValueError):
            osd_decode(code84, rx, 99)

    def test_deterministic(self, code6436):
        rng = np.random.default_rng(10)
        msg = rng.integers(0, 2, 36, dtype=np.uint8)
        rx = transmit(code6436, encode(code6436, msg), Snr(0.0), rng)
        first = osd_decode(code6436, rx, 2)
        second = osd_decode(code6436, rx, 2)
        assert np.array_equal(first[1], second[1])


class TestEstimateBler:
    def test_reproducible_given_seed(self, code3216):
        a = estimate_bler(code3216, 1, Snr(3.0), min_errors=40, max_trials=20000, seed=13)
        b = estimate_bler(code3216, 1, Snr(3.0), min_errors=40, max_trials=20000, seed=13)
        assert a == b

    def test_worker_count_invariance(self, code84):
        a = estimate_bler(code84, 1, Snr(3.0), min_errors=60, max_trials=20000, seed=14, workers=1)
        b = estimate_bler(code84, 1, Snr(3.0), min_errors=60, max_trials=20000, seed=14, workers=2)
        assert a == b

    def test_zero_errors_flagged_as_upper_bound(self, code84):
        est = estimate_bler(code84, 4, Snr(50.0), min_errors=10, max_trials=2000, seed=15)
        assert est.errors == 0
        assert est.bler == 0.0
        assert est.upper_bound
        assert est.ci95_halfwidth == pytest.approx(3.0 / est.trials)

    def test_bler_decreases_with_snr(self, code84):
        ests = [
            estimate_bler(code84, 1, Snr(db), min_errors=200, max_trials=60000, seed=4)
            for db in (2.0, 4.0, 6.0)
        ]
        for lo, hi in zip(ests[1:], ests):
            assert lo.bler <= hi.bler + lo.ci95_halfwidth + hi.ci95_halfwidth

    def test_higher_order_no_worse(self, code84):
        e0 = estimate_bler(code84, 0, Snr(4.0), min_errors=200, max_trials=60000, seed=4)
        e2 = estimate_bler(code84, 2, Snr(4.0), min_errors=200, max_trials=60000, seed=4)
        assert e2.bler <= e0.bler + e0.ci95_halfwidth + e2.ci95_halfwidth

    def test_stats_accumulate_pattern_counts(self, code84):
        stats = OsdStats()
        est = estimate_bler(
            code84, 2, Snr(3.0), min_errors=30, max_trials=4000, seed=16, stats=stats
        )
        assert stats.decodes == est.trials
        assert stats.patterns_evaluated == est.trials * pattern_count(4, 2)


class TestRequiredSnrSim:
    def test_reproducible_across_seeds_within_grid_step(self, code84):
        thr = [
            required_snr_sim(code84, 4, 2e-2, min_errors=80, seed=seed, start_db=2.0)
            for seed in (2, 3)
        ]
        assert all(t.reached for t in thr)
        assert abs(thr[0].snr_db - thr[1].snr_db) <= 0.25 + 1e-12

    def test_sweep_recorded_and_monotone(self, code84):
        thr = required_snr_sim(code84, 4, 2e-2, min_errors=80, seed=2, start_db=2.0)
        assert len(thr.sweep) >= 2
        assert thr.sweep[-1].snr_db == pytest.approx(thr.snr_db)
        assert thr.sweep[-1].bler <= 2e-2
        rows = sweep_csv_rows(thr.sweep)
        assert len(rows) == len(thr.sweep) and len(rows[0]) == 6

    def test_required_snr_non_increasing_in_order(self, code84):
        thr0 = required_snr_sim(code84, 0, 2e-2, min_errors=80, seed=6)
        thr1 = required_snr_sim(code84, 1, 2e-2, min_errors=80, seed=6)
        assert thr0.reached and thr1.reached
        assert thr1.snr_db <= thr0.snr_db + 1e-12

    def test_not_reached_reported(self, code84):
        thr = required_snr_sim(
            code84, 0, 1e-6, min_errors=20, max_trials=2000, seed=8, span_db=1.0
        )
        assert not thr.reached
        assert math.isnan(thr.snr_db)
        assert len(thr.sweep) == 5
