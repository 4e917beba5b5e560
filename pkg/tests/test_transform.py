import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bank_configs
from twfpd.construct import build_bank
from twfpd.trigpoly import TrigPoly
from twfpd.transform import (
    OpCounter,
    ShapeError,
    analyze,
    analyze_level,
    coset_extract,
    coset_insert,
    complexity_report,
    convolve,
    downsample,
    subbands_direct,
    synth_lp,
    synth_standard,
    synthesize,
    upsample,
)

NAMES = ["example1", "example2", "example3", "example4"]


def flat_energy(dec) -> float:
    e = float((dec.coarse ** 2).sum())
    for lvl in dec.details:
        e += sum(float((d ** 2).sum()) for d in lvl.d_D + lvl.d_C)
    return e


def side(bank, levels: int = 1, base: int = 2) -> int:
    return base * bank.lam ** levels


class TestSampling:
    def test_down_then_up(self):
        x = np.arange(16.0).reshape(4, 4)
        y = upsample(downsample(x, 2), 2)
        assert np.array_equal(y[::2, ::2], x[::2, ::2]) and y[1::2].sum() == 0 and y[:, 1::2].sum() == 0

    def test_downsample_rejects_bad_shape(self):
        with pytest.raises(ShapeError):
            downsample(np.zeros((5, 4)), 2)

    def test_coset_round_trip(self):
        x = np.random.default_rng(0).standard_normal((6, 6))
        reps = [(0, 0), (1, 0), (0, 1), (-1, 1)]
        back = sum(coset_insert(coset_extract(x, nu, 2), nu, 2) for nu in reps)
        assert np.array_equal(back, x)

    def test_coset_extract_indexing(self):
        x = np.arange(8.0)
        # d(k) = x(2k - 1)
        assert np.array_equal(coset_extract(x, (1,), 2), x[[7, 1, 3, 5]])


class TestConvolve:
    def test_delta(self):
        x = np.random.default_rng(1).standard_normal((5, 5))
        assert np.array_equal(convolve(TrigPoly.constant(2, 1.0), x), x)

    def test_shift(self):
        x = np.zeros(6)
        x[0] = 1.0
        y = convolve(TrigPoly.monomial((2,)), x)
        assert y[2] == 1.0 and y.sum() == 1.0

    def test_lowpass_on_constant(self, banks):
        bank = banks["example1"]
        assert np.allclose(convolve(bank.tau, np.ones((4, 4))), 2.0)

    def test_counts_taps_times_samples(self):
        c = OpCounter()
        convolve(TrigPoly(1, {(0,): 1.0, (3,): 2.0}), np.zeros(10), c)
        assert c.total == 20

    def test_dim_mismatch(self):
        with pytest.raises(ShapeError):
            convolve(TrigPoly.constant(2, 1.0), np.zeros(4))


class TestAnalysisLevel:
    def test_constant_signal(self, banks):
        bank = banks["example1"]
        xj, d_D, d_C = analyze_level(bank, np.ones((8, 8)))
        assert np.allclose(xj, 2.0)
        assert all(np.allclose(d, 0.0) for d in d_D + d_C)

    def test_zero_signal(self, banks):
        xj, d_D, d_C = analyze_level(banks["example4"], np.zeros((8, 8)))
        assert not xj.any() and not any(d.any() for d in d_D + d_C)

    def test_impulse_gives_reflected_filter(self, banks):
        bank = banks["example1"]
        x = np.zeros((8, 8))
        x[0, 0] = 1.0
        xj, _, _ = analyze_level(bank, x)
        want = downsample(convolve(bank.tau.reflect(), x), 2)
        assert np.array_equal(xj, want)
        assert xj[0, 0] == 0.5

    @pytest.mark.parametrize("name", NAMES)
    def test_matches_direct_subbands(self, banks, name):
        bank = banks[name]
        s = side(bank, base=3)
        x = np.random.default_rng(2).standard_normal((s, s))
        xj, d_D, d_C = analyze_level(bank, x)
        for got, ref in zip([xj] + d_D + d_C, subbands_direct(bank, x)):
            assert np.max(np.abs(got - ref)) < 1e-12

    @settings(max_examples=25)
    @given(bank_configs(max_n=2, max_lam=3, max_m=2), st.integers(0, 2 ** 32 - 1))
    def test_random_banks_match_direct(self, cfg, seed):
        bank = build_bank(cfg)
        x = np.random.default_rng(seed).standard_normal((2 * cfg.lam,) * cfg.n)
        xj, d_D, d_C = analyze_level(bank, x)
        for got, ref in zip([xj] + d_D + d_C, subbands_direct(bank, x)):
            assert np.max(np.abs(got - ref)) < 1e-10

    def test_lambda_shift_equivariance(self, banks):
        bank = banks["example2"]
        x = np.random.default_rng(3).standard_normal((8, 8))
        a = analyze_level(bank, x)
        b = analyze_level(bank, np.roll(x, (2, -4), axis=(0, 1)))
        flat = lambda t: [t[0]] + t[1] + t[2]  # noqa: E731
        for u, v in zip(flat(a), flat(b)):
            assert np.allclose(np.roll(u, (1, -2), axis=(0, 1)), v, atol=1e-13)

    def test_rejects_bad_shape(self, banks):
        with pytest.raises(ShapeError):
            analyze_level(banks["example1"], np.zeros((6, 7)))
        with pytest.raises(ShapeError):
            analyze_level(banks["example1"], np.zeros(8))


class TestRoundTrip:
    @pytest.mark.parametrize("name,tol", [("example1", 1e-10), ("example2", 1e-10),
                                          ("example3", 1e-10), ("example4", 1e-9)])
    @pytest.mark.parametrize("mode", ["standard", "lp"])
    def test_single_level(self, banks, name, tol, mode):
        bank = banks[name]
        s = 9 if bank.lam == 3 else 8
        x = np.random.default_rng(4).standard_normal((s, s))
        dec = analyze(bank, x, 0)
        assert np.max(np.abs(synthesize(bank, dec, mode) - x)) < tol

    @pytest.mark.parametrize("name,s", [("example1", 16), ("example3", 27)])
    def test_two_levels(self, banks, name, s):
        bank = banks[name]
        x = np.random.default_rng(5).standard_normal((s, s))
        dec = analyze(bank, x, 1)
        assert dec.J == 1 and dec.coarse.shape == (s // bank.lam ** 2,) * 2
        for mode in ("standard", "lp"):
            assert np.max(np.abs(synthesize(bank, dec, mode) - x)) < 1e-10

    def test_modes_agree(self, banks):
        bank = banks["example4"]
        x = np.random.default_rng(6).standard_normal((16, 16))
        dec = analyze(bank, x, 2)
        assert np.allclose(synthesize(bank, dec, "standard"), synthesize(bank, dec, "lp"), atol=1e-12)

    @settings(max_examples=25)
    @given(bank_configs(max_n=2, max_lam=3, max_m=2), st.integers(0, 2 ** 32 - 1))
    def test_random_banks(self, cfg, seed):
        bank = build_bank(cfg)
        x = np.random.default_rng(seed).standard_normal((cfg.lam ** 2,) * cfg.n)
        dec = analyze(bank, x, 1)
        for mode in ("standard", "lp"):
            assert np.max(np.abs(synthesize(bank, dec, mode) - x)) < 1e-9

    def test_one_dimensional(self):
        from twfpd.construct import BankConfig, DirectionSpec
        bank = build_bank(BankConfig(1, 2, (DirectionSpec((1,), m=2),)))
        x = np.random.default_rng(7).standard_normal(32)
        dec = analyze(bank, x, 3)
        assert np.max(np.abs(synthesize(bank, dec) - x)) < 1e-10


class TestParseval:
    @pytest.mark.parametrize("name", NAMES)
    def test_energy_preserved(self, banks, name):
        bank = banks[name]
        s = 27 if bank.lam == 3 else 16
        x = np.random.default_rng(8).standard_normal((s, s))
        dec = analyze(bank, x, 1)
        assert abs(flat_energy(dec) - (x ** 2).sum()) / (x ** 2).sum() < 1e-9

    def test_broken_bank_loses_energy(self, banks):
        bank = banks["example1"].drop_complementary(0)
        x = np.random.default_rng(9).standard_normal((8, 8))
        xj, d_D, d_C = analyze_level(bank, x)
        assert len(d_C) == 4  # analysis still produces every coset
        e = (xj ** 2).sum() + sum((d ** 2).sum() for d in d_D) + sum((d ** 2).sum() for d in d_C[1:])
        assert (x ** 2).sum() - e > 1e-3


class TestErrors:
    def test_missing_complementary_subband(self, banks):
        bank = banks["example1"]
        xj, d_D, d_C = analyze_level(bank, np.zeros((8, 8)))
        with pytest.raises(ValueError, match="complementary"):
            synth_lp(bank, xj, d_C[:-1])
        with pytest.raises(ShapeError):
            synth_standard(bank, xj, d_D[:-1], d_C)

    def test_level_count_must_divide(self, banks):
        with pytest.raises(ShapeError, match="lam"):
            analyze(banks["example1"], np.zeros((12, 12)), 2)

    def test_negative_levels(self, banks):
        with pytest.raises(ValueError):
            analyze(banks["example1"], np.zeros((8, 8)), -1)

    def test_bad_mode(self, banks):
        dec = analyze(banks["example1"], np.zeros((8, 8)), 0)
        with pytest.raises(ValueError, match="mode"):
            synthesize(banks["example1"], dec, "fast")


class TestComplexity:
    def test_example1_counts(self, banks):
        rep = complexity_report(banks["example1"], 64 * 64)
        assert rep.alpha == 7 and rep.beta == [2, 2, 2]
        assert rep.lp_constant == 23
        assert rep.measured_lp == pytest.approx(rep.predicted_lp())
        assert sum(rep.measured_lp.values()) <= rep.lp_constant
        assert rep.measured_standard == pytest.approx(rep.implemented_standard())
        assert rep.standard_constant == 70
        assert sum(rep.measured_standard.values()) <= rep.standard_constant

    @pytest.mark.parametrize("name,const", [("example2", 26), ("example3", 53), ("example4", 33)])
    def test_lp_constants(self, banks, name, const):
        bank = banks[name]
        rep = complexity_report(bank, (18, 18) if bank.lam == 3 else (16, 16))
        assert rep.lp_constant == const
        assert rep.measured_lp == pytest.approx(rep.predicted_lp())
        assert sum(rep.measured_lp.values()) <= const

    def test_non_power_length(self, banks):
        with pytest.raises(ShapeError):
            complexity_report(banks["example1"], 63)

    def test_report_dict(self, banks):
        d = complexity_report(banks["example1"], (8, 8)).to_dict()
        assert d["lp_total_per_point"] == pytest.approx(7 + 6 / 4 + 7 + 7)
        assert "multiplications" in d["counting"]
