import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid
from scipy.special import sici

from pcg_mub.theory import (
    MubConfig,
    StandardCgConfig,
    allowed_m_residues,
    equivalent_forms_check,
    is_unbiased_config,
    momentum_period,
    rect_momentum_density,
    standard_cg_distribution,
)


def sinc2_bin(a, b):
    """Closed form of (1/pi) * integral_a^b sin(u)**2/u**2 du via the sine integral."""
    def prim(u):
        if u == 0.0:
            return 0.0
        return 2.0 * sici(2.0 * u)[0] - 2.0 * math.sin(u) ** 2 / u

    return (prim(b) - prim(a)) / (2.0 * math.pi)


class TestPredicate:
    def test_examples(self):
        assert is_unbiased_config(7, 3)
        assert not is_unbiased_config(10, 5)
        assert not is_unbiased_config(4, 8)

    def test_invalid(self):
        with pytest.raises(ValueError):
            is_unbiased_config(1, 1)
        with pytest.raises(ValueError):
            is_unbiased_config(4, 0)

    @pytest.mark.parametrize("d, expected", [
        (7, [1, 2, 3, 4, 5, 6]),
        (8, [1, 3, 5, 7]),
        (9, [1, 2, 4, 5, 7, 8]),
        (10, [1, 3, 7, 9]),
    ])
    def test_listed_residues(self, d, expected):
        assert allowed_m_residues(d) == expected

    @settings(max_examples=300, deadline=None)
    @given(st.integers(2, 1000), st.integers(1, 10**4))
    def test_gcd_characterisation(self, d, m):
        assert is_unbiased_config(d, m) == (m % d != 0 and math.gcd(m % d, d) == 1)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 300), st.integers(1, 10**4))
    def test_depends_on_residue_only(self, d, m):
        assert is_unbiased_config(d, m) == is_unbiased_config(d, m + d)

    @pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 97])
    def test_primes_allow_everything(self, p):
        assert len(allowed_m_residues(p)) == p - 1


class TestPeriods:
    def test_d4(self):
        tp = momentum_period(4, 1, 192.0)
        assert tp == pytest.approx(8 * math.pi / 192.0, rel=1e-15)
        assert momentum_period(4, 2, 192.0) == pytest.approx(tp / 2, rel=1e-15)
        assert MubConfig.from_m(4, 1, 192.0).tau_p == pytest.approx(48.0, rel=1e-14)

    def test_invalid(self):
        with pytest.raises(ValueError):
            momentum_period(4, 1, -1.0)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 50), st.integers(1, 100), st.integers(1, 5000))
    def test_exact_rational_product(self, d, m, tx):
        # T_p/(2 pi) is the rational d/(m T_x); the float must be its rounding
        ratio = Fraction(d, m * tx)
        tp = momentum_period(d, m, float(tx))
        assert tp / (2 * math.pi) == pytest.approx(float(ratio), rel=4e-16)
        cfg = MubConfig.from_m(d, m, float(tx))
        assert cfg.period_condition()

    def test_equivalent_forms(self):
        assert equivalent_forms_check(MubConfig.from_m(4, 1, 192.0))
        assert equivalent_forms_check(MubConfig.from_m(15, 1, 720.0))
        cfg = MubConfig.from_m(4, 1, 192.0)
        bent = MubConfig(cfg.d, cfg.m, cfg.tx, cfg.tp * 1.01)
        assert not equivalent_forms_check(bent)
        assert not bent.is_unbiased()

    def test_m_residue(self):
        cfg = MubConfig.from_m(10, 13, 100.0)
        assert cfg.m_residue == 3 and cfg.is_unbiased()


class TestStandardCg:
    def test_density_normalised(self):
        p = np.linspace(-2000, 2000, 2_000_001)
        rho = rect_momentum_density(p, 1.0)
        assert trapezoid(rho, p) == pytest.approx(1.0, abs=1e-3)

    def test_sum_near_one(self):
        cfg = StandardCgConfig(1.0, 2 * math.pi / 8)
        probs = standard_cg_distribution(cfg, range(-200, 201))
        assert probs.sum() >= 0.99

    def test_monotone_near_origin(self):
        cfg = StandardCgConfig(1.0, 2 * math.pi / 4)
        p0, p1, p2 = standard_cg_distribution(cfg, [0, 1, 2])
        assert p0 > p1 > p2

    def test_not_uniform(self):
        cfg = StandardCgConfig(1.0, 2 * math.pi / 8)
        probs = standard_cg_distribution(cfg, range(-2, 2))
        assert probs.max() - probs.min() > 0.01

    @pytest.mark.parametrize("delta_x, product", [(1.0, 2 * math.pi / 8), (37.0, 1.3), (0.2, 5.0)])
    def test_against_sine_integral(self, delta_x, product):
        cfg = StandardCgConfig(delta_x, product / delta_x)
        labels = range(-30, 31)
        probs = standard_cg_distribution(cfg, labels)
        half = product / 2
        oracle = [sinc2_bin((l - 0.5) * half, (l + 0.5) * half) for l in labels]
        assert np.max(np.abs(probs - oracle)) < 1e-8

    def test_invalid(self):
        with pytest.raises(ValueError):
            StandardCgConfig(0.0, 1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 200), st.lists(st.integers(1, 10**5), min_size=1, max_size=30))
def test_vectorised_predicate_matches_scalar(d, ms):
    from pcg_mub.theory import is_unbiased_many

    assert list(is_unbiased_many(d, ms)) == [is_unbiased_config(d, m) for m in ms]
