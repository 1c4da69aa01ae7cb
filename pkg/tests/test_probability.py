import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcg_mub.exceptions import (
    DomainMismatchError,
    TruncationCapExceededError,
    WindowLeakageWarning,
)
from pcg_mub.grid import MOMENTUM, GaussianSpec, Grid, make_gaussian
from pcg_mub.masks import PcgBasis, masked_state, prepare_state, state_grid
from pcg_mub.probability import (
    OutcomeDistribution,
    SeriesParams,
    conditional_matrix,
    pcg_probs_quadrature,
    pcg_probs_series,
    row_entropies,
    shannon_entropy,
)
from pcg_mub.theory import allowed_m_residues, momentum_period

G = GaussianSpec(520.0)


def bases(d, m, tx=192.0, x_cen=0.0, p_cen=0.0):
    return PcgBasis(d, tx, x_cen), PcgBasis(d, momentum_period(d, m, tx), p_cen, MOMENTUM)


def centred(d, m, tx=192.0):
    tp = momentum_period(d, m, tx)
    return bases(d, m, tx, p_cen=-0.5 * tp / d)


class TestOutcomeDistribution:
    def test_clips_rounding_noise(self):
        dist = OutcomeDistribution([0.5, 0.5 + 5e-13, -5e-13])
        assert dist.probs.min() == 0.0

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            OutcomeDistribution([0.6, 0.5, -1e-6])

    def test_conditional(self):
        dist = OutcomeDistribution([1.0, 3.0])
        assert np.allclose(dist.conditional(), [0.25, 0.75])
        assert dist.d == 2


class TestSeriesParams:
    def test_bounds(self):
        with pytest.raises(ValueError):
            SeriesParams(eps_truncate=1e-6)
        with pytest.raises(ValueError):
            SeriesParams(eps_truncate=0.0)

    def test_cap(self):
        bx, bp = bases(4, 1)
        prep = masked_state(G, bx, 0)
        with pytest.raises(TruncationCapExceededError):
            pcg_probs_series(prep, bp, SeriesParams(n_max_cap=3))


class TestSeries:
    def test_unbiased_d4(self):
        bx, bp = bases(4, 1)
        dist = pcg_probs_series(masked_state(G, bx, 0), bp)
        assert np.max(np.abs(dist.probs - 0.25)) < 1e-9
        assert dist.imag_residue < 1e-10

    def test_m2_biased(self):
        bx, bp = centred(4, 2)
        dist = pcg_probs_series(masked_state(G, bx, 0), bp)
        assert shannon_entropy(dist) < 2.0 - 0.5

    @pytest.mark.parametrize("p_cen", [0.0123, -0.5, 3.7])
    def test_pcen_irrelevant(self, p_cen):
        bx, bp = bases(4, 1, p_cen=p_cen)
        dist = pcg_probs_series(masked_state(G, bx, 2), bp)
        assert np.max(np.abs(dist.probs - 0.25)) < 1e-9

    def test_domain_check(self):
        bx, _ = bases(4, 1)
        with pytest.raises(DomainMismatchError):
            pcg_probs_series(masked_state(G, bx, 0), bx)


class TestQuadrature:
    def test_agrees_with_series_d4(self):
        bx, bp = bases(4, 1)
        grid = state_grid(G, bx, bp.period)
        _, wf = prepare_state(G, bx, 1, grid)
        quad = pcg_probs_quadrature(wf, bp)
        series = pcg_probs_series(masked_state(G, bx, 1), bp)
        assert np.max(np.abs(quad.probs - series.probs)) < 1e-6
        assert quad.total == pytest.approx(1.0, abs=1e-6)

    def test_unmasked_gaussian_fine_period(self):
        # 2 pi / T_p = 40000 um, far beyond the 8-sigma envelope
        tp = 2 * np.pi / 40000.0
        bp = PcgBasis(4, tp, 0.0, MOMENTUM)
        grid = Grid(3200, -8000.0 + 2.5, 5.0)
        wf = make_gaussian(grid, G)
        with warnings.catch_warnings():
            warnings.simplefilter("error", WindowLeakageWarning)
            dist = pcg_probs_quadrature(wf, bp)
        assert np.max(np.abs(dist.probs - 0.25)) < 1e-6

    def test_warns_on_incommensurate_zone(self):
        bx, bp = bases(4, 1)
        _, wf = prepare_state(G, bx, 0)
        odd = PcgBasis(4, bp.period * 1.0137, 0.0, MOMENTUM)
        with pytest.warns(WindowLeakageWarning):
            pcg_probs_quadrature(wf, odd)

    @settings(max_examples=10, deadline=None)
    @given(st.integers(2, 8), st.integers(1, 9), st.floats(0, 1), st.floats(0, 1))
    def test_sums_to_one(self, d, m, fx, fp):
        bx, bp = bases(d, m)
        bx = PcgBasis(d, bx.period, fx * bx.period)
        bp = PcgBasis(d, bp.period, fp * bp.period, MOMENTUM)
        _, wf = prepare_state(G, bx, 0, state_grid(G, bx, bp.period))
        assert pcg_probs_quadrature(wf, bp).total == pytest.approx(1.0, abs=1e-6)


class TestConditionalMatrix:
    def test_d4_uniform(self):
        mat = conditional_matrix(G, *bases(4, 1))
        assert np.max(np.abs(mat - 0.25)) < 1e-6
        assert np.allclose(mat.sum(axis=1), 1.0, atol=1e-9)

    def test_d2(self):
        mat = conditional_matrix(G, *bases(2, 1))
        assert np.max(np.abs(mat - 0.5)) < 1e-6

    def test_d4_m2_biased_row(self):
        mat = conditional_matrix(G, *centred(4, 2), method="quadrature")
        assert mat.max(axis=1).max() > 0.3

    def test_even_m_with_axis_origin(self):
        # origin on the axis: mirror-symmetric bins make even m uniform too
        mat = conditional_matrix(G, *bases(4, 2))
        assert np.max(np.abs(mat - 0.25)) < 1e-9

    def test_jobs_do_not_change_result(self):
        b = centred(6, 5, 180.0)
        one = conditional_matrix(G, *b)
        many = conditional_matrix(G, *b, jobs=4)
        assert np.array_equal(one, many)

    def test_dimension_mismatch(self):
        bx, _ = bases(4, 1)
        _, bp = bases(5, 1)
        with pytest.raises(ValueError):
            conditional_matrix(G, bx, bp)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            conditional_matrix(G, *bases(4, 1), method="magic")

    def test_swapped_roles(self):
        # narrow beam: its momentum envelope spans several momentum periods
        g = GaussianSpec(0.5)
        bx, bp = bases(4, 1, x_cen=13.0, p_cen=0.04)
        for method in ("series", "quadrature"):
            mat = conditional_matrix(g, bp, bx, method)
            assert np.max(np.abs(mat - 0.25)) < 1e-9

    def test_swapped_roles_biased_when_disallowed(self):
        g = GaussianSpec(0.5)
        tp = momentum_period(4, 2, 192.0)
        bx = PcgBasis(4, 192.0, -24.0)
        bp = PcgBasis(4, tp, 0.0, MOMENTUM)
        mat = conditional_matrix(g, bp, bx)
        assert row_entropies(mat).min() < 2.0 - 0.05


class TestEntropy:
    def test_values(self):
        assert shannon_entropy(np.full(4, 0.25)) == 2.0
        assert shannon_entropy(np.array([1.0, 0, 0, 0])) == 0.0
        assert shannon_entropy(np.array([0.5, 0.5, 0, 0])) == 1.0

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0, 1), min_size=2, max_size=20).filter(lambda v: sum(v) > 1e-3))
    def test_bounds(self, vals):
        p = np.array(vals) / sum(vals)
        h = shannon_entropy(p)
        assert 0.0 <= h <= math.log2(len(vals))


@pytest.mark.parametrize("d", range(2, 16))
def test_negative_control(d):
    """Disallowed residues leave some row clearly below log2 d (centred momentum bins)."""
    bad = [m for m in range(1, d) if m not in allowed_m_residues(d)]
    for m in bad:
        mat = conditional_matrix(G, *centred(d, m))
        assert row_entropies(mat).min() < math.log2(d) - 0.05, (d, m)


@pytest.mark.parametrize("d, m", [(4, 2), (6, 3), (9, 6), (12, 8)])
def test_negative_control_by_quadrature(d, m):
    mat = conditional_matrix(G, *centred(d, m), method="quadrature")
    assert row_entropies(mat).min() < math.log2(d) - 0.05
