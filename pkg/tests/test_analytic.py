"""Closed-form amplitudes, efficiencies, and spectra."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import cavityqe as cq

import _oracles as orc

# parameter ranges keeping every quantity well inside float range
resonant_params = st.builds(
    cq.SystemParams,
    g0=st.floats(min_value=0.01, max_value=300.0),
    kappa=st.floats(min_value=0.01, max_value=300.0),
    gamma=st.floats(min_value=0.0, max_value=100.0),
)


class TestEfficiency:
    def test_baseline_oracle(self, baseline):
        br = cq.efficiency(baseline)
        assert br.eta_q == pytest.approx(orc.ETA_Q, rel=1e-14)
        assert br.eta_c == pytest.approx(orc.ETA_C, rel=1e-14)
        assert br.eta_extr == pytest.approx(orc.ETA_EXTR, rel=1e-14)
        assert br.law_kimble == pytest.approx(orc.ETA_C, rel=1e-14)
        assert br.law_kimble_error == pytest.approx(orc.LAW_KIMBLE_ERROR, rel=1e-14)

    @pytest.mark.parametrize(
        "kappa_ghz, expected",
        [
            (3.2, orc.ETA_Q_KAPPA_3P2),
            (8.0, orc.ETA_Q),
            (16.0, orc.ETA_Q_KAPPA_16),
        ],
    )
    def test_cavity_decay_variants(self, kappa_ghz, expected):
        p = cq.SystemParams.from_ghz(8.0, kappa_ghz, 0.16)
        assert cq.efficiency(p).eta_q == pytest.approx(expected, rel=1e-13)

    @given(resonant_params)
    def test_decomposition_identity(self, p):
        br = cq.efficiency(p)
        assert br.eta_q == pytest.approx(br.eta_c * br.eta_extr, rel=1e-14)
        assert 0.0 < br.eta_q <= 1.0
        assert br.law_kimble == pytest.approx(br.eta_c, rel=1e-12)

    def test_lossless_emitter_is_perfect(self):
        br = cq.efficiency(cq.SystemParams(g0=5.0, kappa=3.0, gamma=0.0))
        assert br.eta_q == 1.0
        assert br.law_kimble == 1.0
        assert br.law_kimble_error == 0.0

    def test_error_field_is_the_channeled_loss(self):
        for ratio in np.logspace(-2, 3, 13):
            gamma = 1.0
            p = cq.SystemParams(g0=4.0, kappa=ratio * gamma, gamma=gamma)
            br = cq.efficiency(p)
            expected = br.eta_c * gamma / (p.kappa + gamma)
            assert br.law_kimble_error == pytest.approx(expected, rel=1e-15)

    def test_detuned_is_rejected(self):
        with pytest.raises(cq.ResonanceRequiredError):
            cq.efficiency(cq.SystemParams(g0=1.0, kappa=1.0, gamma=0.1, delta=2.0))

    def test_monotone_in_parasitic_loss(self):
        etas = [
            cq.efficiency(cq.SystemParams(g0=5.0, kappa=5.0, gamma=g)).eta_q
            for g in (0.0, 0.1, 0.5, 2.0, 10.0)
        ]
        assert all(a > b for a, b in zip(etas, etas[1:]))


class TestPurcellRoute:
    def test_agrees_with_direct_route(self, baseline):
        p = cq.SystemParams.from_ghz(8.0, 8.0, 0.16, gamma0_ghz=0.002)
        pb = cq.efficiency_via_purcell(p)
        assert pb.eta_q == pytest.approx(cq.efficiency(baseline).eta_q, rel=1e-12)
        assert pb.beta == pytest.approx(cq.efficiency(baseline).eta_c, rel=1e-12)

    @given(
        p=resonant_params.filter(lambda q: q.gamma > 0.0),
        gamma0=st.floats(min_value=1e-4, max_value=10.0),
    )
    def test_free_space_rate_cancels(self, p, gamma0):
        tagged = cq.SystemParams(
            g0=p.g0, kappa=p.kappa, gamma=p.gamma, gamma0=gamma0
        )
        pb = cq.efficiency_via_purcell(tagged)
        assert pb.eta_q == pytest.approx(cq.efficiency(p).eta_q, rel=1e-12)

    def test_requires_free_space_rate(self, baseline):
        with pytest.raises(cq.ValidationError) as err:
            cq.efficiency_via_purcell(baseline)
        assert err.value.field_name == "gamma0"


class TestAmplitudes:
    def test_initial_state(self, baseline):
        pair = cq.amplitudes_at(baseline, 0.0)
        assert pair.E == 1.0 + 0.0j
        assert pair.C == 0.0j
        assert pair.norm() == 1.0

    def test_against_adaptive_reference_underdamped(self, baseline):
        from conftest import reference_amplitudes

        times = np.linspace(0.0, 0.5, 201)
        e_ref, c_ref = reference_amplitudes(baseline, times)
        e_vals, c_vals = cq.amplitudes_on_grid(baseline, times)
        np.testing.assert_allclose(e_vals, e_ref, atol=5e-10)
        np.testing.assert_allclose(c_vals, c_ref, atol=5e-10)

    @pytest.mark.parametrize(
        "params",
        [
            cq.SystemParams(g0=14.0, kappa=30.0, gamma=2.0),  # critical
            cq.SystemParams(g0=2.0, kappa=30.0, gamma=2.0),   # overdamped
            cq.SystemParams(g0=50.0, kappa=1.0, gamma=0.0),   # lossless emitter
        ],
    )
    def test_against_adaptive_reference_other_branches(self, params):
        from conftest import reference_amplitudes

        # keep the reference integrator accurate: bound both the decay
        # exponent and the accumulated oscillation phase over the window
        times = np.linspace(
            0.0, 30.0 / (params.kappa + params.gamma + params.g0), 301
        )
        e_ref, c_ref = reference_amplitudes(params, times)
        e_vals, c_vals = cq.amplitudes_on_grid(params, times)
        np.testing.assert_allclose(e_vals, e_ref, atol=5e-10)
        np.testing.assert_allclose(c_vals, c_ref, atol=5e-10)

    def test_branches_join_continuously(self):
        # tiny steps across critical damping barely move the amplitudes
        kappa, gamma = 30.0, 2.0
        g_crit = 0.5 * (kappa - gamma)
        times = np.linspace(0.0, 0.3, 50)
        below = cq.amplitudes_on_grid(
            cq.SystemParams(g0=g_crit * (1 - 1e-9), kappa=kappa, gamma=gamma), times
        )
        exact = cq.amplitudes_on_grid(
            cq.SystemParams(g0=g_crit, kappa=kappa, gamma=gamma), times
        )
        above = cq.amplitudes_on_grid(
            cq.SystemParams(g0=g_crit * (1 + 1e-9), kappa=kappa, gamma=gamma), times
        )
        for ref, other in ((exact, below), (exact, above)):
            np.testing.assert_allclose(ref[0], other[0], atol=1e-9)
            np.testing.assert_allclose(ref[1], other[1], atol=1e-9)

    @given(resonant_params, st.floats(min_value=0.0, max_value=5.0))
    def test_norm_never_exceeds_one(self, p, scaled_t):
        t = scaled_t / (p.kappa + p.gamma)
        assert cq.amplitudes_at(p, t).norm() <= 1.0 + 1e-12

    def test_negative_time_rejected(self, baseline):
        with pytest.raises(cq.ValidationError):
            cq.amplitudes_at(baseline, -0.1)

    def test_detuned_rejected(self):
        p = cq.SystemParams(g0=1.0, kappa=1.0, gamma=0.1, delta=1.0)
        with pytest.raises(cq.ResonanceRequiredError):
            cq.amplitudes_at(p, 0.1)


class TestEmissionProbability:
    def test_starts_at_zero_and_saturates_at_eta(self, baseline):
        assert cq.emission_probability_at(baseline, 0.0) == 0.0
        late = 45.0 / orc.TOTAL_DECAY
        assert cq.emission_probability_at(baseline, late) == pytest.approx(
            orc.ETA_Q, rel=1e-12
        )

    def test_matches_quadrature_of_the_rate(self, baseline):
        from scipy.integrate import quad

        t1 = 0.05
        integral, err = quad(
            lambda t: cq.emission_rate_at(baseline, t), 0.0, t1, limit=200
        )
        assert err < 1e-12
        assert cq.emission_probability_at(baseline, t1) == pytest.approx(
            integral, rel=1e-9
        )

    @given(
        resonant_params,
        st.floats(min_value=0.0, max_value=3.0),
        st.floats(min_value=0.0, max_value=3.0),
    )
    def test_monotone_nondecreasing(self, p, a, b):
        scale = 1.0 / (p.kappa + p.gamma)
        t1, t2 = sorted((a * scale, b * scale))
        p1 = cq.emission_probability_at(p, t1)
        p2 = cq.emission_probability_at(p, t2)
        assert p2 >= p1 - 1e-12
        assert p2 <= cq.efficiency(p).eta_q + 1e-12

    def test_rate_is_cavity_population_outflow(self, baseline):
        for t in (0.001, 0.01, 0.05, 0.2):
            pair = cq.amplitudes_at(baseline, t)
            assert cq.emission_rate_at(baseline, t) == pytest.approx(
                2.0 * baseline.kappa * abs(pair.C) ** 2, rel=1e-12
            )


class TestSpectrum:
    def test_even_in_detuning(self, baseline):
        grid = np.linspace(-300.0, 300.0, 4001)
        sg = cq.output_spectrum_analytic(baseline, grid)
        np.testing.assert_allclose(sg.density, sg.density[::-1], rtol=1e-12)

    def test_total_power_is_the_efficiency(self, baseline):
        span = 20.0 * orc.TOTAL_DECAY
        grid = np.linspace(-span, span, 40001)
        integral = cq.output_spectrum_analytic(baseline, grid).integral()
        assert integral == pytest.approx(orc.ETA_Q, rel=1e-3)

    def test_peak_offsets_match_dense_argmax(self):
        # narrow-line regime: losses far below the coupling
        p = cq.SystemParams(g0=50.0, kappa=2.5, gamma=2.5)
        d = cq.derive_rates(p)
        lo, hi = cq.spectrum_peak_offsets(d)
        assert hi == pytest.approx(orc_offset_expected(p), rel=1e-12)
        grid = np.linspace(-100.0, 100.0, 200001)
        sg = cq.output_spectrum_analytic(p, grid)
        argmax = grid[np.argmax(sg.density)]
        assert abs(argmax) == pytest.approx(hi, abs=2e-3)
        assert lo == -hi
        # the doublet sits near, but measurably inside, the oscillation rate
        assert hi < d.rabi.real

    def test_overdamped_spectrum_is_single_line(self):
        p = cq.SystemParams(g0=1.0, kappa=30.0, gamma=2.0)
        assert cq.spectrum_peak_offsets(cq.derive_rates(p)) == (0.0, 0.0)
        grid = np.linspace(-50.0, 50.0, 20001)
        sg = cq.output_spectrum_analytic(p, grid)
        assert abs(grid[np.argmax(sg.density)]) < 1e-6

    @given(resonant_params)
    @settings(max_examples=50)
    def test_density_nonnegative(self, p):
        grid = np.linspace(-10.0 * (p.kappa + p.gamma), 10.0 * (p.kappa + p.gamma), 101)
        sg = cq.output_spectrum_analytic(p, grid)
        assert np.all(sg.density >= 0.0)
        assert np.all(np.isfinite(sg.density))


def orc_offset_expected(p: cq.SystemParams) -> float:
    """Independent evaluation of the peak-offset expression."""
    total = p.kappa + p.gamma
    rabi_sq = p.g0**2 - 0.25 * (p.kappa - p.gamma) ** 2
    return math.sqrt(rabi_sq - 0.25 * total**2)
