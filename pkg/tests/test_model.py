import math

import numpy as np
import pytest

import difkit as dk
from difkit.model import spectral_density_from_config, spectral_density_to_config
from difkit.quadrature import QuadratureConfig

from conftest import load_config


class TestEvalSpectralDensity:
    def test_power_law_direct(self):
        spec = dk.PowerLawExpCutoff(A=1.0, s=1.0, omega_c=2.0, q=1.0)
        assert dk.eval_spectral_density(spec, 2.0) == pytest.approx(2.0 * math.exp(-1.0))

    def test_ldd_coincident_mirror(self):
        # one term, center zero: both mirrored Lorentzians coincide
        spec = dk.MultiLorentzDrude(terms=(dk.LorentzianTerm(lam=1.0, gamma=1.0),))
        assert dk.eval_spectral_density(spec, 1.0) == pytest.approx(1.0 / math.pi)

    def test_zero_frequency_all_families(self, context_unit):
        specs = [
            dk.MultiLorentzDrude(terms=(dk.LorentzianTerm(lam=1.0, gamma=1.0, omega_tilde=2.0),)),
            dk.TanhLorentzDrude(terms=(dk.LorentzianTerm(lam=1.0, gamma=1.0),)),
            dk.MeierTannor(terms=(dk.LorentzianTerm(lam=1.0, gamma=0.5, omega_tilde=1.0),)),
            dk.PowerLawExpCutoff(A=1.0, s=1.5, omega_c=2.0, q=2.0),
        ]
        for spec in specs:
            assert dk.eval_spectral_density(spec, 0.0, context_unit) == 0.0

    def test_tanh_requires_context(self):
        spec = dk.TanhLorentzDrude(terms=(dk.LorentzianTerm(lam=1.0, gamma=1.0),))
        with pytest.raises(ValueError):
            dk.eval_spectral_density(spec, 1.0)

    def test_nonfinite_frequency_rejected(self, debye_spec):
        with pytest.raises(ValueError):
            dk.eval_spectral_density(debye_spec, math.nan)

    def test_debye_constructor_recovers_single_lorentzian(self):
        spec = dk.debye(lam=2.0, gamma=1.5)
        w = 0.7
        expected = (w / math.pi) * 2.0 * 1.5 / (1.5 ** 2 + w ** 2)
        assert dk.eval_spectral_density(spec, w) == pytest.approx(expected, rel=1e-14)

    def test_nonnegative_on_grid_for_shipped_configs(self):
        for name in ("quantum_dot.json", "debye_bath.json", "meier_tannor.json",
                     "tanh_lorentz.json"):
            spec, context = spectral_density_from_config(load_config(name))
            wmax = 20.0 * spec.frequency_scale()
            w = np.linspace(0.0, wmax, 1000)
            assert np.all(dk.eval_spectral_density(spec, w, context) >= 0.0)


class TestOddExtension:
    def test_reflection(self):
        spec = dk.PowerLawExpCutoff(A=1.0, s=1.0, omega_c=2.0, q=1.0)
        assert dk.odd_extension(spec, None, -2.0) == pytest.approx(-2.0 * math.exp(-1.0))

    def test_zero(self, debye_spec):
        assert dk.odd_extension(debye_spec, None, 0.0) == 0.0

    def test_ldd_reflection(self, debye_spec):
        assert dk.odd_extension(debye_spec, None, -1.0) == pytest.approx(-1.0 / math.pi)

    def test_exact_oddness_sampled(self, debye_spec, context_unit):
        w = np.linspace(0.1, 30.0, 57)
        plus = dk.odd_extension(debye_spec, context_unit, w)
        minus = dk.odd_extension(debye_spec, context_unit, -w)
        assert np.array_equal(minus, -plus)


class TestReorganizationEnergy:
    def test_power_law_gamma_function(self):
        spec = dk.PowerLawExpCutoff(A=1.0, s=1.0, omega_c=1.0, q=1.0)
        assert dk.reorganization_energy(spec) == pytest.approx(1.0)

    def test_ldd_sum_of_couplings(self):
        spec = dk.MultiLorentzDrude(terms=(dk.LorentzianTerm(lam=2.0, gamma=1.0),))
        assert dk.reorganization_energy(spec) == pytest.approx(2.0)

    def test_zero_coupling(self):
        spec = dk.PowerLawExpCutoff(A=0.0, s=1.0, omega_c=1.0, q=1.0)
        assert dk.reorganization_energy(spec) == 0.0

    @pytest.mark.parametrize("terms", [
        ((1.0, 1.0, 0.0),),
        ((0.5, 2.0, 3.0), (1.5, 0.7, 1.0)),
        ((2.0, 0.3, 0.0),),
    ])
    def test_ldd_analytic_vs_quadrature(self, terms):
        spec = dk.MultiLorentzDrude(terms=tuple(
            dk.LorentzianTerm(lam=a, gamma=g, omega_tilde=w) for a, g, w in terms))
        analytic = dk.reorganization_energy(spec, method="analytic")
        quad = dk.reorganization_energy(spec, method="quadrature")
        assert quad == pytest.approx(analytic, rel=1e-8)

    @pytest.mark.parametrize("terms", [
        ((1.0, 0.5, 1.0),),
        ((1.0, 0.5, 1.0), (0.3, 1.2, 4.0)),
        ((2.0, 2.0, 0.5),),
    ])
    def test_meier_tannor_analytic_vs_quadrature(self, terms):
        spec = dk.MeierTannor(terms=tuple(
            dk.LorentzianTerm(lam=a, gamma=g, omega_tilde=w) for a, g, w in terms))
        analytic = dk.reorganization_energy(spec, method="analytic")
        quad = dk.reorganization_energy(spec, method="quadrature")
        assert quad == pytest.approx(analytic, rel=1e-8)

    @pytest.mark.parametrize("A,s,wc,q", [
        (1.0, 1.0, 1.0, 1.0), (0.5, 2.0, 3.0, 1.0), (2.0, 0.7, 1.3, 1.0),
        (0.027, 3.0, 2.2, 2.0), (1.0, 1.5, 2.0, 2.0), (1.0, 2.5, 0.8, 3.0),
    ])
    def test_power_law_analytic_vs_quadrature(self, A, s, wc, q):
        spec = dk.PowerLawExpCutoff(A=A, s=s, omega_c=wc, q=q)
        analytic = dk.reorganization_energy(spec, method="analytic")
        quad = dk.reorganization_energy(spec, method="quadrature")
        assert quad == pytest.approx(analytic, rel=1e-8)

    def test_tanh_has_no_closed_form(self, context_unit):
        spec = dk.TanhLorentzDrude(terms=(dk.LorentzianTerm(lam=1.0, gamma=1.0),))
        with pytest.raises(ValueError):
            dk.reorganization_energy(spec, context_unit, method="analytic")
        val = dk.reorganization_energy(spec, context_unit)
        assert math.isfinite(val) and val > 0


class TestContext:
    def test_temperature_conversion(self):
        ctx = dk.PhysicalContext.from_temperature(77.0)
        assert ctx.beta_hbar == pytest.approx(7.63824 / 77.0)

    def test_zero_temperature_flag(self):
        assert dk.PhysicalContext(beta_hbar=math.inf).is_zero_temperature

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            dk.PhysicalContext(beta_hbar=0.0)
        with pytest.raises(ValueError):
            dk.PhysicalContext.from_temperature(-1.0)


class TestExponentialBath:
    def test_rejects_growing_mode(self):
        with pytest.raises(ValueError):
            dk.BathTerm(p=1.0, omega=0.5)
        with pytest.raises(ValueError):
            dk.BathTerm(p=1.0, omega=1j)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            dk.ExponentialBath(terms=())

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            dk.BathTerm(p=complex(math.inf, 0), omega=-1.0)

    def test_imbalance_query(self):
        bath = dk.ExponentialBath(terms=(dk.BathTerm(p=1 + 1j, omega=-1.0),))
        assert bath.imaginary_imbalance() == pytest.approx(1.0 / math.sqrt(2.0))


class TestDiscretePath:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            dk.DiscretePath(s_plus=(1.0, 2.0), s_minus=(1.0,))

    def test_empty(self):
        with pytest.raises(ValueError):
            dk.DiscretePath(s_plus=(), s_minus=())


class TestJsonConfig:
    def test_round_trip_all_shipped(self):
        for name in ("quantum_dot.json", "debye_bath.json", "meier_tannor.json",
                     "tanh_lorentz.json"):
            spec, context = spectral_density_from_config(load_config(name))
            again, context2 = spectral_density_from_config(
                spectral_density_to_config(spec, context))
            assert again == spec
            if context is not None:
                assert context2.beta_hbar == pytest.approx(context.beta_hbar)

    def test_unknown_top_key_rejected(self):
        cfg = load_config("debye_bath.json")
        cfg["mystery"] = 1
        with pytest.raises(ValueError, match="unknown"):
            spectral_density_from_config(cfg)

    def test_unknown_term_key_rejected(self):
        cfg = load_config("debye_bath.json")
        cfg["terms"][0]["width"] = 1
        with pytest.raises(ValueError, match="unknown"):
            spectral_density_from_config(cfg)

    def test_both_temperatures_rejected(self):
        cfg = load_config("debye_bath.json")
        cfg["temperature_K"] = 300.0
        with pytest.raises(ValueError, match="not both"):
            spectral_density_from_config(cfg)

    def test_unknown_family_rejected(self):
        with pytest.raises(ValueError, match="family"):
            spectral_density_from_config({"family": "ohmic"})

    def test_temperature_key(self):
        cfg = load_config("quantum_dot.json")
        spec, context = spectral_density_from_config(cfg)
        assert context.beta_hbar == pytest.approx(7.63824 / 77.0)

    def test_bath_json_round_trip(self):
        bath = dk.ExponentialBath(terms=(
            dk.BathTerm(p=0.5 - 0.25j, omega=-1.0 + 5.0j),
            dk.BathTerm(p=0.5 + 0.25j, omega=-1.0 - 5.0j),
        ))
        ctx = dk.PhysicalContext(beta_hbar=0.7)
        data = dk.bath_to_json(bath, ctx)
        bath2, ctx2 = dk.bath_from_json(data)
        assert bath2 == bath
        assert ctx2.beta_hbar == ctx.beta_hbar

    def test_bath_json_unknown_key(self):
        with pytest.raises(ValueError, match="unknown"):
            dk.bath_from_json({"terms": [], "extra": 1})
