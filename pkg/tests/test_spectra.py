import numpy as np
import pytest

from zzsim.errors import RegimeError, TruncationError
from zzsim.spectra import (
    CsfqParams,
    FluxBias,
    SpectrumTable,
    TransmonParams,
    csfq_spectrum,
    flux_derivative,
    transmon_spectrum,
)

TRANSMON = TransmonParams(e_j=13.7, e_c=0.286)
CSFQ = CsfqParams(e_j=123.1, e_c=0.268, alpha=0.43)


class TestSpectrumTable:
    def test_arithmetic_identities(self):
        levels = np.array([0.0, 5.1, 10.0, 14.6])
        s = SpectrumTable(levels)
        assert np.allclose(s.transitions, np.diff(levels), atol=1e-12)
        assert np.allclose(s.anharmonicities, np.diff(np.diff(levels)), atol=1e-12)
        assert s.levels[0] == 0.0

    def test_rejects_unordered_levels(self):
        with pytest.raises(ValueError):
            SpectrumTable(np.array([0.0, 2.0, 1.5]))


class TestTransmon:
    def test_perturbative_oracle(self):
        # independent oracle: sqrt(8 E_J E_C) - E_C
        s = transmon_spectrum(TRANSMON)
        oracle = np.sqrt(8.0 * 13.7 * 0.286) - 0.286
        assert abs(s.omega01 - oracle) / s.omega01 < 0.015

    def test_negative_anharmonicity(self):
        assert transmon_spectrum(TRANSMON).delta < 0

    def test_frequency_scaling(self):
        s1 = transmon_spectrum(TRANSMON)
        s2 = transmon_spectrum(TransmonParams(e_j=4 * 13.7, e_c=0.286))
        assert abs(s2.omega01 / s1.omega01 - 2.0) < 0.1

    def test_offset_charge_negligible_in_transmon_regime(self):
        s0 = transmon_spectrum(TRANSMON, ng=0.0)
        s1 = transmon_spectrum(TRANSMON, ng=0.25)
        assert abs(s0.omega01 - s1.omega01) < 1e-4

    def test_regime_warning(self):
        with pytest.warns(UserWarning, match="transmon regime"):
            TransmonParams(e_j=1.0, e_c=0.3)

    def test_validation(self):
        with pytest.raises(ValueError):
            TransmonParams(e_j=-1.0, e_c=0.2)
        with pytest.raises(ValueError):
            TransmonParams(e_j=10.0, e_c=0.2, n_levels=80, charge_cutoff=30)
        with pytest.raises(ValueError):
            transmon_spectrum(TransmonParams(e_j=13.7, e_c=0.286, charge_cutoff=9))


class TestCsfq:
    def test_sweet_spot_frequency_and_anharmonicity(self):
        s = csfq_spectrum(CSFQ, 0.5)
        assert abs(s.omega01 - 5.06) / 5.06 < 0.05
        assert s.delta > 0
        assert abs(s.delta - 0.59) / 0.59 < 0.20

    def test_flux_symmetry(self):
        for f in (0.496, 0.48, 0.52):
            a = csfq_spectrum(CSFQ, f)
            b = csfq_spectrum(CSFQ, 1.0 - f)
            assert np.allclose(a.levels, b.levels, atol=1e-10)

    def test_sweet_spot_is_minimum(self):
        w = [csfq_spectrum(CSFQ, f).omega01 for f in (0.49, 0.494, 0.498, 0.5, 0.502, 0.506, 0.51)]
        center = w[3]
        assert all(x > center for i, x in enumerate(w) if i != 3)
        # monotone on either side
        assert w[0] > w[1] > w[2] > w[3] < w[4] < w[5] < w[6]

    def test_regime_error(self):
        with pytest.raises(RegimeError):
            CsfqParams(e_j=123.1, e_c=0.268, alpha=0.55)

    def test_basis_convergence(self):
        # doubling the phase grid moves the lowest transitions by < 1 kHz
        small = CsfqParams(e_j=123.1, e_c=0.268, alpha=0.43, basis_size=201)
        big = CsfqParams(e_j=123.1, e_c=0.268, alpha=0.43, basis_size=403)
        a = csfq_spectrum(small, 0.5)
        b = csfq_spectrum(big, 0.5)
        assert np.all(np.abs(a.transitions[:2] - b.transitions[:2]) < 1e-6)

    def test_truncation_error_raised(self):
        bad = CsfqParams(e_j=123.1, e_c=0.268, alpha=0.43, n_levels=6, basis_size=17)
        with pytest.raises(TruncationError):
            csfq_spectrum(bad, 0.5)


class TestFluxDerivative:
    def test_stationary_at_sweet_spot(self):
        assert abs(flux_derivative(CSFQ, 0.5)) < 1e-4

    def test_sign_above_sweet_spot(self):
        # frequency rises away from the sweet spot
        assert flux_derivative(CSFQ, 0.504) > 0
        assert flux_derivative(CSFQ, 0.496) < 0

    def test_gradient_grows_away_from_sweet_spot(self):
        assert abs(flux_derivative(CSFQ, 0.49)) > abs(flux_derivative(CSFQ, 0.496))

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            flux_derivative(CSFQ, 0.5, step=0.0)
        with pytest.raises(ValueError):
            FluxBias(1.5)
