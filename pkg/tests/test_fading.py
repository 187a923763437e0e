import math

import numpy as np
import pytest
from scipy import integrate, stats

from swiptsec.fading import (
    FadingSpec,
    SnrLaw,
    law_from_coefficient,
    max_of_n_cdf,
    sample_channel_power,
    snr_cdf,
    snr_pdf,
    snr_sf,
)

LAWS = [
    SnrLaw(FadingSpec.rician(0.0), 1.0),
    SnrLaw(FadingSpec.rician(5.0), 0.26),
    SnrLaw(FadingSpec.rician(12.0), 3.0),
    SnrLaw(FadingSpec.nakagami(1.0), 1.0),
    SnrLaw(FadingSpec.nakagami(2.0), 0.09),
    SnrLaw(FadingSpec.nakagami(3.27), 1.7),
    SnrLaw(FadingSpec.nakagami(0.6), 0.5),
]
IDS = ["ric0", "ric5", "ric12", "nak1", "nak2", "nak3.27", "nak0.6"]


def test_unit_exponential_reductions():
    assert snr_pdf(SnrLaw(FadingSpec.nakagami(1), 1.0), 0.0) == 1.0
    assert snr_pdf(SnrLaw(FadingSpec.rician(0), 1.0), 0.0) == 1.0
    law = SnrLaw(FadingSpec.nakagami(1), 2.5)
    assert snr_cdf(law, 1.0 / 2.5) == pytest.approx(1 - math.exp(-1), rel=1e-14)


def test_nakagami_mode_matches_grid_argmax():
    law = SnrLaw(FadingSpec.nakagami(2.0), 0.4)
    grid = np.linspace(0, 20, 200001)
    mode_grid = grid[np.argmax(snr_pdf(law, grid))]
    # gamma^{m-1} e^{-lam gamma} peaks at (m - 1) / lam
    assert mode_grid == pytest.approx(1.0 / 0.4, abs=1e-3)


@pytest.mark.parametrize("law", LAWS, ids=IDS)
def test_cdf_limits(law):
    assert snr_cdf(law, 0.0) == 0.0
    assert snr_cdf(law, 1e6 / law.rate_scale) == pytest.approx(1.0, abs=1e-9)
    assert snr_cdf(law, math.inf) == 1.0


@pytest.mark.parametrize("law", LAWS, ids=IDS)
def test_pdf_normalized(law):
    scale = 1.0 / law.rate_scale
    val, _ = integrate.quad(lambda g: snr_pdf(law, g), 0, np.inf, epsabs=1e-12, epsrel=1e-10,
                            points=None, limit=400)
    if val == 0:  # quad missed the bulk; integrate on the natural scale
        val, _ = integrate.quad(lambda g: snr_pdf(law, g), 0, 200 * scale, limit=400)
    assert abs(val - 1.0) <= 1e-6


@pytest.mark.parametrize("law", LAWS, ids=IDS)
def test_cdf_monotone(law):
    g = np.sort(np.random.default_rng(1).exponential(law.mean * 3, 2000))
    assert np.all(np.diff(snr_cdf(law, g)) >= 0)


@pytest.mark.parametrize("law", LAWS, ids=IDS)
def test_sf_complements_cdf(law):
    g = np.linspace(0, 8 * law.mean, 50)
    assert np.allclose(snr_sf(law, g) + snr_cdf(law, g), 1.0, atol=1e-14)


@pytest.mark.parametrize("law", LAWS, ids=IDS)
def test_finite_difference_of_cdf_matches_pdf(law):
    rng = np.random.default_rng(7)
    g = rng.uniform(0.05, 4.0, 50) * law.mean
    h = 1e-5 * law.mean
    fd = (snr_cdf(law, g + h) - snr_cdf(law, g - h)) / (2 * h)
    assert np.allclose(fd, snr_pdf(law, g), rtol=1e-4, atol=0)


def test_rician_against_scipy_rice():
    # |h| Rician with nu = sqrt(K/(K+1)), sigma^2 = 1/(2(K+1)); SNR = A |h|^2
    k, a = 5.0, 3.0
    law = law_from_coefficient(FadingSpec.rician(k), a)
    sigma = math.sqrt(0.5 / (k + 1))
    rice = stats.rice(math.sqrt(k / (k + 1)) / sigma, scale=sigma)
    g = np.linspace(0.01, 12, 40)
    assert np.allclose(snr_cdf(law, g), rice.cdf(np.sqrt(g / a)), atol=1e-12)


def test_nakagami_approximates_rician():
    k = 5.0
    m = (k + 1) ** 2 / (2 * k + 1)
    ric = law_from_coefficient(FadingSpec.rician(k), 1.0)
    nak = law_from_coefficient(FadingSpec.nakagami(m), 1.0)
    g = np.linspace(0, 6, 3001)
    assert np.max(np.abs(snr_cdf(ric, g) - snr_cdf(nak, g))) <= 0.03


def test_integer_and_gamma_branches_agree():
    g = np.linspace(0, 10, 101)
    for m in (1, 2, 4):
        law_int = SnrLaw(FadingSpec.nakagami(m), 0.8)
        assert np.allclose(snr_cdf(law_int, g), stats.gamma(m, scale=1 / 0.8).cdf(g), atol=1e-14)


class TestMaxOfN:
    def test_n_one_is_identity(self):
        law = LAWS[1]
        g = np.linspace(0, 20, 30)
        assert np.array_equal(max_of_n_cdf(law, 1, g), snr_cdf(law, g))

    def test_median_power(self):
        law = SnrLaw(FadingSpec.nakagami(1), 1.0)
        assert max_of_n_cdf(law, 5, math.log(2)) == pytest.approx(0.03125, rel=1e-13)

    def test_no_underflow_nan(self):
        law = SnrLaw(FadingSpec.nakagami(2), 1.0)
        out = max_of_n_cdf(law, 10_000, np.array([0.0, 1e-300, 1.0, 50.0]))
        assert np.all(np.isfinite(out)) and out[0] == 0.0

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            max_of_n_cdf(LAWS[0], 0, 1.0)


class TestSampling:
    @pytest.mark.parametrize("fad", [FadingSpec.nakagami(2), FadingSpec.rician(5)], ids=["nak2", "ric5"])
    def test_mean_is_unit(self, fad):
        x = sample_channel_power(fad, 10**6, 11)
        assert abs(x.mean() - 1.0) <= 3 * x.std() / math.sqrt(x.size)

    def test_mean_power_scales(self):
        x = sample_channel_power(FadingSpec.rician(2.0, mean_power=4.0), 200_000, 3)
        assert x.mean() == pytest.approx(4.0, rel=0.01)

    def test_deterministic(self):
        fad = FadingSpec.rician(5)
        a = sample_channel_power(fad, 1000, 42)
        b = sample_channel_power(fad, 1000, 42)
        assert a.tobytes() == b.tobytes()
        assert not np.array_equal(a, sample_channel_power(fad, 1000, 43))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            sample_channel_power(FadingSpec.nakagami(2), 0, 1)


def test_degenerate_law():
    law = law_from_coefficient(FadingSpec.rician(5), 0.0)
    assert law.degenerate
    assert snr_cdf(law, 0.0) == 1.0
    assert snr_sf(law, 3.0) == 0.0
    assert law.mean == 0.0


def test_fading_spec_validation():
    with pytest.raises(ValueError):
        FadingSpec.nakagami(0.3)
    with pytest.raises(ValueError):
        FadingSpec.rician(-1)
    with pytest.raises(ValueError):
        SnrLaw(FadingSpec.rician(1), 0.0)
