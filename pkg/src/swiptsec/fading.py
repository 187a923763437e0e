"""Distribution of the effective SNR on one link, and of the best of N links.

A link's SNR is ``gamma = A * |h|^2`` with ``E|h|^2 = mean_power``. The laws
below are written in terms of ``rate_scale``, the factor multiplying gamma in
the exponent of the density: ``(K + 1) / (A * mean_power)`` for Rician fading
and ``m / (A * mean_power)`` for Nakagami-m.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sc

from .specfun import bessel_i0e, marcum_q1

__all__ = [
    "Family",
    "FadingSpec",
    "SnrLaw",
    "law_from_coefficient",
    "snr_pdf",
    "snr_cdf",
    "snr_sf",
    "max_of_n_cdf",
    "sample_channel_power",
    "draw_channel_power",
]


class Family(str, enum.Enum):
    RICIAN = "rician"
    NAKAGAMI = "nakagami"


@dataclass(frozen=True)
class FadingSpec:
    family: Family
    k_factor: float = 0.0
    m_shape: float = 1.0
    mean_power: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not self.mean_power > 0:
            raise ValueError(f"mean_power must be positive, got {self.mean_power}")
        if self.family is Family.RICIAN and not self.k_factor >= 0:
            raise ValueError(f"k_factor must be >= 0, got {self.k_factor}")
        if self.family is Family.NAKAGAMI and not self.m_shape >= 0.5:
            raise ValueError(f"m_shape must be >= 0.5, got {self.m_shape}")

    @classmethod
    def rician(cls, k_factor, mean_power=1.0):
        return cls(Family.RICIAN, k_factor=float(k_factor), mean_power=mean_power)

    @classmethod
    def nakagami(cls, m_shape, mean_power=1.0):
        return cls(Family.NAKAGAMI, m_shape=float(m_shape), mean_power=mean_power)

    @property
    def shape(self) -> float:
        """K for Rician, m for Nakagami."""
        return self.k_factor if self.family is Family.RICIAN else self.m_shape

    @property
    def integer_m(self) -> bool:
        return self.family is Family.NAKAGAMI and float(self.m_shape).is_integer()


@dataclass(frozen=True)
class SnrLaw:
    """SNR law of one link.

    ``rate_scale = inf`` encodes the degenerate law with all mass at zero
    (coefficient A = 0, e.g. a completely inaccurate channel estimate).
    """

    fading: FadingSpec
    rate_scale: float

    def __post_init__(self):
        if not self.rate_scale > 0:
            raise ValueError(f"rate_scale must be positive, got {self.rate_scale}")

    @property
    def degenerate(self) -> bool:
        return math.isinf(self.rate_scale)

    @property
    def mean(self) -> float:
        """Mean SNR."""
        if self.degenerate:
            return 0.0
        if self.fading.family is Family.RICIAN:
            return (self.fading.k_factor + 1.0) / self.rate_scale
        return self.fading.m_shape / self.rate_scale


def law_from_coefficient(fading: FadingSpec, coefficient: float) -> SnrLaw:
    """Law of ``coefficient * |h|^2`` for channel power drawn from ``fading``."""
    if coefficient < 0:
        raise ValueError(f"SNR coefficient must be >= 0, got {coefficient}")
    mean_snr = coefficient * fading.mean_power
    if mean_snr == 0:
        return SnrLaw(fading, math.inf)
    num = fading.k_factor + 1.0 if fading.family is Family.RICIAN else fading.m_shape
    return SnrLaw(fading, num / mean_snr)


def _gamma_input(gamma):
    scalar = np.ndim(gamma) == 0
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0) or np.any(np.isnan(g)):
        raise ValueError("gamma must be non-negative")
    return np.atleast_1d(g), scalar


def _out(arr, scalar):
    return float(arr[0]) if scalar else arr


def snr_pdf(law: SnrLaw, gamma):
    """Density of the SNR at ``gamma`` (zero everywhere for a degenerate law)."""
    g, scalar = _gamma_input(gamma)
    if law.degenerate:
        return _out(np.zeros_like(g), scalar)
    lam = law.rate_scale
    f = law.fading
    finite = np.isfinite(g)
    gf = np.where(finite, g, 0.0)
    if f.family is Family.RICIAN:
        k = f.k_factor
        # lam e^{-lam g - K} I0(2 sqrt(K lam g)) with the exponentials merged
        root = np.sqrt(lam * gf)
        dens = lam * np.exp(-((root - math.sqrt(k)) ** 2)) * bessel_i0e(2.0 * math.sqrt(k) * root)
    else:
        m = f.m_shape
        x = lam * gf
        with np.errstate(divide="ignore", invalid="ignore"):
            logd = m * math.log(lam) + (m - 1.0) * np.log(gf) - x - math.lgamma(m)
        dens = np.exp(logd)
        if m == 1.0:
            dens = lam * np.exp(-x)
    return _out(np.where(finite, dens, 0.0), scalar)


def snr_sf(law: SnrLaw, gamma):
    """Survival function ``P(SNR > gamma)``.

    Computed directly rather than as ``1 - cdf`` so the upper tail keeps its
    relative accuracy.
    """
    g, scalar = _gamma_input(gamma)
    if law.degenerate:
        return _out(np.zeros_like(g), scalar)
    lam = law.rate_scale
    f = law.fading
    x = lam * np.where(np.isfinite(g), g, 0.0)
    if f.family is Family.RICIAN:
        sf = marcum_q1(math.sqrt(2.0 * f.k_factor), np.sqrt(2.0 * x))
    elif f.integer_m:
        # e^{-x} sum_{r < m} x^r / r!
        term = np.ones_like(x)
        acc = np.ones_like(x)
        for r in range(1, int(f.m_shape)):
            term = term * x / r
            acc = acc + term
        sf = np.exp(-x) * acc
    else:
        sf = _sc.gammaincc(f.m_shape, x)
    sf = np.where(np.isfinite(g), sf, 0.0)
    return _out(np.clip(sf, 0.0, 1.0), scalar)


def snr_cdf(law: SnrLaw, gamma):
    """CDF of the SNR; the Rician branch uses the exact Marcum Q."""
    g, scalar = _gamma_input(gamma)
    if law.degenerate:
        return _out(np.ones_like(g), scalar)
    lam = law.rate_scale
    f = law.fading
    if f.family is Family.NAKAGAMI and not f.integer_m:
        x = lam * np.where(np.isfinite(g), g, 0.0)
        cdf = np.where(np.isfinite(g), _sc.gammainc(f.m_shape, x), 1.0)
    else:
        cdf = 1.0 - snr_sf(law, g)
    return _out(np.clip(cdf, 0.0, 1.0), scalar)


def max_of_n_cdf(law: SnrLaw, n: int, gamma):
    """CDF of the largest of ``n`` i.i.d. SNRs, ``F(gamma)**n``, formed in the log domain."""
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    g, scalar = _gamma_input(gamma)
    cdf = np.atleast_1d(snr_cdf(law, g))
    if n == 1:
        return _out(cdf, scalar)
    with np.errstate(divide="ignore"):
        out = np.exp(n * np.log(cdf))
    return _out(out, scalar)


def draw_channel_power(fading: FadingSpec, size, rng: np.random.Generator) -> np.ndarray:
    """Draw ``|h|^2`` samples of the given shape from an existing generator."""
    if fading.family is Family.RICIAN:
        k = fading.k_factor
        los = math.sqrt(k / (k + 1.0))
        scatter = math.sqrt(0.5 / (k + 1.0))
        re = rng.standard_normal(size) * scatter + los
        im = rng.standard_normal(size) * scatter
        return fading.mean_power * (re * re + im * im)
    m = fading.m_shape
    return rng.gamma(m, fading.mean_power / m, size)


def sample_channel_power(fading: FadingSpec, count: int, seed: int) -> np.ndarray:
    """``count`` i.i.d. channel power draws with mean ``fading.mean_power``.

    Rician draws are a line-of-sight amplitude ``sqrt(K/(K+1))`` plus complex
    Gaussian scatter with per-dimension variance ``1/(2(K+1))``; Nakagami-m
    draws are gamma(m, mean/m). Identical arguments give identical arrays.
    """
    count = int(count)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    return draw_channel_power(fading, count, rng)
