"""Ergodic secrecy capacity engines.

Three independent routes to ``E{[C_s - C_e]^+}``:

* ``secrecy_quadrature`` integrates ``F_e(v)^N S_s(v) k(v)`` over the half
  line, with kernel ``k(v) = 1/(1+v)`` (separated eavesdropper) or
  ``1/(C v)`` (integrated eavesdropper). This is the reference engine.
* ``secrecy_montecarlo`` averages the clipped rate gap over sampled channels.
* ``secrecy_closedform_rician`` / ``secrecy_closedform_nakagami`` evaluate the
  series expressions term by term. They embed a fitted Marcum Q
  approximation and some loose algebra, so they are reported next to the
  other engines rather than trusted.
"""

from __future__ import annotations

import enum
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .fading import Family, draw_channel_power, max_of_n_cdf, snr_sf
from .linkmodel import (
    Architecture,
    Scenario,
    eve_coefficient,
    eve_snr_law,
    main_coefficient,
    main_snr_law,
)
from .quadrature import integrate_half_line
from .specfun import (
    DEFAULT_B_RANGE,
    DEFAULT_GRID_POINTS,
    DomainError,
    MarcumFit,
    beta_fn,
    fit_marcum_exponential,
)

__all__ = [
    "Engine",
    "BetaInterpretation",
    "NakagamiVariant",
    "UnsupportedScenarioError",
    "SecrecyEstimate",
    "secrecy_quadrature",
    "secrecy_montecarlo",
    "secrecy_closedform_rician",
    "secrecy_closedform_nakagami",
    "secrecy_closedform",
    "main_ergodic_capacity",
    "marcum_fit",
    "MC_CHUNK",
]

LN2 = math.log(2.0)
MC_CHUNK = 1 << 16


class Engine(str, enum.Enum):
    QUADRATURE = "quadrature"
    CLOSED_FORM = "closedform"
    MONTE_CARLO = "montecarlo"


class BetaInterpretation(str, enum.Enum):
    AS_PRINTED = "as_printed"  # B(mu/2, -mu/2)
    COMPLEMENT_PAIR = "complement_pair"  # B(mu/2, 1 - mu/2)


class NakagamiVariant(str, enum.Enum):
    CORRECTED = "corrected"
    AS_PRINTED = "as_printed"


class UnsupportedScenarioError(ValueError):
    """The engine does not cover this scenario; ``code`` is machine-readable."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class SecrecyEstimate:
    """Capacity in bits/s/Hz from one engine.

    ``flag`` is None for a trustworthy number and a short code otherwise
    (``non_finite``, ``negative``, ``not_converged``, ``divergent``).
    """

    value: float
    engine: Engine
    uncertainty: float = 0.0
    meta: dict = field(default_factory=dict)
    flag: str | None = None

    @property
    def ok(self) -> bool:
        return self.flag is None


def _check_pairing(scenario: Scenario):
    if scenario.main_arch is not Architecture.SEPARATED:
        raise UnsupportedScenarioError(
            "unsupported_main_arch",
            "only a separated main receiver is modelled (Sp-Sp and Sp-In)",
        )


def _integrated_eve(scenario: Scenario) -> bool:
    return scenario.eve_arch is Architecture.INTEGRATED


# -- quadrature ---------------------------------------------------------------


def secrecy_quadrature(scenario: Scenario, epsrel: float = 1e-7) -> SecrecyEstimate:
    """Reference capacity by adaptive quadrature of the CDF-product integral."""
    _check_pairing(scenario)
    law_s = main_snr_law(scenario)
    law_e = eve_snr_law(scenario)
    n = scenario.n_eves
    integrated = _integrated_eve(scenario)
    c = scenario.integrated_const
    meta = {"scenario": scenario.label, "epsrel": epsrel}

    if law_s.degenerate:
        return SecrecyEstimate(0.0, Engine.QUADRATURE, 0.0, {**meta, "reason": "main_snr_zero"})
    if law_e.degenerate and integrated:
        # F_e = 1 everywhere and the 1/v kernel is not integrable at 0
        return SecrecyEstimate(math.inf, Engine.QUADRATURE, 0.0, meta, flag="divergent")

    def integrand(v):
        fe = max_of_n_cdf(law_e, n, v)
        ss = snr_sf(law_s, v)
        kernel = 1.0 / (c * v) if integrated else 1.0 / (1.0 + v)
        return fe * ss * kernel

    breaks = {1.0, law_s.mean}
    if not law_e.degenerate:
        breaks.add(law_e.mean)
    breaks = sorted(breaks)
    res = integrate_half_line(integrand, breakpoints=breaks, epsrel=epsrel)
    value = max(res.value / LN2, 0.0)
    meta.update(intervals=res.intervals, evaluations=res.evaluations)
    return SecrecyEstimate(
        value,
        Engine.QUADRATURE,
        res.error / LN2,
        meta,
        flag=None if res.converged else "not_converged",
    )


def main_ergodic_capacity(scenario: Scenario) -> float:
    """``E[log2(1 + gamma_s)]`` from the main-link density, for cross-checks."""
    from .fading import snr_pdf

    law_s = main_snr_law(scenario)
    if law_s.degenerate:
        return 0.0
    res = integrate_half_line(
        lambda v: np.log2(1.0 + v) * snr_pdf(law_s, v), breakpoints=[1.0, law_s.mean], epsrel=1e-10
    )
    return res.value


# -- Monte Carlo --------------------------------------------------------------


def _chunk_stats(scenario, a_s, a_e, start, size, seed, chunk_index):
    ss = np.random.SeedSequence([int(seed), int(chunk_index)])
    rng = np.random.Generator(np.random.Philox(ss))
    hs = draw_channel_power(scenario.main_fading, size, rng)
    he = draw_channel_power(scenario.eve_fading, (scenario.n_eves, size), rng)
    g_s = a_s * hs
    g_e = a_e * he.max(axis=0)
    if _integrated_eve(scenario):
        with np.errstate(divide="ignore"):
            gap = (np.log2(g_s) - np.log2(g_e)) / scenario.integrated_const
    else:
        gap = (np.log1p(g_s) - np.log1p(g_e)) / LN2
    x = np.maximum(gap, 0.0)
    mean = float(x.mean())
    m2 = float(np.sum((x - mean) ** 2))
    return size, mean, m2


def secrecy_montecarlo(scenario: Scenario, trials: int = 100_000, seed: int = 0, workers: int = 1):
    """Sample mean of the clipped per-realization rate gap.

    Trials are cut into chunks of ``MC_CHUNK``; chunk ``i`` draws from a
    Philox stream keyed by ``(seed, i)`` and chunk statistics are merged in
    index order, so the estimate does not depend on ``workers``.

    For an integrated eavesdropper the per-realization gap is
    ``[log2 gamma_s - log2 gamma_e]^+ / C``, the quantity whose expectation
    the ``1/(C v)`` kernel integral equals.
    """
    trials = int(trials)
    if trials < 1000:
        raise ValueError(f"trials must be >= 1000, got {trials}")
    _check_pairing(scenario)
    a_s = main_coefficient(scenario)
    a_e = eve_coefficient(scenario)
    meta = {"scenario": scenario.label, "trials": trials, "seed": int(seed), "chunk": MC_CHUNK}
    if a_s == 0.0:
        return SecrecyEstimate(0.0, Engine.MONTE_CARLO, 0.0, {**meta, "reason": "main_snr_zero"})

    sizes = [MC_CHUNK] * (trials // MC_CHUNK)
    if trials % MC_CHUNK:
        sizes.append(trials % MC_CHUNK)
    jobs = [(scenario, a_s, a_e, i * MC_CHUNK, size, seed, i) for i, size in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: _chunk_stats(*j), jobs))
    else:
        parts = [_chunk_stats(*j) for j in jobs]

    # Chan et al. pairwise merge, strictly in chunk order
    n_tot, mean, m2 = parts[0]
    for n_b, mean_b, m2_b in parts[1:]:
        n_new = n_tot + n_b
        delta = mean_b - mean
        mean = mean + delta * n_b / n_new
        m2 = m2 + m2_b + delta * delta * n_tot * n_b / n_new
        n_tot = n_new
    stderr = math.sqrt(m2 / (n_tot - 1) / n_tot) if math.isfinite(m2) else math.inf
    flag = None if math.isfinite(mean) else "divergent"
    return SecrecyEstimate(mean, Engine.MONTE_CARLO, stderr, meta, flag=flag)


# -- closed forms -------------------------------------------------------------


@functools.lru_cache(maxsize=256)
def marcum_fit(a: float, b_range=DEFAULT_B_RANGE, grid_points=DEFAULT_GRID_POINTS) -> MarcumFit:
    """Cached exponential Marcum Q fit for first argument ``a``."""
    return fit_marcum_exponential(a, b_range, grid_points)


def _alternating_sums(n: int):
    """Exact ``sum_z C(n,z)(-1)^z`` and ``sum_z z C(n,z)(-1)^z``."""
    s0 = sum(math.comb(n, z) * (-1) ** z for z in range(n + 1))
    s1 = sum(z * math.comb(n, z) * (-1) ** z for z in range(n + 1))
    return s0, s1


def _beta(mu: float, interp: BetaInterpretation) -> float:
    p = 0.5 * mu
    q = -p if interp is BetaInterpretation.AS_PRINTED else 1.0 - p
    return beta_fn(p, q)


def _finish(value, engine, uncertainty, meta):
    if not math.isfinite(value):
        return SecrecyEstimate(math.nan, engine, math.nan, meta, flag="non_finite")
    if value < 0:
        return SecrecyEstimate(value, engine, uncertainty, meta, flag="negative")
    return SecrecyEstimate(value, engine, uncertainty, meta)


def secrecy_closedform_rician(
    scenario: Scenario,
    beta_interpretation: BetaInterpretation = BetaInterpretation.COMPLEMENT_PAIR,
    n_eves: int | None = None,
    b_range=DEFAULT_B_RANGE,
    grid_points=DEFAULT_GRID_POINTS,
) -> SecrecyEstimate:
    """Rician series expression with the fitted Marcum Q exponents.

    Per link, ``X = 2 (K + 1) / A`` is the squared second Marcum argument per
    unit SNR and ``(mu, nu)`` come from the fit at ``a = sqrt(2K)``. Then::

        Sp-Sp: (1/ln2) sum_z C(N,z)(-1)^z B_e [1 - z e^{nu_e} X_e^{mu_e/2}]
             - (1/ln2) sum_z C(N,z)(-1)^z B_s e^{nu_s} X_s^{mu_s/2}
        Sp-In: the same divided by C

    with ``B_l`` the beta factor under the chosen argument interpretation.
    The z-dependence is only through ``C(N,z)(-1)^z`` and ``z``, so the sums
    are formed exactly in integers. ``n_eves`` overrides the scenario count
    (0 is accepted as a formal edge case).
    """
    _check_pairing(scenario)
    interp = BetaInterpretation(beta_interpretation)
    for name, fad in (("main", scenario.main_fading), ("eve", scenario.eve_fading)):
        if fad.family is not Family.RICIAN:
            raise UnsupportedScenarioError(
                "closedform_family_mismatch", f"{name} link is not Rician fading"
            )
    n = scenario.n_eves if n_eves is None else int(n_eves)
    if n < 0:
        raise ValueError("n_eves must be >= 0")
    integrated = _integrated_eve(scenario)
    law_s = main_snr_law(scenario)
    law_e = eve_snr_law(scenario)

    meta: dict = {"scenario": scenario.label, "beta_interpretation": interp.value, "n_eves": n}
    parts = {}
    for tag, law in (("s", law_s), ("e", law_e)):
        k = law.fading.k_factor
        fit = marcum_fit(math.sqrt(2.0 * k), tuple(b_range), grid_points)
        x = 2.0 * law.rate_scale
        meta[f"mu_{tag}"] = fit.mu
        meta[f"nu_{tag}"] = fit.nu
        meta[f"fit_error_{tag}"] = fit.max_abs_error
        try:
            beta = _beta(fit.mu, interp)
        except DomainError as exc:
            meta[f"beta_{tag}"] = None
            meta["diagnostic"] = f"beta factor for link {tag}: {exc}"
            return SecrecyEstimate(math.nan, Engine.CLOSED_FORM, math.nan, meta, flag="non_finite")
        meta[f"beta_{tag}"] = beta
        parts[tag] = (beta, fit.scale * x ** (0.5 * fit.mu))

    s0, s1 = _alternating_sums(n)
    beta_e, pow_e = parts["e"]
    beta_s, pow_s = parts["s"]
    term_e = beta_e * (s0 - s1 * pow_e)
    term_s = s0 * beta_s * pow_s
    meta.update(sum_binom=s0, sum_z_binom=s1, term_eve=term_e / LN2, term_main=-term_s / LN2)
    value = (term_e - term_s) / LN2
    if integrated:
        value /= scenario.integrated_const
    return _finish(value, Engine.CLOSED_FORM, 0.0, meta)


def _integer_shape(fad, name):
    if fad.family is not Family.NAKAGAMI:
        raise UnsupportedScenarioError("closedform_family_mismatch", f"{name} link is not Nakagami-m")
    if not fad.integer_m:
        raise UnsupportedScenarioError(
            "closedform_noninteger_m", f"{name} link has non-integer m = {fad.m_shape}"
        )
    return int(fad.m_shape)


def _nakagami_coefficients(n, m_e, m_s):
    """Exact rational weights of the (a, b) terms after summing over z.

    ``sum_z C(N,z)(-1)^z / (Gamma(m_s) Gamma(m_e)) * (m_e-1)!(m_s-1)! / ((a!)^z b!)``
    """
    out = {}
    norm = Fraction(math.factorial(m_e - 1) * math.factorial(m_s - 1),
                    math.factorial(m_s - 1) * math.factorial(m_e - 1))
    for a in range(m_e):
        fa = math.factorial(a)
        zsum = sum(Fraction(math.comb(n, z) * (-1) ** z, fa ** z) for z in range(n + 1))
        for b in range(m_s):
            out[(a, b)] = zsum * norm / math.factorial(b)
    return out


def secrecy_closedform_nakagami(
    scenario: Scenario,
    variant: NakagamiVariant = NakagamiVariant.CORRECTED,
    bracket_gamma: float | None = None,
) -> SecrecyEstimate:
    """Nakagami-m series expressions (integer shapes only).

    With ``Y_e = 1/A_e`` and ``Y_s = 1/A_s``, the triple sum over
    ``z in [0, N]``, ``a in [0, m_e)``, ``b in [0, m_s)`` carries weights
    ``C(N,z)(-1)^z (m_e-1)!(m_s-1)! / (Gamma(m_s)Gamma(m_e)(a!)^z b!)`` times

    * Sp-Sp: ``int_0^inf exp(-(a Y_e + m_s Y_s) g) Y_e m_s Y_s g^2 / (1+g) dg``,
      integrated numerically;
    * Sp-In: ``1 / (C (a Y_e - m_s Y_s))``. The ``as_printed`` variant keeps
      the stray SNR factor in the bracket and needs ``bracket_gamma`` to give
      it a value; without one the result is flagged non-finite.
    """
    _check_pairing(scenario)
    variant = NakagamiVariant(variant)
    m_s = _integer_shape(scenario.main_fading, "main")
    m_e = _integer_shape(scenario.eve_fading, "eve")
    n = scenario.n_eves
    a_s = main_coefficient(scenario)
    a_e = eve_coefficient(scenario)
    meta: dict = {"scenario": scenario.label, "m_s": m_s, "m_e": m_e, "n_eves": n}
    if a_s == 0.0 or a_e == 0.0:
        meta["diagnostic"] = "zero SNR coefficient makes the series undefined"
        return SecrecyEstimate(math.nan, Engine.CLOSED_FORM, math.nan, meta, flag="non_finite")
    y_s = 1.0 / a_s
    y_e = 1.0 / a_e
    coeffs = _nakagami_coefficients(n, m_e, m_s)
    meta["nonzero_terms"] = sum(1 for c in coeffs.values() if c != 0)

    if _integrated_eve(scenario):
        meta["variant"] = variant.value
        scale = 1.0
        if variant is NakagamiVariant.AS_PRINTED:
            if bracket_gamma is None:
                meta["diagnostic"] = "as-printed bracket keeps a free SNR variable; pass bracket_gamma"
                return SecrecyEstimate(math.nan, Engine.CLOSED_FORM, math.nan, meta, flag="non_finite")
            scale = float(bracket_gamma)
            meta["bracket_gamma"] = scale
        c = scenario.integrated_const
        terms = []
        for (a, b), w in coeffs.items():
            bracket = (a * y_e - m_s * y_s) * scale
            if bracket == 0.0:
                meta["diagnostic"] = f"zero bracket at a={a}"
                return SecrecyEstimate(math.nan, Engine.CLOSED_FORM, math.nan, meta, flag="non_finite")
            terms.append(float(w) / (bracket * c))
        value = math.fsum(terms) / LN2
        return _finish(value, Engine.CLOSED_FORM, 0.0, meta)

    inner = {}
    err = 0.0
    for a in range(m_e):
        rate = a * y_e + m_s * y_s
        res = integrate_half_line(
            lambda g, rate=rate: np.exp(-rate * g) * (y_e * m_s * y_s) * g * g / (1.0 + g),
            breakpoints=[1.0, 1.0 / rate],
            epsrel=1e-10,
        )
        inner[a] = res.value
        err = max(err, res.error)
    terms = [float(w) * inner[a] for (a, _b), w in coeffs.items()]
    abs_weight = sum(abs(float(w)) for w in coeffs.values())
    value = math.fsum(terms) / LN2
    meta["inner_integrals"] = [inner[a] for a in range(m_e)]
    return _finish(value, Engine.CLOSED_FORM, abs_weight * err / LN2, meta)


def secrecy_closedform(scenario: Scenario, beta_interpretation=BetaInterpretation.COMPLEMENT_PAIR,
                       nakagami_variant=NakagamiVariant.CORRECTED) -> SecrecyEstimate:
    """Dispatch to the family-specific series expression."""
    fam_s = scenario.main_fading.family
    fam_e = scenario.eve_fading.family
    if fam_s is not fam_e:
        raise UnsupportedScenarioError(
            "closedform_mixed_fading", "closed forms need the same fading family on both links"
        )
    if fam_s is Family.RICIAN:
        return secrecy_closedform_rician(scenario, beta_interpretation)
    return secrecy_closedform_nakagami(scenario, nakagami_variant)
