"""Ergodic secrecy capacity of power-splitting SWIPT links under Rician and
Nakagami-m fading with imperfect channel estimation."""

from .fading import FadingSpec, Family, SnrLaw, max_of_n_cdf, sample_channel_power, snr_cdf, snr_pdf, snr_sf
from .linkmodel import (
    Architecture,
    EveDenominator,
    LinkBudget,
    Scenario,
    effective_snr_coefficient,
    eve_snr_law,
    harvested_energy,
    main_snr_law,
    simulate_estimation_model,
    default_scenario,
)
from .secrecy import (
    BetaInterpretation,
    Engine,
    NakagamiVariant,
    SecrecyEstimate,
    secrecy_closedform,
    secrecy_closedform_nakagami,
    secrecy_closedform_rician,
    secrecy_montecarlo,
    secrecy_quadrature,
)

__version__ = "0.1.0"
