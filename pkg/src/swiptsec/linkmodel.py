"""Power-splitting SWIPT link budget and the scenario it lives in."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .fading import FadingSpec, SnrLaw, law_from_coefficient

__all__ = [
    "DegenerateBudgetError",
    "Architecture",
    "EveDenominator",
    "LinkBudget",
    "Scenario",
    "db_to_linear",
    "effective_snr_coefficient",
    "harvested_energy",
    "simulate_estimation_model",
    "main_coefficient",
    "eve_coefficient",
    "main_snr_law",
    "eve_snr_law",
    "default_scenario",
]


class DegenerateBudgetError(ArithmeticError):
    """The SNR denominator vanishes (no noise, no estimation error)."""


class Architecture(str, enum.Enum):
    SEPARATED = "separated"
    INTEGRATED = "integrated"


class EveDenominator(str, enum.Enum):
    # estimation-error term of the eavesdropper scaled by the main link's rho
    AS_PRINTED = "as_printed"
    # ... or by the eavesdropper's own rho
    OWN_RHO = "own_rho"


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _check_unit(name, value):
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class LinkBudget:
    """Physical parameters of one receiver.

    Attributes:
        omega_db: transmit power over path loss, dB.
        rho: power fraction routed to information decoding.
        delta: channel estimation accuracy factor (0 perfect, 1 useless).
        n0_db: antenna noise power, dB.
        sigma_db: signal-processing noise power, dB.
    """

    omega_db: float = 30.0
    rho: float = 0.8
    delta: float = 0.2
    n0_db: float = 0.1
    sigma_db: float = 0.0

    def __post_init__(self):
        _check_unit("rho", self.rho)
        _check_unit("delta", self.delta)
        for name in ("omega_db", "n0_db", "sigma_db"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def omega(self) -> float:
        return db_to_linear(self.omega_db)

    @property
    def n0(self) -> float:
        return db_to_linear(self.n0_db)

    @property
    def sigma2(self) -> float:
        return db_to_linear(self.sigma_db)


def effective_snr_coefficient(link: LinkBudget, coupling_rho: float | None = None) -> float:
    """Coefficient ``A`` in ``gamma = A |h|^2``.

    ``A = rho Omega (1 - delta^2) / (Omega c delta^2 + rho N0 + sigma^2)`` where
    ``c`` (``coupling_rho``) defaults to the link's own ``rho``.
    """
    c = link.rho if coupling_rho is None else float(coupling_rho)
    _check_unit("coupling_rho", c)
    omega = link.omega
    d2 = link.delta * link.delta
    denom = omega * c * d2 + link.rho * link.n0 + link.sigma2
    if denom <= 0:
        raise DegenerateBudgetError(
            f"SNR denominator is zero (Omega={omega}, coupling_rho={c}, delta={link.delta}, "
            f"rho={link.rho}, N0={link.n0}, sigma2={link.sigma2})"
        )
    return link.rho * omega * (1.0 - d2) / denom


def harvested_energy(link: LinkBudget, zeta: float, mean_power: float = 1.0) -> float:
    """Average harvested power ``zeta (1 - rho) Omega E|h|^2`` (linear units)."""
    _check_unit("zeta", zeta)
    return zeta * (1.0 - link.rho) * link.omega * mean_power


def simulate_estimation_model(link: LinkBudget, h: float, v_power: float) -> float:
    """Instantaneous SINR with the estimation error treated as interference.

    ``h`` is the true channel power ``|h|^2`` and ``v_power`` the power of the
    unit-variance estimation-error draw; the error term contributes
    ``Omega rho delta^2 v_power`` to the interference-plus-noise power.
    """
    if h < 0 or v_power < 0:
        raise ValueError("h and v_power must be non-negative")
    omega = link.omega
    d2 = link.delta * link.delta
    signal = link.rho * omega * (1.0 - d2) * h
    interference = omega * link.rho * d2 * v_power + link.rho * link.n0 + link.sigma2
    if interference <= 0:
        if signal == 0:
            return 0.0
        raise DegenerateBudgetError("zero interference-plus-noise power")
    return signal / interference


@dataclass(frozen=True)
class Scenario:
    """Main link plus ``n_eves`` statistically identical eavesdroppers."""

    main: LinkBudget = field(default_factory=LinkBudget)
    eve: LinkBudget = field(default_factory=lambda: LinkBudget(omega_db=10.0))
    main_fading: FadingSpec = field(default_factory=lambda: FadingSpec.rician(5.0))
    eve_fading: FadingSpec = field(default_factory=lambda: FadingSpec.rician(5.0))
    n_eves: int = 5
    main_arch: Architecture = Architecture.SEPARATED
    eve_arch: Architecture = Architecture.SEPARATED
    integrated_const: float = 1.0
    zeta: float = 0.9
    eve_denominator: EveDenominator = EveDenominator.AS_PRINTED

    def __post_init__(self):
        object.__setattr__(self, "main_arch", Architecture(self.main_arch))
        object.__setattr__(self, "eve_arch", Architecture(self.eve_arch))
        object.__setattr__(self, "eve_denominator", EveDenominator(self.eve_denominator))
        if int(self.n_eves) != self.n_eves or self.n_eves < 1:
            raise ValueError(f"n_eves must be an integer >= 1, got {self.n_eves}")
        if not self.integrated_const > 0:
            raise ValueError(f"integrated_const must be positive, got {self.integrated_const}")
        _check_unit("zeta", self.zeta)

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    @property
    def label(self) -> str:
        short = {Architecture.SEPARATED: "Sp", Architecture.INTEGRATED: "In"}
        return f"{short[self.main_arch]}-{short[self.eve_arch]}"


def main_coefficient(scenario: Scenario) -> float:
    return effective_snr_coefficient(scenario.main)


def eve_coefficient(scenario: Scenario) -> float:
    if scenario.eve_denominator is EveDenominator.AS_PRINTED:
        return effective_snr_coefficient(scenario.eve, coupling_rho=scenario.main.rho)
    return effective_snr_coefficient(scenario.eve)


def main_snr_law(scenario: Scenario) -> SnrLaw:
    return law_from_coefficient(scenario.main_fading, main_coefficient(scenario))


def eve_snr_law(scenario: Scenario) -> SnrLaw:
    """Law of a single eavesdropper's SNR; the best-of-N is formed by the caller."""
    return law_from_coefficient(scenario.eve_fading, eve_coefficient(scenario))


def default_scenario(family: str = "rician", **changes) -> Scenario:
    """Default parameter set (K = 5, m = 2, N = 5, Omega_s/Omega_e = 30/10 dB)."""
    if family == "rician":
        fad = FadingSpec.rician(5.0)
    elif family == "nakagami":
        fad = FadingSpec.nakagami(2.0)
    else:
        raise ValueError(f"unknown fading family {family!r}")
    base = Scenario(main_fading=fad, eve_fading=fad)
    return replace(base, **changes)
