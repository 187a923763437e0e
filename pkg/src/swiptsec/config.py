"""INI configuration: a ``[scenario]`` block plus optional ``[run]``,
``[sweep]`` and ``[region]`` blocks. Every key is optional; omitted keys take
the reference defaults (see ``linkmodel.default_scenario``).

Example::

    [scenario]
    fading = nakagami
    omega_s_db = 30
    n_eves = 5

    [run]
    engines = quadrature, montecarlo
    trials = 100000

    [sweep]
    parameter = main_snr_db
    values = 10, 20, 30, 40, 50
"""

from __future__ import annotations

import configparser
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fading import FadingSpec
from .linkmodel import Architecture, EveDenominator, LinkBudget, Scenario
from .secrecy import BetaInterpretation, Engine, NakagamiVariant

__all__ = [
    "ConfigError",
    "SweepParameter",
    "RunSettings",
    "SweepConfig",
    "RegionConfig",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "parse_engines",
    "DEFAULT_TRIALS",
]

DEFAULT_TRIALS = 100_000


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""


class SweepParameter(str, enum.Enum):
    MAIN_SNR_DB = "main_snr_db"
    EVE_SNR_DB = "eve_snr_db"
    N_EVES = "n_eves"
    DELTA_S = "delta_s"
    DELTA_E = "delta_e"
    RHO_S = "rho_s"
    K_FACTOR = "k_factor"
    M_SHAPE = "m_shape"


@dataclass(frozen=True)
class RunSettings:
    engines: tuple[Engine, ...] = (Engine.QUADRATURE,)
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    beta_interpretation: BetaInterpretation = BetaInterpretation.COMPLEMENT_PAIR
    nakagami_variant: NakagamiVariant = NakagamiVariant.CORRECTED
    workers: int = 1


@dataclass(frozen=True)
class SweepConfig:
    scenario: Scenario
    sweep_parameter: SweepParameter
    values: tuple[float, ...]
    engines: tuple[Engine, ...] = (Engine.QUADRATURE,)
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    settings: RunSettings = field(default_factory=RunSettings)

    def __post_init__(self):
        object.__setattr__(self, "sweep_parameter", SweepParameter(self.sweep_parameter))
        if not self.engines:
            raise ConfigError("run.engines: at least one engine is required")
        _check_monotone("sweep.values", self.values)


@dataclass(frozen=True)
class RegionConfig:
    scenario: Scenario
    rho_grid: tuple[float, ...]
    zeta: float = 0.9
    engine: Engine = Engine.QUADRATURE
    settings: RunSettings = field(default_factory=RunSettings)

    def __post_init__(self):
        if not self.rho_grid:
            raise ConfigError("region.rho_grid: empty grid")
        if any(not (0.0 < r < 1.0) for r in self.rho_grid):
            raise ConfigError("region.rho_grid: values must lie strictly inside (0, 1)")
        if any(b <= a for a, b in zip(self.rho_grid, self.rho_grid[1:])):
            raise ConfigError("region.rho_grid: values must be strictly increasing")
        if not (0.0 <= self.zeta <= 1.0):
            raise ConfigError(f"region.zeta: must lie in [0, 1], got {self.zeta}")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    settings: RunSettings
    sweep: SweepConfig | None = None
    region: RegionConfig | None = None


def _check_monotone(path, values):
    if not values:
        raise ConfigError(f"{path}: empty sequence")
    d = np.diff(np.asarray(values, dtype=float))
    if not (np.all(d > 0) or np.all(d < 0)):
        raise ConfigError(f"{path}: values must be strictly monotone")


_SCENARIO_KEYS = {
    "omega_s_db": float, "omega_e_db": float,
    "rho_s": float, "rho_e": float,
    "delta_s": float, "delta_e": float,
    "n0_db": float, "sigma_db": float,
    "k_s": float, "k_e": float,
    "m_s": float, "m_e": float,
    "n_eves": int, "zeta": float, "integrated_const": float,
    "eve_denominator": str, "fading": str, "main_fading": str, "eve_fading": str,
    "main_arch": str, "eve_arch": str,
}
_RUN_KEYS = {
    "engines": str, "trials": int, "seed": int,
    "beta_interpretation": str, "nakagami_variant": str, "workers": int,
}
_SWEEP_KEYS = {"parameter": str, "values": str}
_REGION_KEYS = {"rho_grid": str, "rho_points": int, "zeta": float, "engine": str}
_SECTIONS = {"scenario": _SCENARIO_KEYS, "run": _RUN_KEYS, "sweep": _SWEEP_KEYS, "region": _REGION_KEYS}

_UNIT_KEYS = ("rho_s", "rho_e", "delta_s", "delta_e", "zeta")


def _convert(path, raw, kind):
    try:
        if kind is int:
            val = float(raw)
            if not val.is_integer():
                raise ValueError
            return int(val)
        if kind is float:
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError
            return val
    except ValueError:
        raise ConfigError(f"{path}: expected {kind.__name__}, got {raw!r}") from None
    return raw.strip()


def _enum(path, cls, raw):
    try:
        return cls(raw.strip().lower())
    except ValueError:
        choices = ", ".join(m.value for m in cls)
        raise ConfigError(f"{path}: {raw!r} is not one of {choices}") from None


def _floats(path, raw):
    try:
        return tuple(float(tok) for tok in raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"{path}: expected a comma-separated list of numbers") from None


def parse_engines(raw: str, path: str = "run.engines") -> tuple[Engine, ...]:
    names = [tok.strip() for tok in raw.split(",") if tok.strip()]
    if not names:
        raise ConfigError(f"{path}: at least one engine is required")
    out = []
    for name in names:
        eng = _enum(path, Engine, name)
        if eng not in out:
            out.append(eng)
    return tuple(out)


def _read_sections(source: str) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(source)
    except configparser.Error as exc:
        raise ConfigError(f"<document>: malformed config: {exc}") from None
    sections = {}
    for name in parser.sections():
        if name not in _SECTIONS:
            raise ConfigError(f"{name}: unknown section")
        sections[name] = dict(parser.items(name))
        for key in sections[name]:
            if key not in _SECTIONS[name]:
                raise ConfigError(f"{name}.{key}: unknown key")
    return sections


def _typed(sections, name):
    spec = _SECTIONS[name]
    return {k: _convert(f"{name}.{k}", v, spec[k]) for k, v in sections.get(name, {}).items()}


def _fading(path, family, k, m):
    fam = family.lower()
    if fam == "rician":
        if k < 0:
            raise ConfigError(f"{path}: Rician K must be >= 0, got {k}")
        return FadingSpec.rician(k)
    if fam == "nakagami":
        if m < 0.5:
            raise ConfigError(f"{path}: Nakagami m must be >= 0.5, got {m}")
        return FadingSpec.nakagami(m)
    raise ConfigError(f"{path}: unknown fading family {family!r} (rician, nakagami)")


def _build_scenario(vals: dict) -> Scenario:
    for key in _UNIT_KEYS:
        if key in vals and not (0.0 <= vals[key] <= 1.0):
            raise ConfigError(f"scenario.{key}: must lie in [0, 1], got {vals[key]}")
    if vals.get("n_eves", 5) < 1:
        raise ConfigError(f"scenario.n_eves: must be >= 1, got {vals['n_eves']}")
    if vals.get("integrated_const", 1.0) <= 0:
        raise ConfigError(f"scenario.integrated_const: must be positive, got {vals['integrated_const']}")

    n0 = vals.get("n0_db", 0.1)
    sigma = vals.get("sigma_db", 0.0)
    main = LinkBudget(vals.get("omega_s_db", 30.0), vals.get("rho_s", 0.8), vals.get("delta_s", 0.2), n0, sigma)
    eve = LinkBudget(vals.get("omega_e_db", 10.0), vals.get("rho_e", 0.8), vals.get("delta_e", 0.2), n0, sigma)
    family = vals.get("fading", "rician")
    main_fading = _fading(
        "scenario.main_fading" if "main_fading" in vals else "scenario.fading",
        vals.get("main_fading", family), vals.get("k_s", 5.0), vals.get("m_s", 2.0),
    )
    eve_fading = _fading(
        "scenario.eve_fading" if "eve_fading" in vals else "scenario.fading",
        vals.get("eve_fading", family), vals.get("k_e", 5.0), vals.get("m_e", 2.0),
    )
    return Scenario(
        main=main,
        eve=eve,
        main_fading=main_fading,
        eve_fading=eve_fading,
        n_eves=vals.get("n_eves", 5),
        main_arch=_enum("scenario.main_arch", Architecture, vals.get("main_arch", "separated")),
        eve_arch=_enum("scenario.eve_arch", Architecture, vals.get("eve_arch", "separated")),
        integrated_const=vals.get("integrated_const", 1.0),
        zeta=vals.get("zeta", 0.9),
        eve_denominator=_enum("scenario.eve_denominator", EveDenominator,
                              vals.get("eve_denominator", "as_printed")),
    )


def _build_settings(vals: dict) -> RunSettings:
    trials = vals.get("trials", DEFAULT_TRIALS)
    if trials < 1000:
        raise ConfigError(f"run.trials: must be >= 1000, got {trials}")
    workers = vals.get("workers", 1)
    if workers < 1:
        raise ConfigError(f"run.workers: must be >= 1, got {workers}")
    return RunSettings(
        engines=parse_engines(vals["engines"]) if "engines" in vals else (Engine.QUADRATURE,),
        trials=trials,
        seed=vals.get("seed", 0),
        beta_interpretation=_enum("run.beta_interpretation", BetaInterpretation,
                                  vals.get("beta_interpretation", "complement_pair")),
        nakagami_variant=_enum("run.nakagami_variant", NakagamiVariant,
                               vals.get("nakagami_variant", "corrected")),
        workers=workers,
    )


def _build_sweep(vals, scenario, settings):
    for key in ("parameter", "values"):
        if key not in vals:
            raise ConfigError(f"sweep.{key}: required key missing")
    param = _enum("sweep.parameter", SweepParameter, vals["parameter"])
    values = _floats("sweep.values", vals["values"])
    _check_monotone("sweep.values", values)
    return SweepConfig(scenario, param, values, settings.engines, settings.trials, settings.seed, settings)


def _build_region(vals, scenario, settings):
    if "rho_grid" in vals and "rho_points" in vals:
        raise ConfigError("region.rho_grid: give either rho_grid or rho_points, not both")
    if "rho_grid" in vals:
        grid = _floats("region.rho_grid", vals["rho_grid"])
    else:
        pts = vals.get("rho_points", 20)
        if pts < 2:
            raise ConfigError(f"region.rho_points: must be >= 2, got {pts}")
        grid = tuple(float(r) for r in np.linspace(0.0, 1.0, pts + 2)[1:-1])
    engine = _enum("region.engine", Engine, vals.get("engine", "quadrature"))
    return RegionConfig(scenario, grid, vals.get("zeta", scenario.zeta), engine, settings)


def parse_config(source: str, require: str | None = None) -> ExperimentConfig:
    """Parse config text. ``require`` names a block ("sweep"/"region") that must be present."""
    sections = _read_sections(source)
    if require is not None and require not in sections:
        raise ConfigError(f"{require}: missing required block [{require}]")
    try:
        scenario = _build_scenario(_typed(sections, "scenario"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"scenario: {exc}") from None
    settings = _build_settings(_typed(sections, "run"))
    sweep = _build_sweep(_typed(sections, "sweep"), scenario, settings) if "sweep" in sections else None
    region = _build_region(_typed(sections, "region"), scenario, settings) if "region" in sections else None
    return ExperimentConfig(scenario, settings, sweep, region)


def load_config(path: str | Path | None, require: str | None = None) -> ExperimentConfig:
    text = "" if path is None else Path(path).read_text(encoding="utf-8")
    return parse_config(text, require=require)
