"""Sweeps, secrecy-energy regions and cross-engine validation."""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, replace

from .config import RegionConfig, RunSettings, SweepConfig, SweepParameter
from .fading import Family, FadingSpec
from .linkmodel import DegenerateBudgetError, Scenario, harvested_energy
from .secrecy import (
    BetaInterpretation,
    Engine,
    SecrecyEstimate,
    UnsupportedScenarioError,
    marcum_fit,
    secrecy_closedform,
    secrecy_closedform_nakagami,
    secrecy_closedform_rician,
    secrecy_montecarlo,
    secrecy_quadrature,
)

__all__ = [
    "Row",
    "RegionPoint",
    "ValidationReport",
    "evaluate",
    "apply_sweep_value",
    "run_eval",
    "run_sweep",
    "run_region",
    "run_validate",
    "CONCORDANCE_SIGMAS",
    "EVAL_FIELDS",
]

CONCORDANCE_SIGMAS = 4.0
EVAL_FIELDS = ("engine", "capacity_bits", "uncertainty", "status", "reason")


@dataclass(frozen=True)
class Row:
    sweep_param: str
    sweep_value: float
    engine: str
    capacity_bits: float
    uncertainty: float
    status: str
    reason: str

    FIELDS = ("sweep_param", "sweep_value", "engine", "capacity_bits", "uncertainty", "status", "reason")

    def as_dict(self):
        return {k: getattr(self, k) for k in self.FIELDS}


@dataclass(frozen=True)
class RegionPoint:
    rho: float
    energy_linear: float
    capacity_bits: float
    uncertainty: float
    status: str
    reason: str

    FIELDS = ("rho", "energy_linear", "capacity_bits", "uncertainty", "status", "reason")

    def as_dict(self):
        return asdict(self)


def evaluate(scenario: Scenario, engine: Engine, settings: RunSettings = RunSettings()) -> SecrecyEstimate:
    engine = Engine(engine)
    if engine is Engine.QUADRATURE:
        return secrecy_quadrature(scenario)
    if engine is Engine.MONTE_CARLO:
        return secrecy_montecarlo(scenario, settings.trials, settings.seed, settings.workers)
    return secrecy_closedform(scenario, settings.beta_interpretation, settings.nakagami_variant)


def _status(est_or_exc):
    """(value, uncertainty, status, reason) for an estimate or a caught error."""
    if isinstance(est_or_exc, UnsupportedScenarioError):
        return math.nan, math.nan, "skipped", est_or_exc.code
    if isinstance(est_or_exc, DegenerateBudgetError):
        return math.nan, math.nan, "skipped", "degenerate_budget"
    est = est_or_exc
    if est.flag is not None:
        return est.value, est.uncertainty, "flagged", est.flag
    return est.value, est.uncertainty, "ok", ""


def _safe_eval(scenario, engine, settings):
    try:
        return evaluate(scenario, engine, settings)
    except (UnsupportedScenarioError, DegenerateBudgetError) as exc:
        return exc


def _with_shape(fad: FadingSpec, family: Family, value: float) -> FadingSpec:
    if fad.family is not family:
        return fad
    if family is Family.RICIAN:
        return replace(fad, k_factor=value)
    return replace(fad, m_shape=value)


def apply_sweep_value(scenario: Scenario, param: SweepParameter, value: float) -> Scenario:
    """Scenario with one parameter replaced.

    ``k_factor`` and ``m_shape`` update every link of the matching family.
    """
    param = SweepParameter(param)
    if param is SweepParameter.MAIN_SNR_DB:
        return replace(scenario, main=replace(scenario.main, omega_db=value))
    if param is SweepParameter.EVE_SNR_DB:
        return replace(scenario, eve=replace(scenario.eve, omega_db=value))
    if param is SweepParameter.N_EVES:
        if not float(value).is_integer():
            raise ValueError(f"n_eves sweep value must be an integer, got {value}")
        return replace(scenario, n_eves=int(value))
    if param is SweepParameter.DELTA_S:
        return replace(scenario, main=replace(scenario.main, delta=value))
    if param is SweepParameter.DELTA_E:
        return replace(scenario, eve=replace(scenario.eve, delta=value))
    if param is SweepParameter.RHO_S:
        return replace(scenario, main=replace(scenario.main, rho=value))
    family = Family.RICIAN if param is SweepParameter.K_FACTOR else Family.NAKAGAMI
    if family not in (scenario.main_fading.family, scenario.eve_fading.family):
        raise ValueError(f"{param.value} sweep needs a {family.value} link in the scenario")
    return replace(
        scenario,
        main_fading=_with_shape(scenario.main_fading, family, value),
        eve_fading=_with_shape(scenario.eve_fading, family, value),
    )


def run_eval(scenario: Scenario, settings: RunSettings) -> list[Row]:
    rows = []
    for engine in settings.engines:
        value, unc, status, reason = _status(_safe_eval(scenario, engine, settings))
        rows.append(Row("", math.nan, engine.value, value, unc, status, reason))
    return rows


def run_sweep(config: SweepConfig) -> list[Row]:
    """One row per (sweep value, engine), in config order."""
    if not config.engines:
        raise ValueError("no engines selected")
    settings = replace(config.settings, engines=tuple(config.engines), trials=config.trials, seed=config.seed)
    # build every scenario first so a bad value fails before any computation
    points = [(v, apply_sweep_value(config.scenario, config.sweep_parameter, v)) for v in config.values]
    rows = []
    for value, scenario in points:
        for engine in settings.engines:
            cap, unc, status, reason = _status(_safe_eval(scenario, engine, settings))
            rows.append(Row(config.sweep_parameter.value, float(value), engine.value, cap, unc, status, reason))
    return rows


def run_region(config: RegionConfig) -> list[RegionPoint]:
    """Trace (harvested energy, secrecy capacity) as rho_s = rho_e sweeps the grid."""
    sc = config.scenario
    out = []
    for rho in config.rho_grid:
        point = replace(sc, main=replace(sc.main, rho=rho), eve=replace(sc.eve, rho=rho))
        energy = harvested_energy(point.main, config.zeta, sc.main_fading.mean_power)
        cap, unc, status, reason = _status(_safe_eval(point, config.engine, config.settings))
        out.append(RegionPoint(float(rho), energy, cap, unc, status, reason))
    return out


@dataclass
class ValidationReport:
    scenario: str
    rows: list[dict]
    deltas: list[dict]
    concordance: dict
    marcum_fits: list[dict]

    FIELDS = ("engine", "variant", "capacity_bits", "uncertainty", "status", "reason",
              "delta_abs_vs_quadrature", "delta_rel_vs_quadrature")

    @property
    def passed(self) -> bool:
        return bool(self.concordance.get("passed"))

    @property
    def unflagged_non_finite(self) -> bool:
        return any(r["status"] == "ok" and not math.isfinite(r["capacity_bits"]) for r in self.rows)

    def as_dict(self):
        return asdict(self)


def _report_row(engine, variant, result):
    value, unc, status, reason = _status(result)
    return {"engine": engine, "variant": variant, "capacity_bits": value, "uncertainty": unc,
            "status": status, "reason": reason}


def run_validate(scenario: Scenario, trials: int = 1_000_000, seed: int = 0, workers: int = 1) -> ValidationReport:
    """Run every applicable engine on one scenario and compare them.

    Concordance passes when ``|quadrature - montecarlo|`` is at most four
    times the sum of the MC standard error and the quadrature error estimate.
    """
    settings = RunSettings(trials=trials, seed=seed, workers=workers)
    results = [
        ("quadrature", "", _safe_eval(scenario, Engine.QUADRATURE, settings)),
        ("montecarlo", "", _safe_eval(scenario, Engine.MONTE_CARLO, settings)),
    ]
    fits = []
    fam_s, fam_e = scenario.main_fading.family, scenario.eve_fading.family
    if fam_s is Family.RICIAN and fam_e is Family.RICIAN:
        for interp in BetaInterpretation:
            try:
                res = secrecy_closedform_rician(scenario, interp)
            except (UnsupportedScenarioError, DegenerateBudgetError) as exc:
                res = exc
            results.append(("closedform", interp.value, res))
        for tag, fad in (("main", scenario.main_fading), ("eve", scenario.eve_fading)):
            fit = marcum_fit(math.sqrt(2.0 * fad.k_factor))
            fits.append({"link": tag, "a": fit.a, "mu": fit.mu, "nu": fit.nu,
                         "max_abs_error": fit.max_abs_error, "b_range": list(fit.b_range)})
    elif fam_s is Family.NAKAGAMI and fam_e is Family.NAKAGAMI:
        try:
            res = secrecy_closedform_nakagami(scenario)
        except (UnsupportedScenarioError, DegenerateBudgetError) as exc:
            res = exc
        results.append(("closedform", "corrected" if scenario.eve_arch.value == "integrated" else "", res))
    else:
        results.append(("closedform", "", UnsupportedScenarioError("closedform_mixed_fading", "mixed fading")))

    rows = [_report_row(e, v, r) for e, v, r in results]
    quad = rows[0]
    for row in rows:
        if quad["status"] == "ok" and math.isfinite(row["capacity_bits"]):
            d = row["capacity_bits"] - quad["capacity_bits"]
            row["delta_abs_vs_quadrature"] = d
            row["delta_rel_vs_quadrature"] = d / quad["capacity_bits"] if quad["capacity_bits"] else (
                0.0 if d == 0 else math.inf)
        else:
            row["delta_abs_vs_quadrature"] = math.nan
            row["delta_rel_vs_quadrature"] = math.nan

    deltas = []
    for r1, r2 in itertools.combinations(rows, 2):
        x, y = r1["capacity_bits"], r2["capacity_bits"]
        if math.isfinite(x) and math.isfinite(y):
            d = x - y
            rel = d / abs(y) if y else (0.0 if d == 0 else math.inf)
            deltas.append({"a": _name(r1), "b": _name(r2), "delta_abs": d, "delta_rel": rel})

    mc = rows[1]
    conc = {"sigmas": CONCORDANCE_SIGMAS, "passed": False}
    if quad["status"] == "ok" and mc["status"] == "ok":
        diff = abs(quad["capacity_bits"] - mc["capacity_bits"])
        budget = mc["uncertainty"] + quad["uncertainty"]
        conc.update(delta_abs=diff, combined_error=budget, mc_stderr=mc["uncertainty"],
                    quadrature_error=quad["uncertainty"],
                    passed=bool(diff <= CONCORDANCE_SIGMAS * budget))
    else:
        conc["reason"] = "quadrature or monte carlo did not produce a usable value"
    return ValidationReport(scenario.label, rows, deltas, conc, fits)


def _name(row):
    return f"{row['engine']}:{row['variant']}" if row["variant"] else row["engine"]
