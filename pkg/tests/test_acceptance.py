"""Acceptance suite: one PASS/FAIL line per criterion, printed to the terminal.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import time
from dataclasses import replace

import mpmath as mp
import numpy as np
import pytest
from scipy import stats

from swiptsec.cli import main
from swiptsec.config import RegionConfig
from swiptsec.experiments import run_region, run_validate
from swiptsec.fading import max_of_n_cdf, sample_channel_power, snr_cdf
from swiptsec.linkmodel import eve_snr_law, main_snr_law, default_scenario
from swiptsec.secrecy import secrecy_montecarlo, secrecy_quadrature
from swiptsec.specfun import fit_marcum_exponential, marcum_q1

SCENARIOS = [(fam, arch) for fam in ("rician", "nakagami") for arch in ("separated", "integrated")]


@pytest.fixture
def report(capsys):
    def emit(num, name, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {num}] {'PASS' if ok else 'FAIL'} {name}: {detail}")
        assert ok, detail
    return emit


def _with_delta_s(sc, d):
    return replace(sc, main=replace(sc.main, delta=d))


# 1 -------------------------------------------------------------------------

@pytest.mark.parametrize("family, arch", SCENARIOS)
def test_c1_engine_concordance(report, family, arch):
    sc = default_scenario(family, eve_arch=arch)
    t0 = time.perf_counter()
    quad = secrecy_quadrature(sc)
    mc = secrecy_montecarlo(sc, trials=1_000_000, seed=0)
    elapsed = time.perf_counter() - t0
    diff = abs(quad.value - mc.value)
    limit = 4 * (mc.uncertainty + quad.uncertainty)
    ok = diff <= limit and elapsed <= 60 and quad.ok and mc.ok
    report(1, f"engine concordance {family} {sc.label}", ok,
           f"quad={quad.value:.6f} mc={mc.value:.6f} |d|={diff:.2e} <= {limit:.2e}, {elapsed:.1f}s <= 60s")


# 2 -------------------------------------------------------------------------

def _marcum_series_oracle(a, b):
    with mp.workdps(40):
        lam = mp.mpf(a) ** 2 / 2
        x = mp.mpf(b) ** 2 / 2
        return float(mp.nsum(lambda k: mp.exp(-lam) * lam**k / mp.factorial(k)
                             * mp.gammainc(k + 1, x) / mp.factorial(k), [0, mp.inf]))


def test_c2_special_function_oracles(report):
    grid = [(a, b) for a in np.linspace(0, 5, 10) for b in np.linspace(0.1, 8, 5)]
    assert len(grid) == 50
    q_err = max(abs(marcum_q1(a, b) - _marcum_series_oracle(a, b)) for a, b in grid)
    fits = {name: fit_marcum_exponential(a, (0.1, 6.0)) for name, a in (("sqrt2", math.sqrt(2)),
                                                                          ("sqrt10", math.sqrt(10)))}
    zero = fit_marcum_exponential(0.0, (0.1, 6.0))
    ok = (q_err <= 1e-9
          and all(f.max_abs_error <= 0.05 for f in fits.values())
          and abs(zero.mu - 2.0) <= 1e-6 and abs(zero.scale - 0.5) <= 1e-6)
    detail = (f"Q1 grid err={q_err:.1e} <= 1e-9; fit err sqrt2={fits['sqrt2'].max_abs_error:.4f} "
              f"sqrt10={fits['sqrt10'].max_abs_error:.4f} <= 0.05; a=0 mu={zero.mu:.9f} e^nu={zero.scale:.9f}")
    report(2, "special-function oracles", ok, detail)


# 3 -------------------------------------------------------------------------

@pytest.mark.parametrize("family", ["rician", "nakagami"])
def test_c3_distribution_ks(report, family):
    sc = default_scenario(family)
    law_s = main_snr_law(sc)
    gamma_s = law_s.mean * sample_channel_power(sc.main_fading, 1_000_000, 101)
    ks_single = stats.kstest(gamma_s, lambda g: snr_cdf(law_s, g)).statistic

    law_e = eve_snr_law(sc)
    n = sc.n_eves
    h = sample_channel_power(sc.eve_fading, n * 1_000_000, 202).reshape(-1, n)
    gamma_max = law_e.mean * h.max(axis=1)
    ks_max = stats.kstest(gamma_max, lambda g: max_of_n_cdf(law_e, n, g)).statistic
    ok = ks_single < 4e-3 and ks_max < 0.01
    report(3, f"distribution KS {family}", ok,
           f"KS(snr)={ks_single:.2e} < 4e-3, KS(max of {n})={ks_max:.2e} < 1e-2")


# 4 -------------------------------------------------------------------------

def test_c4_error_ceiling(report):
    t0 = time.perf_counter()
    gaps = {}
    for delta in (0.2, 0.0):
        base = _with_delta_s(default_scenario(), delta)
        c = {db: secrecy_quadrature(replace(base, main=replace(base.main, omega_db=db))).value for db in (40, 60)}
        gaps[delta] = c[60] - c[40]
    elapsed = time.perf_counter() - t0
    ok = gaps[0.2] <= 0.02 and gaps[0.0] >= 0.5 and elapsed <= 5
    report(4, "error ceiling", ok,
           f"gap(delta=0.2)={gaps[0.2]:.4f} <= 0.02, gap(delta=0)={gaps[0.0]:.3f} >= 0.5, {elapsed:.2f}s <= 5s")


# 5 -------------------------------------------------------------------------

def test_c5_monotonicity_battery(report):
    t0 = time.perf_counter()
    evals = 0
    failures = []
    for family in ("rician", "nakagami"):
        base = default_scenario(family)
        by_n = [secrecy_quadrature(replace(base, n_eves=n)).value for n in range(1, 11)]
        by_d = [secrecy_quadrature(_with_delta_s(base, d)).value for d in np.round(np.arange(10) * 0.1, 1)]
        omegas = np.linspace(0, 58, 30)
        by_o = [secrecy_quadrature(replace(base, main=replace(base.main, omega_db=float(o)))).value
                for o in omegas]
        evals += len(by_n) + len(by_d) + len(by_o)
        if np.any(np.diff(by_n) > 0):
            failures.append(f"{family} N")
        if np.any(np.diff(by_d) > 0):
            failures.append(f"{family} delta_s")
        if np.any(np.diff(by_o) < 0):
            failures.append(f"{family} omega_s")
    elapsed = time.perf_counter() - t0
    ok = not failures and evals == 100 and elapsed <= 30
    report(5, "monotonicity battery", ok,
           f"{evals} evaluations in {elapsed:.1f}s <= 30s, violations: {failures or 'none'}")


# 6 -------------------------------------------------------------------------

def test_c6_secrecy_energy_dominance(report):
    grid = tuple((i + 1) / 21 for i in range(20))
    base = default_scenario()

    def curve(sc):
        return np.array([p.capacity_bits for p in run_region(RegionConfig(sc, grid))])

    both = lambda d: replace(base, main=replace(base.main, delta=d), eve=replace(base.eve, delta=d))
    perfect, imperfect = curve(both(0.0)), curve(both(0.1))
    n10, n15 = curve(replace(base, n_eves=10)), curve(replace(base, n_eves=15))
    ok = bool(np.all(perfect > imperfect) and np.all(n15 < n10))
    report(6, "secrecy-energy dominance", ok,
           f"min(C[d=0]-C[d=0.1])={np.min(perfect - imperfect):.3f} > 0, "
           f"min(C[N=10]-C[N=15])={np.min(n10 - n15):.4f} > 0 over {len(grid)} rho points")


# 7 -------------------------------------------------------------------------

def test_c7_closed_form_report(report):
    nak = run_validate(default_scenario("nakagami", eve_arch="integrated"), trials=100_000)
    nak_cf = [r for r in nak.rows if r["engine"] == "closedform"][0]
    problems = []
    if not (nak_cf["variant"] == "corrected" and nak_cf["status"] == "ok"
            and math.isfinite(nak_cf["capacity_bits"]) and math.isfinite(nak_cf["delta_abs_vs_quadrature"])):
        problems.append(f"nakagami Sp-In corrected: {nak_cf}")
    details = [f"nakagami Sp-In corrected={nak_cf['capacity_bits']:.4g} "
               f"(d={nak_cf['delta_abs_vs_quadrature']:+.4g})"]
    for arch in ("separated", "integrated"):
        rep = run_validate(default_scenario("rician", eve_arch=arch), trials=100_000)
        by = {r["variant"]: r for r in rep.rows if r["engine"] == "closedform"}
        cp, ap = by["complement_pair"], by["as_printed"]
        if not (cp["status"] == "ok" and math.isfinite(cp["capacity_bits"])
                and math.isfinite(cp["delta_abs_vs_quadrature"])):
            problems.append(f"rician {rep.scenario} complement_pair: {cp}")
        if not (ap["status"] == "flagged" and ap["reason"] == "non_finite"):
            problems.append(f"rician {rep.scenario} as_printed not flagged: {ap}")
        details.append(f"rician {rep.scenario} complement_pair={cp['capacity_bits']:.4g} "
                       f"(d={cp['delta_abs_vs_quadrature']:+.4g}), as_printed={ap['status']}:{ap['reason']}")
    report(7, "closed-form fidelity report", not problems, "; ".join(problems or details))


# 8 -------------------------------------------------------------------------

def test_c8_sweep_determinism(report, tmp_path, capsys):
    cfg = tmp_path / "sweep.ini"
    cfg.write_text("[run]\nengines = quadrature, montecarlo\ntrials = 300000\nseed = 12\n"
                   "[sweep]\nparameter = main_snr_db\nvalues = 10, 20, 30, 40, 50\n", encoding="utf-8")
    blobs = []
    codes = []
    for i, workers in enumerate((1, 1, 4, 3)):
        out = tmp_path / f"run{i}.csv"
        codes.append(main(["sweep", "--config", str(cfg), "--out", str(out), "--workers", str(workers)]))
        blobs.append(out.read_bytes())
    ok = codes == [0] * 4 and all(b == blobs[0] for b in blobs)
    report(8, "sweep determinism", ok,
           f"4 runs (workers 1,1,4,3), exit codes {codes}, {len(blobs[0])} bytes each, "
           f"identical={all(b == blobs[0] for b in blobs)}")
