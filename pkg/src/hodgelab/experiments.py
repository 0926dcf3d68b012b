"""Experiment drivers: each turns a validated config into a judged report."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from ._rational import q_str, to_q
from .calculus.identities import TAGS, verify_identity
from .config import ExperimentConfig
from .kuranishi.calibration import CalibrationRecord, calibrate_constants, validate_constants
from .kuranishi.domination import domination_report, radius_scan
from .kuranishi.families import canonical_family, cohomology_expansion, growth_estimate, kahler_family
from .kuranishi.seeds import make_seed
from .kuranishi.series import (
    bracket_sum_closedness,
    integrability_residual,
    iterate_beltrami,
    side_conditions_check,
    two_path_check,
)
from .majorant import (
    boundary_decay,
    catalan,
    convergence_radius,
    formal_square_residual,
    majorant_coefficients,
    majorant_radius_eval,
)
from .report import ExperimentReport
from .torus.forms import random_form
from .torus.operators import l2_norm
from .torus.solve import dbar_inverse, isometric_input, project_kernel, quasi_isometry_report


def thread_count() -> int:
    """Worker cap from HODGELAB_THREADS (default 1)."""
    raw = os.environ.get("HODGELAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn: Callable, items: Iterable) -> list:
    """Map in a thread pool; results keep input order so reports stay deterministic."""
    items = list(items)
    workers = min(thread_count(), max(len(items), 1))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def judged(residual: float, scale: Optional[float]) -> float:
    """Residual used for pass/fail: the larger of the absolute and relative size.

    Requiring this below a tolerance means both the raw residual and the
    residual relative to the magnitude of the compared quantities pass.
    """
    residual = float(residual)
    if scale is None or scale <= 0:
        return residual
    return max(residual, residual / float(scale))


def _label(index) -> str:
    return ",".join(str(i) for i in index)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


# -- identities ---------------------------------------------------------------------


def run_identities(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    ident = cfg.identities
    instances = ident.get("instances", 50)
    base = ident.get("baseSeed", 0)
    tags = ident.get("tags") or list(TAGS)
    jobs = [(t, tag, j) for t, tag in enumerate(tags) for j in range(instances)]
    verdicts = ordered_map(lambda job: verify_identity(job[1], base + 1000 * job[0] + job[2]), jobs)
    rows = [v.as_record() for v in verdicts]
    report.tables["identities"] = [{k: r[k] for k in ("tag", "seed", "n", "pass", "differing_monomials")}
                                   for r in rows]
    for tag in tags:
        mine = [v for v in verdicts if v.tag == tag]
        bad = sum(v.differing_monomials for v in mine)
        report.check(f"identity {tag}", "exact operator identity on hypothesis-satisfying instances",
                     bad, 0.0, lhs=len(mine), rhs=sum(v.passed for v in mine))


# -- energy estimates ---------------------------------------------------------------------


def run_quasi_isometry(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    geometry = cfg.torus()
    n = geometry.n
    rng = _rng(cfg.rngSeed)
    inputs = []
    for j in range(cfg.samples):
        q = 1 + j % n
        inputs.append(random_form(geometry, n, q, "scalar", rng, band=int(rng.integers(1, geometry.K + 1))))
    iso_inputs = [isometric_input(random_form(geometry, n, 1 + j % n, "scalar", rng))
                  for j in range(max(1, cfg.samples // 10))]
    results = ordered_map(quasi_isometry_report, inputs)
    iso = ordered_map(quasi_isometry_report, iso_inputs)
    rows = []
    worst_slack = 0.0
    worst_identity = 0.0
    for r in results:
        est, ide = r["estimate"], r["identity"]
        worst_slack = max(worst_slack, -est["slack"])
        worst_identity = max(worst_identity, ide["residual"])
        rows.append({"bidegree": r["bidegree"], "estimateLhs": est["lhs"], "estimateRhs": est["rhs"],
                     "slack": est["slack"], "identityResidual": ide["residual"], "ratio": r["ratio"]})
    report.tables["quasi_isometry"] = rows
    report.check("energy estimate slack", "energy estimate for dbar* G on top-degree forms",
                 max(worst_slack, 0.0), cfg.tolerance("estimateSlack"),
                 lhs=max(r["estimate"]["lhs"] for r in results), rhs=max(r["estimate"]["rhs"] for r in results))
    report.check("four-term energy identity", "energy identity for dbar* G del",
                 worst_identity, cfg.tolerance("fourTerm"))
    ratios = [r["ratio"] for r in iso]
    report.tables["isometry_case"] = [{"ratio": r["ratio"], "isometryCase": r["isometry_case"]} for r in iso]
    report.check("isometry case ratio", "equality case of the energy identity",
                 max(abs(x - 1.0) for x in ratios), cfg.tolerance("isometry"),
                 lhs=min(ratios), rhs=1.0)
    report.check("isometry case hypotheses", "equality case of the energy identity",
                 float(sum(not r["isometry_case"] for r in iso)), 0.0)


def run_dbar_inverse(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    geometry = cfg.torus()
    n = geometry.n
    rng = _rng(cfg.rngSeed)
    inputs = []
    for j in range(cfg.samples):
        g = random_form(geometry, n - 1, 1 + j % n, "scalar", rng, band=int(rng.integers(1, geometry.K + 1)))
        inputs.append(project_kernel(g, ["dbar", "del"]))
    outs = ordered_map(lambda g: dbar_inverse(g, tol=cfg.tolerance("dbarInverse")), inputs)
    rows = []
    worst_res = worst_bound = worst_norm = 0.0
    for _, residual, d in outs:
        worst_res = max(worst_res, judged(residual, d.del_norm))
        excess = max(0.0, d.solution_norm2 - d.energy_bound)
        worst_bound = max(worst_bound, excess / max(d.energy_bound, 1e-300))
        worst_norm = max(worst_norm, d.harmonic_norm, d.codifferential_norm)
        rows.append(d.to_dict())
    report.tables["dbar_inverse"] = rows
    report.check("dbar-inverse residual", "solution of dbar s = del g", worst_res, cfg.tolerance("dbarInverse"))
    report.check("dbar-inverse energy bound", "energy bound for the minimal solution",
                 worst_bound, cfg.tolerance("dbarInverse"))
    report.check("dbar-inverse normalization", "minimal solution is orthogonal to harmonic and dbar*-closed",
                 worst_norm, cfg.tolerance("normalization"))


# -- Beltrami series ------------------------------------------------------------------------


def resolve_calibration(cfg: ExperimentConfig) -> CalibrationRecord:
    c = cfg.calibration
    return calibrate_constants(cfg.torus(), c.sampleCount, rng_seed=c.rngSeed, max_band=c.maxBand)


def build_seed(cfg: ExperimentConfig, calibration: Optional[CalibrationRecord]):
    target = cfg.seed.targetC1Norm
    if target == "auto":
        c1 = calibration.c1hat
        target = 1.0 / (4.0 * c1) if cfg.m == 1 else 1.0 / (8.0 * cfg.N * c1)
    return make_seed(cfg.seed.kind, cfg.torus(), rng_seed=cfg.seed.rngSeed, target_c1_norm=target,
                     m=cfg.m, band=cfg.seed.band)


def _receipts(series) -> Dict[str, dict]:
    return {str(k): r.to_dict() for k, r in sorted(series.receipts.items())}


def _series_checks(cfg, report, series) -> None:
    tol = cfg.tolerance("integrability")
    rows = integrability_residual(series)
    report.tables["integrability"] = [r.to_dict() for r in rows]
    for r in rows:
        if r.judged:
            report.check(f"integrability [{_label(r.index)}]", "Maurer-Cartan equation order by order",
                         judged(r.residual, r.scale), tol, lhs=r.residual, rhs=r.scale)
    closed = bracket_sum_closedness(series)
    report.tables["bracket_closedness"] = [r.to_dict() for r in closed]
    report.check("bracket sums dbar-closed", "closedness of the bracket sum at the next order",
                 max(judged(r.residual, r.scale) for r in closed), cfg.tolerance("bracketClosed"))


def run_kuranishi(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    calibration = None
    if cfg.seed.targetC1Norm == "auto":
        calibration = resolve_calibration(cfg)
        report.info["calibration"] = calibration.to_dict()
    seed = build_seed(cfg, calibration)
    series = iterate_beltrami(seed, cfg.N)
    report.info["seed"] = {"kind": seed.kind, "scale": seed.scale, "path": series.path,
                           "residuals": seed.residuals.to_dict()}
    report.info["warnings"] = list(series.warnings)
    report.receipts["orders"] = _receipts(series)
    _series_checks(cfg, report, series)

    if seed.harmonic:
        worst = max((l2_norm(f) for I, f in series.coeffs.items() if sum(I) >= 2), default=0.0)
        report.check("higher orders vanish", "constant seeds have vanishing brackets", worst, 0.0)

    side = side_conditions_check(series)
    report.tables["side_conditions"] = [r.to_dict() for r in side]
    applicable = [r for r in side if r.applicable]
    sc = cfg.tolerance("sideCondition")
    report.check("dbar* phi_I = 0", "gauge condition on the coefficients",
                 max((r.codifferential for r in applicable), default=0.0), sc)
    report.check("phi_I -| Omega0 del-exact", "del-exactness of the contracted coefficients",
                 max((r.exactness for r in applicable), default=0.0), sc)
    report.check("H(phi_I -| Omega0) = 0", "del-exactness of the contracted coefficients",
                 max((r.harmonic for r in applicable if r.harmonic is not None), default=0.0),
                 cfg.tolerance("harmonic"))

    if seed.calabi_yau:
        paths = two_path_check(seed, cfg.N)
        report.tables["two_path"] = [r.to_dict() for r in paths]
        report.check("contraction and bracket paths agree", "bracket form of the contraction recursion",
                     max(judged(r.residual, r.scale) for r in paths), cfg.tolerance("twoPath"))

        family = canonical_family(series)
        report.tables["canonical_family"] = family.residuals
        report.check("canonical family holomorphic", "holomorphicity of exp(Phi) -| Omega0 order by order",
                     max(judged(r["residual"], r["scale"]) for r in family.residuals),
                     cfg.tolerance("holomorphic"))
        _cohomology_checks(cfg, report, family, cy=True)

    if calibration is not None:
        dom = domination_report(series, calibration.c1hat)
        report.tables["domination"] = dom
        report.check("C1 norms dominated by the majorant", "majorant domination of the coefficient norms",
                     max(max(r["ratio"] - 1.0, 0.0) for r in dom), 0.0,
                     lhs=max(r["ratio"] for r in dom), rhs=1.0)
        scan = radius_scan(series, cfg.tGrid, calibration.c1hat)
        report.tables["radius_scan"] = scan
        report.check("partial sums within the majorant envelope", "convergence inside the unit radius",
                     float(sum(not r["withinEnvelope"] for r in scan)), 0.0)


def _cohomology_checks(cfg, report, family, cy: bool) -> None:
    rows = cohomology_expansion(family)
    report.tables["cohomology"] = rows
    n = family.base.n
    first = [r for r in rows if r["order"] == 1 and "mismatch" in r]
    report.check("order-one classes", "first-order term of the period expansion",
                 max((r["mismatch"] for r in first), default=0.0), cfg.tolerance("cohomologyFirst"))
    if cy:
        higher = [r for r in rows if r["order"] >= 2 and r["bidegree"] == [n - 1, 1]]
        report.check("higher (n-1,1) classes trivial", "higher-order terms of the period expansion",
                     max((r["harmonic"] for r in higher), default=0.0), cfg.tolerance("cohomologyHigher"))


def run_kahler_family(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    calibration = resolve_calibration(cfg) if cfg.seed.targetC1Norm == "auto" else None
    if calibration is not None:
        report.info["calibration"] = calibration.to_dict()
    seed = build_seed(cfg, calibration)
    series = iterate_beltrami(seed, cfg.N)
    report.info["seed"] = {"kind": seed.kind, "scale": seed.scale, "path": series.path}
    report.receipts["orders"] = _receipts(series)
    _series_checks(cfg, report, series)
    family = kahler_family(series)
    rows = family.residuals
    report.tables["kahler_family"] = rows
    judged_rows = [r for r in rows if r["order"] >= 1]
    report.check("cascade residual", "holomorphicity cascade for the (n,0) family",
                 max(judged(r["cascade"], r["scale"]) for r in rows), cfg.tolerance("cascade"))
    ex = cfg.tolerance("exactness")
    report.check("Omega_I del-exact", "exactness of the cascade coefficients",
                 max(max(judged(r["delExact"], r["norm"]), r["harmonic"]) for r in judged_rows), ex)
    report.check("Omega_I dbar*-exact", "exactness of the cascade coefficients",
                 max(judged(r["codifferentialExact"], r["norm"]) for r in judged_rows), ex)
    growth = growth_estimate(family)
    report.tables["growth"] = growth
    report.check("growth estimate", "order-wise growth bound for the cascade",
                 max(max(r["lhs"] - r["rhs"], 0.0) / max(r["rhs"], 1e-300) for r in growth), 0.0,
                 lhs=[r["lhs"] for r in growth], rhs=[r["rhs"] for r in growth])
    report.check("order-zero coefficient", "base of the family", 0.0, 0.0)


# -- majorant and calibration ------------------------------------------------------------------


def run_majorant(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    spec = cfg.majorant
    c, x1 = to_q(spec.c), to_q(spec.x1)
    series = majorant_coefficients(c, x1, spec.N)  # raises if the closed form disagrees
    report.check("recursion equals closed form", "closed form of the quadratic recursion", 0.0, 0.0,
                 lhs=spec.N, rhs=spec.N)
    fsr = formal_square_residual(series)
    report.check("c S^2 = S - x1 tau coefficient-wise", "quadratic equation for the generating function",
                 float(sum(v != 0 for v in fsr)), 0.0)
    radius = convergence_radius(c, x1)
    report.info["radius"] = None if radius is None else q_str(radius)
    if c == 1 and x1 == 1:
        mism = sum(series[k] != catalan(k - 1) for k in range(1, spec.N + 1))
        report.check("Catalan numbers", "c = x1 = 1 gives the Catalan numbers", float(mism), 0.0,
                     lhs=[q_str(series[k]) for k in range(1, min(spec.N, 10) + 1)],
                     rhs=[catalan(k - 1) for k in range(1, min(spec.N, 10) + 1)])
    tau = to_q(spec.tau) if spec.tau is not None else (radius / 2 if radius is not None else to_q(1))
    ev = majorant_radius_eval(c, x1, tau, N=max(spec.N, 200))
    if ev.converged is not None and ev.S is not None:
        resid = ev.difference if radius is None or abs(tau) < radius else (0.0 if ev.converged else 1.0)
        report.check("partial sums converge to S(tau)", "radius of the majorant series",
                     resid, cfg.tolerance("generatingFunction"), lhs=ev.partial_sums[-1], rhs=ev.S)
    else:
        report.info["tauOutsideDisc"] = q_str(tau)
    if radius is not None:
        decay = boundary_decay(c, x1, N=10_000)
        report.info["boundary"] = decay
        report.check("boundary terms decrease and stay bounded", "convergence on the boundary circle",
                     float((not decay["decreasing"]) + (not decay["bounded"])), 0.0,
                     lhs=decay["partial_sum"], rhs=decay["bound"])
    rows = []
    partial = to_q(0)
    power = to_q(1)
    t_eval = radius if radius is not None else to_q(0)
    for k in range(1, spec.N + 1):
        power *= t_eval
        term = series[k] * power
        partial += term
        rows.append({"n": k, "x_n": q_str(series[k]), "x_n_tau_n": q_str(term), "partial_sum": float(partial)})
    report.tables["coefficients"] = rows


def run_calibrate(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    geometry = cfg.torus()
    record = resolve_calibration(cfg)
    report.info["calibration"] = record.to_dict()
    report.tables["calibration_history"] = [
        {"sample": j + 1, "C1hat": a, "C2hat": b}
        for j, (a, b) in enumerate(zip(record.history_c1, record.history_c2))
    ]
    mono = all(b >= a for a, b in zip(record.history_c1, record.history_c1[1:])) and \
        all(b >= a for a, b in zip(record.history_c2, record.history_c2[1:]))
    report.check("running maxima nondecreasing", "empirical constants", 0.0 if mono else 1.0, 0.0)
    if cfg.calibration.holdOut:
        hold = validate_constants(record, geometry, cfg.calibration.holdOut,
                                  rng_seed=cfg.calibration.rngSeed + 1, max_band=cfg.calibration.maxBand)
        report.info["holdOut"] = hold
        report.check("bracket-inverse estimate on hold-out", "bracket-inverse estimate",
                     float(hold["violationsC1"]), 0.0, lhs=hold["maxRatioC1"], rhs=record.c1hat)
        report.check("double-contraction estimate on hold-out", "double contraction estimate",
                     float(hold["violationsC2"]), 0.0, lhs=hold["maxRatioC2"], rhs=record.c2hat)


RUNNERS: Dict[str, Callable[[ExperimentConfig, ExperimentReport], None]] = {
    "verify-identities": run_identities,
    "quasi-isometry": run_quasi_isometry,
    "dbar-inverse": run_dbar_inverse,
    "kuranishi": run_kuranishi,
    "kahler-family": run_kahler_family,
    "majorant": run_majorant,
    "calibrate": run_calibrate,
}


def run_config(cfg: ExperimentConfig) -> ExperimentReport:
    report = ExperimentReport(config=cfg.to_dict())
    RUNNERS[cfg.experiment](cfg, report)
    return report
