use std::path::{Path, PathBuf};

use bandflow_core::benenti::{allowed_product, momentum_from_energy, poisson_residual};
use bandflow_core::defaults::{NEUMANN_KAPPA, POISSON_STEP};
use bandflow_core::hill::{
    band_edge_solution, explicit_pair, growth_exponent, hill_residual, predicted_gap_exponent, Classifier, PairKind,
    SpectralClass,
};
use bandflow_core::kdv::{
    base1_residual, default_mu_grid, interlacing_check, kdv_trace, kdv_trace_native, stationarity_check_n1, KdvTrace,
    SpectralPolynomial,
};
use bandflow_core::separation::{integral_drift, integrate, legendre_residual, trace_series, Trajectory};
use bandflow_core::systems::{
    cartesian_from_separation, cartesian_to_sphero_conical, integrate_cartesian, normalize_to_kdv, NeumannSpec,
};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Resolved, RunConfig, Tolerances};
use crate::output::{num, write_json};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    fn at_most(name: &'static str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { name, passed: value <= threshold, value, threshold, detail: detail.into() }
    }

    fn at_least(name: &'static str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { name, passed: value >= threshold, value, threshold, detail: detail.into() }
    }

    fn failed(name: &'static str, detail: impl Into<String>) -> Self {
        Self { name, passed: false, value: f64::NAN, threshold: f64::NAN, detail: detail.into() }
    }
}

pub struct VerifyOutput {
    pub path: PathBuf,
    pub checks: Vec<Check>,
}

impl VerifyOutput {
    pub fn failed(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.to_string()).collect()
    }
}

fn identity(name: &str) -> &'static str {
    match name {
        "integral-drift" => "conservation of the commuting integrals Ĩₖ",
        "legendre-residual" => "separated equations ½(q̇ᵢΠᵢ)² = f(qᵢ)R(qᵢ)",
        "poisson-brackets" => "involutivity {Ĩₖ, Ĩₗ} = 0",
        "kdv-legendre-residual" => "matched profiles f₁R₁ = f₂R₂: the trajectory solves the normalized KdV profile",
        "real-roots" => "C has 2N+1 real roots",
        "interlacing" => "interlacing r₁ ≤ r₂ ≤ q₁ ≤ r₃ ≤ … ≤ q_N ≤ r_{2N+1}",
        "base1-identity" => "C(μ) = m₀(w″w − ½w′²) + (μ − 2w₁ + b)w²",
        "base1-grid-doubling" => "stability of the μ-identity residual under grid doubling",
        "hill-residual" => "explicit solutions √|w|·e^{±kφ}, √|w|·(cos, sin)κφ of ψ″ + ½(σ/m)ψ = 0",
        "wronskian" => "constant Wronskian of the explicit pair",
        "product-identity" => "ψ₁ψ₂ = ±w, or ψ₁² + ψ₂² = |w| in bands",
        "band-edges" => "√|w(x; rᵢ)| solves the Hill equation at the roots of C",
        "band-classification" => "spectrum {C ≥ 0} via the Floquet discriminant |Δ| ≤ 2",
        "gap-growth" => "gap growth rate √(−2C/m)·⟨1/(2|w|)⟩",
        "u-bounds" => "−2N·a_{N+1} ≤ u ≤ −2N·a₁",
        "stationarity" => "stationary KdV −½u‴ + (3/2)uu′ + c·u′ = 0",
        "cartesian-oracle" => "sphero-conical inversion: Cartesian and separated flows agree in Σqᵢ",
        "cartesian-integrals" => "conservation of the closed-form Cartesian integrals",
        _ => "",
    }
}

fn max_abs<'a>(v: impl IntoIterator<Item = &'a f64>) -> f64 {
    v.into_iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Runs every applicable invariant on the configured trajectory and writes
/// the results; failing invariants do not stop the suite.
pub fn verify(cfg: &RunConfig, out: &Path) -> Result<VerifyOutput, CliError> {
    let r = cfg.source().resolve()?;
    let state = cfg.point(&r, "verify")?;
    let tol = &cfg.tolerances;
    let traj = integrate(&r.profile, &state, cfg.x_span, cfg.dx).map_err(CliError::halt)?;
    let n = traj.n();
    let mut checks = Vec::new();

    let drift = integral_drift(&r.profile, &traj).map_err(CliError::halt)?;
    checks.push(Check::at_most("integral-drift", max_abs(drift.iter().flatten()), tol.drift, "max |Ĩₖ(x) − Hₖ|"));
    let res = legendre_residual(&r.profile, &traj).map_err(CliError::halt)?;
    checks.push(Check::at_most("legendre-residual", res, tol.legendre, "max pointwise residual"));
    if n >= 2 {
        let p = momentum_from_energy(&r.profile, &state.h, &state.q, &state.sigma).map_err(CliError::halt)?;
        let mut worst = 0.0f64;
        for k in 0..n {
            for l in k + 1..n {
                worst = worst.max(poisson_residual(&r.profile, &state.q, &p, k, l, POISSON_STEP).map_err(CliError::halt)?);
            }
        }
        checks.push(Check::at_most("poisson-brackets", worst, tol.poisson, "at the initial point"));
    }
    kdv_checks(cfg, &r, &traj, &mut checks)?;
    if let Some(spec) = &r.neumann {
        oracle_checks(cfg, spec, &traj, &mut checks)?;
    }

    let report = json!({
        "command": "verify",
        "status": if checks.iter().all(|c| c.passed) { "pass" } else { "fail" },
        "h": traj.h.0,
        "perturb_h": cfg.perturb_h,
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "passed": c.passed,
            "value": num(c.value),
            "threshold": num(c.threshold),
            "detail": c.detail,
        })).collect::<Vec<_>>(),
        "paper_refs": checks.iter().map(|c| (c.name.to_string(), json!(identity(c.name)))).collect::<serde_json::Map<_, _>>(),
    });
    let path = write_json(out, &cfg.outputs.verify, &report)?;
    Ok(VerifyOutput { path, checks })
}

/// The stationary-KdV trace of the run, with `C` built from `H₀ + perturb_h`.
fn trace_for(cfg: &RunConfig, r: &Resolved, traj: &Trajectory) -> Result<KdvTrace, CliError> {
    let Some(delta) = cfg.perturb_h else {
        return kdv_trace_native(&r.profile, traj).map_err(CliError::halt);
    };
    let product = |h| allowed_product(&r.profile, h).as_polynomial().ok_or_else(|| CliError::Halt("f·R is not a polynomial".into()));
    let norm = normalize_to_kdv(&product(&traj.h)?).map_err(CliError::halt)?;
    let mut h = traj.h.clone();
    h.0[0] += delta;
    let perturbed = normalize_to_kdv(&product(&h)?).map_err(CliError::halt)?;
    let c = SpectralPolynomial::new(perturbed.c_native()).map_err(CliError::halt)?;
    Ok(kdv_trace(&traj.rescale_time(norm.time_factor()), norm.m0, c))
}

fn kdv_checks(cfg: &RunConfig, r: &Resolved, traj: &Trajectory, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let tol = &cfg.tolerances;
    let Some(product) = allowed_product(&r.profile, &traj.h).as_polynomial() else {
        return Ok(());
    };
    let Ok(norm) = normalize_to_kdv(&product) else {
        return Ok(());
    };
    let kdv = traj.rescale_time(norm.time_factor()).shift_coordinates(-norm.shift, norm.h.clone(), "kdv");
    let res = legendre_residual(&norm.profile, &kdv).map_err(CliError::halt)?;
    checks.push(Check::at_most("kdv-legendre-residual", res, tol.legendre, format!("time factor {}", norm.time_factor())));

    let trace = trace_for(cfg, r, traj)?;
    let roots = match trace.c.real_roots() {
        Ok(v) => v,
        Err(e) => {
            checks.push(Check::failed("real-roots", e.to_string()));
            return Ok(());
        }
    };
    let mut worst = f64::INFINITY;
    for j in 0..trace.len() {
        let q: Vec<f64> = trace.q.iter().map(|s| s[j]).collect();
        let m = interlacing_check(&trace.c, &q).map_err(CliError::halt)?;
        worst = m.margins.iter().fold(worst, |a, &b| a.min(b));
    }
    checks.push(Check::at_least("interlacing", worst, -tol.interlacing, "smallest margin over all samples"));

    let grid = default_mu_grid(&trace.c);
    let mut sorted = grid.clone();
    sorted.sort_by(f64::total_cmp);
    let mut doubled = grid.clone();
    doubled.extend(sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let r1 = base1_residual(&trace, &grid).map_err(CliError::halt)?;
    let r2 = base1_residual(&trace, &doubled).map_err(CliError::halt)?;
    checks.push(Check::at_most("base1-identity", r1, tol.base1, format!("{} Chebyshev points", grid.len())));
    checks.push(Check::at_most("base1-grid-doubling", r2 / r1.max(f64::MIN_POSITIVE), 2.0, "doubled/base residual ratio"));

    hill_checks(&trace, &roots, tol, checks)?;

    if trace.n() == 1 {
        classification_check(cfg, &trace, checks)?;
        let lambda = roots[0] - 1.0;
        let window = tol.growth_window.min(trace.x_end() - trace.x0);
        let measured = growth_exponent(&trace, lambda, window).map_err(CliError::halt)?.exponent;
        let predicted = predicted_gap_exponent(&trace, lambda, window).map_err(CliError::halt)?;
        let rel = (measured - predicted).abs() / predicted.abs();
        checks.push(Check::at_most(
            "gap-growth",
            rel,
            tol.growth_rel,
            format!("λ = {lambda}, window {window}: measured {measured}, predicted {predicted}"),
        ));
        let s = stationarity_check_n1(&trace).map_err(CliError::halt)?;
        checks.push(Check::at_most("stationarity", s.residual, tol.stationarity, format!("fitted c = {:?}", s.c)));
    }
    if let Some(spec) = &r.neumann {
        let a = spec.a();
        let nn = spec.n() as f64;
        let (lo, hi) = (-2.0 * nn * a[a.len() - 1], -2.0 * nn * a[0]);
        let margin = trace.u.iter().fold(f64::INFINITY, |m, &u| m.min(u - lo).min(hi - u));
        checks.push(Check::at_least("u-bounds", margin, 0.0, format!("u within [{lo}, {hi}]")));
    }
    Ok(())
}

fn hill_checks(trace: &KdvTrace, roots: &[f64], tol: &Tolerances, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let mut lambdas = vec![roots[0] - 1.0, roots[roots.len() - 1] + 1.0];
    lambdas.extend(roots.chunks(2).filter(|p| p.len() == 2).map(|p| 0.5 * (p[0] + p[1])));
    let (mut res, mut wr, mut prod) = (0.0f64, 0.0f64, 0.0f64);
    for &lambda in &lambdas {
        let e = explicit_pair(trace, lambda, trace.m0, (trace.x0, trace.x_end())).map_err(CliError::halt)?;
        let Some(p2) = e.psi2.as_ref() else { continue };
        for s in [&e.psi1, p2] {
            res = res.max(hill_residual(s, trace, lambda).map_err(CliError::halt)?);
        }
        let w0 = e.psi1.psi[0] * p2.dpsi[0] - e.psi1.dpsi[0] * p2.psi[0];
        for j in 0..p2.psi.len() {
            wr = wr.max((e.psi1.psi[j] * p2.dpsi[j] - e.psi1.dpsi[j] * p2.psi[j] - w0).abs());
            let w = trace.w_at(j, lambda).0;
            let (a, b) = (e.psi1.psi[j], p2.psi[j]);
            prod = prod.max(match e.kind {
                PairKind::Exponential { .. } => (a * b - w).abs(),
                _ => (a * a + b * b - w.abs()).abs(),
            });
        }
    }
    let at = format!("λ ∈ {lambdas:?}");
    checks.push(Check::at_most("hill-residual", res, tol.hill, at.clone()));
    checks.push(Check::at_most("wronskian", wr, tol.wronskian, at.clone()));
    checks.push(Check::at_most("product-identity", prod, tol.product, at));
    let mut edge = 0.0f64;
    for &l in roots {
        edge = edge.max(hill_residual(&band_edge_solution(trace, l).map_err(CliError::halt)?, trace, l).map_err(CliError::halt)?);
    }
    checks.push(Check::at_most("band-edges", edge, tol.hill, "max residual over the roots of C"));
    Ok(())
}

fn classification_check(cfg: &RunConfig, trace: &KdvTrace, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let classifier = Classifier::new(trace, cfg.tolerances.edge_tol).map_err(CliError::halt)?;
    if classifier.period.is_none() {
        checks.push(Check::failed("band-classification", "no period detected along the trace"));
        return Ok(());
    }
    let roots = trace.c.real_roots().map_err(CliError::halt)?;
    let grid = cfg.lambda_grid.resolve(&roots);
    let points = grid
        .par_iter()
        .map(|&l| classifier.classify(trace, l))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::halt)?;
    let decided = points.iter().filter(|c| c.class != SpectralClass::Indeterminate).count();
    let wrong = points.iter().filter(|c| !c.agrees()).count();
    checks.push(Check::at_most(
        "band-classification",
        wrong as f64,
        0.0,
        format!("{} of {decided} decided points disagree, {} within edge_tol", wrong, points.len() - decided),
    ));
    Ok(())
}

fn oracle_checks(cfg: &RunConfig, spec: &NeumannSpec, traj: &Trajectory, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let tol = &cfg.tolerances;
    let state = traj.state_at(0);
    let eps = vec![1.0; spec.n() + 1];
    let c0 = cartesian_from_separation(spec, &state, &eps).map_err(CliError::halt)?;
    let cart = integrate_cartesian(spec, &c0, cfg.x_span, cfg.dx, NEUMANN_KAPPA).map_err(CliError::halt)?;
    let sep = trace_series(traj);
    let mut dev = 0.0f64;
    for (c, s) in cart.states.iter().zip(&sep) {
        let q = cartesian_to_sphero_conical(spec, &c.x).map_err(CliError::halt)?;
        dev = dev.max((q.iter().sum::<f64>() - s).abs());
    }
    checks.push(Check::at_most("cartesian-oracle", dev, tol.oracle, format!("κ = {NEUMANN_KAPPA}")));
    let h0 = c0.integrals(spec);
    let drift = cart
        .states
        .iter()
        .flat_map(|c| c.integrals(spec).0.into_iter().zip(h0.0.clone()).map(|(a, b)| (a - b).abs()))
        .fold(0.0f64, f64::max);
    checks.push(Check::at_most("cartesian-integrals", drift, tol.drift, "closed-form integrals along the Cartesian flow"));
    Ok(())
}
