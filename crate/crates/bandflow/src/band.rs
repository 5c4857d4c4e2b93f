use std::path::{Path, PathBuf};

use bandflow_core::hill::{band_structure, Classification, Classifier, Method, SpectralClass};
use bandflow_core::kdv::{kdv_trace_native, neumann_spectral_coefficients, reduced_integrals, SpectralPolynomial};
use bandflow_core::separation::integrate;
use bandflow_core::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Initial, RunConfig};
use crate::output::{num, poly_json, roots_json, write_json};
use crate::CliError;

pub struct BandReport {
    pub path: PathBuf,
    pub report: Value,
}

fn class_name(c: SpectralClass) -> &'static str {
    match c {
        SpectralClass::In => "in",
        SpectralClass::Out => "out",
        SpectralClass::Indeterminate => "indeterminate",
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Floquet => "floquet",
        Method::Growth => "growth",
        Method::Edge => "edge",
    }
}

fn classification_json(points: &[Classification], method: &str, period: Option<f64>) -> Value {
    let decided = points.iter().filter(|c| c.class != SpectralClass::Indeterminate).count();
    let agree = points.iter().filter(|c| c.class != SpectralClass::Indeterminate && c.agrees()).count();
    json!({
        "method": method,
        "period": period,
        "points": points.iter().map(|c| json!({
            "lambda": c.lambda,
            "class": class_name(c.class),
            "method": method_name(c.method),
            "value": num(c.value),
            "expected_in_band": c.expected,
            "agrees": c.agrees(),
        })).collect::<Vec<_>>(),
        "summary": {
            "points": points.len(),
            "decided": decided,
            "indeterminate": points.len() - decided,
            "agree": agree,
            "agreement": if decided == 0 { Value::Null } else { json!(agree as f64 / decided as f64) },
        },
    })
}

/// Spectral polynomial, roots and bands of a Neumann level set and, when an
/// initial point is given, the classification of a λ-grid along its trace
/// (parallel over λ).
pub fn band_report(cfg: &RunConfig, out: &Path) -> Result<BandReport, CliError> {
    let r = cfg.source().resolve()?;
    let spec = r.neumann.clone().ok_or_else(|| CliError::Config("band-report needs the neumann system".into()))?;
    let initial = cfg.initial(&r)?;
    let h = initial.levels().clone();
    let reduced = reduced_integrals(&spec, &h);
    let coeffs = neumann_spectral_coefficients(&spec, &reduced).map_err(|e| CliError::Config(e.to_string()))?;
    let c = SpectralPolynomial::new(coeffs).map_err(|e| CliError::Config(e.to_string()))?;
    let refs = json!({
        "c": "spectral polynomial C(t) = ½(tᴺ + H₀tᴺ⁻¹ + … + H_{N−1})·Π(t − aₛ) on the reduced levels",
        "bands": "spectrum {λ : C(λ) ≥ 0} = [r₁, r₂] ∪ … ∪ [r_{2N+1}, ∞)",
        "classification": "bounded non-zero Hill solutions: Floquet discriminant |Δ(λ)| ≤ 2, or growth exponent",
    });
    let mut report = json!({
        "command": "band-report",
        "a": spec.a(),
        "h": h.0,
        "h_reduced": reduced.0,
        "c": poly_json(c.poly()),
        "roots": roots_json(c.roots()),
        "paper_refs": refs,
    });
    let bands = match band_structure(&c) {
        Ok(b) => b,
        Err(Error::NonRealRoots { .. }) => {
            report["status"] = json!("not-neumann-compatible");
            report["bands"] = json!([]);
            report["classification"] = Value::Null;
            let path = write_json(out, &cfg.outputs.band_report, &report)?;
            return Ok(BandReport { path, report });
        }
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    report["status"] = json!("ok");
    report["bands"] = bands
        .bands
        .iter()
        .map(|&(lo, hi)| json!({ "lo": lo, "hi": num(hi), "width": num(hi - lo) }))
        .collect();

    report["classification"] = match initial {
        Initial::Levels(_) => Value::Null,
        Initial::Point(state) => {
            let traj = integrate(&r.profile, &state, cfg.x_span, cfg.dx).map_err(CliError::halt)?;
            let trace = kdv_trace_native(&r.profile, &traj).map_err(CliError::halt)?;
            let mut classifier = Classifier::new(&trace, cfg.tolerances.edge_tol).map_err(CliError::halt)?;
            classifier.window = classifier.window.min(cfg.tolerances.growth_window);
            let roots = trace.c.real_roots().map_err(CliError::halt)?;
            let grid = cfg.lambda_grid.resolve(&roots);
            let points = grid
                .par_iter()
                .map(|&l| classifier.classify(&trace, l))
                .collect::<Result<Vec<_>, _>>()
                .map_err(CliError::halt)?;
            let method = if classifier.period.is_some() { "floquet" } else { "growth" };
            let mut v = classification_json(&points, method, classifier.period.map(|p| p.period));
            v["time_factor"] = json!(trace.dx / traj.dx);
            v
        }
    };
    let path = write_json(out, &cfg.outputs.band_report, &report)?;
    Ok(BandReport { path, report })
}
