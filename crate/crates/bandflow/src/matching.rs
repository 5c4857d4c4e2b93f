use std::path::{Path, PathBuf};

use bandflow_core::benenti::allowed_product;
use bandflow_core::poly::RationalFunction;
use bandflow_core::systems::{match_profiles, normalize_to_kdv, KdvNormalization, MatchOutcome};
use bandflow_core::Error;
use serde_json::{json, Value};

use crate::config::{RunConfig, SystemKind};
use crate::output::{poly_json, write_json};
use crate::CliError;

pub struct MatchReport {
    pub path: PathBuf,
    pub report: Value,
}

fn product_json(p: &RationalFunction) -> Value {
    json!({ "num": poly_json(&p.num), "den": poly_json(&p.den) })
}

fn normalization_json(n: &KdvNormalization) -> Value {
    json!({
        "scale": n.scale,
        "shift": n.shift,
        "m0": n.m0,
        "time_factor": n.time_factor(),
        "c": poly_json(&n.c),
        "c_native": poly_json(&n.c_native()),
        "h": n.h.0,
    })
}

fn outcome_json(o: &MatchOutcome) -> Value {
    match o {
        MatchOutcome::Matched(h) => json!({ "status": "matched", "h": h.0 }),
        MatchOutcome::Mismatch { remainder_norm, degree_excess, excess_norm } => json!({
            "status": "mismatch",
            "remainder_norm": remainder_norm,
            "degree_excess": degree_excess,
            "excess_norm": excess_norm,
        }),
    }
}

/// Matches the source profile on the configured levels against `target`.
/// A kdv target without `c` is the normalized KdV form of the product.
pub fn match_cmd(cfg: &RunConfig, out: &Path) -> Result<MatchReport, CliError> {
    let source = cfg.source().resolve()?;
    let target_cfg = cfg.target.clone().ok_or_else(|| CliError::Config("match needs a `target` profile".into()))?;
    let h = cfg.initial(&source)?.levels().clone();
    let product = allowed_product(&source.profile, &h);
    let normalization = product.as_polynomial().and_then(|p| normalize_to_kdv(&p).ok());
    let kdv_target = target_cfg.system == SystemKind::Kdv;

    let (target_json, outcome) = if kdv_target && target_cfg.c.is_none() {
        let norm = normalization
            .as_ref()
            .ok_or_else(|| CliError::Config("the product f·R has no stationary KdV form".into()))?;
        (json!({ "system": "kdv", "c": kdv_params(norm), "m0": norm.m0, "derived": true }), MatchOutcome::Matched(norm.h.clone()))
    } else {
        let target = target_cfg.resolve()?;
        let outcome = match_profiles(&source.profile, &h, &target.profile).map_err(|e| match e {
            Error::Dimension { expected, got } => CliError::Config(format!("profiles differ in dimension: {expected} vs {got}")),
            e => CliError::Config(e.to_string()),
        })?;
        (serde_json::to_value(&target_cfg).unwrap_or(Value::Null), outcome)
    };

    let report = json!({
        "command": "match",
        "source": cfg.source(),
        "target": target_json,
        "h": h.0,
        "product": product_json(&product),
        "result": outcome_json(&outcome),
        "normalization": if kdv_target { normalization.as_ref().map(normalization_json) } else { None },
        "paper_refs": {
            "product": "P = f·R with R = Σₖ Hₖtᴺ⁻¹⁻ᵏ − U",
            "result": "matching f₁R₁ = f₂R₂: trajectories of the first system on H₁ are trajectories of the second on H₂",
            "normalization": "P(t) = −(scale/m₀)·C(t − shift), C monic without t^{2N} term, x′ = √scale·x",
        },
    });
    let path = write_json(out, &cfg.outputs.match_report, &report)?;
    Ok(MatchReport { path, report })
}

/// `[c₂, …, c_{N+1}]` of the normalized KdV profile.
fn kdv_params(n: &KdvNormalization) -> Vec<f64> {
    n.c.coeffs()[2..n.profile.n + 2].to_vec()
}
