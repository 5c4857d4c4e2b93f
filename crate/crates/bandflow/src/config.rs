//! JSON run configuration and its resolution into library objects.

use std::fs;
use std::path::Path;

use bandflow_core::benenti::{integrals_at, IntegralValues, SeparableProfile};
use bandflow_core::defaults::{DX, EDGE_TOL, GROWTH_WINDOW, LAMBDA_POINTS};
use bandflow_core::separation::{velocity_field, SeparationState};
use bandflow_core::systems::{
    equiv_metric_profile, kdv_profile, neumann_profile, random_neumann_state, separation_state_from_cartesian,
    CartesianState, NeumannSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Neumann,
    EllipsoidEquiv,
    Kdv,
}

/// A profile: `a` for the Neumann and equivalent-metric systems, `c` and
/// `m0` for stationary KdV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub system: SystemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0: Option<f64>,
}

/// Exactly one of: `q` with `p`; `q` with `sigma` and `h`; `x` with `v`;
/// `h` alone (integral levels, no point).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub edge_tol: f64,
    pub growth_window: f64,
    pub drift: f64,
    pub legendre: f64,
    pub interlacing: f64,
    pub base1: f64,
    pub hill: f64,
    pub wronskian: f64,
    pub product: f64,
    pub growth_rel: f64,
    pub oracle: f64,
    pub poisson: f64,
    pub stationarity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            edge_tol: EDGE_TOL,
            growth_window: GROWTH_WINDOW,
            drift: 1e-8,
            legendre: 1e-6,
            interlacing: 1e-8,
            base1: 1e-5,
            hill: 1e-6,
            wronskian: 1e-8,
            product: 1e-9,
            growth_rel: 0.05,
            oracle: 1e-6,
            poisson: 1e-5,
            stationarity: 1e-4,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 13] {
        [
            ("edge_tol", self.edge_tol),
            ("growth_window", self.growth_window),
            ("drift", self.drift),
            ("legendre", self.legendre),
            ("interlacing", self.interlacing),
            ("base1", self.base1),
            ("hill", self.hill),
            ("wronskian", self.wronskian),
            ("product", self.product),
            ("growth_rel", self.growth_rel),
            ("oracle", self.oracle),
            ("poisson", self.poisson),
            ("stationarity", self.stationarity),
        ]
    }
}

/// λ-grid; missing ends default to `[r₁ − 1, r_max + 2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LambdaGrid {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    pub points: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self { min: None, max: None, points: LAMBDA_POINTS }
    }
}

impl LambdaGrid {
    pub fn resolve(&self, roots: &[f64]) -> Vec<f64> {
        let lo = self.min.unwrap_or(roots[0] - 1.0);
        let hi = self.max.unwrap_or(roots[roots.len() - 1] + 2.0);
        let m = self.points;
        (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect()
    }
}

/// File names written under `--out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    pub trajectory: String,
    pub metadata: String,
    pub band_report: String,
    pub verify: String,
    pub match_report: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            trajectory: "trajectory.csv".into(),
            metadata: "run.json".into(),
            band_report: "band_report.json".into(),
            verify: "verify.json".into(),
            match_report: "match.json".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0: Option<f64>,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default = "default_span")]
    pub x_span: (f64, f64),
    #[serde(default = "default_dx")]
    pub dx: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub lambda_grid: LambdaGrid,
    #[serde(default)]
    pub outputs: Outputs,
    /// Draws a random admissible Neumann point when no initial data is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Second profile for `match`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<ProfileConfig>,
    /// Negative control for `verify`: offset added to `H₀` when building `C`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb_h: Option<f64>,
}

fn default_span() -> (f64, f64) {
    (0.0, 20.0)
}

fn default_dx() -> f64 {
    DX
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Profile and, for the Neumann system, its parameters.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub profile: SeparableProfile,
    pub neumann: Option<NeumannSpec>,
}

#[derive(Debug, Clone)]
pub enum Initial {
    Point(SeparationState),
    Levels(IntegralValues),
}

impl Initial {
    pub fn levels(&self) -> &IntegralValues {
        match self {
            Initial::Point(s) => &s.h,
            Initial::Levels(h) => h,
        }
    }
}

impl ProfileConfig {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        match self.system {
            SystemKind::Neumann | SystemKind::EllipsoidEquiv => {
                if self.c.is_some() || self.m0.is_some() {
                    return Err(config_err("`c` and `m0` apply only to the kdv system"));
                }
                let a = self.a.clone().ok_or_else(|| config_err("missing `a`"))?;
                let spec = NeumannSpec::new(a).map_err(|e| config_err(format!("a: {e}")))?;
                let profile = match self.system {
                    SystemKind::Neumann => neumann_profile(&spec),
                    _ => equiv_metric_profile(&spec),
                };
                let neumann = (self.system == SystemKind::Neumann).then_some(spec);
                Ok(Resolved { profile, neumann })
            }
            SystemKind::Kdv => {
                if self.a.is_some() {
                    return Err(config_err("`a` does not apply to the kdv system"));
                }
                let c = self.c.clone().ok_or_else(|| config_err("missing `c`"))?;
                let m0 = self.m0.unwrap_or(1.0);
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(config_err("`c` must be finite"));
                }
                let profile = kdv_profile(&c, m0, c.len()).map_err(|e| config_err(format!("kdv profile: {e}")))?;
                Ok(Resolved { profile, neumann: None })
            }
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn source(&self) -> ProfileConfig {
        ProfileConfig { system: self.system, a: self.a.clone(), c: self.c.clone(), m0: self.m0 }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let (x0, x1) = self.x_span;
        if !(x0.is_finite() && x1.is_finite() && x1 > x0) {
            return Err(config_err("x_span must be finite and increasing"));
        }
        if !(self.dx.is_finite() && self.dx > 0.0 && self.dx < x1 - x0) {
            return Err(config_err("dx must be positive and smaller than the span"));
        }
        for (name, v) in self.tolerances.entries() {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_err(format!("tolerance `{name}` must be positive")));
            }
        }
        let g = &self.lambda_grid;
        if g.points < 2 {
            return Err(config_err("lambda_grid needs at least two points"));
        }
        if let (Some(lo), Some(hi)) = (g.min, g.max) {
            if !(lo < hi) {
                return Err(config_err("lambda_grid.min must be below lambda_grid.max"));
            }
        }
        if self.perturb_h.is_some_and(|d| !d.is_finite()) {
            return Err(config_err("perturb_h must be finite"));
        }
        let i = &self.initial;
        let separated = i.q.is_some() || i.p.is_some() || i.sigma.is_some();
        let cartesian = i.x.is_some() || i.v.is_some();
        if separated && cartesian {
            return Err(config_err("give either separated (q) or Cartesian (x, v) initial data, not both"));
        }
        if cartesian && i.h.is_some() {
            return Err(config_err("`h` is implied by Cartesian initial data"));
        }
        if i.p.is_some() && (i.sigma.is_some() || i.h.is_some()) {
            return Err(config_err("give `q` with either `p` or `sigma` and `h`"));
        }
        self.source().resolve()?;
        Ok(())
    }

    pub fn initial(&self, r: &Resolved) -> Result<Initial, CliError> {
        let i = &self.initial;
        let n = r.profile.n;
        let check = |name: &str, v: &[f64], len: usize| -> Result<(), CliError> {
            if v.len() != len {
                return Err(config_err(format!("`{name}` has {} entries, expected {len}", v.len())));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(config_err(format!("`{name}` must be finite")));
            }
            Ok(())
        };
        let state = if let Some(q) = &i.q {
            check("q", q, n)?;
            if let Some(p) = &i.p {
                check("p", p, n)?;
                let h = integrals_at(&r.profile, q, p).map_err(|e| config_err(format!("initial point: {e}")))?;
                let mut sigma = Vec::with_capacity(n);
                for (&qi, &pi) in q.iter().zip(p) {
                    let f = r.profile.f.eval(qi).map_err(|e| config_err(format!("initial point: {e}")))?;
                    sigma.push(if f * pi < 0.0 { -1.0 } else { 1.0 });
                }
                SeparationState { q: q.clone(), sigma, h }
            } else {
                let (Some(sigma), Some(h)) = (&i.sigma, &i.h) else {
                    return Err(config_err("`q` needs either `p` or both `sigma` and `h`"));
                };
                check("sigma", sigma, n)?;
                check("h", h, n)?;
                if sigma.iter().any(|s| s.abs() != 1.0) {
                    return Err(config_err("`sigma` entries must be ±1"));
                }
                SeparationState { q: q.clone(), sigma: sigma.clone(), h: IntegralValues(h.clone()) }
            }
        } else if i.x.is_some() || i.v.is_some() {
            let spec = r.neumann.as_ref().ok_or_else(|| config_err("Cartesian initial data needs the neumann system"))?;
            let (Some(x), Some(v)) = (&i.x, &i.v) else {
                return Err(config_err("Cartesian initial data needs both `x` and `v`"));
            };
            check("x", x, n + 1)?;
            check("v", v, n + 1)?;
            let c = CartesianState::new(x.clone(), v.clone()).map_err(|e| config_err(format!("x, v: {e}")))?;
            separation_state_from_cartesian(spec, &c).map_err(|e| config_err(format!("x, v: {e}")))?
        } else if i.sigma.is_some() {
            return Err(config_err("`sigma` needs `q`"));
        } else if let Some(h) = &i.h {
            check("h", h, n)?;
            return Ok(Initial::Levels(IntegralValues(h.clone())));
        } else if let (Some(seed), Some(spec)) = (self.seed, &r.neumann) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_neumann_state(spec, &mut || rng.gen::<f64>()).map_err(|e| config_err(format!("random state: {e}")))?
        } else {
            return Err(config_err("no initial data (and no `seed` for a random Neumann point)"));
        };
        velocity_field(&r.profile, &state).map_err(|e| config_err(format!("initial point is not admissible: {e}")))?;
        Ok(Initial::Point(state))
    }

    /// The initial point, rejecting level-only data.
    pub fn point(&self, r: &Resolved, command: &str) -> Result<SeparationState, CliError> {
        match self.initial(r)? {
            Initial::Point(s) => Ok(s),
            Initial::Levels(_) => Err(config_err(format!("`{command}` needs an initial point, not only `h`"))),
        }
    }
}
