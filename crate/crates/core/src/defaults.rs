//! Every tolerance, grid and window used by the library and the CLI.
//!
//! | name | value | used by |
//! |---|---|---|
//! | `ROOT_CLUSTER_TOL` | 1e−7 | multiplicity clustering in `real_roots` |
//! | `SEPARATION_RTOL` / `SEPARATION_ATOL` | 1e−10 / 1e−12 | separated-ODE integrator |
//! | `CARTESIAN_RTOL` / `CARTESIAN_ATOL` | 1e−12 / 1e−14 | Cartesian Neumann oracle |
//! | `CONSTRAINT_TOL` | 1e−8 | Cartesian step rejection on constraint drift |
//! | `COLLISION_TOL` | 1e−9 | halt when two coordinates meet |
//! | `DX` | 0.01 | uniform sample spacing |
//! | `POISSON_STEP` | 1e−4 | central differences for Poisson brackets |
//! | `HILL_RTOL` / `HILL_ATOL` | 1e−11 / 1e−13 | monodromy and growth integration |
//! | `GROWTH_WINDOW` | 200 | growth-exponent window length |
//! | `GROWTH_BAND_THRESHOLD` | 1e−3 | exponent below which λ counts as in a band |
//! | `GROWTH_GAP_THRESHOLD` | 5e−3 | exponent above which λ counts as in a gap |
//! | `EDGE_TOL` | 1e−3 | λ this close to a root of C is indeterminate |
//! | `LAMBDA_POINTS` | 200 | default λ-grid size |
//! | `NEUMANN_KAPPA` | 1.0 | potential scale of the Cartesian oracle |

pub const ROOT_CLUSTER_TOL: f64 = 1e-7;
pub const SEPARATION_RTOL: f64 = 1e-10;
pub const SEPARATION_ATOL: f64 = 1e-12;
pub const CARTESIAN_RTOL: f64 = 1e-12;
pub const CARTESIAN_ATOL: f64 = 1e-14;
pub const CONSTRAINT_TOL: f64 = 1e-8;
pub const COLLISION_TOL: f64 = 1e-9;
pub const DX: f64 = 0.01;
pub const POISSON_STEP: f64 = 1e-4;
pub const HILL_RTOL: f64 = 1e-11;
pub const HILL_ATOL: f64 = 1e-13;
pub const GROWTH_WINDOW: f64 = 200.0;
pub const GROWTH_BAND_THRESHOLD: f64 = 1e-3;
pub const GROWTH_GAP_THRESHOLD: f64 = 5e-3;
pub const EDGE_TOL: f64 = 1e-3;
pub const LAMBDA_POINTS: usize = 200;

/// Scale κ of the Cartesian potential `κ·X·AX` that reproduces the
/// separated Neumann dynamics; fixed by `systems::calibrate_kappa`.
pub const NEUMANN_KAPPA: f64 = 1.0;
