//! Centralized numerical tolerances and budgets.

use serde::{Deserialize, Serialize};

/// Tolerances shared by every module. Construct with [`Tolerances::default`]
/// and override individual fields as needed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Set membership (grids, parents, simplex sums of grid points).
    pub membership: f64,
    /// Phase-1 feasibility threshold of the in-crate LP.
    pub lp_feasibility: f64,
    /// Vertex deduplication.
    pub dedup: f64,
    /// Lipschitz modulus `L` used as slack by the semicontinuity validators.
    pub lipschitz: f64,
    /// Maximal number of points any grid may hold.
    pub grid_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            membership: 1e-9,
            lp_feasibility: 1e-9,
            dedup: 1e-12,
            lipschitz: 10.0,
            grid_cap: 2_000_000,
        }
    }
}

/// Default seed used by every sampling validator.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Default solver tolerance for acceptance-level verdicts.
pub const ACCEPT_TOL: f64 = 1e-6;

/// Default tolerance for certificates.
pub const CERT_TOL: f64 = 1e-9;
