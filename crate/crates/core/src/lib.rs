//! Densely defined set-valued equilibrium problems, made executable.
//!
//! The crate represents equilibrium problems `find x₀ ∈ K with F(x₀, y) ⊵ 0
//! for all y ∈ K`, where `F` is closed-interval valued and the structural
//! hypotheses are only required on a subset `D ⊆ K`. It provides:
//!
//! - convex geometry over V-polytopes, simplices and balls ([`geometry`]);
//! - descriptors and sampling validators for dense and self segment-dense
//!   subsets ([`dense_sets`]);
//! - extended intervals, bifunctions and hypothesis validators
//!   ([`interval`], [`bifunction`], [`validators`]);
//! - KKM maps and finite-intersection certificates ([`kkm`]);
//! - certified grid-search solvers on compact and coercive domains
//!   ([`solver`], [`coercive`]);
//! - the exchange-economy and n-person game applications ([`economy`],
//!   [`games`]).
//!
//! Everything here verifies at a finite scale. A pass is evidence; a failure
//! comes with a witness that replays under the same seed.

pub mod bifunction;
pub mod coercive;
pub mod config;
pub mod dense_sets;
pub mod economy;
pub mod error;
pub mod games;
pub mod geometry;
pub mod interval;
pub mod kkm;
pub mod solver;
pub mod validators;

pub use config::Tolerances;
pub use error::{Error, Result};

/// Seeded generator used by every sampler. ChaCha keeps streams identical
/// across platforms.
pub type Rng = rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
