//! Exact-arithmetic engine for rank invariants of generalized persistence
//! modules on grid posets, and the erosion distances between them, together
//! with the oracle distances (interleaving/bottleneck, L-infinity, brute-force
//! natural pseudo-distance) used to cross-validate them.
//!
//! Everything is computed over exact rationals and arbitrary-precision
//! integers; there is no floating point in any computational path.

pub mod category;
pub mod erosion;
pub mod format;
pub mod homology;

pub mod error;


pub mod matrix;
pub mod module;
pub mod onedim;
pub mod oracles;



mod par;
pub mod poset;
pub mod rational;

pub use error::{Error, Result};
