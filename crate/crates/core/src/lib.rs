//! Tunneling through a locally periodic rectangular potential in
//! space-fractional quantum mechanics (Lévy index `1 < α ≤ 2`).
//!
//! The pipeline is `params` → `barrier` (one unit cell) → `lattice` (`N`
//! cells via Chebyshev polynomials), with `asymptotics` holding the opaque
//! limits and `oracle` the independent finite-difference and standard-QM
//! references used to check everything else.
//!
//! ```
//! use tunnel_core::{lattice, ModelParams};
//!
//! let p = ModelParams::new(2.0, 5.0, 3.0, 20.0, 0.2, 3);
//! let (_, lat) = lattice::evaluate(&p).unwrap();
//! assert!((lat.gamma_n - 1.0 / 6f64.sqrt()).abs() < 1e-6);
//! ```

pub mod asymptotics;
pub mod barrier;
mod error;
pub mod ext;
pub mod lattice;
pub mod oracle;
pub mod params;

pub use error::{Result, TunnelError};
pub use ext::ExtFloat;
pub use params::{FreePassage, ModelParams};
