//! Exact, small-block-length laboratory for binary code smoothing and the
//! worst-case-decoding to LPN reduction.
//!
//! Everything here works with dense distributions over `F_2^n`, so `n` is
//! kept small (at most [`spectral::HARD_MAX_N`]). Vectors over `F_2^n` are
//! encoded as integers with coordinate `i` stored in bit `i`.

pub mod error;
pub mod gf2;
pub mod lpn;
pub mod reduction;
pub mod rng;
pub mod smoothing;
pub mod spectral;

pub use error::{Error, Result};
pub use gf2::{GF2Matrix, GF2Vector, LinearCode};
pub use lpn::{LpnInstance, SolverStats};
pub use reduction::{ReductionReport, WdpInstance};
pub use smoothing::{BoundCertificate, SmoothingReport, Verdict};
pub use spectral::{KrawtchoukBoundParams, Pmf, Spectrum};

/// Absolute slack used by every numerical verifier.
pub const TOLERANCE: f64 = 1e-12;
