//! Exact Weil-Petersson volumes of moduli spaces of bordered Riemann
//! surfaces, computed through the Laplace-domain residue recursion for the
//! correlators `W^g_n`.
//!
//! Coefficients live in `Q[pi^2]` ([`PiScalar`]). Correlators and volumes
//! are symmetric polynomials stored one coefficient per exponent multiset
//! ([`SymPoly`]).

pub mod curve;
pub mod engine;
pub mod error;
pub mod known;
pub mod memo;
pub mod poly;
pub mod render;
pub mod scalar;
pub mod transforms;

pub use curve::{kernel_series, kontsevich_wp_times, KernelSeries, SpectralCurve};
pub use engine::{BracketExpansion, Engine, EngineConfig, SplitCorrelator};
pub use error::{Error, Result};
pub use poly::{Convention, CorrelatorPoly, ExponentKey, ShapedPoly, SymPoly, VolumePoly};
pub use scalar::{PiScalar, Rational};
