use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "unstable shape (g={g}, n={n}): need 2g-2+n > 0; W^0_1 = 0 and W^0_2 = 1/(z1-z2)^2 are base cases, not computed"
    )]
    Unstable { g: u32, n: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("curve not odd: time t_{0} is not an odd index >= 3")]
    CurveNotOdd(u32),

    #[error("degenerate branch point: y_1 = 0")]
    DegenerateBranchPoint,

    #[error("kernel too short: need s_0..s_{needed}, curve supports s_0..s_{available}")]
    KernelTooShort { needed: usize, available: usize },

    #[error("genus {0} has no closed volume (need g >= 2)")]
    GenusTooSmall(u32),

    #[error("expected {expected} lengths, got {got}")]
    LengthCount { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cache file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
