use thiserror::Error;

/// Errors surfaced by library operations. Violations of internal invariants
/// (stored zero coefficients, unreduced fractions) are panics, not errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("level must be a positive integer, got {0}")]
    InvalidLevel(i64),

    #[error("perturbation has support outside the level-{j} window: term u^{u} z^{z}")]
    OutsideWindow { j: i32, u: i32, z: i32 },

    #[error("levels differ: {0} vs {1}")]
    LevelMismatch(i32, i32),

    #[error("gauge entry `{entry}` is not holomorphic in the (z, u) chart: term u^{u} z^{z}")]
    GaugeNotHolomorphic { entry: char, u: i32, z: i32 },

    #[error("truncation window ({u_max}, {z_max}) is below the level-{j} minimum ({u_min}, {z_min})")]
    WindowTooSmall {
        j: i32,
        u_max: i32,
        z_max: i32,
        u_min: i32,
        z_min: i32,
    },

    #[error("witness transport needs u^2 to divide the lower-left gauge entry")]
    TransportPrecondition,

    #[error("no orbit sample found for seed {seed} after {attempts} attempts")]
    OrbitSampleExhausted { seed: u64, attempts: u32 },

    #[error("orbit unit `{entry}` must be z-holomorphic, V-holomorphic, and nonzero at the origin")]
    InvalidUnit { entry: char },

    #[error("cannot parse rational from {0:?}")]
    BadRational(String),

    #[error("term u^{u} z^{z} has negative u exponent")]
    NegativeUExponent { u: i32, z: i32 },

    #[error("pair input needs an even number of form records, got {0}")]
    OddPairInput(usize),

    #[error("record {index}: not an embedded image (needs level 2 or higher and no u^1 or u^2 terms)")]
    NotInImage { index: usize },

    #[error("campaign config: {0}")]
    BadCampaignConfig(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
