use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not antisymmetric (max |m + m^T| entry = {deviation:.3e})")]
    NotAntisymmetric { deviation: f64 },

    #[error("matrix is not symmetric (max |m - m^T| entry = {deviation:.3e})")]
    NotSymmetric { deviation: f64 },

    #[error("rotation axis is not unit length (|u| = {norm:.12})")]
    NonUnitAxis { norm: f64 },

    #[error("rotation is too close to a half-turn (trace = {trace:.9}); Rodriguez vector undefined")]
    NearPiRotation { trace: f64 },

    #[error("matrix is degenerate (det = {det:.3e}); no rotation projection exists")]
    DegenerateMatrix { det: f64 },

    #[error("pitch {pitch:.6} rad is within the gimbal-lock band around ±π/2")]
    GimbalLock { pitch: f64 },

    #[error("matrix is not a rotation (orthonormality defect {deviation:.3e})")]
    NotRotation { deviation: f64 },

    #[error("measurement vector {index} is degenerate (norm = {norm:.3e})")]
    DegenerateVector { index: usize, norm: f64 },

    #[error("vector pair is collinear (|cos angle| = {cos_angle:.9})")]
    CollinearPair { cos_angle: f64 },

    #[error("inertial matrix is rank deficient (min eigenvalue = {min_eigenvalue:.3e})")]
    RankDeficient { min_eigenvalue: f64 },

    #[error("matrix is numerically singular (det = {det:.3e})")]
    SingularMatrix { det: f64 },

    #[error("attitude error is on the unstable set (1 + upsilon = {one_plus_upsilon:.3e}); correction undefined")]
    NearUnstableSet { one_plus_upsilon: f64 },

    #[error("Rodriguez error vector unavailable: attitude error is too close to a half-turn")]
    RhoUnavailable,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("scenario file error at line {line}: {message}")]
    ScenarioFile { line: usize, message: String },

    #[error("run aborted at step {step}: {source}")]
    RunAborted {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
