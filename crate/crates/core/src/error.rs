use thiserror::Error;

/// Errors raised by the geometry toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),

    #[error("point {point:?} lies outside the domain of {what}")]
    OutsideDomain { what: String, point: Vec<f64> },

    #[error("finite-difference step {step} violates the domain margin of {what}")]
    StepTooLarge { what: String, step: f64 },

    #[error("metric is degenerate at {point:?} (|det| = {det:e})")]
    DegenerateMetric { point: Vec<f64>, det: f64 },

    #[error("tangent plane is degenerate (normalized Gram determinant {gram:e})")]
    DegeneratePlane { gram: f64 },

    #[error("projection undefined on the equator: |xi4| = {xi4:e}")]
    EquatorialSingularity { xi4: f64 },

    #[error("point on or beyond the projective cone: 1 + sigma^2/R^2 = {value:e}")]
    ProjectiveCone { value: f64 },

    #[error("jacobian is rank deficient (smallest singular value {min_singular:e})")]
    RankDeficientJacobian { min_singular: f64 },

    #[error("ambient field is not tangent to the quadric (reconstruction residual {residual:e})")]
    NonTangentField { residual: f64 },

    #[error("generator indices must differ, got ({0}, {0})")]
    IdenticalIndices(usize),

    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("table row {0} out of range 1..=10")]
    RowOutOfRange(usize),

    #[error("radius {r} outside the warp range [0, {r_max})")]
    WarpRange { r: f64, r_max: f64 },

    #[error("closed form has a pole at r = {0}")]
    Pole(f64),

    #[error("integration step underflow at tau = {tau} (dt = {dt:e})")]
    StepUnderflow { tau: f64, dt: f64 },

    #[error("unknown chart `{0}`")]
    UnknownChart(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;

impl From<std::io::Error> for GeomError {
    fn from(e: std::io::Error) -> Self {
        GeomError::Io(e.to_string())
    }
}
