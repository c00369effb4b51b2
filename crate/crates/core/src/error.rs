use thiserror::Error;

/// Vertices `(y, z)` and `(y2, z2)` are both at distance `h` but see different
/// values of `|Γ_i(y) ∩ Γ_j(z)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityWitness {
    pub h: usize,
    pub i: usize,
    pub j: usize,
    pub y: usize,
    pub z: usize,
    pub y2: usize,
    pub z2: usize,
    pub count: u64,
    pub count2: u64,
}

impl std::fmt::Display for RegularityWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "p[{}][{}][{}]: pair ({},{}) counts {} but pair ({},{}) counts {}",
            self.h, self.i, self.j, self.y, self.z, self.count, self.y2, self.z2, self.count2
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph is not distance-regular: {0}")]
    NotDistanceRegular(RegularityWitness),
    #[error("diameter too small: {0}")]
    DiameterTooSmall(String),
    #[error("found {found} distinct eigenvalues, expected {expected}")]
    EigCountMismatch { found: usize, expected: usize },
    #[error("first eigenmatrix is singular")]
    SingularP,
    #[error("NotQRacah: {0}")]
    NotQRacah(String),
    #[error("degenerate fit: {0}")]
    Degenerate(String),
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("two constructions disagree: {name} residual {residual:e}")]
    ToleranceExceeded { name: String, residual: f64 },
    #[error("central element gate failed: residual {residual:e} ({dominant} side dominates)")]
    AssumptionFails { residual: f64, dominant: String },
    #[error("sum of tau_i^-1 k_i vanishes numerically ({0:e})")]
    ZeroSum(f64),
    #[error("matrix entry ({row},{col}) is numerically zero")]
    EntryZero { row: usize, col: usize },
    #[error("count {name} not constant: {witnesses}")]
    ConstancyViolation { name: String, witnesses: String },
}

impl Error {
    /// Short machine-readable tag used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "ParseError",
            Error::Io(_) => "IoError",
            Error::NotConnected => "NotConnected",
            Error::NotDistanceRegular(_) => "NotDistanceRegular",
            Error::DiameterTooSmall(_) => "DiameterTooSmall",
            Error::EigCountMismatch { .. } => "EigCountMismatch",
            Error::SingularP => "SingularP",
            Error::NotQRacah(_) => "NotQRacah",
            Error::Degenerate(_) => "Degenerate",
            Error::Inadmissible(_) => "Inadmissible",
            Error::ToleranceExceeded { .. } => "ToleranceExceeded",
            Error::AssumptionFails { .. } => "AssumptionFails",
            Error::ZeroSum(_) => "ZeroSum",
            Error::EntryZero { .. } => "EntryZero",
            Error::ConstancyViolation { .. } => "ConstancyViolation",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
