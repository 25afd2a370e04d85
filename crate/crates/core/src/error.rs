use thiserror::Error;

/// Every failure the library can report.
///
/// Verification-style operations (`nmf_verify`, `exactness_window`) return
/// reports instead of errors; everything else surfaces one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("inhomogeneous input: {0}")]
    InhomogeneousInput(String),
    #[error("operands belong to different algebras")]
    MixedAlgebras,
    #[error("unknown generator x{0}")]
    UnknownGenerator(usize),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("bad alpha matrix: {0}")]
    BadAlpha(String),
    #[error("map does not preserve the defining relations")]
    RelationNotPreserved,
    #[error("matrix is not invertible")]
    Singular,
    #[error("element is not normal: {0}")]
    NotNormal(String),
    #[error("element is not regular in degree window {window}")]
    NotRegularInWindow { window: usize },
    #[error("shift mismatch: {0}")]
    ShiftMismatch(String),
    #[error("entry ({row},{col}) has degree {found}, expected {expected}")]
    EntryDegree {
        row: usize,
        col: usize,
        expected: i64,
        found: usize,
    },
    #[error("no solution")]
    NoSolution,
    #[error("degree window {window} too small: {reason}")]
    WindowTooSmall { window: usize, reason: String },
    #[error("product of the pair is not f times the identity")]
    ProductNotF,
    #[error("first map is not injective in degree {degree} (window {window})")]
    NotInjectiveInWindow { degree: i64, window: usize },
    #[error("product is not a nonzero scalar multiple of f at index {0}")]
    NotScalarMultiple(usize),
    #[error("factorizations live over different algebras or elements")]
    MixedContexts,
    #[error("morphism square does not commute at index {0}")]
    SquareDoesNotCommute(i64),
    #[error("presentation is not square: {rows} generators, {cols} relations")]
    NotSquare { rows: usize, cols: usize },
    #[error("f times generator {0} is not in the image of the presentation")]
    FNotInImage(usize),
    #[error("automorphism does not map f to a scalar multiple of f")]
    NotEigenvector,
    #[error("no {degree}-th root of {value} in the field")]
    NoRootInField { value: String, degree: usize },
    #[error("automorphism does not fix f")]
    NotFixed,
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("point is not a co-point here: {0}")]
    NotCopointHere(String),
    #[error("orbit step {step} lies on the hyperplane where the last coordinate vanishes")]
    PointOnXn { step: usize },
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the failure is due to malformed or inconsistent input rather
    /// than a mathematical check.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::DivisionByZero
                | Error::MixedFields
                | Error::InvalidField(_)
                | Error::InhomogeneousInput(_)
                | Error::MixedAlgebras
                | Error::UnknownGenerator(_)
                | Error::InvalidPresentation(_)
                | Error::BadAlpha(_)
                | Error::ShiftMismatch(_)
                | Error::EntryDegree { .. }
                | Error::NotSquare { .. }
                | Error::MixedContexts
                | Error::Syntax { .. }
                | Error::Input(_)
        )
    }
}
