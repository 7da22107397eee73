use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // numerics
    #[error("adaptive step fell below {floor:e} at path parameter {at}")]
    StepUnderflow { at: f64, floor: f64 },
    #[error("right-hand side is not finite at path parameter {at}")]
    NonFiniteRhs { at: f64 },
    #[error("quadrature did not converge (estimate {estimate:e}, requested {tol:e})")]
    NonConvergent { estimate: f64, tol: f64 },
    #[error("path comes within {value:e} of the discriminant (clearance {clearance:e})")]
    ClearanceViolated { value: f64, clearance: f64 },
    #[error("invalid path: {0}")]
    InvalidPath(String),

    // periods
    #[error("|discriminant| = {value:e} is below the floor {floor:e}")]
    NearDiscriminant { value: f64, floor: f64 },
    #[error("scaling parameter lambda must be non-zero")]
    ZeroLambda,
    #[error("t0 must be non-zero")]
    ZeroT0,
    #[error("continued basis is not an integral change of the quadrature basis (deviation {deviation:e})")]
    ContinuationMismatch { deviation: f64 },

    // gauss-manin
    #[error("monodromy matrix is not integral (deviation {deviation:e})")]
    NonIntegralMonodromy { deviation: f64 },

    // modular forms
    #[error("tau = {re} + {im}i is not in the upper half-plane")]
    NotInUpperHalfPlane { re: f64, im: f64 },
    #[error("j denominator {value:e} is too close to zero")]
    NearCusp { value: f64 },
    #[error("lattice sum did not reach tolerance (estimate {estimate:e}, requested {tol:e})")]
    LatticeSumTolerance { estimate: f64, tol: f64 },
    #[error("q-series division by a series with vanishing leading coefficient")]
    SeriesDivision,

    // hodge structures
    #[error("invalid Hodge type: {0}")]
    InvalidHodgeType(String),
    #[error("degenerate filtration: {0}")]
    DegenerateFiltration(String),
    #[error("tau must have non-zero imaginary part")]
    RealTau,
    #[error("matrix does not preserve the polarization")]
    NotInGroup,
    #[error("projected lattice has real rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("no built-in base point for this Hodge type: {0}")]
    UnsupportedType(String),

    // groups
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("functional is not invariant under the declared stabilizer (deviation {deviation:e})")]
    StabilizerMismatch { deviation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Numerical failures, as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. }
                | Error::NonFiniteRhs { .. }
                | Error::NonConvergent { .. }
                | Error::ClearanceViolated { .. }
                | Error::NearDiscriminant { .. }
                | Error::ContinuationMismatch { .. }
                | Error::NonIntegralMonodromy { .. }
                | Error::NearCusp { .. }
                | Error::LatticeSumTolerance { .. }
                | Error::DegenerateFiltration(_)
                | Error::RankDeficient { .. }
                | Error::StabilizerMismatch { .. }
        )
    }
}
