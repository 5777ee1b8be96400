use thiserror::Error;

/// Position and expectation of a symbol-expression syntax error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at column {position}: expected {}", expected.join(" | "))]
pub struct ParseError {
    pub position: usize,
    pub expected: Vec<String>,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol invariant violated: {0}")]
    InvariantViolation(String),
    #[error("all coefficients cancel; the symbol is empty")]
    EmptySymbol,
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("spectral parameter {0} degenerates the characteristic polynomial")]
    DegenerateParameter(String),
    #[error("characteristic root within {tol:e} of the unit circle (|root| = {modulus})")]
    RootsOnCircle { modulus: f64, tol: f64 },
    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("point lies within {tol:e} of the symbol curve (distance {distance:e})")]
    OnCurve { distance: f64, tol: f64 },
    #[error("argument tracking still turns by >= pi/2 at {samples} samples")]
    RefinementExhausted { samples: usize },
    #[error("crossing count changed from {coarse} to {fine} under grid refinement (tangency?)")]
    SuspectBoundary { coarse: usize, fine: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dimension {n} exceeds the configured maximum {max}")]
    TooLarge { n: usize, max: usize },
    #[error("circulant dimension {n_tilde} <= band width {band}: diagonals would overlap")]
    Overlap { n_tilde: usize, band: usize },
    #[error("contour quadrature stalled at {nodes} nodes (last change {change:e})")]
    QuadratureStall { nodes: usize, change: f64 },
    #[error("spectral parameter lies on the spectrum (distance {distance:e})")]
    OnSpectrum { distance: f64 },
    #[error("derivative of the symbol vanishes at a preimage (|f'| = {derivative:e})")]
    DegenerateCriticalPoint { derivative: f64 },
    #[error("Neumann series precondition fails: ||dQ|| ||E|| = {product} >= 1/2")]
    NeumannDivergence { product: f64 },
    #[error("boundary matrix is rank deficient: rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("index condition fails: need m > N on the chosen side, got m = {m}, N = {n}")]
    WrongIndexSign { m: usize, n: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of numerical machinery rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::RefinementExhausted { .. }
                | Error::QuadratureStall { .. }
                | Error::RankDeficient { .. }
                | Error::NeumannDivergence { .. }
                | Error::SuspectBoundary { .. }
                | Error::OnSpectrum { .. }
                | Error::OnCurve { .. }
                | Error::RootsOnCircle { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
