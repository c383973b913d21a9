use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("eigenvalue iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("nodes {0} and {1} are closer than the separation tolerance")]
    DegenerateRoots(usize, usize),
    #[error("evaluation point is a pole: {0}")]
    Pole(String),
    #[error("divergent tail integral: Re(rate + r) = {0} <= 0")]
    DivergentTail(f64),
    #[error("initial vector is not a probability vector: {0}")]
    NonStochasticAlpha(String),
    #[error("matrix is not a sub-intensity matrix: {0}")]
    NotSubIntensity(String),
    #[error("sub-intensity matrix is singular or has an eigenvalue with Re >= 0")]
    SingularB,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid claim distribution: {0}")]
    InvalidClaim(String),
    #[error("positive safety loading violated: loading = {loading}")]
    NonpositiveLoading { loading: f64 },
    #[error("diffusion volatility must be positive")]
    ZeroVolatility,
    #[error("root count mismatch: expected {expected_rho} roots with Re > 0 and {expected_r} with Re < 0, found {found_rho} and {found_r}")]
    RootCountMismatch { expected_rho: usize, expected_r: usize, found_rho: usize, found_r: usize },
    #[error("root {0} lies on the imaginary axis and cannot be classified")]
    ImaginaryAxisRoot(String),
    #[error("the top-order divided difference of the adjugate is singular")]
    SingularDividedDifference,
    #[error("transform paths disagree: relative discrepancy {0:e}")]
    ConsistencyFailure(f64),
    #[error("model is not in the special form: {0}")]
    ModelNotInSpecialForm(String),
}

pub type Result<T> = std::result::Result<T, Error>;
