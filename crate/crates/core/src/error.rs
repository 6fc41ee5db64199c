use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge vectors are linearly dependent: {0}")]
    DependentVectors(String),
    #[error("functional is not integral on the edge-vector lattice: {0}")]
    NotIntegralDual(String),
    #[error("fan is not simplicial: {0}")]
    NotSimplicial(String),
    #[error("multi-fan is not complete: {0}")]
    NotComplete(String),
    #[error("bad weights: {0}")]
    BadWeights(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("push-forward is not polynomial: {0}")]
    NonPolynomialResult(String),
    #[error("incompatible restriction tuple: {0}")]
    IncompatibleTuple(String),
    #[error("tuple is not in the image of the restriction map: {0}")]
    NotInImage(String),
    #[error("vector is not in the relative interior of the cone: {0}")]
    NotInteriorVector(String),
    #[error("parameters match no supported expansion regime: {0}")]
    UnsupportedRegime(String),
    #[error("zeta-power denominator is identically 1 - 1: {0}")]
    ZetaUnit(String),
    #[error("evaluation point too close to a pole: {0}")]
    PoleProximity(String),
    #[error("vector lies outside the support of the fan: {0}")]
    VectorOutsideSupport(String),
    #[error("character window too small: {0}")]
    WindowTooSmall(String),
    #[error("divisor is not Q-Cartier: {0}")]
    NotQCartier(String),
    #[error("fractional q-exponent survived summation: {0}")]
    Integrality(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
