use num_complex::Complex64;
use thiserror::Error;

use crate::jets::JetError;
use crate::spectral::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("evaluation failed at {point:?}: {source}")]
    Evaluation { point: Vec<f64>, source: JetError },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("metric is not symmetric")]
    AsymmetricMetric,
    #[error("metric is not invertible")]
    SingularMetric,
    #[error("point {point:?} is outside the domain: {reason}")]
    Domain { point: Vec<f64>, reason: String },

    #[error("invalid spectral data: {0}")]
    InvalidSpectralData(String),
    #[error("pole of the ansatz at z = {z} collides with an evaluation point on component {component}")]
    PoleCollision { component: usize, z: Complex64 },
    #[error("Baker-Akhiezer system is singular at u = {u:?} (condition number {condition:e})")]
    SingularSystem { u: Vec<f64>, condition: f64 },
    #[error("translation covariance needs equal node coordinates, P_i at infinity with unit weight and one normalization point: {0}")]
    NotTranslationCovariant(String),

    #[error("{at} is not a pole of the differential on component {component}")]
    NotAPole { component: usize, at: Point },
    #[error("pole of order {order} at {at} on component {component}; only simple poles are supported")]
    HigherOrderPole { component: usize, at: Point, order: i64 },
    #[error("differential on component {component} does not have a simple zero at {at} (order {order})")]
    NotASimpleZero { component: usize, at: Point, order: i64 },
    #[error("pole at {at} on component {component} is not at a node, Q-point or R-point")]
    UnexpectedPole { component: usize, at: Point },
    #[error("divisor on component {component} has degree {degree}, a differential on the sphere needs -2")]
    DivisorDegree { component: usize, degree: i64 },
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("residues at Q are not all equal, no Euclidean normalization exists: {residues:?}")]
    NonEuclidean { residues: Vec<Complex64> },

    #[error("Lamé coefficient H_{index} vanishes")]
    VanishingLame { index: usize },
    #[error("Jacobian dx/du is singular at u = {u:?} (condition number {condition:e})")]
    SingularJacobian { u: Vec<f64>, condition: f64 },
    #[error("Newton inversion did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("exponents violate d_a + d_b = const on the metric support: pair {first:?} gives {first_sum}, pair {second:?} gives {second_sum}")]
    ExponentMismatch { first: (usize, usize), first_sum: f64, second: (usize, usize), second_sum: f64 },
}
