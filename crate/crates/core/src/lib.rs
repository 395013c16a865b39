//! Frobenius structures from reducible rational spectral curves.
//!
//! The crate builds Baker–Akhiezer functions on nodal curves whose components
//! are Riemann spheres, reads off flat coordinates and Lamé coefficients of the
//! resulting Egoroff metric, and turns them into correlator tensors that can
//! be checked against the WDVV associativity equations. Closed-form models
//! serve as independent oracles for the generic pipeline.
//!
//! Module map:
//!
//! * [`jets`]: truncated multivariate Taylor arithmetic, the differentiation engine.
//! * [`frobenius`]: constant metrics, correlator tensors, associativity and
//!   homogeneity residuals.
//! * [`spectral`]: curve data, the Baker–Akhiezer linear system and its solution.
//! * [`differentials`]: rational differentials, residues, the metric from residues.
//! * [`egoroff`]: Lamé coefficients, rotation coefficients, coordinate inversion,
//!   correlators from the metric.
//! * [`models`]: the two closed-form example families.
//! * [`extend`]: extension by a unity and a nilpotent direction.

pub mod differentials;
pub mod egoroff;
mod error;
pub mod extend;
pub mod frobenius;
pub mod jets;
pub mod models;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use differentials::{MetricFromResidues, RationalDifferential};
pub use egoroff::{CurveModel, DiagonalMetricModel, EgoroffEvaluation, FlatnessResidual, FrameJets, MetricCorrelators};
pub use extend::{ExtensionDiagnostics, ExtensionResult};
pub use frobenius::{
    ConstantMetric, CorrelatorSource, CorrelatorTensor, PrepotentialField, QuasihomogeneityData, StructureConstants,
};
pub use jets::{Jet, JetError};
pub use models::{Example1, Example1Correlators, Example2, Example2Correlators, Example2Frame, NamedModel};
pub use spectral::{
    BakerAkhiezerEvaluation, CurveComponent, IntersectionPoint, MarkedP, MarkedQ, Point, SpectralData,
    ValidationReport, Violation,
};
