//! Diagonal metrics `sum H_i^2 (du^i)^2` in curvilinear coordinates `u`,
//! their rotation coefficients, the flatness identity, inversion `x -> u`
//! and correlators
//!
//! ```text
//! c_abc = sum_i H_i^2 (du^i/dx^a) (du^i/dx^b) (du^i/dx^c)
//! ```

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::differentials::{metric_from_residues, regular_differential, MetricFromResidues};
use crate::frobenius::{ConstantMetric, CorrelatorSource, CorrelatorTensor};
use crate::jets::Jet;
use crate::spectral::{solve_ba, SpectralData};
use crate::{Error, Result};

const SINGULAR_JACOBIAN: f64 = 1e12;
const MAX_NEWTON_STEPS: usize = 50;
const NEWTON_TOLERANCE: f64 = 1e-12;

/// Flat coordinates and Lamé coefficients as jets in `u`.
#[derive(Debug, Clone)]
pub struct FrameJets {
    pub x: Vec<Jet>,
    pub lame: Vec<Jet>,
}

pub trait DiagonalMetricModel: Send + Sync {
    fn dim(&self) -> usize;
    /// Constant metric in the flat coordinates.
    fn metric(&self) -> &ConstantMetric;
    /// `x(u)` and `H(u)` to the requested jet order.
    fn frame(&self, u: &[f64], order: usize) -> Result<FrameJets>;
    /// Whether outputs must be real for real `u`.
    fn is_real(&self) -> bool;
}

/// The diagonal metric built from spectral data through the Baker–Akhiezer
/// function and the residue metric; `H_i = eps_i h_i`.
#[derive(Debug, Clone)]
pub struct CurveModel {
    data: SpectralData,
    metric: ConstantMetric,
    residues: MetricFromResidues,
    epsilon: Vec<Complex64>,
}

impl CurveModel {
    /// Validates the curve and builds its regular differential. With
    /// `euclidean` set, `Omega` is normalized so that `eta` is the identity.
    pub fn new(data: SpectralData, euclidean: bool) -> Result<Self> {
        let report = data.validate();
        if !report.passed() {
            let msgs: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
            return Err(Error::InvalidSpectralData(msgs.join("; ")));
        }
        let diffs = regular_differential(&data)?;
        let residues = metric_from_residues(&data, &diffs, euclidean)?;
        let metric = residues.constant_metric()?;
        let epsilon = residues.epsilon_sq.iter().map(|e| e.sqrt()).collect();
        Ok(CurveModel { data, metric, residues, epsilon })
    }

    pub fn data(&self) -> &SpectralData {
        &self.data
    }

    pub fn residues(&self) -> &MetricFromResidues {
        &self.residues
    }

    pub fn epsilon_sq(&self) -> &[Complex64] {
        &self.residues.epsilon_sq
    }
}

impl DiagonalMetricModel for CurveModel {
    fn dim(&self) -> usize {
        self.data.n()
    }

    fn metric(&self) -> &ConstantMetric {
        &self.metric
    }

    fn frame(&self, u: &[f64], order: usize) -> Result<FrameJets> {
        let eval = solve_ba(&self.data, u, order)?;
        let lame = eval.h.iter().zip(&self.epsilon).map(|(h, &e)| h.scale(e)).collect();
        Ok(FrameJets { x: eval.x, lame })
    }

    fn is_real(&self) -> bool {
        self.data.reality
    }
}

/// Values and first derivatives of the frame at one `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct EgoroffEvaluation {
    pub u: Vec<f64>,
    pub x: Vec<Complex64>,
    /// `H_i`.
    pub lame: Vec<Complex64>,
    /// `dH_j / du^i` stored as `[i][j]`.
    pub lame_gradient: Vec<Vec<Complex64>>,
    /// `dx^k / du^i` stored as `[k][i]`.
    pub jacobian: Vec<Vec<Complex64>>,
    /// `du^i / dx^k` stored as `[i][k]`.
    pub jacobian_inv: Vec<Vec<Complex64>>,
}

fn to_matrix(rows: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

fn from_matrix(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Evaluates the frame at `u` with first derivatives.
pub fn evaluate(model: &dyn DiagonalMetricModel, u: &[f64]) -> Result<EgoroffEvaluation> {
    let n = model.dim();
    if u.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u.len() });
    }
    let frame = model.frame(u, 1)?;
    let derivative = |jet: &Jet, i: usize| jet.derivative(i).map_err(Error::from);
    let mut jacobian = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut lame_gradient = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            jacobian[k][i] = derivative(&frame.x[k], i)?;
            lame_gradient[i][k] = derivative(&frame.lame[k], i)?;
        }
    }
    let jm = to_matrix(&jacobian);
    let condition = condition_number(&jm);
    let inverse = if condition > SINGULAR_JACOBIAN { None } else { jm.try_inverse() };
    let inverse = inverse.ok_or_else(|| Error::SingularJacobian { u: u.to_vec(), condition })?;
    Ok(EgoroffEvaluation {
        u: u.to_vec(),
        x: frame.x.iter().map(Jet::value).collect(),
        lame: frame.lame.iter().map(Jet::value).collect(),
        lame_gradient,
        jacobian,
        jacobian_inv: from_matrix(&inverse),
    })
}

impl EgoroffEvaluation {
    /// `beta_ij = d_i H_j / H_i` off the diagonal; diagonal entries are `None`.
    pub fn rotation_coefficients(&self) -> Result<Vec<Vec<Option<Complex64>>>> {
        let n = self.lame.len();
        if let Some(index) = self.lame.iter().position(|h| h.norm() == 0.0 || !h.is_finite()) {
            return Err(Error::VanishingLame { index });
        }
        Ok((0..n)
            .map(|i| (0..n).map(|j| (i != j).then(|| self.lame_gradient[i][j] / self.lame[i])).collect())
            .collect())
    }

    /// `max_{i != j} |beta_ij - beta_ji|`.
    pub fn symmetry_residual(&self) -> Result<f64> {
        let beta = self.rotation_coefficients()?;
        let mut worst: f64 = 0.0;
        for (i, row) in beta.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                if let (Some(bij), Some(bji)) = (b, beta[j][i]) {
                    worst = worst.max((bij - bji).norm());
                }
            }
        }
        Ok(worst)
    }

    /// `G_ij = sum_kl eta_kl dx^k/du^i dx^l/du^j`.
    pub fn pulled_back_metric(&self, eta: &ConstantMetric) -> Vec<Vec<Complex64>> {
        let n = self.lame.len();
        let mut g = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for (i, gi) in g.iter_mut().enumerate() {
            for (j, gij) in gi.iter_mut().enumerate() {
                for (k, l) in eta.support() {
                    *gij += self.jacobian[k][i] * self.jacobian[l][j] * eta.eta(k, l);
                }
            }
        }
        g
    }

    /// Compares the pulled-back metric with `diag(H_i^2)`.
    pub fn flatness(&self, eta: &ConstantMetric) -> FlatnessResidual {
        let g = self.pulled_back_metric(eta);
        let mut out = FlatnessResidual { off_diagonal: 0.0, diagonal_relative: 0.0 };
        for (i, row) in g.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if i == j {
                    let h2 = self.lame[i] * self.lame[i];
                    out.diagonal_relative = out.diagonal_relative.max((v - h2).norm() / h2.norm());
                } else {
                    out.off_diagonal = out.off_diagonal.max(v.norm());
                }
            }
        }
        out
    }

    /// Largest imaginary part among `x`, `H` and the Jacobian.
    pub fn max_imag(&self) -> f64 {
        self.x.iter().chain(&self.lame).chain(self.jacobian.iter().flatten()).map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn correlators(&self) -> CorrelatorTensor {
        let n = self.lame.len();
        let m = &self.jacobian_inv;
        let point = self.x.iter().map(|z| z.re).collect();
        CorrelatorTensor::from_unique(n, point, |a, b, c| {
            (0..n).map(|i| self.lame[i] * self.lame[i] * m[i][a] * m[i][b] * m[i][c]).sum()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatnessResidual {
    pub off_diagonal: f64,
    pub diagonal_relative: f64,
}

pub fn rotation_coefficients(model: &dyn DiagonalMetricModel, u: &[f64]) -> Result<Vec<Vec<Option<Complex64>>>> {
    evaluate(model, u)?.rotation_coefficients()
}

pub fn symmetry_residual(model: &dyn DiagonalMetricModel, u: &[f64]) -> Result<f64> {
    evaluate(model, u)?.symmetry_residual()
}

pub fn flatness_residual(model: &dyn DiagonalMetricModel, u: &[f64]) -> Result<FlatnessResidual> {
    Ok(evaluate(model, u)?.flatness(model.metric()))
}

/// Correlators at the point `x(u)`.
pub fn correlators_from_metric(model: &dyn DiagonalMetricModel, u: &[f64]) -> Result<CorrelatorTensor> {
    Ok(evaluate(model, u)?.correlators())
}

fn stacked_residual(x: &[Jet], target: &[f64]) -> DVector<f64> {
    let n = target.len();
    DVector::from_fn(2 * n, |r, _| {
        let v = x[r % n].value();
        if r < n {
            v.re - target[r]
        } else {
            v.im
        }
    })
}

/// Damped Gauss–Newton for `x(u) = x_target` over real `u`, using real and
/// imaginary parts of `x`. Converges when `|x(u) - target|` falls below
/// `1e-12 |target|`.
pub fn invert_coordinates(model: &dyn DiagonalMetricModel, x_target: &[f64], u_guess: &[f64]) -> Result<Vec<f64>> {
    let n = model.dim();
    if x_target.len() != n || u_guess.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x_target.len().min(u_guess.len()) });
    }
    let scale = x_target.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tolerance = NEWTON_TOLERANCE * scale;

    let mut u = u_guess.to_vec();
    let mut frame = model.frame(&u, 1)?;
    let mut residual = stacked_residual(&frame.x, x_target);
    for _ in 0..MAX_NEWTON_STEPS {
        let norm = residual.amax();
        if norm <= tolerance {
            return Ok(u);
        }
        let jac = DMatrix::from_fn(2 * n, n, |r, i| {
            let d = frame.x[r % n].derivative(i).unwrap_or_default();
            if r < n {
                d.re
            } else {
                d.im
            }
        });
        let svd = jac.svd(true, true);
        let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
        if smin == 0.0 || smax / smin > SINGULAR_JACOBIAN {
            return Err(Error::SingularJacobian { u, condition: smax / smin });
        }
        let step =
            svd.solve(&residual, 0.0).map_err(|_| Error::SingularJacobian { u: u.clone(), condition: smax / smin })?;

        let mut damping = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, s)| a - damping * s).collect();
            let accepted = match model.frame(&trial, 1) {
                Ok(f) => {
                    let r = stacked_residual(&f.x, x_target);
                    if r.amax().is_finite() && r.amax() <= norm {
                        u = trial;
                        frame = f;
                        residual = r;
                        true
                    } else {
                        false
                    }
                }
                Err(_) => false,
            };
            if accepted {
                break;
            }
            damping *= 0.5;
            if damping < 1e-10 {
                return Err(Error::NonConvergence { iterations: MAX_NEWTON_STEPS, residual: norm });
            }
        }
    }
    let norm = residual.amax();
    if norm <= tolerance {
        Ok(u)
    } else {
        Err(Error::NonConvergence { iterations: MAX_NEWTON_STEPS, residual: norm })
    }
}

/// Correlators as a function of the flat coordinates: `x` is inverted to `u`
/// starting from a fixed guess, then the metric formula is applied.
#[derive(Clone)]
pub struct MetricCorrelators {
    model: Arc<dyn DiagonalMetricModel>,
    guess: Vec<f64>,
}

impl fmt::Debug for MetricCorrelators {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricCorrelators").field("dim", &self.model.dim()).field("guess", &self.guess).finish()
    }
}

impl MetricCorrelators {
    pub fn new(model: Arc<dyn DiagonalMetricModel>, guess: Vec<f64>) -> Self {
        MetricCorrelators { model, guess }
    }
}

impl CorrelatorSource for MetricCorrelators {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn correlators(&self, x: &[f64]) -> Result<CorrelatorTensor> {
        let u = invert_coordinates(self.model.as_ref(), x, &self.guess)?;
        let mut tensor = correlators_from_metric(self.model.as_ref(), &u)?;
        tensor = CorrelatorTensor::from_unique(tensor.dim(), x.to_vec(), |a, b, c| tensor.get(a, b, c));
        Ok(tensor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{CurveComponent, IntersectionPoint, MarkedP, MarkedQ, Point};

    fn curve(pole: f64, r: f64) -> SpectralData {
        SpectralData {
            components: vec![
                CurveComponent::new(0)
                    .with_p(MarkedP::new(0, Point::Infinity, 1.0))
                    .with_q(MarkedQ::new(0, Point::zero())),
                CurveComponent::new(1)
                    .with_p(MarkedP::new(1, Point::Infinity, 1.0))
                    .with_q(MarkedQ::new(1, Point::zero()))
                    .with_pole(pole)
                    .with_normalization(r),
            ],
            intersections: vec![IntersectionPoint::new(0, 1.0, 1, 1.0), IntersectionPoint::new(0, -1.0, 1, -1.0)],
            involution: true,
            reality: true,
        }
    }

    fn model() -> CurveModel {
        CurveModel::new(curve(2.0 / 7f64.sqrt(), 2.0), true).unwrap()
    }

    #[test]
    fn jacobian_inverse_is_inverse() {
        let e = evaluate(&model(), &[0.3, -0.1]).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                let v: Complex64 = (0..2).map(|i| e.jacobian[k][i] * e.jacobian_inv[i][l]).sum();
                let want = if k == l { 1.0 } else { 0.0 };
                assert!((v - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_symmetry_and_flatness() {
        let m = model();
        let e = evaluate(&m, &[0.3, -0.1]).unwrap();
        assert!(e.symmetry_residual().unwrap() < 1e-10);
        let flat = e.flatness(m.metric());
        assert!(flat.off_diagonal < 1e-10, "{flat:?}");
        assert!(flat.diagonal_relative < 1e-8, "{flat:?}");
        assert!(e.max_imag() < 1e-12);
        let beta = e.rotation_coefficients().unwrap();
        assert!(beta[0][0].is_none() && beta[0][1].is_some());
    }

    #[test]
    fn newton_round_trip() {
        let m = model();
        let x: Vec<f64> = evaluate(&m, &[0.2, 0.4]).unwrap().x.iter().map(|z| z.re).collect();
        let u = invert_coordinates(&m, &x, &[0.0, 0.0]).unwrap();
        assert!((u[0] - 0.2).abs() < 1e-10 && (u[1] - 0.4).abs() < 1e-10, "{u:?}");
    }

    #[test]
    fn newton_rejects_zero_target() {
        let m = model();
        assert!(invert_coordinates(&m, &[0.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn metric_correlators_match_direct_evaluation() {
        let m = Arc::new(model());
        let direct = correlators_from_metric(m.as_ref(), &[0.1, 0.2]).unwrap();
        let source = MetricCorrelators::new(m, vec![0.0, 0.0]);
        let via_x = source.correlators(direct.point()).unwrap();
        assert!(via_x.max_abs_diff(&direct) < 1e-9);
    }
}
