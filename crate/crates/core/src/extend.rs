//! Extension of an `n`-dimensional solution `(F, eta)` to `n + 2` dimensions:
//!
//! ```text
//! F~(t0, t, t') = (eta_ab t^a t^b t0 + t0^2 t') / 2 + F(t)
//! ```
//!
//! with `eta~` pairing `t0` and `t'` and keeping `eta` on the middle block.
//! `e_0` is the unity and `e_{n+1}` a nilpotent.

use num_complex::Complex64;

use crate::frobenius::{
    associativity_residual, structure_constants, third_derivative_tensor, ConstantMetric, PrepotentialField,
    QuasihomogeneityData,
};
use crate::jets::Jet;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ExtensionResult {
    pub f_tilde: PrepotentialField,
    pub eta_tilde: ConstantMetric,
    /// Extended exponents `(d_F - c, d_1 .. d_n, 2c - d_F)` when the base
    /// exponents were supplied.
    pub exponents: Option<QuasihomogeneityData>,
    pub base_metric: ConstantMetric,
}

impl ExtensionResult {
    pub fn dim(&self) -> usize {
        self.eta_tilde.dim()
    }
}

/// Builds `F~`, `eta~` and, if `q` is given, the extended exponents. Fails when
/// `d_a + d_b` is not constant over the support of `eta`.
pub fn extend_prepotential(
    f: &PrepotentialField,
    g: &ConstantMetric,
    q: Option<&QuasihomogeneityData>,
) -> Result<ExtensionResult> {
    let n = f.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
    }
    let exponents = match q {
        Some(q) => {
            let c = q.metric_sum(g)?;
            let mut d = Vec::with_capacity(n + 2);
            d.push(q.d_f - c);
            d.extend_from_slice(&q.exponents);
            d.push(2.0 * c - q.d_f);
            Some(QuasihomogeneityData::new(d, q.d_f, q.allows_quadratic_remainder))
        }
        None => None,
    };

    let mut rows = vec![vec![0.0; n + 2]; n + 2];
    rows[0][n + 1] = 1.0;
    rows[n + 1][0] = 1.0;
    for (a, b) in g.support() {
        rows[a + 1][b + 1] = g.eta(a, b);
    }
    let eta_tilde = ConstantMetric::new(rows)?;

    let base = f.clone();
    let support: Vec<(usize, usize, f64)> = g.support().into_iter().map(|(a, b)| (a, b, g.eta(a, b))).collect();
    let f_tilde = PrepotentialField::new(n + 2, move |t: &[Jet]| {
        let t0 = &t[0];
        let middle = &t[1..=n];
        let mut quad = Jet::zero(t0.num_vars(), t0.order());
        for &(a, b, v) in &support {
            quad += &(&middle[a] * &middle[b]).scale(v);
        }
        let cubic = &(&quad * t0) + &(&(t0 * t0) * &t[n + 1]);
        Ok(&cubic.scale(0.5) + &base.apply(middle)?)
    });

    Ok(ExtensionResult { f_tilde, eta_tilde, exponents, base_metric: g.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionDiagnostics {
    pub associativity: f64,
    /// `max_k |e_0 e_k - e_k|`.
    pub unity: f64,
    /// `|e_{n+1}^2|`.
    pub nilpotent_square: f64,
    /// `max_ab |coefficient of e_{n+1} in e_a e_b - eta_ab|` over the middle block.
    pub metric_coefficient: f64,
}

impl ExtensionDiagnostics {
    pub fn max(&self) -> f64 {
        self.associativity.max(self.unity).max(self.nilpotent_square).max(self.metric_coefficient)
    }
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Evaluates the extended algebra at `point = (t0, t^1 .. t^n, t^{n+1})`.
pub fn verify_extension(ext: &ExtensionResult, point: &[f64]) -> Result<ExtensionDiagnostics> {
    let dim = ext.dim();
    let n = dim - 2;
    let tensor = third_derivative_tensor(&ext.f_tilde, point)?;
    let associativity = associativity_residual(&tensor, &ext.eta_tilde)?;
    let sc = structure_constants(&tensor, &ext.eta_tilde)?;

    let unit = sc.basis(0);
    let mut unity: f64 = 0.0;
    for k in 0..dim {
        let ek = sc.basis(k);
        let prod = sc.multiply(&unit, &ek);
        let diff: Vec<Complex64> = prod.iter().zip(&ek).map(|(p, e)| p - e).collect();
        unity = unity.max(max_norm(&diff));
    }
    let nil = sc.basis(n + 1);
    let nilpotent_square = max_norm(&sc.multiply(&nil, &nil));

    let mut metric_coefficient: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let coeff = sc.get(n + 1, a + 1, b + 1);
            metric_coefficient = metric_coefficient.max((coeff - ext.base_metric.eta(a, b)).norm());
        }
    }
    Ok(ExtensionDiagnostics { associativity, unity, nilpotent_square, metric_coefficient })
}
