//! Constant metrics, correlator tensors and the associativity equations.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::jets::{Jet, JetError};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A constant, possibly indefinite, metric `eta_ab` together with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantMetric {
    eta: Vec<f64>,
    eta_inv: Vec<f64>,
    dim: usize,
}

impl ConstantMetric {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
        if (0..dim).any(|i| (0..dim).any(|j| m[(i, j)] != m[(j, i)])) {
            return Err(Error::AsymmetricMetric);
        }
        let inv = m.clone().try_inverse().ok_or(Error::SingularMetric)?;
        let check = &m * &inv;
        let err = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| (check[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        if !err.is_finite() || err > 1e-12 {
            return Err(Error::SingularMetric);
        }
        // symmetrize the inverse so eta_inv is exactly symmetric
        let eta_inv = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| 0.5 * (inv[(i, j)] + inv[(j, i)]))
            .collect();
        let eta = (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect();
        Ok(ConstantMetric { eta, eta_inv, dim })
    }

    pub fn identity(dim: usize) -> Self {
        let eta: Vec<f64> = (0..dim * dim).map(|k| if k / dim == k % dim { 1.0 } else { 0.0 }).collect();
        ConstantMetric { eta_inv: eta.clone(), eta, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lower-index component `eta_ab`.
    pub fn eta(&self, a: usize, b: usize) -> f64 {
        self.eta[a * self.dim + b]
    }

    /// Upper-index component `eta^ab`.
    pub fn eta_inv(&self, a: usize, b: usize) -> f64 {
        self.eta_inv[a * self.dim + b]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.eta(i, j)).collect()).collect()
    }

    /// Index pairs `(a, b)` with `eta_ab != 0`.
    pub fn support(&self) -> Vec<(usize, usize)> {
        (0..self.dim).flat_map(|a| (0..self.dim).map(move |b| (a, b))).filter(|&(a, b)| self.eta(a, b) != 0.0).collect()
    }
}

/// Fully symmetric rank-3 tensor `c_abc` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorTensor {
    dim: usize,
    point: Vec<f64>,
    c: Vec<Complex64>,
}

impl CorrelatorTensor {
    /// Builds the tensor from its values on nondecreasing index triples; the
    /// remaining entries are filled by symmetry.
    pub fn from_unique(dim: usize, point: Vec<f64>, mut f: impl FnMut(usize, usize, usize) -> Complex64) -> Self {
        let mut c = vec![ZERO; dim * dim * dim];
        for i in 0..dim {
            for j in i..dim {
                for k in j..dim {
                    let v = f(i, j, k);
                    for (a, b, d) in permutations(i, j, k) {
                        c[(a * dim + b) * dim + d] = v;
                    }
                }
            }
        }
        CorrelatorTensor { dim, point, c }
    }

    /// Builds the tensor from arbitrary entries, averaging over the six index
    /// permutations.
    pub fn symmetrized(dim: usize, point: Vec<f64>, f: impl Fn(usize, usize, usize) -> Complex64) -> Self {
        Self::from_unique(dim, point, |i, j, k| {
            permutations(i, j, k).iter().map(|&(a, b, d)| f(a, b, d)).sum::<Complex64>() / 6.0
        })
    }

    pub fn zeros(dim: usize, point: Vec<f64>) -> Self {
        Self::from_unique(dim, point, |_, _, _| ZERO)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    /// Entries on nondecreasing index triples in lexicographic order.
    pub fn unique_entries(&self) -> Vec<((usize, usize, usize), Complex64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    out.push(((i, j, k), self.get(i, j, k)));
                }
            }
        }
        out
    }

    /// Largest entry-wise modulus of the difference.
    pub fn max_abs_diff(&self, other: &CorrelatorTensor) -> f64 {
        self.c.iter().zip(&other.c).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.c.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        CorrelatorTensor { dim: self.dim, point: self.point.clone(), c: self.c.iter().map(|v| v * factor).collect() }
    }

    /// Relabels coordinates: entry `(i, j, k)` of the result is entry
    /// `(perm[i], perm[j], perm[k])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let point = perm.iter().map(|&p| self.point[p]).collect();
        Self::from_unique(self.dim, point, |i, j, k| self.get(perm[i], perm[j], perm[k]))
    }
}

fn permutations(i: usize, j: usize, k: usize) -> [(usize, usize, usize); 6] {
    [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)]
}

/// Raised-index structure constants `c^g_ab = eta^gd c_abd`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    // index (g * dim + a) * dim + b
    data: Vec<Complex64>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficient of `e_g` in `e_a · e_b`.
    pub fn get(&self, g: usize, a: usize, b: usize) -> Complex64 {
        self.data[(g * self.dim + a) * self.dim + b]
    }

    /// Product of two algebra elements given in the basis `e_0..e_{n-1}`.
    pub fn multiply(&self, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        (0..n)
            .map(|g| {
                let mut s = ZERO;
                for (a, xa) in x.iter().enumerate().take(n) {
                    for (b, yb) in y.iter().enumerate().take(n) {
                        s += xa * yb * self.get(g, a, b);
                    }
                }
                s
            })
            .collect()
    }

    /// Coordinates of the basis vector `e_k`.
    pub fn basis(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| if i == k { Complex64::new(1.0, 0.0) } else { ZERO }).collect()
    }

    /// Lowers the upper index again with `eta`.
    pub fn lower(&self, g: &ConstantMetric, point: Vec<f64>) -> CorrelatorTensor {
        let n = self.dim;
        CorrelatorTensor::from_unique(n, point, |a, b, d| (0..n).map(|l| self.get(l, a, b) * g.eta(d, l)).sum())
    }
}

fn check_dims(c: &CorrelatorTensor, g: &ConstantMetric) -> Result<()> {
    if c.dim != g.dim {
        return Err(Error::DimensionMismatch { expected: g.dim, got: c.dim });
    }
    Ok(())
}

pub fn structure_constants(c: &CorrelatorTensor, g: &ConstantMetric) -> Result<StructureConstants> {
    check_dims(c, g)?;
    let n = c.dim;
    let mut data = vec![ZERO; n * n * n];
    for gi in 0..n {
        for a in 0..n {
            for b in 0..n {
                data[(gi * n + a) * n + b] = (0..n).map(|d| c.get(a, b, d) * g.eta_inv(gi, d)).sum();
            }
        }
    }
    Ok(StructureConstants { dim: n, data })
}

/// Max-norm residual of the associativity equations
/// `c_abl eta^lm c_gdm = c_gbl eta^lm c_adm` over all index quadruples.
pub fn associativity_residual(c: &CorrelatorTensor, g: &ConstantMetric) -> Result<f64> {
    let s = structure_constants(c, g)?;
    let n = c.dim;
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for gi in 0..n {
                for d in 0..n {
                    let mut diff = ZERO;
                    for m in 0..n {
                        diff += s.get(m, a, b) * c.get(gi, d, m) - s.get(m, gi, b) * c.get(a, d, m);
                    }
                    worst = worst.max(diff.norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Signature of a prepotential evaluator: coordinate jets in, jet of `F` out.
pub type PrepotentialFn = dyn Fn(&[Jet]) -> std::result::Result<Jet, JetError> + Send + Sync;

/// A prepotential `F`, evaluated as a jet from coordinate jets. The evaluator
/// is generic in the number of jet variables, so it can be embedded in a larger
/// coordinate system.
#[derive(Clone)]
pub struct PrepotentialField {
    dim: usize,
    evaluator: Arc<PrepotentialFn>,
}

impl fmt::Debug for PrepotentialField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrepotentialField").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl PrepotentialField {
    pub fn new(
        dim: usize,
        evaluator: impl Fn(&[Jet]) -> std::result::Result<Jet, JetError> + Send + Sync + 'static,
    ) -> Self {
        PrepotentialField { dim, evaluator: Arc::new(evaluator) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Applies `F` to arbitrary coordinate jets (one per coordinate).
    pub fn apply(&self, coords: &[Jet]) -> std::result::Result<Jet, JetError> {
        (self.evaluator)(coords)
    }

    /// Jet of `F` at `point` truncated at `order`.
    pub fn jet_at(&self, point: &[f64], order: usize) -> Result<Jet> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: point.len() });
        }
        let vars = Jet::variables(point, order);
        self.apply(&vars).map_err(|source| Error::Evaluation { point: point.to_vec(), source })
    }

    pub fn value_at(&self, point: &[f64]) -> Result<Complex64> {
        Ok(self.jet_at(point, 0)?.value())
    }
}

/// Third derivatives of `F` at `point`.
pub fn third_derivative_tensor(f: &PrepotentialField, point: &[f64]) -> Result<CorrelatorTensor> {
    let jet = f.jet_at(point, 3)?;
    let mut err = None;
    let t = CorrelatorTensor::from_unique(f.dim(), point.to_vec(), |i, j, k| {
        jet.third_partial(i, j, k).unwrap_or_else(|e| {
            err = Some(e);
            ZERO
        })
    });
    match err {
        Some(e) => Err(e.into()),
        None => Ok(t),
    }
}

/// Anything that yields a correlator tensor at a point of flat coordinates.
pub trait CorrelatorSource: Send + Sync {
    fn dim(&self) -> usize;
    fn correlators(&self, x: &[f64]) -> Result<CorrelatorTensor>;
}

impl CorrelatorSource for PrepotentialField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn correlators(&self, x: &[f64]) -> Result<CorrelatorTensor> {
        third_derivative_tensor(self, x)
    }
}

/// Max entry of `|c(lambda x) - c(x) / lambda|`.
pub fn correlator_scaling_check(model: &dyn CorrelatorSource, point: &[f64], lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda <= 0.0 || lambda.is_infinite() {
        return Err(Error::Domain {
            point: point.to_vec(),
            reason: format!("scaling factor {lambda} must be positive"),
        });
    }
    let scaled: Vec<f64> = point.iter().map(|x| x * lambda).collect();
    let base = model.correlators(point)?;
    let moved = model.correlators(&scaled)?;
    Ok(moved.max_abs_diff(&base.scaled(1.0 / lambda)))
}

/// Exponents of the Euler field `E = sum_a d_a t^a d_a` and the weight of `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasihomogeneityData {
    pub exponents: Vec<f64>,
    pub d_f: f64,
    /// Accept `E F = d_F F + (quadratic polynomial)`.
    pub allows_quadratic_remainder: bool,
}

impl QuasihomogeneityData {
    pub fn new(exponents: Vec<f64>, d_f: f64, allows_quadratic_remainder: bool) -> Self {
        QuasihomogeneityData { exponents, d_f, allows_quadratic_remainder }
    }

    /// The common value of `d_a + d_b` over the support of `g`.
    pub fn metric_sum(&self, g: &ConstantMetric) -> Result<f64> {
        if self.exponents.len() != g.dim() {
            return Err(Error::DimensionMismatch { expected: g.dim(), got: self.exponents.len() });
        }
        let support = g.support();
        let Some(&first) = support.first() else {
            return Err(Error::SingularMetric);
        };
        let sum = |(a, b): (usize, usize)| self.exponents[a] + self.exponents[b];
        let c = sum(first);
        for &pair in &support[1..] {
            let s = sum(pair);
            if (s - c).abs() > 1e-12 * c.abs().max(1.0) {
                return Err(Error::ExponentMismatch { first, first_sum: c, second: pair, second_sum: s });
            }
        }
        Ok(c)
    }
}

/// Checks `E F - d_F F` at `point`: its third derivatives must vanish, and when
/// no quadratic remainder is allowed, so must its value.
pub fn euler_check(f: &PrepotentialField, q: &QuasihomogeneityData, point: &[f64]) -> Result<f64> {
    let n = f.dim();
    if q.exponents.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: q.exponents.len() });
    }
    let jet = f.jet_at(point, 4)?;
    let coords = Jet::variables(point, 3);
    let mut g = jet.truncate(3).scale(-q.d_f);
    for (a, (x, d)) in coords.iter().zip(&q.exponents).enumerate() {
        let term = x * &jet.differentiate(a)?;
        g += &term.scale(*d);
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                worst = worst.max(g.third_partial(i, j, k)?.norm());
            }
        }
    }
    if !q.allows_quadratic_remainder {
        worst = worst.max(g.value().norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> PrepotentialField {
        // F = (t1)^2 t2 / 2
        PrepotentialField::new(2, |t| Ok(&(&t[0] * &t[0]) * &t[1].scale(0.5)))
    }

    fn antidiag() -> ConstantMetric {
        ConstantMetric::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn cubic_tensor() {
        let c = third_derivative_tensor(&cubic(), &[0.3, -2.0]).unwrap();
        for ((i, j, k), v) in c.unique_entries() {
            let want = if (i, j, k) == (0, 0, 1) { 1.0 } else { 0.0 };
            assert_eq!(v, Complex64::new(want, 0.0));
        }
        assert_eq!(c.get(1, 0, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn cubic_algebra_has_unity_and_nilpotent() {
        let c = third_derivative_tensor(&cubic(), &[1.0, 1.0]).unwrap();
        let s = structure_constants(&c, &antidiag()).unwrap();
        let e1 = s.basis(0);
        let e2 = s.basis(1);
        assert_eq!(s.multiply(&e1, &e1), e1);
        assert_eq!(s.multiply(&e1, &e2), e2);
        assert_eq!(s.multiply(&e2, &e2), vec![ZERO, ZERO]);
        assert_eq!(associativity_residual(&c, &antidiag()).unwrap(), 0.0);
    }

    #[test]
    fn zero_tensor_gives_zero_constants() {
        let c = CorrelatorTensor::zeros(3, vec![0.0; 3]);
        let s = structure_constants(&c, &ConstantMetric::identity(3)).unwrap();
        assert!(s.data.iter().all(|v| *v == ZERO));
    }

    #[test]
    fn dimension_mismatch() {
        let c = CorrelatorTensor::zeros(3, vec![0.0; 3]);
        assert_eq!(
            structure_constants(&c, &ConstantMetric::identity(2)).unwrap_err(),
            Error::DimensionMismatch { expected: 2, got: 3 }
        );
    }

    #[test]
    fn metric_validation() {
        assert_eq!(ConstantMetric::new(vec![vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap_err(), Error::AsymmetricMetric);
        assert_eq!(ConstantMetric::new(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap_err(), Error::SingularMetric);
        let g = antidiag();
        assert_eq!(g.eta_inv(0, 1), 1.0);
        assert_eq!(g.support(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn euler_cubic_monomial() {
        let q = QuasihomogeneityData::new(vec![1.0, 1.0], 3.0, false);
        assert_eq!(euler_check(&cubic(), &q, &[0.75, -1.5]).unwrap(), 0.0);
        assert!(euler_check(&cubic(), &q, &[0.7, -1.3]).unwrap() < 1e-15);
    }

    #[test]
    fn exponent_sum_constant() {
        let q = QuasihomogeneityData::new(vec![1.0, 2.0], 2.0, true);
        assert!(matches!(
            q.metric_sum(&ConstantMetric::identity(2)),
            Err(Error::ExponentMismatch { first: (0, 0), second: (1, 1), .. })
        ));
        assert_eq!(q.metric_sum(&antidiag()).unwrap(), 3.0);
    }

    #[test]
    fn scaling_check_identity_is_exact() {
        let f = PrepotentialField::new(2, |t| {
            let r = &(&t[0] * &t[0]) + &(&t[1] * &t[1]);
            Ok(&r * &r.ln()?)
        });
        assert_eq!(correlator_scaling_check(&f, &[1.0, 2.0], 1.0).unwrap(), 0.0);
        assert!(correlator_scaling_check(&f, &[1.0, 2.0], -1.0).is_err());
    }

    #[test]
    fn evaluation_fault_carries_point() {
        let f = PrepotentialField::new(1, |t| t[0].ln());
        match third_derivative_tensor(&f, &[0.0]) {
            Err(Error::Evaluation { point, .. }) => assert_eq!(point, vec![0.0]),
            other => panic!("unexpected {other:?}"),
        }
    }
}
