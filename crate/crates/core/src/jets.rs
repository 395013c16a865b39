//! Truncated multivariate Taylor expansions ("jets") over complex scalars.
//!
//! A [`Jet`] of order `k` in `n` variables stores the Taylor coefficients of a
//! function at a base point for every exponent multi-index of total degree at
//! most `k`. Arithmetic is exact below the truncation degree, so third partial
//! derivatives of compositions of elementary functions come out to machine
//! precision. Coefficients are stored densely in graded-lexicographic order;
//! the layouts (monomial tables and product tables) are shared between all jets
//! of the same shape.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Condition number of the constant-term matrix above which a jet system is
/// treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("jet shape mismatch: ({0}, order {1}) vs ({2}, order {3})")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("division by a jet with zero constant term")]
    ZeroConstantTerm,
    #[error("{function} evaluated at its branch point")]
    BranchPoint { function: &'static str },
    #[error("{function} argument {value} lies on the principal branch cut")]
    BranchCut { function: &'static str, value: Complex64 },
    #[error("multi-index of degree {degree} exceeds jet order {order}")]
    DegreeOverflow { degree: usize, order: usize },
    #[error("multi-index has length {got}, expected {expected}")]
    MultiIndexLength { got: usize, expected: usize },
    #[error("linear system is not square: {rows} rows, {cols} columns, rhs {rhs}")]
    NotSquare { rows: usize, cols: usize, rhs: usize },
    #[error("constant-term matrix is singular (condition number {condition:e})")]
    Singular { condition: f64 },
}

/// Arithmetic operation selector for [`Jet::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Monomial and product tables shared by every jet of one shape.
#[derive(Debug)]
pub struct JetLayout {
    num_vars: usize,
    order: usize,
    monomials: Vec<Vec<u8>>,
    degrees: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    // (i, j, k): monomial i times monomial j is monomial k
    products: Vec<(u32, u32, u32)>,
}

impl JetLayout {
    fn build(num_vars: usize, order: usize) -> Self {
        let mut monomials = Vec::new();
        for degree in 0..=order {
            let mut current = vec![0u8; num_vars];
            push_compositions(degree, 0, &mut current, &mut monomials);
        }
        let degrees: Vec<usize> = monomials.iter().map(|m| m.iter().map(|&e| e as usize).sum()).collect();
        let index: HashMap<Vec<u8>, usize> = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut products = Vec::new();
        for (i, mi) in monomials.iter().enumerate() {
            for (j, mj) in monomials.iter().enumerate() {
                if degrees[i] + degrees[j] > order {
                    continue;
                }
                let sum: Vec<u8> = mi.iter().zip(mj).map(|(a, b)| a + b).collect();
                products.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        JetLayout { num_vars, order, monomials, degrees, index, products }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Exponent multi-indices in storage order.
    pub fn monomials(&self) -> &[Vec<u8>] {
        &self.monomials
    }

    /// Total degree of the monomial stored at `slot`.
    pub fn degree(&self, slot: usize) -> usize {
        self.degrees[slot]
    }
}

fn push_compositions(remaining: usize, slot: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    let n = current.len();
    if n == 0 {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if slot == n - 1 {
        current[slot] = remaining as u8;
        out.push(current.clone());
        current[slot] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[slot] = e as u8;
        push_compositions(remaining - e, slot + 1, current, out);
    }
    current[slot] = 0;
}

/// Returns the shared layout for `num_vars` variables truncated at `order`.
type LayoutCache = Mutex<HashMap<(usize, usize), Arc<JetLayout>>>;

pub fn layout(num_vars: usize, order: usize) -> Arc<JetLayout> {
    static CACHE: OnceLock<LayoutCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry((num_vars, order)).or_insert_with(|| Arc::new(JetLayout::build(num_vars, order))).clone()
}

/// Truncated Taylor expansion of a complex-valued function of `num_vars`
/// variables.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<JetLayout>,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_map();
        for (m, c) in self.layout.monomials.iter().zip(&self.coeffs) {
            if *c != Complex64::new(0.0, 0.0) {
                s.entry(m, c);
            }
        }
        s.finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.same_shape(other) && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn zero(num_vars: usize, order: usize) -> Self {
        let layout = layout(num_vars, order);
        let coeffs = vec![Complex64::new(0.0, 0.0); layout.len()];
        Jet { layout, coeffs }
    }

    pub fn constant(value: impl Into<Complex64>, num_vars: usize, order: usize) -> Self {
        let mut jet = Self::zero(num_vars, order);
        jet.coeffs[0] = value.into();
        jet
    }

    /// The coordinate function `u^index` expanded at `base`.
    pub fn variable(index: usize, base: impl Into<Complex64>, num_vars: usize, order: usize) -> Result<Self, JetError> {
        if index >= num_vars {
            return Err(JetError::IndexOutOfRange { index, num_vars });
        }
        let mut jet = Self::constant(base, num_vars, order);
        if order >= 1 {
            let mut m = vec![0u8; num_vars];
            m[index] = 1;
            let slot = jet.layout.index[&m];
            jet.coeffs[slot] = Complex64::new(1.0, 0.0);
        }
        Ok(jet)
    }

    /// All coordinate functions at `base`, one jet per variable.
    pub fn variables(base: &[f64], order: usize) -> Vec<Self> {
        let n = base.len();
        (0..n).map(|i| Self::variable(i, base[i], n, order).expect("index in range")).collect()
    }

    /// Builds a jet from coefficients in layout order.
    pub fn from_coeffs(num_vars: usize, order: usize, coeffs: Vec<Complex64>) -> Self {
        let layout = layout(num_vars, order);
        assert_eq!(coeffs.len(), layout.len(), "coefficient count does not match layout");
        Jet { layout, coeffs }
    }

    pub fn num_vars(&self) -> usize {
        self.layout.num_vars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn layout(&self) -> &JetLayout {
        &self.layout
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Constant term, i.e. the function value at the base point.
    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    fn same_shape(&self, other: &Jet) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout)
            || (self.num_vars() == other.num_vars() && self.order() == other.order())
    }

    fn check_shape(&self, other: &Jet) -> Result<(), JetError> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(JetError::ShapeMismatch(self.num_vars(), self.order(), other.num_vars(), other.order()))
        }
    }

    fn slot(&self, multi_index: &[usize]) -> Result<usize, JetError> {
        if multi_index.len() != self.num_vars() {
            return Err(JetError::MultiIndexLength { got: multi_index.len(), expected: self.num_vars() });
        }
        let degree: usize = multi_index.iter().sum();
        if degree > self.order() {
            return Err(JetError::DegreeOverflow { degree, order: self.order() });
        }
        let key: Vec<u8> = multi_index.iter().map(|&e| e as u8).collect();
        Ok(self.layout.index[&key])
    }

    /// Raw Taylor coefficient of the monomial with the given exponents.
    pub fn coeff(&self, multi_index: &[usize]) -> Result<Complex64, JetError> {
        Ok(self.coeffs[self.slot(multi_index)?])
    }

    /// The partial derivative with the given exponents: the Taylor coefficient
    /// times the product of the factorials of the exponents.
    pub fn partial(&self, multi_index: &[usize]) -> Result<Complex64, JetError> {
        let c = self.coeff(multi_index)?;
        let weight: f64 = multi_index.iter().map(|&e| factorial(e)).product();
        Ok(c * weight)
    }

    /// First partial derivative with respect to variable `index`.
    pub fn derivative(&self, index: usize) -> Result<Complex64, JetError> {
        if index >= self.num_vars() {
            return Err(JetError::IndexOutOfRange { index, num_vars: self.num_vars() });
        }
        let mut m = vec![0usize; self.num_vars()];
        m[index] = 1;
        self.partial(&m)
    }

    /// Third partial derivative with respect to variables `i`, `j`, `k`.
    pub fn third_partial(&self, i: usize, j: usize, k: usize) -> Result<Complex64, JetError> {
        let n = self.num_vars();
        for &idx in &[i, j, k] {
            if idx >= n {
                return Err(JetError::IndexOutOfRange { index: idx, num_vars: n });
            }
        }
        let mut m = vec![0usize; n];
        m[i] += 1;
        m[j] += 1;
        m[k] += 1;
        self.partial(&m)
    }

    /// Drops every coefficient above total degree `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order());
        let target = layout(self.num_vars(), order);
        // graded ordering: lower-order layouts are prefixes
        let coeffs = self.coeffs[..target.len()].to_vec();
        Jet { layout: target, coeffs }
    }

    /// Jet of the partial derivative with respect to variable `index`; the
    /// result has order one less than `self`.
    pub fn differentiate(&self, index: usize) -> Result<Jet, JetError> {
        let n = self.num_vars();
        if index >= n {
            return Err(JetError::IndexOutOfRange { index, num_vars: n });
        }
        let order = self.order().saturating_sub(1);
        let target = layout(n, order);
        if self.order() == 0 {
            return Ok(Jet { coeffs: vec![Complex64::new(0.0, 0.0); target.len()], layout: target });
        }
        let coeffs = target
            .monomials
            .iter()
            .map(|m| {
                let mut up = m.clone();
                up[index] += 1;
                self.coeffs[self.layout.index[&up]] * (up[index] as f64)
            })
            .collect();
        Ok(Jet { layout: target, coeffs })
    }

    /// Truncated ring operation, with shape checking.
    pub fn arith(&self, other: &Jet, op: ArithOp) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        Ok(match op {
            ArithOp::Add => self.zip_with(other, |a, b| a + b),
            ArithOp::Sub => self.zip_with(other, |a, b| a - b),
            ArithOp::Mul => self.mul_unchecked(other),
            ArithOp::Div => return self.checked_div(other),
        })
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(Complex64, Complex64) -> Complex64) -> Jet {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect();
        Jet { layout: self.layout.clone(), coeffs }
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        for &(i, j, k) in &self.layout.products {
            coeffs[k as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        Jet { layout: self.layout.clone(), coeffs }
    }

    pub fn checked_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn checked_div(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(&other.recip()?))
    }

    pub fn scale(&self, factor: impl Into<Complex64>) -> Jet {
        let factor = factor.into();
        self.map(|c| c * factor)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Jet {
        Jet { layout: self.layout.clone(), coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    /// Jet with the constant term removed (the nilpotent part).
    fn nilpotent(&self) -> Jet {
        let mut n = self.clone();
        n.coeffs[0] = Complex64::new(0.0, 0.0);
        n
    }

    /// Evaluates `sum_k taylor[k] * N^k` where `N` is the nilpotent part of
    /// `self`; `taylor` holds the univariate Taylor coefficients of a scalar
    /// function at the constant term.
    pub fn compose(&self, taylor: &[Complex64]) -> Jet {
        let nil = self.nilpotent();
        let top = taylor.len().min(self.order() + 1);
        let mut acc = Jet::zero(self.num_vars(), self.order());
        for k in (0..top).rev() {
            acc = acc.mul_unchecked(&nil);
            acc.coeffs[0] += taylor[k];
        }
        acc
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        let a0 = self.value();
        if a0 == Complex64::new(0.0, 0.0) {
            return Err(JetError::ZeroConstantTerm);
        }
        let inv = a0.inv();
        let mut t = Vec::with_capacity(self.order() + 1);
        let mut p = inv;
        for _ in 0..=self.order() {
            t.push(p);
            p = -p * inv;
        }
        Ok(self.compose(&t))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let t: Vec<Complex64> = (0..=self.order()).map(|k| e / factorial(k)).collect();
        self.compose(&t)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Result<Jet, JetError> {
        let a0 = self.value();
        check_branch("log", a0)?;
        let inv = a0.inv();
        let mut t = vec![a0.ln()];
        let mut p = inv;
        for k in 1..=self.order() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            t.push(p * (sign / k as f64));
            p *= inv;
        }
        Ok(self.compose(&t))
    }

    /// Principal power with a real exponent.
    pub fn powf(&self, exponent: f64) -> Result<Jet, JetError> {
        let a0 = self.value();
        if exponent.fract() == 0.0 && exponent.abs() < i32::MAX as f64 {
            return self.powi(exponent as i32);
        }
        check_branch("pow", a0)?;
        let lead = a0.powf(exponent);
        let inv = a0.inv();
        let mut t = Vec::with_capacity(self.order() + 1);
        let mut binom = 1.0;
        let mut p = lead;
        for k in 0..=self.order() {
            t.push(p * binom);
            binom *= (exponent - k as f64) / (k as f64 + 1.0);
            p *= inv;
        }
        Ok(self.compose(&t))
    }

    /// Integer power; negative powers need a nonzero constant term.
    pub fn powi(&self, exponent: i32) -> Result<Jet, JetError> {
        if exponent < 0 {
            return self.recip()?.powi(-exponent);
        }
        let mut result = Jet::constant(1.0, self.num_vars(), self.order());
        let mut base = self.clone();
        let mut e = exponent as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        Ok(result)
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        check_branch("sqrt", self.value())?;
        self.powf(0.5)
    }

    /// Principal arctangent.
    pub fn atan(&self) -> Result<Jet, JetError> {
        let a0 = self.value();
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        if a0 == i || a0 == -i {
            return Err(JetError::BranchPoint { function: "atan" });
        }
        // atan'(a0 + s) = 1 / (1 + (a0 + s)^2); integrate its series termwise.
        let k = self.order();
        let q = [one + a0 * a0, a0 * 2.0, one];
        let r = series_recip(&q, k);
        let mut t = vec![a0.atan()];
        for m in 1..=k {
            t.push(r[m - 1] / m as f64);
        }
        Ok(self.compose(&t))
    }

    /// Largest coefficient-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Jet) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Reciprocal of a univariate power series, truncated to `len` terms.
fn series_recip(q: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut r = vec![Complex64::new(0.0, 0.0); len];
    if len == 0 {
        return r;
    }
    let q0inv = q[0].inv();
    r[0] = q0inv;
    for m in 1..len {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 1..=m.min(q.len() - 1) {
            s += q[j] * r[m - j];
        }
        r[m] = -s * q0inv;
    }
    r
}

fn check_branch(function: &'static str, a0: Complex64) -> Result<(), JetError> {
    if a0 == Complex64::new(0.0, 0.0) {
        return Err(JetError::BranchPoint { function });
    }
    if a0.re < 0.0 && a0.im.abs() <= 16.0 * f64::EPSILON * a0.norm() {
        return Err(JetError::BranchCut { function, value: a0 });
    }
    Ok(())
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Solves `a · x = b` for jet-valued entries by Gaussian elimination, pivoting
/// on the modulus of the constant terms.
pub fn solve_linear(a: &[Vec<Jet>], b: &[Jet]) -> Result<Vec<Jet>, JetError> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(JetError::NotSquare { rows: n, cols: a.first().map_or(0, |r| r.len()), rhs: b.len() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let reference = &b[0];
    for jet in a.iter().flatten().chain(b) {
        reference.check_shape(jet)?;
    }

    let condition = constant_condition(a);
    if !condition.is_finite() || condition > SINGULAR_CONDITION {
        return Err(JetError::Singular { condition });
    }

    let mut m: Vec<Vec<Jet>> = a.to_vec();
    let mut rhs: Vec<Jet> = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].value().norm().total_cmp(&m[j][col].value().norm()))
            .expect("nonempty range");
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].recip()?;
        let (upper, lower) = m.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for (offset, row_entries) in lower.iter_mut().enumerate() {
            let row = col + 1 + offset;
            let factor = row_entries[col].mul_unchecked(&inv);
            for (entry, p) in row_entries[col..n].iter_mut().zip(&pivot_row[col..n]) {
                let delta = factor.mul_unchecked(p);
                *entry = &*entry - &delta;
            }
            let delta = factor.mul_unchecked(&rhs[col]);
            rhs[row] = &rhs[row] - &delta;
        }
    }
    let mut x: Vec<Jet> = vec![Jet::zero(reference.num_vars(), reference.order()); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..n {
            acc = &acc - &m[row][k].mul_unchecked(&x[k]);
        }
        x[row] = acc.checked_div(&m[row][row])?;
    }
    Ok(x)
}

/// 1-norm condition number of the constant-term matrix.
fn constant_condition(a: &[Vec<Jet>]) -> f64 {
    let n = a.len();
    let m0 = DMatrix::from_fn(n, n, |i, j| a[i][j].value());
    let norm1 = |m: &DMatrix<Complex64>| {
        (0..m.ncols()).map(|j| m.column(j).iter().map(|c| c.norm()).sum::<f64>()).fold(0.0, f64::max)
    };
    match m0.clone().try_inverse() {
        Some(inv) => norm1(&m0) * norm1(&inv),
        None => f64::INFINITY,
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.arith(rhs, ArithOp::Add).expect("jet shape mismatch")
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.arith(rhs, ArithOp::Sub).expect("jet shape mismatch")
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.checked_mul(rhs).expect("jet shape mismatch")
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        self.check_shape(rhs).expect("jet shape mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map(|c| -c)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

impl Add<Complex64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: Complex64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += rhs;
        out
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self + Complex64::new(rhs, 0.0)
    }
}

impl Mul<Complex64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: Complex64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}
