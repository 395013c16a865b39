//! Two worked models on the curve made of two spheres glued at two points,
//! with closed forms used as oracles for the generic pipeline.
//!
//! `Example1` places `P_i = inf` and `Q_i = 0` on sphere `i`, the pole and the
//! normalization point on the second sphere, and glues at `+-a`. `Example2`
//! puts both `P` points (`inf` and `0`) on the first sphere, both `Q` points
//! on the second, and glues `+-a` to `+-b`; the result is the pencil
//! `F_q = q rho atan(x1/x2) - rho log(rho) / 8` with `rho = |x|^2`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64;

use crate::differentials::euclidean_parameters;
use crate::egoroff::{CurveModel, DiagonalMetricModel, FrameJets};
use crate::frobenius::{ConstantMetric, CorrelatorSource, CorrelatorTensor, PrepotentialField, QuasihomogeneityData};
use crate::jets::Jet;
use crate::spectral::{CurveComponent, IntersectionPoint, MarkedP, MarkedQ, Point, SpectralData};
use crate::{Error, Result};

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn is_real(z: Complex64) -> bool {
    z.im.abs() <= 1e-12 * z.norm().max(1.0)
}

/// `2 / sqrt(7)`.
pub fn printed_c() -> f64 {
    2.0 / 7f64.sqrt()
}

/// Two spheres glued at `+-a`, with the pole of `psi` at `c` and the
/// normalization point at `r = a / sqrt(2 - a^2/c^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1 {
    pub a: Complex64,
    /// Location of the pole divisor on the second sphere.
    pub c: Complex64,
    pub r: Complex64,
    pub beta: Complex64,
}

impl Example1 {
    pub fn new(a: impl Into<Complex64>, c: impl Into<Complex64>) -> Result<Self> {
        let (a, c) = (a.into(), c.into());
        let (r, beta) = euclidean_parameters(a, c)?;
        Ok(Example1 { a, c, r, beta })
    }

    /// `a = 1`, `c = 2/sqrt(7)`, where `r = 2` and `beta = 1/7`.
    pub fn printed() -> Self {
        Self::new(1.0, printed_c()).expect("printed parameters are regular")
    }

    pub fn spectral_data(&self) -> SpectralData {
        let reality = [self.a, self.c, self.r].iter().all(|z| is_real(z * z));
        SpectralData {
            components: vec![
                CurveComponent::new(1)
                    .with_p(MarkedP::new(0, Point::Infinity, 1.0))
                    .with_q(MarkedQ::new(0, Point::zero())),
                CurveComponent::new(2)
                    .with_p(MarkedP::new(1, Point::Infinity, 1.0))
                    .with_q(MarkedQ::new(1, Point::zero()))
                    .with_pole(self.c)
                    .with_normalization(self.r),
            ],
            intersections: vec![
                IntersectionPoint::new(1, self.a, 2, self.a),
                IntersectionPoint::new(1, -self.a, 2, -self.a),
            ],
            involution: true,
            reality,
        }
    }

    pub fn curve_model(&self) -> Result<CurveModel> {
        CurveModel::new(self.spectral_data(), true)
    }

    /// Closed-form prepotential of this curve. Its parameter is the negated
    /// pole location; the logarithms take the arguments that are positive
    /// near `x = (1, 1)`, which changes `F` only by a quadratic polynomial.
    pub fn prepotential(&self) -> PrepotentialField {
        two_sphere_prepotential(self.a, -self.c)
    }

    pub fn quasihomogeneity(&self) -> QuasihomogeneityData {
        QuasihomogeneityData::new(vec![1.0, 1.0], 2.0, true)
    }
}

/// `F_{a,c}` as a jet function of `(x1, x2)`:
///
/// ```text
/// 4ac F = 2 x2 S + 2c x1^2 log((c x2 + S) / x1)
///         - sqrt(2c^2 - a^2) (x1^2 + x2^2) log(-(c^2 (x1^2 - 3 x2^2) + a^2 (x2^2 - x1^2) - 2 x2 sqrt(2c^2 - a^2) S))
/// S = sqrt((a^2 - c^2) x1^2 + c^2 x2^2)
/// ```
///
/// `sqrt(2c^2 - a^2)` is taken as `c sqrt(2 - a^2/c^2)`, so its sign follows `c`.
pub fn two_sphere_prepotential(a: Complex64, c: Complex64) -> PrepotentialField {
    PrepotentialField::new(2, move |t| {
        let (x1, x2) = (&t[0], &t[1]);
        let x1s = x1 * x1;
        let x2s = x2 * x2;
        let a2 = a * a;
        let c2 = c * c;
        let s = (&(&x1s * (a2 - c2)) + &(&x2s * c2)).sqrt()?;
        let k = c * (2.0 - a2 / c2).sqrt();
        let first = (&(x2 * c) + &s).checked_div(x1)?.ln()?;
        let inner = &(&(&x1s - &x2s.scale(3.0)) * c2) + &(&(&x2s - &x1s) * a2);
        let inner = &inner - &(&(x2 * &s) * (2.0 * k));
        let second = (-inner).ln()?;
        let total = &(&(x2 * &s) * 2.0) + &(&(&x1s * &first) * (2.0 * c));
        let total = &total - &(&(&(&x1s + &x2s) * &second) * k);
        Ok(total.scale((4.0 * a * c).inv()))
    })
}

/// Printed flat coordinates for `a = 1`, `c = 2/sqrt(7)`.
pub fn example1_flat_coords(u: &[f64]) -> [f64; 2] {
    let s7 = 7f64.sqrt();
    let (e1, e2) = ((2.0 * u[0]).exp(), (2.0 * u[1]).exp());
    let x1 = 4.0 * (7.0 - s7) * (u[0] - u[1]).exp() / ((21.0 - 6.0 * s7) * e1 + (7.0 + 2.0 * s7) * e2);
    let x2 =
        (-2.0 * u[1]).exp() * (3.0 * (s7 - 3.0) * e1 + (5.0 + s7) * e2) / (3.0 * (s7 - 2.0) * e1 + (2.0 + s7) * e2);
    [x1, x2]
}

/// The four printed correlators for `a = 1`, `c = 2/sqrt(7)`. They belong to
/// the curve with the pole at `-2/sqrt(7)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example1Correlators;

impl CorrelatorSource for Example1Correlators {
    fn dim(&self) -> usize {
        2
    }

    fn correlators(&self, x: &[f64]) -> Result<CorrelatorTensor> {
        if x.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: x.len() });
        }
        let (x1, x2) = (x[0], x[1]);
        let q = (3.0 * x1 * x1 + 4.0 * x2 * x2).powi(3).sqrt();
        let d = 3.0 * x1.powi(4) + 7.0 * x1 * x1 * x2 * x2 + 4.0 * x2.powi(4);
        let den = 2.0 * d * d;
        if x1 == 0.0 || den == 0.0 {
            return Err(Error::Domain { point: x.to_vec(), reason: "x1 = 0 is outside the domain".into() });
        }
        let c111 = -(9.0 * x1.powi(8)
            + 51.0 * x1.powi(6) * x2 * x2
            + 88.0 * x1.powi(4) * x2.powi(4)
            + (2.0 * x1 * x1 * x2.powi(3) + 4.0 * x2.powi(5)) * q
            + 48.0 * x1 * x1 * x2.powi(6))
            / (x1 * den);
        let c112 = (9.0 * x1.powi(6) * x2 + 15.0 * x1.powi(4) * x2.powi(3) - 8.0 * x1 * x1 * x2.powi(5)
            + (2.0 * x1 * x1 * x2 * x2 + 4.0 * x2.powi(4)) * q
            - 16.0 * x2.powi(7))
            / den;
        let c122 = -(9.0 * x1.powi(7) + 15.0 * x1.powi(5) * x2 * x2 - 8.0 * x1.powi(3) * x2.powi(4)
            + (2.0 * x1.powi(3) * x2 + 4.0 * x1 * x2.powi(3)) * q
            - 16.0 * x1 * x2.powi(6))
            / den;
        let c222 = (-27.0 * x1.powi(6) * x2 - 16.0 * x2.powi(7) - 72.0 * x1 * x1 * x2.powi(5)
            + (4.0 * x1 * x1 * x2 * x2 + 2.0 * x1.powi(4)) * q
            - 81.0 * x1.powi(4) * x2.powi(3))
            / den;
        let values = [c111, c112, c122, c222];
        Ok(CorrelatorTensor::from_unique(2, x.to_vec(), |i, j, k| real(values[i + j + k])))
    }
}

/// Spectral parameters `b = i`, `c = -1`, `a = i/2`, `r = 1/2`; `q` selects the
/// member of the prepotential pencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example2 {
    pub q: f64,
}

impl Example2 {
    pub const A: Complex64 = Complex64::new(0.0, 0.5);
    pub const B: Complex64 = Complex64::new(0.0, 1.0);
    pub const C: Complex64 = Complex64::new(-1.0, 0.0);
    pub const R: Complex64 = Complex64::new(0.5, 0.0);

    pub fn new(q: f64) -> Self {
        Example2 { q }
    }

    pub fn spectral_data(&self) -> SpectralData {
        SpectralData {
            components: vec![
                CurveComponent::new(1)
                    .with_p(MarkedP::new(0, Point::Infinity, 2.0))
                    .with_p(MarkedP::new(1, Point::zero(), 0.5))
                    .with_normalization(Self::R),
                CurveComponent::new(2)
                    .with_q(MarkedQ::new(0, Point::Infinity))
                    .with_q(MarkedQ::new(1, Point::zero()))
                    .with_pole(Self::C),
            ],
            intersections: vec![
                IntersectionPoint::new(1, Self::A, 2, Self::B),
                IntersectionPoint::new(1, -Self::A, 2, -Self::B),
            ],
            involution: true,
            reality: true,
        }
    }

    pub fn curve_model(&self) -> Result<CurveModel> {
        CurveModel::new(self.spectral_data(), true)
    }

    /// `x = e^{-(u1+u2)} (cos(u1-u2) + sin(u1-u2), cos(u1-u2) - sin(u1-u2))`.
    pub fn flat_coords(u: &[f64]) -> [f64; 2] {
        let (s, t) = (u[0] + u[1], u[0] - u[1]);
        let e = (-s).exp();
        [e * (t.cos() + t.sin()), e * (t.cos() - t.sin())]
    }

    /// Diagonal metric coefficients `H_i^2 = 4 e^{-2(u1+u2)}`.
    pub fn metric(u: &[f64]) -> [f64; 2] {
        let h2 = 4.0 * (-2.0 * (u[0] + u[1])).exp();
        [h2, h2]
    }

    pub fn prepotential(&self) -> PrepotentialField {
        pencil_prepotential(self.q)
    }

    pub fn quasihomogeneity(&self) -> QuasihomogeneityData {
        QuasihomogeneityData::new(vec![1.0, 1.0], 2.0, true)
    }
}

/// `q rho atan(x1/x2) - rho log(rho) / 8`. Near `x2 = 0` the angle is taken
/// as `+-pi/2 - atan(x2/x1)`, which is the same function wherever both are
/// defined.
pub fn pencil_prepotential(q: f64) -> PrepotentialField {
    PrepotentialField::new(2, move |t| {
        let (x1, x2) = (&t[0], &t[1]);
        let rho = &(x1 * x1) + &(x2 * x2);
        let log_part = (&rho * &rho.ln()?).scale(-0.125);
        if q == 0.0 {
            return Ok(log_part);
        }
        let (v1, v2) = (x1.value().re, x2.value().re);
        let angle = if v2.abs() >= v1.abs() {
            x1.checked_div(x2)?.atan()?
        } else {
            let side = if (v1 >= 0.0) == (v2 >= 0.0) { FRAC_PI_2 } else { -FRAC_PI_2 };
            &(-x2.checked_div(x1)?.atan()?) + side
        };
        Ok(&(&rho * &angle).scale(q) + &log_part)
    })
}

/// Printed correlators of `F_0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example2Correlators;

impl CorrelatorSource for Example2Correlators {
    fn dim(&self) -> usize {
        2
    }

    fn correlators(&self, x: &[f64]) -> Result<CorrelatorTensor> {
        if x.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: x.len() });
        }
        let rho = x[0] * x[0] + x[1] * x[1];
        if rho == 0.0 {
            return Err(Error::Domain { point: x.to_vec(), reason: "origin".into() });
        }
        // c_111 and c_112; the others follow from the swap x1 <-> x2
        let c111 = |p: f64, _q: f64| -1.5 * p / rho + p.powi(3) / (rho * rho);
        let c112 = |p: f64, q: f64| -0.5 * q / rho + p * p * q / (rho * rho);
        let values = [c111(x[0], x[1]), c112(x[0], x[1]), c112(x[1], x[0]), c111(x[1], x[0])];
        Ok(CorrelatorTensor::from_unique(2, x.to_vec(), |i, j, k| real(values[i + j + k])))
    }
}

/// Closed-form frame of `Example2`: `H_1 = H_2 = 2 e^{-(u1+u2)}`.
#[derive(Debug, Clone)]
pub struct Example2Frame {
    metric: ConstantMetric,
}

impl Default for Example2Frame {
    fn default() -> Self {
        Example2Frame { metric: ConstantMetric::identity(2) }
    }
}

impl DiagonalMetricModel for Example2Frame {
    fn dim(&self) -> usize {
        2
    }

    fn metric(&self) -> &ConstantMetric {
        &self.metric
    }

    fn frame(&self, u: &[f64], order: usize) -> Result<FrameJets> {
        if u.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: u.len() });
        }
        let v = Jet::variables(u, order);
        let damp = (-(&v[0] + &v[1])).exp();
        let i = Complex64::new(0.0, 1.0);
        let theta = &v[0] - &v[1];
        let (ep, em) = ((&theta * i).exp(), (&theta * (-i)).exp());
        let cos = (&ep + &em).scale(0.5);
        let sin = (&ep - &em).scale(-0.5 * i);
        let x = vec![&damp * &(&cos + &sin), &damp * &(&cos - &sin)];
        let h = damp.scale(2.0);
        Ok(FrameJets { x, lame: vec![h.clone(), h] })
    }

    fn is_real(&self) -> bool {
        true
    }
}

/// A model addressable by name, with its parameters resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedModel {
    Example1(Example1),
    Example2(Example2),
}

impl NamedModel {
    pub const NAMES: [&'static str; 2] = ["example1", "example2"];

    /// Looks up `name` and reads its parameters (`a`, `c` for example1; `q`
    /// for example2). Unknown parameter names are rejected.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let check = |allowed: &[&str]| -> Result<()> {
            match params.keys().find(|k| !allowed.contains(&k.as_str())) {
                Some(k) => Err(Error::DegenerateParameters(format!("unknown parameter `{k}` for {name}"))),
                None => Ok(()),
            }
        };
        match name {
            "example1" => {
                check(&["a", "c"])?;
                let a = params.get("a").copied().unwrap_or(1.0);
                let c = params.get("c").copied().unwrap_or_else(printed_c);
                Ok(NamedModel::Example1(Example1::new(a, c)?))
            }
            "example2" => {
                check(&["q"])?;
                Ok(NamedModel::Example2(Example2::new(params.get("q").copied().unwrap_or(0.0))))
            }
            other => {
                Err(Error::InvalidSpectralData(format!("unknown model `{other}` (known: {})", Self::NAMES.join(", "))))
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NamedModel::Example1(_) => "example1",
            NamedModel::Example2(_) => "example2",
        }
    }

    pub fn parameters(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        match self {
            NamedModel::Example1(m) => {
                out.insert("a".to_string(), m.a.re);
                out.insert("c".to_string(), m.c.re);
                out.insert("r".to_string(), m.r.re);
                out.insert("beta".to_string(), m.beta.re);
            }
            NamedModel::Example2(m) => {
                out.insert("q".to_string(), m.q);
            }
        }
        out
    }

    pub fn spectral_data(&self) -> SpectralData {
        match self {
            NamedModel::Example1(m) => m.spectral_data(),
            NamedModel::Example2(m) => m.spectral_data(),
        }
    }

    pub fn curve_model(&self) -> Result<Arc<CurveModel>> {
        Ok(Arc::new(match self {
            NamedModel::Example1(m) => m.curve_model()?,
            NamedModel::Example2(m) => m.curve_model()?,
        }))
    }

    pub fn prepotential(&self) -> PrepotentialField {
        match self {
            NamedModel::Example1(m) => m.prepotential(),
            NamedModel::Example2(m) => m.prepotential(),
        }
    }

    pub fn quasihomogeneity(&self) -> QuasihomogeneityData {
        match self {
            NamedModel::Example1(m) => m.quasihomogeneity(),
            NamedModel::Example2(m) => m.quasihomogeneity(),
        }
    }

    pub fn metric(&self) -> ConstantMetric {
        ConstantMetric::identity(2)
    }
}
