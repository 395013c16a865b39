//! Rational differentials `scale * prod(z - zero) / prod(z - pole) dz` on the
//! components of a reducible curve, their residues, and the constant metric
//! read off from residues at the Q-points.

use num_complex::Complex64;

use crate::frobenius::ConstantMetric;
use crate::spectral::{same_coordinate, MarkedP, Point, SpectralData};
use crate::{Error, Result};

const RESIDUE_MATCH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RationalDifferential {
    pub component_id: usize,
    /// Zeros with multiplicity (repeated entries).
    pub zeros: Vec<Complex64>,
    /// Poles with multiplicity (repeated entries).
    pub poles: Vec<Complex64>,
    pub scale: Complex64,
}

impl RationalDifferential {
    /// Builds the differential, cancelling factors shared by numerator and
    /// denominator.
    pub fn new(component_id: usize, zeros: Vec<Complex64>, poles: Vec<Complex64>, scale: impl Into<Complex64>) -> Self {
        let mut zeros = zeros;
        let mut kept_poles = Vec::with_capacity(poles.len());
        for p in poles {
            if let Some(i) = zeros.iter().position(|&z| same_coordinate(z, p)) {
                zeros.swap_remove(i);
            } else {
                kept_poles.push(p);
            }
        }
        RationalDifferential { component_id, zeros, poles: kept_poles, scale: scale.into() }
    }

    pub fn scaled(&self, factor: impl Into<Complex64>) -> Self {
        let mut out = self.clone();
        out.scale *= factor.into();
        out
    }

    /// Coefficient of `dz` at a finite point.
    pub fn coefficient(&self, z: Complex64) -> Complex64 {
        let num: Complex64 = self.zeros.iter().map(|&w| z - w).product();
        let den: Complex64 = self.poles.iter().map(|&p| z - p).product();
        self.scale * num / den
    }

    /// Order of vanishing at infinity in the local coordinate `w = 1/z`.
    pub fn order_at_infinity(&self) -> i64 {
        self.poles.len() as i64 - self.zeros.len() as i64 - 2
    }

    /// Order of vanishing at `at` (negative for poles).
    pub fn order_at(&self, at: Point) -> i64 {
        match at {
            Point::Infinity => self.order_at_infinity(),
            Point::Finite(z) => {
                let zeros = self.zeros.iter().filter(|&&w| same_coordinate(w, z)).count() as i64;
                let poles = self.poles.iter().filter(|&&p| same_coordinate(p, z)).count() as i64;
                zeros - poles
            }
        }
    }

    /// Residue at a simple pole.
    pub fn residue(&self, at: Point) -> Result<Complex64> {
        let order = self.order_at(at);
        if order >= 0 {
            return Err(Error::NotAPole { component: self.component_id, at });
        }
        if order < -1 {
            return Err(Error::HigherOrderPole { component: self.component_id, at, order });
        }
        match at {
            // the coefficient behaves like scale / z, and dz = -dw / w^2
            Point::Infinity => Ok(-self.scale),
            Point::Finite(z) => {
                let num: Complex64 = self.zeros.iter().map(|&w| z - w).product();
                let den: Complex64 = self.poles.iter().filter(|&&p| !same_coordinate(p, z)).map(|&p| z - p).product();
                Ok(self.scale * num / den)
            }
        }
    }

    /// Distinct pole locations, including infinity when it is a pole.
    pub fn pole_points(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for &p in &self.poles {
            if !out.iter().any(|q| q.coincides(Point::Finite(p))) {
                out.push(Point::Finite(p));
            }
        }
        if self.order_at_infinity() < 0 {
            out.push(Point::Infinity);
        }
        out
    }

    /// Sum of all residues; zero for any rational differential with simple poles.
    pub fn residue_sum(&self) -> Result<Complex64> {
        self.pole_points().into_iter().map(|p| self.residue(p)).sum()
    }
}

/// `r` and `beta` making the two-sphere curve Euclidean:
/// `r = a / sqrt(2 - a^2/c^2)` and `beta = c^2 / r^2`, cross-checked against
/// the regularity relation `beta = (c^2 - a^2) / (a^2 - r^2)`.
pub fn euclidean_parameters(a: Complex64, c: Complex64) -> Result<(Complex64, Complex64)> {
    if c.norm() == 0.0 || a.norm() == 0.0 {
        return Err(Error::DegenerateParameters("a and c must be nonzero".into()));
    }
    let denom = 2.0 - a * a / (c * c);
    if denom.norm() <= 1e-14 {
        return Err(Error::DegenerateParameters(format!("a^2 = 2c^2 (a = {a}, c = {c}): r is undefined")));
    }
    let r = a / denom.sqrt();
    let beta = c * c / (r * r);
    let gap = a * a - r * r;
    if gap.norm() > 1e-12 * (a * a).norm() {
        let regular = (c * c - a * a) / gap;
        if (regular - beta).norm() > 1e-12 * beta.norm().max(1.0) {
            return Err(Error::DegenerateParameters(format!(
                "regularity gives beta = {regular}, Euclidean condition gives {beta}"
            )));
        }
    }
    Ok((r, beta))
}

/// Twice the value at `lambda = 0` of `d` pushed to `lambda = k^-2`, where
/// `k` is the local parameter at `p`.
pub fn epsilon_squared(d: &RationalDifferential, p: &MarkedP, involution: bool) -> Result<Complex64> {
    if !involution || !p.at.is_sigma_fixed() {
        return Err(Error::InvalidSpectralData(format!(
            "P_{} is not a fixed point of z -> -z; lambda = k^-2 is not a coordinate",
            p.index
        )));
    }
    let order = d.order_at(p.at);
    if order != 1 {
        return Err(Error::NotASimpleZero { component: d.component_id, at: p.at, order });
    }
    let w2 = p.weight * p.weight;
    match p.at {
        // d ~ scale / z^3, so in t = 1/z: -scale t dt = -scale w^2 dlambda / 2
        Point::Infinity => Ok(-d.scale * w2),
        Point::Finite(z0) => {
            let rest: Complex64 = {
                let mut skipped = false;
                d.zeros
                    .iter()
                    .filter(|&&w| {
                        if !skipped && same_coordinate(w, z0) {
                            skipped = true;
                            false
                        } else {
                            true
                        }
                    })
                    .map(|&w| z0 - w)
                    .product()
            };
            let den: Complex64 = d.poles.iter().map(|&q| z0 - q).product();
            Ok(d.scale * rest / den * w2)
        }
    }
}

/// Differentials with zeros `D + sigma D + P` and poles `R + sigma R + Q +
/// nodes` on every component; relative scales are fixed by residue
/// cancellation at nodes, starting from scale 1 on the first component.
pub fn regular_differential(data: &SpectralData) -> Result<Vec<RationalDifferential>> {
    let mut shapes = Vec::with_capacity(data.components.len());
    for (pos, c) in data.components.iter().enumerate() {
        let mut zeros = c.poles.clone();
        let mut poles = c.normalization.clone();
        if data.involution {
            zeros.extend(c.poles.iter().map(|z| -z));
            poles.extend(c.normalization.iter().map(|z| -z));
        }
        zeros.extend(c.p_points.iter().filter_map(|p| p.at.finite()));
        poles.extend(c.q_points.iter().filter_map(|q| q.at.finite()));
        poles.extend(data.nodes_on(pos));
        let d = RationalDifferential::new(c.id, zeros, poles, 1.0);

        let at_infinity_p = c.p_points.iter().any(|p| p.at == Point::Infinity);
        let at_infinity_q = c.q_points.iter().any(|q| q.at == Point::Infinity);
        let expected = match (at_infinity_p, at_infinity_q) {
            (true, false) => 1,
            (false, true) => -1,
            (false, false) => 0,
            (true, true) => {
                return Err(Error::InvalidSpectralData(format!("P and Q both at infinity on component {}", c.id)))
            }
        };
        if d.order_at_infinity() != expected {
            return Err(Error::DivisorDegree { component: c.id, degree: d.order_at_infinity() });
        }
        shapes.push(d);
    }

    let s = shapes.len();
    let mut scale: Vec<Option<Complex64>> = vec![None; s];
    if s == 0 {
        return Ok(shapes);
    }
    scale[0] = Some(Complex64::new(1.0, 0.0));
    let mut changed = true;
    while changed {
        changed = false;
        for node in &data.intersections {
            let (Some(a), Some(b)) = (data.position(node.component_a), data.position(node.component_b)) else {
                return Err(Error::InvalidSpectralData("node on unknown component".into()));
            };
            let ends = [(a, node.coord_a, b, node.coord_b), (b, node.coord_b, a, node.coord_a)];
            for (known, zk, unknown, zu) in ends {
                if let (Some(sk), None) = (scale[known], scale[unknown]) {
                    let rk = shapes[known].residue(Point::Finite(zk))? * sk;
                    let ru = shapes[unknown].residue(Point::Finite(zu))?;
                    scale[unknown] = Some(-rk / ru);
                    changed = true;
                }
            }
        }
    }
    shapes
        .into_iter()
        .zip(scale)
        .map(|(d, s)| {
            let s = s.ok_or_else(|| Error::InvalidSpectralData("curve is not connected".into()))?;
            Ok(d.scaled(s))
        })
        .collect()
}

fn differential_for<'a>(
    data: &SpectralData,
    diffs: &'a [RationalDifferential],
    pos: usize,
) -> Result<&'a RationalDifferential> {
    let id = data.components[pos].id;
    diffs
        .iter()
        .find(|d| d.component_id == id)
        .ok_or_else(|| Error::InvalidSpectralData(format!("no differential for component {id}")))
}

/// Largest `|res_{z_a} Omega_a + res_{z_b} Omega_b|` over nodes.
pub fn regularity_check(data: &SpectralData, diffs: &[RationalDifferential]) -> Result<f64> {
    for (pos, c) in data.components.iter().enumerate() {
        let d = differential_for(data, diffs, pos)?;
        let nodes = data.nodes_on(pos);
        for pole in d.pole_points() {
            let allowed = match pole {
                Point::Infinity => c.q_points.iter().any(|q| q.at == Point::Infinity),
                Point::Finite(z) => {
                    let hit = |w: &Complex64| same_coordinate(*w, z) || same_coordinate(-*w, z);
                    nodes.iter().any(hit)
                        || c.normalization.iter().any(hit)
                        || c.q_points.iter().any(|q| q.at.finite().is_some_and(|w| hit(&w)))
                }
            };
            if !allowed {
                return Err(Error::UnexpectedPole { component: c.id, at: pole });
            }
        }
    }
    let mut worst: f64 = 0.0;
    for node in &data.intersections {
        let a = data.position(node.component_a).ok_or(Error::InvalidSpectralData("unknown component".into()))?;
        let b = data.position(node.component_b).ok_or(Error::InvalidSpectralData("unknown component".into()))?;
        let ra = differential_for(data, diffs, a)?.residue(Point::Finite(node.coord_a))?;
        let rb = differential_for(data, diffs, b)?.residue(Point::Finite(node.coord_b))?;
        worst = worst.max((ra + rb).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricFromResidues {
    /// `eta[k][l] = delta_{k, sigma(l)} res_{Q_k} Omega`, after normalization.
    pub eta: Vec<Vec<Complex64>>,
    pub epsilon_sq: Vec<Complex64>,
    /// Factor `Omega` was divided by.
    pub normalization: Complex64,
    /// Residues of the unnormalized differential at `Q_0 .. Q_{n-1}`.
    pub residues_at_q: Vec<Complex64>,
}

impl MetricFromResidues {
    /// The metric as a real constant metric; fails when `eta` has an
    /// imaginary part.
    pub fn constant_metric(&self) -> Result<ConstantMetric> {
        let mut rows = Vec::with_capacity(self.eta.len());
        for row in &self.eta {
            let mut out = Vec::with_capacity(row.len());
            for v in row {
                if v.im.abs() > 1e-12 * v.norm().max(1.0) {
                    return Err(Error::NonEuclidean { residues: self.residues_at_q.clone() });
                }
                out.push(v.re);
            }
            rows.push(out);
        }
        ConstantMetric::new(rows)
    }
}

/// Metric from the residues of `diffs` at the Q-points, paired by the
/// involution. In Euclidean mode `Omega` is divided by the common residue so
/// that `eta` is the identity.
pub fn metric_from_residues(
    data: &SpectralData,
    diffs: &[RationalDifferential],
    euclidean: bool,
) -> Result<MetricFromResidues> {
    let n = data.n();
    let mut residues = Vec::with_capacity(n);
    let mut partner = Vec::with_capacity(n);
    for k in 0..n {
        let (pos, q) = data.q_point(k).ok_or_else(|| Error::InvalidSpectralData(format!("missing Q_{k}")))?;
        residues.push(differential_for(data, diffs, pos)?.residue(q.at)?);
        let image = if data.involution { q.at.sigma() } else { q.at };
        let sigma_k = data.components[pos]
            .q_points
            .iter()
            .find(|o| o.at.coincides(image))
            .map(|o| o.index)
            .ok_or(Error::InvalidSpectralData(format!("sigma(Q_{k}) is not a Q-point")))?;
        partner.push(sigma_k);
    }

    let normalization = if euclidean {
        let first = residues[0];
        let equal = residues.iter().all(|r| (r - first).norm() <= RESIDUE_MATCH * first.norm().max(1.0));
        let diagonal = partner.iter().enumerate().all(|(k, &s)| k == s);
        if !equal || !diagonal || first.norm() == 0.0 {
            return Err(Error::NonEuclidean { residues });
        }
        first
    } else {
        Complex64::new(1.0, 0.0)
    };

    let zero = Complex64::new(0.0, 0.0);
    let mut eta = vec![vec![zero; n]; n];
    for l in 0..n {
        let k = partner[l];
        eta[k][l] = residues[k] / normalization;
    }

    let mut epsilon_sq = Vec::with_capacity(n);
    for i in 0..n {
        let (pos, p) = data.p_point(i).ok_or_else(|| Error::InvalidSpectralData(format!("missing P_{i}")))?;
        let d = differential_for(data, diffs, pos)?.scaled(normalization.inv());
        epsilon_sq.push(epsilon_squared(&d, &p, data.involution)?);
    }

    Ok(MetricFromResidues { eta, epsilon_sq, normalization, residues_at_q: residues })
}
