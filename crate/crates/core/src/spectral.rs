//! Reducible rational spectral curves and their Baker–Akhiezer functions.
//!
//! Every component is a Riemann sphere with global coordinate `z`. On
//! component `j` the Baker–Akhiezer function has the form
//!
//! ```text
//! psi_j(u, z) = exp( sum_{P_i on j} u^i k_i(z) ) * ( f_j0 + sum_k f_jk / (z - gamma_k) )
//! ```
//!
//! where `k_i` is the local parameter of the essential singularity at `P_i`
//! and `gamma_k` are the pole-divisor points on the component. The unknown
//! coefficients `f_jk` are fixed by the normalization `psi(R) = 1` and by
//! gluing at every node; for a curve with the right divisor degree this is a
//! square linear system, solved here with jet-valued entries so derivatives in
//! `u` come for free.

use std::fmt;

use num_complex::Complex64;

use crate::jets::{solve_linear, Jet, JetError};
use crate::{Error, Result};

const COINCIDENCE: f64 = 1e-12;

/// A point on a component: a finite coordinate or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Finite(Complex64),
    Infinity,
}

impl Point {
    pub fn real(z: f64) -> Self {
        Point::Finite(Complex64::new(z, 0.0))
    }

    pub fn zero() -> Self {
        Point::real(0.0)
    }

    /// Image under the involution `z -> -z`.
    pub fn sigma(self) -> Self {
        match self {
            Point::Finite(z) => Point::Finite(-z),
            Point::Infinity => Point::Infinity,
        }
    }

    /// Fixed points of `z -> -z` are `0` and infinity.
    pub fn is_sigma_fixed(self) -> bool {
        self.coincides(self.sigma())
    }

    pub fn coincides(self, other: Point) -> bool {
        match (self, other) {
            (Point::Infinity, Point::Infinity) => true,
            (Point::Finite(a), Point::Finite(b)) => same_coordinate(a, b),
            _ => false,
        }
    }

    pub fn finite(self) -> Option<Complex64> {
        match self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(z) if z.im == 0.0 => write!(f, "z = {}", z.re),
            Point::Finite(z) => write!(f, "z = {z}"),
            Point::Infinity => write!(f, "z = inf"),
        }
    }
}

pub(crate) fn same_coordinate(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= COINCIDENCE * a.norm().max(b.norm()).max(1.0)
}

/// Essential-singularity point `P_index` with local parameter
/// `k = weight * z` (at infinity) or `k = weight / (z - p)` (at finite `p`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedP {
    pub index: usize,
    pub at: Point,
    pub weight: Complex64,
}

impl MarkedP {
    pub fn new(index: usize, at: Point, weight: impl Into<Complex64>) -> Self {
        MarkedP { index, at, weight: weight.into() }
    }

    /// Value of the local parameter `k` at `z`; `None` at `P` itself.
    pub fn local_parameter(&self, z: Point) -> Option<Complex64> {
        match (self.at, z) {
            (Point::Infinity, Point::Finite(z)) => Some(self.weight * z),
            (Point::Infinity, Point::Infinity) => None,
            (Point::Finite(_), Point::Infinity) => Some(Complex64::new(0.0, 0.0)),
            (Point::Finite(p), Point::Finite(z)) => {
                if same_coordinate(p, z) {
                    None
                } else {
                    Some(self.weight / (z - p))
                }
            }
        }
    }
}

/// Flat-coordinate point `Q_index`; `x^index = psi(Q_index)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedQ {
    pub index: usize,
    pub at: Point,
}

impl MarkedQ {
    pub fn new(index: usize, at: Point) -> Self {
        MarkedQ { index, at }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveComponent {
    pub id: usize,
    /// Points of the pole divisor `D` on this component.
    pub poles: Vec<Complex64>,
    pub p_points: Vec<MarkedP>,
    pub q_points: Vec<MarkedQ>,
    /// Normalization points `R` on this component.
    pub normalization: Vec<Complex64>,
}

impl CurveComponent {
    pub fn new(id: usize) -> Self {
        CurveComponent { id, poles: Vec::new(), p_points: Vec::new(), q_points: Vec::new(), normalization: Vec::new() }
    }

    pub fn with_pole(mut self, z: impl Into<Complex64>) -> Self {
        self.poles.push(z.into());
        self
    }

    pub fn with_p(mut self, p: MarkedP) -> Self {
        self.p_points.push(p);
        self
    }

    pub fn with_q(mut self, q: MarkedQ) -> Self {
        self.q_points.push(q);
        self
    }

    pub fn with_normalization(mut self, r: impl Into<Complex64>) -> Self {
        self.normalization.push(r.into());
        self
    }
}

/// A node identifying `coord_a` on one component with `coord_b` on another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectionPoint {
    pub component_a: usize,
    pub coord_a: Complex64,
    pub component_b: usize,
    pub coord_b: Complex64,
}

impl IntersectionPoint {
    pub fn new(
        component_a: usize,
        coord_a: impl Into<Complex64>,
        component_b: usize,
        coord_b: impl Into<Complex64>,
    ) -> Self {
        IntersectionPoint { component_a, coord_a: coord_a.into(), component_b, coord_b: coord_b.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub components: Vec<CurveComponent>,
    pub intersections: Vec<IntersectionPoint>,
    /// The curve carries the holomorphic involution `z -> -z` on every component.
    pub involution: bool,
    /// Parameters are chosen so that squared node, pole and normalization
    /// coordinates are real; outputs must then be real for real `u`.
    pub reality: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateComponentId(usize),
    UnknownComponent(usize),
    SelfIntersection { component: usize },
    NodeAtInfinityOrZero { component: usize },
    Disconnected,
    MissingNormalization,
    PoleDegree { expected: i64, found: usize },
    MarkedCount { p: usize, q: usize },
    BadIndex { kind: &'static str, index: usize },
    Collision { component: usize, at: Point, first: &'static str, second: &'static str },
    IntersectionsNotSymmetric { component: usize, at: Complex64 },
    PNotFixed { index: usize },
    QNotInvariant { index: usize },
    UnmarkedFixedPoint { component: usize, at: Point },
    TooManyFixedPoints { fixed: usize, n: usize },
    NotReal { what: &'static str, component: usize, value: Complex64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateComponentId(id) => write!(f, "duplicate component id {id}"),
            Violation::UnknownComponent(id) => write!(f, "intersection references unknown component {id}"),
            Violation::SelfIntersection { component } => {
                write!(f, "component {component} intersects itself")
            }
            Violation::NodeAtInfinityOrZero { component } => {
                write!(f, "node on component {component} sits at a fixed point of the involution")
            }
            Violation::Disconnected => write!(f, "curve is not connected"),
            Violation::MissingNormalization => write!(f, "no normalization point"),
            Violation::PoleDegree { expected, found } => {
                write!(f, "degree mismatch: pole divisor has degree {found}, expected g_a + l - 1 = {expected}")
            }
            Violation::MarkedCount { p, q } => write!(f, "{p} P-points but {q} Q-points"),
            Violation::BadIndex { kind, index } => {
                write!(f, "{kind}-point indices must be 0..n exactly once (offending index {index})")
            }
            Violation::Collision { component, at, first, second } => {
                write!(f, "{first} and {second} coincide at {at} on component {component}")
            }
            Violation::IntersectionsNotSymmetric { component, at } => {
                write!(f, "involution does not map the node at z = {at} on component {component} to a node")
            }
            Violation::PNotFixed { index } => {
                write!(f, "condition 1: P_{index} is not a fixed point of the involution")
            }
            Violation::QNotInvariant { index } => {
                write!(f, "condition 2: sigma(Q_{index}) is not a Q-point")
            }
            Violation::UnmarkedFixedPoint { component, at } => {
                write!(f, "condition 1: fixed point {at} on component {component} is neither a P- nor a Q-point")
            }
            Violation::TooManyFixedPoints { fixed, n } => {
                write!(f, "condition 1: {fixed} fixed points exceed 2n = {}", 2 * n)
            }
            Violation::NotReal { what, component, value } => {
                write!(f, "reality: squared {what} coordinate {value} on component {component} is not real")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub arithmetic_genus: i64,
    pub pole_degree: usize,
    pub expected_pole_degree: i64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl SpectralData {
    /// Number of flat coordinates (= number of P-points).
    pub fn n(&self) -> usize {
        self.components.iter().map(|c| c.p_points.len()).sum()
    }

    /// Number of normalization points.
    pub fn l(&self) -> usize {
        self.components.iter().map(|c| c.normalization.len()).sum()
    }

    pub fn arithmetic_genus(&self) -> i64 {
        self.intersections.len() as i64 - self.components.len() as i64 + 1
    }

    pub fn position(&self, id: usize) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    fn position_or_err(&self, id: usize) -> Result<usize> {
        self.position(id).ok_or_else(|| Error::InvalidSpectralData(format!("unknown component {id}")))
    }

    /// Component position and marked point of `P_index`.
    pub fn p_point(&self, index: usize) -> Option<(usize, MarkedP)> {
        self.components
            .iter()
            .enumerate()
            .find_map(|(pos, c)| c.p_points.iter().find(|p| p.index == index).map(|p| (pos, *p)))
    }

    /// Component position and marked point of `Q_index`.
    pub fn q_point(&self, index: usize) -> Option<(usize, MarkedQ)> {
        self.components
            .iter()
            .enumerate()
            .find_map(|(pos, c)| c.q_points.iter().find(|q| q.index == index).map(|q| (pos, *q)))
    }

    /// Node coordinates lying on the component at `pos`.
    pub fn nodes_on(&self, pos: usize) -> Vec<Complex64> {
        let id = self.components[pos].id;
        let mut out = Vec::new();
        for node in &self.intersections {
            if node.component_a == id {
                out.push(node.coord_a);
            }
            if node.component_b == id {
                out.push(node.coord_b);
            }
        }
        out
    }

    /// Checks divisor counts, disjointness of marked data and the involution
    /// conditions.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let s = self.components.len();

        for (i, c) in self.components.iter().enumerate() {
            if self.components[..i].iter().any(|o| o.id == c.id) {
                violations.push(Violation::DuplicateComponentId(c.id));
            }
        }

        // connectivity by union-find over component positions
        let mut parent: Vec<usize> = (0..s).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for node in &self.intersections {
            let (a, b) = (self.position(node.component_a), self.position(node.component_b));
            match (a, b) {
                (Some(a), Some(b)) => {
                    if a == b {
                        violations.push(Violation::SelfIntersection { component: node.component_a });
                    }
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
                _ => {
                    let missing = if a.is_none() { node.component_a } else { node.component_b };
                    violations.push(Violation::UnknownComponent(missing));
                }
            }
        }
        if s > 0 {
            let root = find(&mut parent, 0);
            if (1..s).any(|i| find(&mut parent, i) != root) {
                violations.push(Violation::Disconnected);
            }
        }

        let genus = self.arithmetic_genus();
        let l = self.l();
        if l == 0 {
            violations.push(Violation::MissingNormalization);
        }
        let pole_degree: usize = self.components.iter().map(|c| c.poles.len()).sum();
        let expected = genus + l as i64 - 1;
        if pole_degree as i64 != expected {
            violations.push(Violation::PoleDegree { expected, found: pole_degree });
        }

        let n = self.n();
        let q_count: usize = self.components.iter().map(|c| c.q_points.len()).sum();
        if q_count != n {
            violations.push(Violation::MarkedCount { p: n, q: q_count });
        }
        for (kind, indices) in [
            ("P", self.components.iter().flat_map(|c| c.p_points.iter().map(|p| p.index)).collect::<Vec<_>>()),
            ("Q", self.components.iter().flat_map(|c| c.q_points.iter().map(|q| q.index)).collect()),
        ] {
            let mut seen = vec![false; indices.len()];
            for idx in indices {
                if idx >= seen.len() || seen[idx] {
                    violations.push(Violation::BadIndex { kind, index: idx });
                } else {
                    seen[idx] = true;
                }
            }
        }

        for (pos, c) in self.components.iter().enumerate() {
            let mut marked: Vec<(Point, &'static str)> = Vec::new();
            marked.extend(c.p_points.iter().map(|p| (p.at, "P")));
            marked.extend(c.q_points.iter().map(|q| (q.at, "Q")));
            marked.extend(c.normalization.iter().map(|&r| (Point::Finite(r), "R")));
            marked.extend(c.poles.iter().map(|&g| (Point::Finite(g), "D")));
            marked.extend(self.nodes_on(pos).into_iter().map(|z| (Point::Finite(z), "node")));
            for i in 0..marked.len() {
                for j in 0..i {
                    if marked[i].0.coincides(marked[j].0) {
                        violations.push(Violation::Collision {
                            component: c.id,
                            at: marked[i].0,
                            first: marked[j].1,
                            second: marked[i].1,
                        });
                    }
                }
            }
        }

        if self.involution {
            self.validate_involution(&mut violations);
        }
        if self.reality {
            for c in &self.components {
                let pos = self.position(c.id).unwrap_or(0);
                let squares = c
                    .poles
                    .iter()
                    .map(|&z| ("pole", z))
                    .chain(c.normalization.iter().map(|&z| ("normalization", z)))
                    .chain(self.nodes_on(pos).into_iter().map(|z| ("node", z)));
                for (what, z) in squares {
                    let sq = z * z;
                    if sq.im.abs() > 1e-12 * sq.norm().max(1.0) {
                        violations.push(Violation::NotReal { what, component: c.id, value: sq });
                    }
                }
            }
        }

        ValidationReport { arithmetic_genus: genus, pole_degree, expected_pole_degree: expected, violations }
    }

    fn validate_involution(&self, violations: &mut Vec<Violation>) {
        for node in &self.intersections {
            let image = self.intersections.iter().any(|m| {
                m.component_a == node.component_a
                    && m.component_b == node.component_b
                    && same_coordinate(m.coord_a, -node.coord_a)
                    && same_coordinate(m.coord_b, -node.coord_b)
            });
            if !image {
                violations.push(Violation::IntersectionsNotSymmetric { component: node.component_a, at: node.coord_a });
            }
            for (id, z) in [(node.component_a, node.coord_a), (node.component_b, node.coord_b)] {
                if Point::Finite(z).is_sigma_fixed() {
                    violations.push(Violation::NodeAtInfinityOrZero { component: id });
                }
            }
        }
        let mut fixed = 0;
        for c in &self.components {
            for p in &c.p_points {
                if !p.at.is_sigma_fixed() {
                    violations.push(Violation::PNotFixed { index: p.index });
                }
            }
            for q in &c.q_points {
                let image = q.at.sigma();
                if !c.q_points.iter().any(|o| o.at.coincides(image)) {
                    violations.push(Violation::QNotInvariant { index: q.index });
                }
            }
            for at in [Point::zero(), Point::Infinity] {
                let marked =
                    c.p_points.iter().any(|p| p.at.coincides(at)) || c.q_points.iter().any(|q| q.at.coincides(at));
                if marked {
                    fixed += 1;
                } else {
                    violations.push(Violation::UnmarkedFixedPoint { component: c.id, at });
                }
            }
        }
        if fixed > 2 * self.n() {
            violations.push(Violation::TooManyFixedPoints { fixed, n: self.n() });
        }
    }

    /// The normalization coordinate `r` when the data satisfy the hypotheses
    /// of the translation law: one component per direction, `P_i` at infinity
    /// with `k_i = z`, `Q_i = 0`, equal node coordinates on both sides and a
    /// single normalization point.
    pub fn translation_rate(&self) -> Result<Complex64> {
        let fail = |msg: &str| Err(Error::NotTranslationCovariant(msg.to_string()));
        if self.l() != 1 {
            return fail("exactly one normalization point required");
        }
        if self.components.len() != self.n() {
            return fail("one component per flat coordinate required");
        }
        for c in &self.components {
            let [p] = c.p_points.as_slice() else {
                return fail("each component must carry exactly one P-point");
            };
            if p.at != Point::Infinity || p.weight != Complex64::new(1.0, 0.0) {
                return fail("P-points must sit at infinity with local parameter k = z");
            }
            if !c.q_points.iter().any(|q| q.index == p.index && q.at.coincides(Point::zero())) {
                return fail("Q_i must sit at z = 0 on the component of P_i");
            }
        }
        if self.intersections.iter().any(|n| !same_coordinate(n.coord_a, n.coord_b)) {
            return fail("nodes must have equal coordinates on both components");
        }
        let r = self
            .components
            .iter()
            .flat_map(|c| c.normalization.iter())
            .next()
            .copied()
            .expect("one normalization point");
        Ok(r)
    }
}

/// Location of an unknown coefficient `f_jk` in the linear system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unknown {
    pub component: usize,
    /// `None` for the constant term `f_j0`, otherwise the index into the
    /// component's pole list.
    pub pole: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct BakerAkhiezerSystem {
    pub matrix: Vec<Vec<Jet>>,
    pub rhs: Vec<Jet>,
    pub unknowns: Vec<Unknown>,
}

/// Exponential prefactor of `psi_j` at `z`, as a jet in `u`.
fn essential_factor(component: &CurveComponent, z: Point, vars: &[Jet]) -> Result<Jet> {
    let template = &vars[0];
    let mut exponent = Jet::zero(template.num_vars(), template.order());
    for p in &component.p_points {
        let k = p.local_parameter(z).ok_or_else(|| {
            Error::InvalidSpectralData(format!(
                "psi evaluated at its essential singularity P_{} on component {}",
                p.index, component.id
            ))
        })?;
        exponent += &(&vars[p.index] * k);
    }
    Ok(exponent.exp())
}

/// Multipliers of the component's unknowns in `psi_j(z)`, in unknown order.
fn ansatz_row(component: &CurveComponent, z: Point, vars: &[Jet]) -> Result<Vec<Jet>> {
    let factor = essential_factor(component, z, vars)?;
    let mut row = vec![factor.clone()];
    for &gamma in &component.poles {
        match z {
            Point::Infinity => row.push(factor.scale(0.0)),
            Point::Finite(z) => {
                if same_coordinate(z, gamma) {
                    return Err(Error::PoleCollision { component: component.id, z });
                }
                row.push(factor.scale((z - gamma).inv()));
            }
        }
    }
    Ok(row)
}

fn check_u(data: &SpectralData, u: &[f64]) -> Result<()> {
    if u.len() != data.n() || data.n() == 0 {
        return Err(Error::DimensionMismatch { expected: data.n(), got: u.len() });
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain { point: u.to_vec(), reason: "non-finite coordinate".into() });
    }
    Ok(())
}

/// One row per normalization point (`psi(r) = 1`) followed by one row per
/// node (`psi_a(z_a) - psi_b(z_b) = 0`); the unknowns are all `f_jk`.
pub fn assemble_system(data: &SpectralData, u: &[f64], order: usize) -> Result<BakerAkhiezerSystem> {
    check_u(data, u)?;
    let vars = Jet::variables(u, order);
    let n = u.len();

    let mut unknowns = Vec::new();
    let mut offsets = Vec::new();
    for (pos, c) in data.components.iter().enumerate() {
        offsets.push(unknowns.len());
        unknowns.push(Unknown { component: pos, pole: None });
        unknowns.extend((0..c.poles.len()).map(|k| Unknown { component: pos, pole: Some(k) }));
    }
    let size = unknowns.len();
    let zero = Jet::zero(n, order);

    let mut matrix = Vec::new();
    let mut rhs = Vec::new();
    for (pos, c) in data.components.iter().enumerate() {
        for &r in &c.normalization {
            let mut row = vec![zero.clone(); size];
            for (k, jet) in ansatz_row(c, Point::Finite(r), &vars)?.into_iter().enumerate() {
                row[offsets[pos] + k] = jet;
            }
            matrix.push(row);
            rhs.push(Jet::constant(1.0, n, order));
        }
    }
    for node in &data.intersections {
        let a = data.position_or_err(node.component_a)?;
        let b = data.position_or_err(node.component_b)?;
        let mut row = vec![zero.clone(); size];
        for (k, jet) in ansatz_row(&data.components[a], Point::Finite(node.coord_a), &vars)?.into_iter().enumerate() {
            row[offsets[a] + k] = jet;
        }
        for (k, jet) in ansatz_row(&data.components[b], Point::Finite(node.coord_b), &vars)?.into_iter().enumerate() {
            row[offsets[b] + k] = &row[offsets[b] + k] - &jet;
        }
        matrix.push(row);
        rhs.push(zero.clone());
    }
    if matrix.len() != size {
        return Err(Error::InvalidSpectralData(format!(
            "{} conditions for {size} unknowns; the pole divisor degree must be g_a + l - 1",
            matrix.len()
        )));
    }
    Ok(BakerAkhiezerSystem { matrix, rhs, unknowns })
}

/// Solved Baker–Akhiezer function at `u`, with jets in `u`.
#[derive(Debug, Clone)]
pub struct BakerAkhiezerEvaluation {
    pub u: Vec<f64>,
    /// Per component: `f_j0` followed by the pole coefficients.
    pub coefficients: Vec<Vec<Jet>>,
    /// Flat coordinates `x^j = psi(Q_j)`.
    pub x: Vec<Jet>,
    /// Leading coefficients `h_i` of `psi exp(-u^i k_i)` at `P_i`.
    pub h: Vec<Jet>,
}

impl BakerAkhiezerEvaluation {
    fn regular_part(&self, data: &SpectralData, pos: usize, z: Point) -> Result<Jet> {
        let c = &data.components[pos];
        let coeffs = &self.coefficients[pos];
        let mut acc = coeffs[0].clone();
        if let Point::Finite(z) = z {
            for (k, &gamma) in c.poles.iter().enumerate() {
                if same_coordinate(z, gamma) {
                    return Err(Error::PoleCollision { component: c.id, z });
                }
                acc += &coeffs[k + 1].scale((z - gamma).inv());
            }
        }
        Ok(acc)
    }

    /// `psi` on the component at position `pos`, evaluated at `z`.
    pub fn psi(&self, data: &SpectralData, pos: usize, z: Point) -> Result<Jet> {
        let vars = Jet::variables(&self.u, self.coefficients[0][0].order());
        let factor = essential_factor(&data.components[pos], z, &vars)?;
        Ok(&factor * &self.regular_part(data, pos, z)?)
    }

    /// Largest coefficient deviation of `psi(R)` from 1.
    pub fn normalization_residual(&self, data: &SpectralData) -> Result<f64> {
        let one = Jet::constant(1.0, self.u.len(), self.coefficients[0][0].order());
        let mut worst: f64 = 0.0;
        for (pos, c) in data.components.iter().enumerate() {
            for &r in &c.normalization {
                worst = worst.max(self.psi(data, pos, Point::Finite(r))?.max_abs_diff(&one));
            }
        }
        Ok(worst)
    }

    /// Largest coefficient mismatch of `psi` across the nodes.
    pub fn gluing_residual(&self, data: &SpectralData) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for node in &data.intersections {
            let a = data.position_or_err(node.component_a)?;
            let b = data.position_or_err(node.component_b)?;
            let left = self.psi(data, a, Point::Finite(node.coord_a))?;
            let right = self.psi(data, b, Point::Finite(node.coord_b))?;
            worst = worst.max(left.max_abs_diff(&right));
        }
        Ok(worst)
    }

    /// Constant terms of the flat coordinates.
    pub fn x_values(&self) -> Vec<Complex64> {
        self.x.iter().map(Jet::value).collect()
    }
}

/// Solves the Baker–Akhiezer system at `u` and reads off `x^j` and `h_i`.
pub fn solve_ba(data: &SpectralData, u: &[f64], order: usize) -> Result<BakerAkhiezerEvaluation> {
    let system = assemble_system(data, u, order)?;
    let solution = solve_linear(&system.matrix, &system.rhs).map_err(|e| match e {
        JetError::Singular { condition } => Error::SingularSystem { u: u.to_vec(), condition },
        other => other.into(),
    })?;

    let mut coefficients: Vec<Vec<Jet>> = data.components.iter().map(|_| Vec::new()).collect();
    for (unknown, jet) in system.unknowns.iter().zip(solution) {
        coefficients[unknown.component].push(jet);
    }
    let mut eval = BakerAkhiezerEvaluation { u: u.to_vec(), coefficients, x: Vec::new(), h: Vec::new() };

    let n = data.n();
    let vars = Jet::variables(u, order);
    let mut x = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(n);
    for idx in 0..n {
        let (qpos, q) = data.q_point(idx).ok_or_else(|| Error::InvalidSpectralData(format!("missing Q_{idx}")))?;
        x.push(eval.psi(data, qpos, q.at)?);

        let (ppos, p) = data.p_point(idx).ok_or_else(|| Error::InvalidSpectralData(format!("missing P_{idx}")))?;
        let comp = &data.components[ppos];
        let mut exponent = Jet::zero(n, order);
        for other in comp.p_points.iter().filter(|o| o.index != idx) {
            let k = other
                .local_parameter(p.at)
                .ok_or_else(|| Error::InvalidSpectralData(format!("P_{} and P_{idx} coincide", other.index)))?;
            exponent += &(&vars[other.index] * k);
        }
        h.push(&exponent.exp() * &eval.regular_part(data, ppos, p.at)?);
    }
    eval.x = x;
    eval.h = h;
    Ok(eval)
}

/// `max_j |x^j(u + mu (1,..,1)) - exp(-r mu) x^j(u)|`, coefficient-wise.
pub fn translation_covariance_check(data: &SpectralData, u: &[f64], mu: f64) -> Result<f64> {
    let r = data.translation_rate()?;
    let shifted: Vec<f64> = u.iter().map(|v| v + mu).collect();
    let base = solve_ba(data, u, 1)?;
    let moved = solve_ba(data, &shifted, 1)?;
    let factor = (-r * mu).exp();
    Ok(base.x.iter().zip(&moved.x).map(|(b, m)| m.max_abs_diff(&b.scale(factor))).fold(0.0, f64::max))
}
