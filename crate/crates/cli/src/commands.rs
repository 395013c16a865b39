//! The four verbs. Sample points are drawn from a seeded ChaCha8 stream,
//! evaluated in parallel, and reduced in sample order.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use wdvv_core::differentials::{metric_from_residues, regular_differential, regularity_check};
use wdvv_core::egoroff::{evaluate, CurveModel};
use wdvv_core::extend::{extend_prepotential, verify_extension};
use wdvv_core::frobenius::{
    associativity_residual, correlator_scaling_check, euler_check, third_derivative_tensor, CorrelatorSource,
};
use wdvv_core::models::example1_flat_coords;
use wdvv_core::spectral::{solve_ba, SpectralData};
use wdvv_core::{
    Complex64, DiagonalMetricModel, Example1, Example2, MetricCorrelators, NamedModel, PrepotentialField,
    QuasihomogeneityData,
};

use crate::config::{ResolvedModel, RunConfig, SourceKind, Tolerances};
use crate::report::{Check, Provenance, Report};
use crate::CliError;

const SCALING_FACTORS: [f64; 3] = [0.5, 2.0, 3.0];
const TRANSLATION_STEP: f64 = 0.25;

type Residuals = Vec<(&'static str, Result<f64, String>)>;
type CoordinateFn = fn(&[f64]) -> [f64; 2];

fn provenance(cfg: &RunConfig, model: &ResolvedModel) -> Provenance {
    Provenance {
        parameters: model.named.map(|m| m.parameters()).unwrap_or_default(),
        seed: cfg.sample.seed,
        samples: cfg.sample.count,
        tolerances: cfg.tolerances.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn sample_box(rng: &mut ChaCha8Rng, lo: &[f64], hi: &[f64], count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| lo.iter().zip(hi).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect()).collect()
}

fn tolerance_for(name: &str, t: &Tolerances) -> f64 {
    match name {
        "reality" => t.reality,
        n if n.starts_with("oracle.") || n.starts_with("coordinates.") => t.oracle,
        _ => t.residual,
    }
}

/// Worst residual per check name over all samples. A check that errored at
/// any sample fails and reports the first error.
fn reduce(points: &[Vec<f64>], rows: Vec<Residuals>, tol: &Tolerances) -> Vec<Check> {
    let mut acc: BTreeMap<&'static str, (f64, Option<String>)> = BTreeMap::new();
    for (u, row) in points.iter().zip(rows) {
        for (name, value) in row {
            let slot = acc.entry(name).or_insert((0.0, None));
            match value {
                Ok(v) => slot.0 = if v.is_nan() { f64::NAN } else { slot.0.max(v) },
                Err(e) if slot.1.is_none() => slot.1 = Some(format!("at {u:?}: {e}")),
                Err(_) => {}
            }
        }
    }
    acc.into_iter()
        .map(|(name, (worst, err))| {
            let tolerance = tolerance_for(name, tol);
            match err {
                Some(e) => Check::failed(name, tolerance, points.to_vec(), e),
                None => Check::new(name, worst, tolerance, points.to_vec()),
            }
        })
        .collect()
}

fn real_point(x: &[Complex64]) -> Vec<f64> {
    x.iter().map(|z| z.re).collect()
}

fn relative(got: &[f64], want: &[f64]) -> f64 {
    got.iter().zip(want).map(|(g, w)| (g - w).abs() / w.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max)
}

/// Prepotential whose third derivatives the curve's metric produces, and the
/// prepotential family the model names.
fn prepotentials(named: NamedModel) -> (PrepotentialField, PrepotentialField) {
    match named {
        NamedModel::Example1(m) => (m.prepotential(), m.prepotential()),
        NamedModel::Example2(m) => (Example2::new(0.0).prepotential(), m.prepotential()),
    }
}

/// Rate `r` in `x(u + mu) = e^{-r mu} x(u)`, if the model has one.
fn translation_rate(model: &ResolvedModel) -> Option<Complex64> {
    match (model.data.translation_rate(), model.named) {
        (Ok(r), _) => Some(r),
        (Err(_), Some(NamedModel::Example2(_))) => Some(Complex64::new(2.0, 0.0)),
        _ => None,
    }
}

fn closed_form_coords(named: Option<NamedModel>) -> Option<CoordinateFn> {
    match named {
        Some(NamedModel::Example1(m)) if m == Example1::printed() => Some(example1_flat_coords),
        Some(NamedModel::Example2(_)) => Some(Example2::flat_coords),
        _ => None,
    }
}

struct VerifyContext {
    data: SpectralData,
    curve: Arc<CurveModel>,
    oracle: Option<PrepotentialField>,
    family: Option<(PrepotentialField, QuasihomogeneityData)>,
    rate: Option<Complex64>,
    closed_form: Option<CoordinateFn>,
}

fn err_str<T>(r: wdvv_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn verify_sample(ctx: &VerifyContext, u: &[f64]) -> Residuals {
    let mut out: Residuals = Vec::new();
    let mut imag: Result<f64, String> = Ok(0.0);
    let mut note_imag = |v: Result<f64, String>| {
        imag = match (imag.clone(), v) {
            (Ok(a), Ok(b)) => Ok(a.max(b)),
            (Err(e), _) | (_, Err(e)) => Err(e),
        }
    };

    match err_str(solve_ba(&ctx.data, u, 1)) {
        Ok(ba) => {
            out.push(("ba.gluing", err_str(ba.gluing_residual(&ctx.data))));
            out.push(("ba.normalization", err_str(ba.normalization_residual(&ctx.data))));
            note_imag(Ok(ba.x.iter().chain(&ba.h).map(|j| j.value().im.abs()).fold(0.0, f64::max)));
            if let Some(closed) = ctx.closed_form {
                out.push(("coordinates.closed_form", Ok(relative(&real_point(&ba.x_values()), &closed(u)))));
            }
        }
        Err(e) => {
            out.push(("ba.gluing", Err(e.clone())));
            out.push(("ba.normalization", Err(e)));
        }
    }

    if let Some(rate) = ctx.rate {
        let shifted: Vec<f64> = u.iter().map(|v| v + TRANSLATION_STEP).collect();
        let moved = err_str(solve_ba(&ctx.data, u, 0)).and_then(|base| {
            let next = err_str(solve_ba(&ctx.data, &shifted, 0))?;
            let factor = (-rate * TRANSLATION_STEP).exp();
            Ok(base.x_values().iter().zip(next.x_values()).map(|(b, m)| (m - b * factor).norm()).fold(0.0, f64::max))
        });
        out.push(("homogeneity.translation", moved));
    }

    match err_str(evaluate(ctx.curve.as_ref(), u)) {
        Ok(e) => {
            let metric = ctx.curve.metric();
            out.push(("egoroff.symmetry", err_str(e.symmetry_residual())));
            let flat = e.flatness(metric);
            out.push(("flatness.off_diagonal", Ok(flat.off_diagonal)));
            out.push(("flatness.diagonal", Ok(flat.diagonal_relative)));
            let c = e.correlators();
            note_imag(Ok(e.max_imag().max(c.max_imag())));
            out.push(("associativity.metric", err_str(associativity_residual(&c, metric))));
            let x = real_point(&e.x);
            if let Some(f) = &ctx.oracle {
                let diff = err_str(third_derivative_tensor(f, &x)).map(|t| t.max_abs_diff(&c));
                out.push(("oracle.prepotential", diff));
            }
            if let Some((f, q)) = &ctx.family {
                let tensor = err_str(third_derivative_tensor(f, &x));
                out.push((
                    "associativity.prepotential",
                    tensor.and_then(|t| err_str(associativity_residual(&t, metric))),
                ));
                let scaling = SCALING_FACTORS
                    .iter()
                    .try_fold(0.0f64, |acc, &l| Ok(acc.max(err_str(correlator_scaling_check(f, &x, l))?)));
                out.push(("homogeneity.scaling", scaling));
                out.push(("quasihomogeneity.euler", err_str(euler_check(f, q, &x))));
            }
        }
        Err(err) => {
            for name in ["egoroff.symmetry", "flatness.off_diagonal", "flatness.diagonal", "associativity.metric"] {
                out.push((name, Err(err.clone())));
            }
        }
    }

    if ctx.data.reality {
        out.push(("reality", imag));
    }
    out
}

/// Residue checks that do not depend on `u`: node regularity, residue sums
/// per component and, in Euclidean mode, equality of the residues at `Q`.
fn residue_checks(data: &SpectralData, euclidean: bool, tol: &Tolerances) -> Vec<Check> {
    let t = tol.residual;
    let diffs = match regular_differential(data) {
        Ok(d) => d,
        Err(e) => return vec![Check::failed("residues.construction", t, vec![], e.to_string())],
    };
    let mut checks = Vec::new();
    checks.push(match regularity_check(data, &diffs) {
        Ok(r) => Check::new("residues.regularity", r, t, vec![]),
        Err(e) => Check::failed("residues.regularity", t, vec![], e.to_string()),
    });
    let sums: wdvv_core::Result<f64> =
        diffs.iter().try_fold(0.0f64, |acc, d| Ok(acc.max(d.residue_sum()?.norm() / d.scale.norm().max(1.0))));
    checks.push(match sums {
        Ok(r) => Check::new("residues.sum", r, t, vec![]),
        Err(e) => Check::failed("residues.sum", t, vec![], e.to_string()),
    });
    if euclidean {
        checks.push(match metric_from_residues(data, &diffs, true) {
            Ok(m) => {
                let first = m.residues_at_q[0];
                let spread = m.residues_at_q.iter().map(|r| (r - first).norm() / first.norm()).fold(0.0, f64::max);
                Check::new("residues.euclidean", spread, t, vec![])
                    .with_detail("residues_at_q", format_complex(&m.residues_at_q))
                    .with_detail("epsilon_sq", format_complex(&m.epsilon_sq))
            }
            Err(e) => Check::failed("residues.euclidean", t, vec![], e.to_string()),
        });
    }
    checks
}

fn format_complex(values: &[Complex64]) -> String {
    let parts: Vec<String> =
        values.iter().map(|z| if z.im == 0.0 { format!("{}", z.re) } else { format!("{}{:+}i", z.re, z.im) }).collect();
    format!("[{}]", parts.join(", "))
}

fn format_reals(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// Full residual suite for the configured model at `sample.count` random `u`.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let model = cfg.resolve_model()?;
    let curve = model.curve_model()?;
    let n = model.dim();
    let (lo, hi) = cfg.u_box(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sample.seed);
    let points = sample_box(&mut rng, &lo, &hi, cfg.sample.count);

    let ctx = VerifyContext {
        data: model.data.clone(),
        curve,
        oracle: model.named.map(|m| prepotentials(m).0),
        family: model.named.map(|m| (prepotentials(m).1, m.quasihomogeneity())),
        rate: translation_rate(&model),
        closed_form: closed_form_coords(model.named),
    };
    let rows: Vec<Residuals> = points.par_iter().map(|u| verify_sample(&ctx, u)).collect();
    let mut checks = reduce(&points, rows, &cfg.tolerances);
    checks.extend(residue_checks(&model.data, model.euclidean, &cfg.tolerances));
    Ok(Report::new("verify", &model.label, checks, provenance(cfg, &model)))
}

/// Exponents for `extend`: the model's own unless overridden in `[model]`.
fn extension_exponents(cfg: &RunConfig, base: QuasihomogeneityData) -> Result<QuasihomogeneityData, CliError> {
    let exponents = match &cfg.model.exponents {
        Some(d) if d.len() != base.exponents.len() => {
            return Err(CliError::Config(format!(
                "model.exponents has {} entries, the model has {} coordinates",
                d.len(),
                base.exponents.len()
            )))
        }
        Some(d) => d.clone(),
        None => base.exponents.clone(),
    };
    Ok(QuasihomogeneityData::new(exponents, cfg.model.d_f.unwrap_or(base.d_f), base.allows_quadratic_remainder))
}

/// Builds the unity/nilpotent extension and checks it at `t = (t0, x(u), t_{n+1})`.
pub fn cmd_extend(cfg: &RunConfig) -> Result<Report, CliError> {
    let model = cfg.resolve_model()?;
    let named = model
        .named
        .ok_or_else(|| CliError::Config("extend needs a named model with a closed-form prepotential".into()))?;
    let q = extension_exponents(cfg, named.quasihomogeneity())?;
    let ext = extend_prepotential(&named.prepotential(), &named.metric(), Some(&q))?;
    let extended = ext.exponents.clone().expect("exponents were supplied");

    let n = model.dim();
    let (lo, hi) = cfg.u_box(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sample.seed);
    let us = sample_box(&mut rng, &lo, &hi, cfg.sample.count);
    let ends = sample_box(&mut rng, &[-1.0, -1.0], &[1.0, 1.0], cfg.sample.count);

    let rows: Vec<(Vec<f64>, Residuals)> = us
        .par_iter()
        .zip(ends.par_iter())
        .map(|(u, end)| {
            let x = match solve_ba(&model.data, u, 0) {
                Ok(ba) => real_point(&ba.x_values()),
                Err(e) => {
                    let msg = e.to_string();
                    let names = ["extension.associativity", "extension.unity", "extension.nilpotent"];
                    let mut row: Residuals = names.iter().map(|&k| (k, Err(msg.clone()))).collect();
                    row.push(("extension.metric_coefficient", Err(msg.clone())));
                    row.push(("extension.euler", Err(msg)));
                    return (u.clone(), row);
                }
            };
            let mut t = vec![end[0]];
            t.extend(x);
            t.push(end[1]);
            let row: Residuals = match err_str(verify_extension(&ext, &t)) {
                Ok(d) => vec![
                    ("extension.associativity", Ok(d.associativity)),
                    ("extension.unity", Ok(d.unity)),
                    ("extension.nilpotent", Ok(d.nilpotent_square)),
                    ("extension.metric_coefficient", Ok(d.metric_coefficient)),
                    ("extension.euler", err_str(euler_check(&ext.f_tilde, &extended, &t))),
                ],
                Err(e) => vec![
                    ("extension.associativity", Err(e.clone())),
                    ("extension.unity", Err(e.clone())),
                    ("extension.nilpotent", Err(e.clone())),
                    ("extension.metric_coefficient", Err(e.clone())),
                    ("extension.euler", Err(e)),
                ],
            };
            (t, row)
        })
        .collect();
    let (points, rows): (Vec<Vec<f64>>, Vec<Residuals>) = rows.into_iter().unzip();
    let checks = reduce(&points, rows, &cfg.tolerances)
        .into_iter()
        .map(|c| {
            if c.name == "extension.euler" {
                c.with_detail("exponents", format_reals(&extended.exponents))
                    .with_detail("d_f", extended.d_f.to_string())
            } else {
                c
            }
        })
        .collect();
    Ok(Report::new("extend", &model.label, checks, provenance(cfg, &model)))
}

/// Structural validation of the curve, followed by the residue checks when
/// the structure is sound. Invalid curves fail checks rather than the run.
pub fn cmd_curve_validate(cfg: &RunConfig) -> Result<Report, CliError> {
    let model = cfg.resolve_model()?;
    let v = model.data.validate();
    let mut check = Check::new("curve.validation", v.violations.len() as f64, 0.0, vec![])
        .with_detail("arithmetic_genus", v.arithmetic_genus.to_string())
        .with_detail("pole_degree", v.pole_degree.to_string())
        .with_detail("expected_pole_degree", v.expected_pole_degree.to_string());
    for (i, violation) in v.violations.iter().enumerate() {
        check = check.with_detail(&format!("violation_{i:02}"), violation.to_string());
    }
    let mut checks = vec![check];
    if v.passed() {
        checks.extend(residue_checks(&model.data, model.euclidean, &cfg.tolerances));
    }
    Ok(Report::new("curve-validate", &model.label, checks, provenance(cfg, &model)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorRow {
    pub x: Vec<f64>,
    /// Real parts of the unique entries; `None` when evaluation failed.
    pub entries: Option<Vec<f64>>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorTable {
    pub header: Vec<String>,
    pub rows: Vec<CorrelatorRow>,
}

impl CorrelatorTable {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
        w.write_record(&self.header).map_err(csv_err)?;
        let blanks = self.header.len() - self.rows.first().map_or(0, |r| r.x.len()) - 1;
        for row in &self.rows {
            let mut record: Vec<String> = row.x.iter().map(|v| format!("{v:?}")).collect();
            match &row.entries {
                Some(e) => record.extend(e.iter().map(|v| format!("{v:?}"))),
                None => record.extend(vec![String::new(); blanks]),
            }
            record.push(row.status.clone());
            w.write_record(&record).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn entry_label(n: usize, (i, j, k): (usize, usize, usize)) -> String {
    if n < 10 {
        format!("c{}{}{}", i + 1, j + 1, k + 1)
    } else {
        format!("c_{}_{}_{}", i + 1, j + 1, k + 1)
    }
}

fn grid(lo: &[f64], hi: &[f64], steps: usize) -> Vec<Vec<f64>> {
    if steps == 0 || lo.is_empty() {
        return Vec::new();
    }
    let axis = |a: f64, b: f64| -> Vec<f64> {
        if steps == 1 {
            vec![a]
        } else {
            (0..steps).map(|s| a + (b - a) * s as f64 / (steps - 1) as f64).collect()
        }
    };
    let mut points = vec![Vec::new()];
    for (a, b) in lo.iter().zip(hi) {
        let values = axis(*a, *b);
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    points
}

/// Correlators on a `grid_steps`-per-axis grid over `[grid_min, grid_max]`.
/// Points outside the domain are flagged in their row.
pub fn cmd_correlators(cfg: &RunConfig) -> Result<CorrelatorTable, CliError> {
    let model = cfg.resolve_model()?;
    let n = model.dim();
    let s = &cfg.sample;
    if s.grid_min.len() != n {
        return Err(CliError::Config(format!("grid box must have {n} coordinates")));
    }
    let source: Box<dyn CorrelatorSource + Sync> = match (s.source, model.named) {
        (SourceKind::Prepotential, Some(m)) => Box::new(m.prepotential()),
        (SourceKind::Prepotential, None) => {
            return Err(CliError::Config(
                "a curve file has no closed-form prepotential; use sample.source = \"metric\"".into(),
            ))
        }
        (SourceKind::Metric, _) => Box::new(MetricCorrelators::new(model.curve_model()?, vec![0.0; n])),
    };

    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut labels = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                labels.push(entry_label(n, (i, j, k)));
            }
        }
    }
    header.extend(labels);
    header.push("status".into());

    let reality = cfg.tolerances.reality;
    let rows = grid(&s.grid_min, &s.grid_max, s.grid_steps)
        .into_par_iter()
        .map(|x| match source.correlators(&x) {
            Ok(c) => {
                let imag = c.max_imag();
                let status =
                    if imag <= reality { "ok".to_string() } else { format!("complex: imaginary part {imag:e}") };
                let entries = c.unique_entries().into_iter().map(|(_, v)| v.re).collect();
                CorrelatorRow { x, entries: Some(entries), status }
            }
            Err(e) => CorrelatorRow { x, entries: None, status: format!("domain: {e}") },
        })
        .collect();
    Ok(CorrelatorTable { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(overrides: &[&str]) -> RunConfig {
        let owned: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
        RunConfig::load(None, &owned).unwrap()
    }

    #[test]
    fn grid_is_lexicographic() {
        let g = grid(&[1.0, 1.0], &[2.0, 2.0], 3);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], vec![1.0, 1.0]);
        assert_eq!(g[1], vec![1.0, 1.5]);
        assert_eq!(g[3], vec![1.5, 1.0]);
        assert!(grid(&[1.0], &[2.0], 0).is_empty());
        assert_eq!(grid(&[1.0, 3.0], &[2.0, 4.0], 1), vec![vec![1.0, 3.0]]);
    }

    #[test]
    fn sample_box_is_seeded() {
        let a = sample_box(&mut ChaCha8Rng::seed_from_u64(3), &[-1.0, 0.0], &[1.0, 0.0], 4);
        let b = sample_box(&mut ChaCha8Rng::seed_from_u64(3), &[-1.0, 0.0], &[1.0, 0.0], 4);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p[0].abs() <= 1.0 && p[1] == 0.0));
    }

    #[test]
    fn reduce_keeps_first_error() {
        let points = vec![vec![0.0], vec![1.0]];
        let rows = vec![vec![("a", Ok(1e-12))], vec![("a", Err("boom".to_string()))]];
        let checks = reduce(&points, rows, &Tolerances::default());
        assert!(!checks[0].pass);
        assert!(checks[0].error.as_deref().unwrap().contains("boom"));
    }

    #[test]
    fn example2_table_spot_value() {
        let table = cmd_correlators(&cfg(&["model.name=example2"])).unwrap();
        assert_eq!(table.header, ["x1", "x2", "c111", "c112", "c122", "c222", "status"]);
        assert_eq!(table.rows.len(), 9);
        let first = &table.rows[0];
        assert_eq!(first.x, vec![1.0, 1.0]);
        assert!((first.entries.as_ref().unwrap()[0] + 0.5).abs() <= 1e-14);
    }

    #[test]
    fn example1_grid_through_singular_locus_flags_rows() {
        let table = cmd_correlators(&cfg(&[
            "model.name=example1",
            "sample.grid_min=[-1.0, 0.5]",
            "sample.grid_max=[1.0, 1.5]",
        ]))
        .unwrap();
        assert_eq!(table.rows.len(), 9);
        assert!(table.rows.iter().any(|r| r.entries.is_none() && r.status.starts_with("domain")));
        assert!(table.rows.iter().any(|r| r.status == "ok"));
        let csv = table.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 10);
    }

    #[test]
    fn empty_grid() {
        let table = cmd_correlators(&cfg(&["model.name=example2", "sample.grid_steps=0"])).unwrap();
        assert!(table.rows.is_empty());
        assert_eq!(table.to_csv().unwrap(), "x1,x2,c111,c112,c122,c222,status\n");
    }

    #[test]
    fn csv_numbers_round_trip() {
        let table = CorrelatorTable {
            header: vec!["x1".into(), "c111".into(), "status".into()],
            rows: vec![CorrelatorRow { x: vec![1.0], entries: Some(vec![8.326672684688674e-17]), status: "ok".into() }],
        };
        assert_eq!(table.to_csv().unwrap(), "x1,c111,status\n1.0,8.326672684688674e-17,ok\n");
    }

    #[test]
    fn curve_validate_example1() {
        let report = cmd_curve_validate(&cfg(&["model.name=example1"])).unwrap();
        assert!(report.passed(), "{}", report.to_json());
        assert_eq!(report.check("curve.validation").unwrap().details["arithmetic_genus"], "1");
        let euclid = report.check("residues.euclidean").unwrap();
        let eps: Vec<f64> = euclid.details["epsilon_sq"]
            .trim_matches(|c| c == '[' || c == ']')
            .split(", ")
            .map(|v| v.parse().unwrap())
            .collect();
        assert!((eps[0] - 1.0).abs() <= 1e-12 && (eps[1] - 7.0).abs() <= 1e-12, "{eps:?}");
    }
}
