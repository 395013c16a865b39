use num_complex::Complex64;
use proptest::prelude::*;

use wdvv_core::frobenius::{associativity_residual, structure_constants, third_derivative_tensor};
use wdvv_core::jets::{layout, solve_linear};
use wdvv_core::models::pencil_prepotential;
use wdvv_core::{ConstantMetric, CorrelatorTensor, Jet, PrepotentialField};

fn jet_strategy(num_vars: usize, order: usize) -> impl Strategy<Value = Jet> {
    let len = layout(num_vars, order).len();
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), len).prop_map(move |c| {
        let coeffs = c.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        Jet::from_coeffs(num_vars, order, coeffs)
    })
}

fn scale_of(j: &Jet) -> f64 {
    j.max_abs().max(1.0)
}

proptest! {
    #[test]
    fn jet_mul_commutes(a in jet_strategy(3, 3), b in jet_strategy(3, 3)) {
        let ab = &a * &b;
        let ba = &b * &a;
        prop_assert!(ab.max_abs_diff(&ba) <= 1e-14 * scale_of(&ab));
    }

    #[test]
    fn jet_mul_associates(a in jet_strategy(2, 4), b in jet_strategy(2, 4), c in jet_strategy(2, 4)) {
        let left = &(&a * &b) * &c;
        let right = &a * &(&b * &c);
        prop_assert!(left.max_abs_diff(&right) <= 1e-13 * scale_of(&left));
    }

    #[test]
    fn jet_solve_reproduces_rhs(
        entries in prop::collection::vec(jet_strategy(2, 3), 9),
        rhs in prop::collection::vec(jet_strategy(2, 3), 3),
    ) {
        // diagonally dominant constant terms keep the system well conditioned
        let mut a: Vec<Vec<Jet>> = entries.chunks(3).map(|r| r.to_vec()).collect();
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = &row[i] + Complex64::new(10.0, 0.0);
        }
        let x = solve_linear(&a, &rhs).unwrap();
        for (row, b) in a.iter().zip(&rhs) {
            let mut acc = Jet::zero(2, 3);
            for (aij, xj) in row.iter().zip(&x) {
                acc += &(aij * xj);
            }
            prop_assert!(acc.max_abs_diff(b) <= 1e-12);
        }
    }

    #[test]
    fn residual_is_permutation_invariant(
        x1 in 0.5f64..2.0,
        x2 in 0.5f64..2.0,
        q in -2.0f64..2.0,
        bump in -1.0f64..1.0,
    ) {
        // a deliberately non-associative tensor so the residual is not zero
        let f = pencil_prepotential(q);
        let base = third_derivative_tensor(&f, &[x1, x2]).unwrap();
        let c = CorrelatorTensor::from_unique(2, vec![x1, x2], |i, j, k| {
            base.get(i, j, k) + if (i, j, k) == (0, 0, 1) { Complex64::new(bump, 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        let g = ConstantMetric::new(vec![vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let swapped = ConstantMetric::new(vec![vec![1.0, 0.5], vec![0.5, 2.0]]).unwrap();
        let r = associativity_residual(&c, &g).unwrap();
        let rp = associativity_residual(&c.permuted(&[1, 0]), &swapped).unwrap();
        prop_assert!((r - rp).abs() <= 1e-12 * r.max(1.0));
    }

    #[test]
    fn lowering_inverts_raising(
        vals in prop::collection::vec(-3.0f64..3.0, 10),
        off in -0.4f64..0.4,
    ) {
        let c = CorrelatorTensor::from_unique(3, vec![0.0; 3], |i, j, k| {
            let slot = [[[0, 1, 2], [1, 3, 4], [2, 4, 5]], [[1, 3, 4], [3, 6, 7], [4, 7, 8]], [[2, 4, 5], [4, 7, 8], [5, 8, 9]]];
            Complex64::new(vals[slot[i][j][k]], 0.0)
        });
        let g = ConstantMetric::new(vec![
            vec![1.0, off, 0.0],
            vec![off, 1.0, off],
            vec![0.0, off, -1.0],
        ]).unwrap();
        let sc = structure_constants(&c, &g).unwrap();
        let back = sc.lower(&g, vec![0.0; 3]);
        prop_assert!(back.max_abs_diff(&c) <= 1e-14 * 3.0_f64.max(c.unique_entries().iter().map(|e| e.1.norm()).fold(0.0, f64::max)));
    }

    #[test]
    fn third_derivative_tensor_is_symmetric(x1 in 0.3f64..2.0, x2 in 0.3f64..2.0, q in -2.0f64..2.0) {
        let c = third_derivative_tensor(&pencil_prepotential(q), &[x1, x2]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    prop_assert_eq!(c.get(i, j, k), c.get(k, i, j));
                    prop_assert_eq!(c.get(i, j, k), c.get(j, i, k));
                }
            }
        }
    }
}

/// A polynomial of degree at most 3 given by (coefficient, exponents) terms.
#[derive(Debug, Clone)]
struct Poly {
    n: usize,
    terms: Vec<(f64, Vec<u8>)>,
}

fn poly_strategy() -> impl Strategy<Value = (Poly, Vec<f64>)> {
    (1usize..=4).prop_flat_map(|n| {
        let monomial = prop::collection::vec(0u8..=3, n)
            .prop_filter("degree <= 3", |m| m.iter().map(|&e| e as u32).sum::<u32>() <= 3);
        (prop::collection::vec((-5.0f64..5.0, monomial), 1..8), prop::collection::vec(-2.0f64..2.0, n)).prop_map(
            move |(raw, point)| {
                let mut terms: Vec<(f64, Vec<u8>)> = Vec::new();
                for (c, m) in raw {
                    match terms.iter_mut().find(|(_, e)| *e == m) {
                        Some(t) => t.0 += c,
                        None => terms.push((c, m)),
                    }
                }
                (Poly { n, terms }, point)
            },
        )
    })
}

fn poly_field(p: &Poly) -> PrepotentialField {
    let terms = p.terms.clone();
    PrepotentialField::new(p.n, move |t: &[Jet]| {
        let mut acc = Jet::zero(t[0].num_vars(), t[0].order());
        for (c, exps) in &terms {
            let mut term = Jet::constant(*c, t[0].num_vars(), t[0].order());
            for (v, &e) in t.iter().zip(exps) {
                for _ in 0..e {
                    term = &term * v;
                }
            }
            acc += &term;
        }
        Ok(acc)
    })
}

fn factorial(k: u8) -> f64 {
    (1..=k as u32).map(f64::from).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn cubic_polynomials_are_exact((poly, point) in poly_strategy()) {
        let f = poly_field(&poly);
        let c = third_derivative_tensor(&f, &point).unwrap();
        for i in 0..poly.n {
            for j in i..poly.n {
                for k in j..poly.n {
                    let mut want = vec![0u8; poly.n];
                    want[i] += 1;
                    want[j] += 1;
                    want[k] += 1;
                    let analytic: f64 = poly
                        .terms
                        .iter()
                        .filter(|(_, e)| *e == want)
                        .map(|(coef, e)| coef * e.iter().map(|&m| factorial(m)).product::<f64>())
                        .sum();
                    let got = c.get(i, j, k);
                    prop_assert!(got.im == 0.0);
                    prop_assert!((got.re - analytic).abs() <= 4.0 * f64::EPSILON * analytic.abs(), "{} vs {}", got.re, analytic);
                }
            }
        }
    }
}
