//! Fixtures shared by the criterion benches.

use wdvv_core::{Jet, PrepotentialField};

/// `count` points on a fixed lattice in `[-1, 1]^2`, reproducible without an RNG.
pub fn lattice(count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|k| {
            let t = (k as f64 + 0.5) / count as f64;
            [2.0 * t - 1.0, 2.0 * ((7.0 * t).fract()) - 1.0]
        })
        .collect()
}

/// A dense cubic in `n` variables, `sum_{i<=j<=k} x_i x_j x_k`.
pub fn dense_cubic(n: usize) -> PrepotentialField {
    PrepotentialField::new(n, move |t: &[Jet]| {
        let mut acc = Jet::zero(t[0].num_vars(), t[0].order());
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    acc += &(&(&t[i] * &t[j]) * &t[k]);
                }
            }
        }
        Ok(acc)
    })
}
