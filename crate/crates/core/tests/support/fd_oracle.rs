//! Random smooth expressions evaluated two ways: with jets, and with a small
//! forward-mode dual number whose gradient is then differenced twice.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use wdvv_core::{Complex64, Jet};

#[derive(Debug, Clone)]
pub enum Expr {
    Var(usize),
    Const(f64),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// `a / (1 + b^2)`
    Div(Box<Expr>, Box<Expr>),
    /// `exp(e / 2)`
    Exp(Box<Expr>),
    /// `ln(1 + e^2)`
    Log(Box<Expr>),
    Atan(Box<Expr>),
    /// `sqrt(1 + e^2)`
    Sqrt(Box<Expr>),
}

pub fn random_expr(rng: &mut ChaCha8Rng, num_vars: usize, depth: usize) -> Expr {
    if depth == 0 || rng.random_range(0..4) == 0 {
        return if rng.random_range(0..3) == 0 {
            Expr::Const(rng.random_range(-1.0..1.0))
        } else {
            Expr::Var(rng.random_range(0..num_vars))
        };
    }
    let mut sub = || Box::new(random_expr(rng, num_vars, depth - 1));
    let (a, b) = (sub(), sub());
    match rng.random_range(0..8) {
        0 => Expr::Add(a, b),
        1 => Expr::Mul(a, b),
        2 => Expr::Div(a, b),
        3 => Expr::Exp(a),
        4 => Expr::Log(a),
        5 => Expr::Atan(a),
        6 => Expr::Sqrt(a),
        _ => Expr::Mul(a, Box::new(Expr::Atan(b))),
    }
}

/// Ensures every variable appears so that all partials are exercised.
pub fn random_composition(rng: &mut ChaCha8Rng, num_vars: usize) -> Expr {
    let mut e = random_expr(rng, num_vars, 3);
    for i in 0..num_vars {
        let inner = Expr::Mul(Box::new(Expr::Var(i)), Box::new(random_expr(rng, num_vars, 2)));
        e = Expr::Add(Box::new(e), Box::new(Expr::Atan(Box::new(inner))));
    }
    e
}

pub fn eval_jet(e: &Expr, v: &[Jet]) -> Jet {
    let one = Jet::constant(1.0, v[0].num_vars(), v[0].order());
    let sq1 = |j: Jet| &one + &(&j * &j);
    match e {
        Expr::Var(i) => v[*i].clone(),
        Expr::Const(c) => Jet::constant(*c, v[0].num_vars(), v[0].order()),
        Expr::Add(a, b) => &eval_jet(a, v) + &eval_jet(b, v),
        Expr::Mul(a, b) => &eval_jet(a, v) * &eval_jet(b, v),
        Expr::Div(a, b) => eval_jet(a, v).checked_div(&sq1(eval_jet(b, v))).unwrap(),
        Expr::Exp(a) => eval_jet(a, v).scale(0.5).exp(),
        Expr::Log(a) => sq1(eval_jet(a, v)).ln().unwrap(),
        Expr::Atan(a) => eval_jet(a, v).atan().unwrap(),
        Expr::Sqrt(a) => sq1(eval_jet(a, v)).sqrt().unwrap(),
    }
}

#[derive(Debug, Clone)]
struct Dual {
    v: f64,
    d: Vec<f64>,
}

impl Dual {
    fn lift(&self, v: f64, slope: f64) -> Dual {
        Dual { v, d: self.d.iter().map(|x| x * slope).collect() }
    }

    fn add(&self, o: &Dual) -> Dual {
        Dual { v: self.v + o.v, d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect() }
    }

    fn mul(&self, o: &Dual) -> Dual {
        Dual { v: self.v * o.v, d: self.d.iter().zip(&o.d).map(|(a, b)| a * o.v + self.v * b).collect() }
    }

    fn one_plus_square(&self) -> Dual {
        let s = self.mul(self);
        Dual { v: 1.0 + s.v, d: s.d }
    }
}

fn eval_dual(e: &Expr, x: &[f64]) -> Dual {
    let n = x.len();
    match e {
        Expr::Var(i) => {
            let mut d = vec![0.0; n];
            d[*i] = 1.0;
            Dual { v: x[*i], d }
        }
        Expr::Const(c) => Dual { v: *c, d: vec![0.0; n] },
        Expr::Add(a, b) => eval_dual(a, x).add(&eval_dual(b, x)),
        Expr::Mul(a, b) => eval_dual(a, x).mul(&eval_dual(b, x)),
        Expr::Div(a, b) => {
            let den = eval_dual(b, x).one_plus_square();
            let inv = den.lift(1.0 / den.v, -1.0 / (den.v * den.v));
            eval_dual(a, x).mul(&inv)
        }
        Expr::Exp(a) => {
            let a = eval_dual(a, x);
            let v = (0.5 * a.v).exp();
            a.lift(v, 0.5 * v)
        }
        Expr::Log(a) => {
            let s = eval_dual(a, x).one_plus_square();
            s.lift(s.v.ln(), 1.0 / s.v)
        }
        Expr::Atan(a) => {
            let a = eval_dual(a, x);
            a.lift(a.v.atan(), 1.0 / (1.0 + a.v * a.v))
        }
        Expr::Sqrt(a) => {
            let s = eval_dual(a, x).one_plus_square();
            let r = s.v.sqrt();
            s.lift(r, 0.5 / r)
        }
    }
}

/// `d^3 f / dx_i dx_j dx_k` from central second differences of the exact
/// gradient component `k`, with step `h`.
pub fn fd_third(e: &Expr, x: &[f64], i: usize, j: usize, k: usize, h: f64) -> f64 {
    let g = |di: f64, dj: f64| {
        let mut p = x.to_vec();
        p[i] += di;
        p[j] += dj;
        eval_dual(e, &p).d[k]
    };
    if i == j {
        let g1 = |t: f64| {
            let mut p = x.to_vec();
            p[i] += t;
            eval_dual(e, &p).d[k]
        };
        (g1(h) - 2.0 * g1(0.0) + g1(-h)) / (h * h)
    } else {
        (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4.0 * h * h)
    }
}

/// Worst relative error `|jet - fd| / max(|fd|, 1)` over all third partials.
pub fn worst_relative_error(e: &Expr, x: &[f64], h: f64) -> f64 {
    let n = x.len();
    let jet = eval_jet(e, &Jet::variables(x, 3));
    assert!(jet.value().im == 0.0 || jet.value().im.abs() < 1e-14);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let exact: Complex64 = jet.third_partial(i, j, k).unwrap();
                let approx = fd_third(e, x, i, j, k, h);
                worst = worst.max((exact.re - approx).abs() / approx.abs().max(1.0));
            }
        }
    }
    worst
}
