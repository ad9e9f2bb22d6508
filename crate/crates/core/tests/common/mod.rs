#![allow(dead_code)]

use glab_core::linalg::CMatrix;
use glab_core::{ArrowSet, Complex64, Groupoid};
use nalgebra::DMatrix;
use rand::Rng;

/// γ₂ by alternating maximisation of the dual `max_{u,v} ‖D_u H D_v‖_tr`.
///
/// For fixed `u, v` the best `W` in `Re tr(W† D_u H D_v)` is the polar factor
/// of `D_u H D_v`; for fixed `W` the best `u, v` are the top singular pair of
/// `Re(conj(W) ⊙ H)`. Each half-step is monotone, and the bound is evaluated
/// directly, so the result never exceeds the true value.
pub fn gamma2_alternating<R: Rng>(h: &CMatrix, starts: usize, iterations: usize, rng: &mut R) -> f64 {
    let (n, k) = (h.nrows(), h.ncols());
    let mut best: f64 = 0.0;
    for s in 0..starts {
        let (mut u, mut v): (Vec<f64>, Vec<f64>) = if s == 0 {
            (vec![1.0 / (n as f64).sqrt(); n], vec![1.0 / (k as f64).sqrt(); k])
        } else {
            (unit((0..n).map(|_| rng.gen::<f64>()).collect()), unit((0..k).map(|_| rng.gen::<f64>()).collect()))
        };
        for _ in 0..iterations {
            let scaled = CMatrix::from_fn(n, k, |i, j| h[(i, j)] * (u[i] * v[j]));
            best = best.max(trace_norm(&scaled));
            let w = polar(&scaled);
            let m = DMatrix::<f64>::from_fn(n, k, |i, j| (w[(i, j)].conj() * h[(i, j)]).re);
            let svd = m.svd(true, true);
            let top = svd.singular_values.imax();
            u = svd.u.unwrap().column(top).iter().copied().collect();
            v = svd.v_t.unwrap().row(top).iter().copied().collect();
        }
        let scaled = CMatrix::from_fn(n, k, |i, j| h[(i, j)] * (u[i] * v[j]));
        best = best.max(trace_norm(&scaled));
    }
    best
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn trace_norm(a: &CMatrix) -> f64 {
    a.clone().svd(false, false).singular_values.iter().sum()
}

fn polar(a: &CMatrix) -> CMatrix {
    let svd = a.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// A random bisection: arrows in random order, kept when their source and
/// range are both still free.
pub fn random_bisection<R: Rng>(g: &Groupoid, rng: &mut R) -> ArrowSet {
    let n = g.len();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let keep = rng.gen_range(1..=n);
    let mut set = ArrowSet::empty(n);
    for &a in order.iter().take(keep) {
        set.insert(a);
        if !g.is_bisection(&set) {
            set.remove(a);
        }
    }
    set
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
