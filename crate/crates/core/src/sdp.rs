//! Primal-dual interior-point solver for small real semidefinite programs.
//!
//! Solves
//!
//! ```text
//! min ⟨C, X⟩  s.t.  ⟨A_k, X⟩ = b_k,  X ⪰ 0
//! max b·y     s.t.  Σ y_k A_k + Z = C,  Z ⪰ 0
//! ```
//!
//! with the HKM search direction and a Mehrotra predictor-corrector step,
//! starting from an infeasible interior point. Constraint matrices are stored
//! sparsely, which keeps the Schur complement cheap for the very sparse
//! factorization-norm programs this crate builds. Everything is single
//! threaded and deterministic.

use nalgebra::{Cholesky, DMatrix, DVector};

/// A symmetric matrix listed by its nonzero entries. Off-diagonal entries must
/// be listed in both triangles.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseSym {
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `v` at `(i, j)` and, when `i != j`, at `(j, i)`.
    pub fn push_sym(&mut self, i: usize, j: usize, v: f64) {
        self.entries.push((i, j, v));
        if i != j {
            self.entries.push((j, i, v));
        }
    }

    /// `⟨self, X⟩ = Σ a_kl X_kl`.
    pub fn dot(&self, x: &DMatrix<f64>) -> f64 {
        self.entries.iter().map(|&(k, l, a)| a * x[(k, l)]).sum()
    }

    pub fn add_scaled_to(&self, scale: f64, out: &mut DMatrix<f64>) {
        for &(k, l, a) in &self.entries {
            out[(k, l)] += scale * a;
        }
    }

    pub fn to_dense(&self, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        self.add_scaled_to(1.0, &mut m);
        m
    }

    fn frobenius(&self) -> f64 {
        self.entries.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub dim: usize,
    pub objective: SparseSym,
    pub constraints: Vec<SparseSym>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub max_iter: usize,
    /// Target for relative gap and relative infeasibilities.
    pub tol: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { max_iter: 10_000, tol: 1e-11 }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub z: DMatrix<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn frob_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Largest `α` with `X + α dX ⪰ 0`, or infinity.
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let Some(chol) = Cholesky::new(x.clone()) else {
        return 0.0;
    };
    let l = chol.l();
    let Some(linv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let m = symmetrize(&(&linv * dx * linv.transpose()));
    let lmin = m.symmetric_eigen().eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

struct Workspace<'a> {
    p: &'a SdpProblem,
    c: DMatrix<f64>,
    b: DVector<f64>,
}

impl Workspace<'_> {
    fn apply(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.p.constraints.len(), self.p.constraints.iter().map(|a| a.dot(x)))
    }

    fn apply_adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.p.dim, self.p.dim);
        for (a, &yk) in self.p.constraints.iter().zip(y.iter()) {
            a.add_scaled_to(yk, &mut out);
        }
        out
    }

    /// `M_ij = tr(A_i X A_j Z⁻¹)`.
    fn schur(&self, x: &DMatrix<f64>, zinv: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.p.constraints.len();
        let mut out = DMatrix::zeros(m, m);
        for (i, ai) in self.p.constraints.iter().enumerate() {
            for (j, aj) in self.p.constraints.iter().enumerate().skip(i) {
                let mut s = 0.0;
                for &(k, l, a) in &ai.entries {
                    for &(mm, n, bb) in &aj.entries {
                        s += a * bb * x[(l, mm)] * zinv[(n, k)];
                    }
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}

/// Runs the interior-point iteration. Always returns the last iterate; check
/// `converged` and the certificate derived from it.
pub fn solve(problem: &SdpProblem, options: &SdpOptions) -> SdpSolution {
    let n = problem.dim;
    let m = problem.constraints.len();
    let ws = Workspace { p: problem, c: problem.objective.to_dense(n), b: DVector::from_column_slice(&problem.rhs) };
    let nf = n as f64;
    let norm_b = ws.b.norm();
    let norm_c = ws.c.norm();

    let mut xi: f64 = 10.0f64.max(nf.sqrt());
    let mut eta: f64 = 10.0f64.max(nf.sqrt()).max(norm_c);
    for (a, &bk) in problem.constraints.iter().zip(&problem.rhs) {
        let fa = a.frobenius();
        xi = xi.max(nf * (1.0 + bk.abs()) / (1.0 + fa));
        eta = eta.max(fa);
    }
    let mut x = DMatrix::identity(n, n) * xi;
    let mut z = DMatrix::identity(n, n) * eta;
    let mut y = DVector::zeros(m);

    let mut iterations = 0;
    let mut converged = false;
    loop {
        let rp = &ws.b - ws.apply(&x);
        let rd = &ws.c - ws.apply_adjoint(&y) - &z;
        let pobj = frob_dot(&ws.c, &x);
        let dobj = ws.b.dot(&y);
        let pinf = rp.norm() / (1.0 + norm_b);
        let dinf = rd.norm() / (1.0 + norm_c);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if pinf <= options.tol && dinf <= options.tol && gap <= options.tol {
            converged = true;
            break;
        }
        if iterations >= options.max_iter {
            break;
        }
        iterations += 1;

        let mu = frob_dot(&x, &z) / nf;
        let Some(zchol) = Cholesky::new(z.clone()) else { break };
        let zinv = zchol.inverse();
        let schur = ws.schur(&x, &zinv);
        let chol = Cholesky::new(schur.clone());
        let lu = schur.lu();
        let solve_dy = |rhs: &DVector<f64>| -> Option<DVector<f64>> {
            match &chol {
                Some(c) => Some(c.solve(rhs)),
                None => lu.solve(rhs),
            }
        };
        let base = &rp + ws.apply(&x) + ws.apply(&(&x * &rd * &zinv));

        let direction = |sigma: f64, corr: Option<&DMatrix<f64>>| -> Option<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
            let target = &zinv * (sigma * mu);
            let mut rhs = &base - ws.apply(&target);
            if let Some(k) = corr {
                rhs += ws.apply(k);
            }
            let dy = solve_dy(&rhs)?;
            let dz = &rd - ws.apply_adjoint(&dy);
            let mut dx = target - &x - &x * &dz * &zinv;
            if let Some(k) = corr {
                dx -= k;
            }
            Some((symmetrize(&dx), dy, dz))
        };

        let Some((dx_a, _, dz_a)) = direction(0.0, None) else { break };
        let ap = max_step(&x, &dx_a).min(1.0);
        let ad = max_step(&z, &dz_a).min(1.0);
        let mu_aff = frob_dot(&(&x + &dx_a * ap), &(&z + &dz_a * ad)) / nf;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        let corr = &dx_a * &dz_a * &zinv;
        let Some((dx, dy, dz)) = direction(sigma, Some(&corr)) else { break };

        let ap = max_step(&x, &dx);
        let ad = max_step(&z, &dz);
        let tau = 0.9 + 0.09 * (ap.min(ad).min(1.0));
        let ap = (tau * ap).min(1.0);
        let ad = (tau * ad).min(1.0);
        if ap < 1e-14 && ad < 1e-14 {
            break;
        }
        x = symmetrize(&(&x + &dx * ap));
        y += &dy * ad;
        z = symmetrize(&(&z + &dz * ad));
    }

    let rp = &ws.b - ws.apply(&x);
    let rd = &ws.c - ws.apply_adjoint(&y) - &z;
    SdpSolution {
        primal_objective: frob_dot(&ws.c, &x),
        dual_objective: ws.b.dot(&y),
        primal_infeasibility: rp.norm() / (1.0 + norm_b),
        dual_infeasibility: rd.norm() / (1.0 + norm_c),
        x,
        y,
        z,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimum_eigenvalue_program() {
        // min ⟨C, X⟩ s.t. tr X = 1 has value λ_min(C).
        let mut c = SparseSym::new();
        c.push_sym(0, 0, 2.0);
        c.push_sym(0, 1, 1.0);
        c.push_sym(1, 1, 3.0);
        c.push_sym(2, 2, 5.0);
        let mut trace = SparseSym::new();
        for i in 0..3 {
            trace.push_sym(i, i, 1.0);
        }
        let p = SdpProblem { dim: 3, objective: c.clone(), constraints: vec![trace], rhs: vec![1.0] };
        let sol = solve(&p, &SdpOptions::default());
        assert!(sol.converged);
        let expected = 2.5 - 0.5f64 * 5f64.sqrt();
        assert!((sol.primal_objective - expected).abs() < 1e-9, "{}", sol.primal_objective);
        assert!((sol.dual_objective - expected).abs() < 1e-9);
    }

    #[test]
    fn max_cut_style_program() {
        // Diagonal -2, off-diagonal 1, unit-diagonal X on three points.
        let n = 3;
        let mut c = SparseSym::new();
        for i in 0..n {
            c.push_sym(i, i, -2.0);
            for j in (i + 1)..n {
                c.push_sym(i, j, 1.0);
            }
        }
        let constraints: Vec<SparseSym> = (0..n)
            .map(|i| {
                let mut a = SparseSym::new();
                a.push_sym(i, i, 1.0);
                a
            })
            .collect();
        let p = SdpProblem { dim: n, objective: c, constraints, rhs: vec![1.0; n] };
        let sol = solve(&p, &SdpOptions::default());
        assert!(sol.converged);
        // X = 3/2·I - 1/2·J minimises the off-diagonal sum: -6 + 2·(-3/2) = -9.
        assert!((sol.primal_objective + 9.0).abs() < 1e-8, "{}", sol.primal_objective);
    }
}
