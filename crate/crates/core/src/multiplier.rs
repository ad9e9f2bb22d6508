//! Pointwise multipliers `M_h f = h·f` and their norms.
//!
//! On each block `π_x`, `M_h` acts as the Schur multiplier with symbol
//! `H_x(γ, γ′) = h(γγ′⁻¹)`, so its completely bounded norm is the largest γ₂
//! norm over the per-unit symbols.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{same_groupoid, ArrowFunction};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gamma2::{self, Gamma2Certificate};
use crate::groupoid::{GroupAction, Groupoid};
use crate::linalg::{self, CMatrix};

/// A function `h` on arrows together with its per-unit Schur symbols.
#[derive(Debug, Clone)]
pub struct MultiplierSymbol {
    h: ArrowFunction,
    symbols: Vec<(usize, CMatrix)>,
}

impl MultiplierSymbol {
    pub fn new(h: ArrowFunction) -> Self {
        let g = h.groupoid().clone();
        let symbols = g.units().iter().map(|&x| (x, Self::symbol_matrix(&h, x).expect("x is a unit"))).collect();
        Self { h, symbols }
    }

    fn symbol_matrix(h: &ArrowFunction, unit: usize) -> Result<CMatrix> {
        let g = h.groupoid();
        let basis = g.source_fiber(unit)?;
        let k = basis.len();
        Ok(CMatrix::from_fn(k, k, |i, j| h.get(g.compose(basis[i], g.inverse(basis[j])).expect("common source"))))
    }

    pub fn constant(groupoid: &Groupoid, c: Complex64) -> Self {
        Self::new(ArrowFunction::from_coeffs(groupoid, vec![c; groupoid.len()]).expect("length matches"))
    }

    pub fn one(groupoid: &Groupoid) -> Self {
        Self::constant(groupoid, Complex64::new(1.0, 0.0))
    }

    pub fn unit_indicator(groupoid: &Groupoid) -> Self {
        Self::new(ArrowFunction::identity(groupoid))
    }

    pub fn function(&self) -> &ArrowFunction {
        &self.h
    }

    pub fn groupoid(&self) -> &Groupoid {
        self.h.groupoid()
    }

    /// `M_h f`.
    pub fn apply(&self, f: &ArrowFunction) -> Result<ArrowFunction> {
        self.h.pointwise(f)
    }

    /// `H_x(γ, γ′) = h(γγ′⁻¹)` over the basis `G_x`.
    pub fn schur_symbol(&self, unit: usize) -> Result<&CMatrix> {
        match self.symbols.iter().find(|(x, _)| *x == unit) {
            Some((_, m)) => Ok(m),
            None => {
                self.groupoid().source_fiber(unit)?;
                unreachable!("every unit has a cached symbol")
            }
        }
    }

    pub fn symbols(&self) -> &[(usize, CMatrix)] {
        &self.symbols
    }

    /// `max_x γ₂(H_x)` with one certificate per unit.
    pub fn cb_norm(&self, tol: f64) -> Result<CbNorm> {
        self.cb_norm_with(tol, Exec::default())
    }

    pub fn cb_norm_with(&self, tol: f64, exec: Exec) -> Result<CbNorm> {
        let certificates =
            exec.map(&self.symbols, |(x, m)| gamma2::gamma2(m, tol).map(|c| (*x, c))).into_iter().collect::<Result<Vec<_>>>()?;
        let value = certificates.iter().map(|(_, c)| c.value).fold(0.0, f64::max);
        Ok(CbNorm { value, certificates })
    }

    /// Operator norm, reported as the cb value together with a lower bound
    /// from a seeded search over unitary test matrices, whose images under
    /// the Schur multiplier have norm at most the operator norm.
    pub fn op_norm(&self, tol: f64, seed: u64) -> Result<OpNorm> {
        let cb = self.cb_norm(tol)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut lower: f64 = 0.0;
        for (_, m) in &self.symbols {
            lower = lower.max(schur_lower_bound(m, 64, &mut rng));
        }
        Ok(OpNorm { value: cb.value, lower_bound: lower })
    }
}

/// Seeded random search: `max ‖H ⊙ U‖` over a few structured and random
/// unitaries `U`.
pub fn schur_lower_bound<R: Rng + ?Sized>(h: &CMatrix, samples: usize, rng: &mut R) -> f64 {
    let n = h.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut best = linalg::spectral_norm(&linalg::schur_product(h, &CMatrix::identity(n, n)));
    // The normalised all-ones matrix has norm 1.
    let ones = CMatrix::from_element(n, n, Complex64::new(1.0 / n as f64, 0.0));
    best = best.max(linalg::spectral_norm(&linalg::schur_product(h, &ones)));
    for _ in 0..samples {
        let g = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let q = g.qr().q();
        best = best.max(linalg::spectral_norm(&linalg::schur_product(h, &q)));
    }
    best
}

#[derive(Debug, Clone)]
pub struct CbNorm {
    pub value: f64,
    pub certificates: Vec<(usize, Gamma2Certificate)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpNorm {
    pub value: f64,
    pub lower_bound: f64,
}

/// A finite net `(h₁, …, h_k)`; convergence means the last term is within
/// `eps`.
#[derive(Debug, Clone)]
pub struct FejerNet {
    pub symbols: Vec<MultiplierSymbol>,
    pub eps: f64,
}

impl FejerNet {
    pub fn new(symbols: Vec<MultiplierSymbol>, eps: f64) -> Result<Self> {
        if let Some(first) = symbols.first() {
            if symbols.iter().any(|s| !same_groupoid(s.groupoid(), first.groupoid())) {
                return Err(Error::GroupoidMismatch);
            }
        }
        Ok(Self { symbols, eps })
    }

    /// Net of constant symbols.
    pub fn constants(groupoid: &Groupoid, values: &[f64], eps: f64) -> Self {
        Self { symbols: values.iter().map(|&c| MultiplierSymbol::constant(groupoid, Complex64::new(c, 0.0))).collect(), eps }
    }
}

/// All point masses followed by `random` seeded samples.
pub fn default_testset(groupoid: &Groupoid, random: usize, seed: u64) -> Vec<ArrowFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..groupoid.len())
        .map(|g| ArrowFunction::delta(groupoid, g))
        .chain((0..random).map(|_| ArrowFunction::random(groupoid, &mut rng)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct FejerReport {
    /// `distances[t][i] = ‖M_{h_i} f_t − f_t‖_r`.
    pub distances: Vec<Vec<f64>>,
    pub final_distance: f64,
    pub eps: f64,
    pub pass: bool,
}

pub fn check_fejer_net(net: &FejerNet, testset: &[ArrowFunction], exec: Exec) -> Result<FejerReport> {
    let distances = exec
        .map(testset, |f| {
            net.symbols.iter().map(|h| Ok((&h.apply(f)? - f).reduced_norm_with(Exec::Sequential))).collect::<Result<Vec<f64>>>()
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let final_distance = distances.iter().map(|d| d.last().copied().unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let pass = !net.symbols.is_empty() && final_distance <= net.eps;
    Ok(FejerReport { distances, final_distance, eps: net.eps, pass })
}

/// `(bounded, sup_i ‖M_{h_i}‖_cb)`. At desk scale the bound is always finite.
pub fn check_bounded_fejer(net: &FejerNet, tol: f64) -> Result<(bool, f64)> {
    let mut bound: f64 = 0.0;
    for h in &net.symbols {
        bound = bound.max(h.cb_norm(tol)?.value);
    }
    Ok((bound.is_finite(), bound))
}

/// `k(γ, x) = h(γ)` on `Γ ⋉ X`.
pub fn lift_group_multiplier(action: &GroupAction, h_group: &[Complex64]) -> Result<MultiplierSymbol> {
    if h_group.len() != action.elements().len() {
        return Err(Error::Malformed(format!(
            "group multiplier needs {} values, got {}",
            action.elements().len(),
            h_group.len()
        )));
    }
    let g = action.transformation_groupoid();
    let nx = action.space().len();
    let coeffs = (0..g.len()).map(|a| h_group[a / nx]).collect();
    Ok(MultiplierSymbol::new(ArrowFunction::from_coeffs(&g, coeffs)?))
}

/// A probability vector on the points of a space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitMeasure {
    weights: Vec<f64>,
}

impl UnitMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
            return Err(Error::InvalidMeasure("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![1.0 / n as f64; n] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Constant on orbits of the action.
    pub fn is_invariant(&self, action: &GroupAction) -> bool {
        self.weights.len() == action.space().len()
            && (0..action.elements().len())
                .all(|g| (0..self.weights.len()).all(|x| (self.weights[action.act(g, x)] - self.weights[x]).abs() <= 1e-12))
    }
}

/// `h̃(s) = Σ_x h(s, x) μ(x)`, a multiplier on the group itself.
pub fn average_multiplier(action: &GroupAction, h: &MultiplierSymbol, mu: &UnitMeasure) -> Result<MultiplierSymbol> {
    let g = action.transformation_groupoid();
    if !same_groupoid(h.groupoid(), &g) {
        return Err(Error::GroupoidMismatch);
    }
    if mu.weights.len() != action.space().len() {
        return Err(Error::InvalidMeasure("measure does not match the space".into()));
    }
    if !mu.is_invariant(action) {
        return Err(Error::MeasureNotInvariant);
    }
    let group = action.group_groupoid();
    let coeffs = (0..action.elements().len())
        .map(|s| (0..action.space().len()).map(|x| h.function().get(action.arrow(s, x)) * mu.weights[x]).sum())
        .collect();
    Ok(MultiplierSymbol::new(ArrowFunction::from_coeffs(&group, coeffs)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakAmenabilityReport {
    /// `C = max_i ‖M_{φ_i}‖_cb`.
    pub cb_bound: f64,
    /// `‖φ_i − 1‖_∞` per term.
    pub uniform_distances: Vec<f64>,
    /// Last term of `uniform_distances`; the desk-scale reading of uniform
    /// convergence.
    pub uniform_distance: f64,
    pub fejer: FejerReport,
    /// `‖M_{φ_i} f − f‖_r ≤ ‖φ_i − 1‖_∞ Σ_B ‖f·1_B‖_∞` over the bisection
    /// pieces of every test function and every term.
    pub bisection_bound_holds: bool,
    pub pass: bool,
}

pub fn weak_amenability_certificate(net: &FejerNet, testset: &[ArrowFunction], tol: f64) -> Result<WeakAmenabilityReport> {
    let (_, cb_bound) = check_bounded_fejer(net, tol)?;
    let uniform_distances: Vec<f64> =
        net.symbols.iter().map(|h| h.function().coeffs().iter().map(|c| (c - 1.0).norm()).fold(0.0, f64::max)).collect();
    let uniform_distance = uniform_distances.last().copied().unwrap_or(f64::INFINITY);
    let fejer = check_fejer_net(net, testset, Exec::default())?;
    let bisection_bound_holds = testset.iter().enumerate().all(|(t, f)| {
        let mass: f64 = f.decompose_partition_of_unity().iter().map(ArrowFunction::sup_norm).sum();
        uniform_distances.iter().zip(&fejer.distances[t]).all(|(&u, &d)| d <= u * mass + 1e-9 * (1.0 + mass))
    });
    let pass = uniform_distance <= net.eps && fejer.pass && bisection_bound_holds;
    Ok(WeakAmenabilityReport { cb_bound, uniform_distances, uniform_distance, fejer, bisection_bound_holds, pass })
}
