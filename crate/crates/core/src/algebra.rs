//! The convolution *-algebra of a finite groupoid and its regular
//! representation.
//!
//! In finite dimension the reduced C*-algebra is the convolution algebra
//! itself, so elements are stored as coefficient vectors over arrows and the
//! per-unit representation blocks are derived views.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::groupoid::{ArrowSet, Groupoid};
use crate::linalg::{self, CMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A complex function on the arrows of a groupoid.
#[derive(Debug, Clone)]
pub struct ArrowFunction {
    groupoid: Groupoid,
    coeffs: Vec<Complex64>,
}

impl PartialEq for ArrowFunction {
    fn eq(&self, other: &Self) -> bool {
        same_groupoid(&self.groupoid, &other.groupoid) && self.coeffs == other.coeffs
    }
}

pub fn same_groupoid(a: &Groupoid, b: &Groupoid) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// `π_x(f)` on `ℓ²(G_x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepBlock {
    pub unit: usize,
    /// `G_x` in canonical order; row and column labels of `matrix`.
    pub basis: Vec<usize>,
    pub matrix: CMatrix,
}

impl ArrowFunction {
    pub fn zero(groupoid: &Groupoid) -> Self {
        Self { groupoid: groupoid.clone(), coeffs: vec![ZERO; groupoid.len()] }
    }

    pub fn from_coeffs(groupoid: &Groupoid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != groupoid.len() {
            return Err(Error::Malformed(format!("expected {} coefficients, got {}", groupoid.len(), coeffs.len())));
        }
        Ok(Self { groupoid: groupoid.clone(), coeffs })
    }

    /// Point mass at an arrow.
    pub fn delta(groupoid: &Groupoid, arrow: usize) -> Self {
        let mut f = Self::zero(groupoid);
        f.coeffs[arrow] = ONE;
        f
    }

    pub fn delta_named(groupoid: &Groupoid, name: &str) -> Result<Self> {
        Ok(Self::delta(groupoid, groupoid.index_of(name)?))
    }

    pub fn indicator(groupoid: &Groupoid, set: &ArrowSet) -> Self {
        let mut f = Self::zero(groupoid);
        for g in set.iter() {
            f.coeffs[g] = ONE;
        }
        f
    }

    /// `Σ_x δ_x`, the unit of the algebra.
    pub fn identity(groupoid: &Groupoid) -> Self {
        Self::indicator(groupoid, &groupoid.unit_set())
    }

    /// Coefficients drawn uniformly from the complex unit square `[0,1]²`.
    pub fn random<R: Rng + ?Sized>(groupoid: &Groupoid, rng: &mut R) -> Self {
        let coeffs = (0..groupoid.len()).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        Self { groupoid: groupoid.clone(), coeffs }
    }

    /// Random coefficients on `set`, zero elsewhere.
    pub fn random_on<R: Rng + ?Sized>(groupoid: &Groupoid, set: &ArrowSet, rng: &mut R) -> Self {
        let mut f = Self::zero(groupoid);
        for g in set.iter() {
            f.coeffs[g] = Complex64::new(rng.gen(), rng.gen());
        }
        f
    }

    pub fn groupoid(&self) -> &Groupoid {
        &self.groupoid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, arrow: usize) -> Complex64 {
        self.coeffs[arrow]
    }

    pub fn set(&mut self, arrow: usize, value: Complex64) {
        self.coeffs[arrow] = value;
    }

    fn check_same(&self, other: &ArrowFunction) -> Result<()> {
        if same_groupoid(&self.groupoid, &other.groupoid) {
            Ok(())
        } else {
            Err(Error::GroupoidMismatch)
        }
    }

    fn zip_with(&self, other: &ArrowFunction, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            groupoid: self.groupoid.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| op(*a, *b)).collect(),
        })
    }

    pub fn try_add(&self, other: &ArrowFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &ArrowFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product, i.e. the multiplier `M_h` applied to `self`.
    pub fn pointwise(&self, other: &ArrowFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { groupoid: self.groupoid.clone(), coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Zero off `set`.
    pub fn restricted_to(&self, set: &ArrowSet) -> Self {
        let mut f = self.clone();
        for (g, c) in f.coeffs.iter_mut().enumerate() {
            if !set.contains(g) {
                *c = ZERO;
            }
        }
        f
    }

    /// `(f ∗ g)(γ) = Σ_{αβ = γ} f(α) g(β)`.
    pub fn convolve(&self, other: &ArrowFunction) -> Result<Self> {
        self.check_same(other)?;
        let g = &self.groupoid;
        let mut out = vec![ZERO; g.len()];
        for (a, &fa) in self.coeffs.iter().enumerate() {
            if fa == ZERO {
                continue;
            }
            for (b, &gb) in other.coeffs.iter().enumerate() {
                if gb == ZERO {
                    continue;
                }
                if let Some(c) = g.compose(a, b) {
                    out[c] += fa * gb;
                }
            }
        }
        Ok(Self { groupoid: g.clone(), coeffs: out })
    }

    /// `f*(γ) = conj(f(γ⁻¹))`.
    pub fn adjoint(&self) -> Self {
        let g = &self.groupoid;
        Self { groupoid: g.clone(), coeffs: (0..g.len()).map(|a| self.coeffs[g.inverse(a)].conj()).collect() }
    }

    /// `π_x(f)` with entry `(γ, γ′) = f(γ γ′⁻¹)` over the basis `G_x`.
    pub fn rep_block(&self, unit: usize) -> Result<RepBlock> {
        let g = &self.groupoid;
        let basis = g.source_fiber(unit)?;
        let k = basis.len();
        let matrix = DMatrix::from_fn(k, k, |i, j| {
            let t = g.compose(basis[i], g.inverse(basis[j])).expect("arrows with a common source are composable after inversion");
            self.coeffs[t]
        });
        Ok(RepBlock { unit, basis, matrix })
    }

    /// One block per unit, in canonical unit order.
    pub fn rep_blocks(&self, exec: Exec) -> Vec<RepBlock> {
        exec.map(self.groupoid.units(), |&x| self.rep_block(x).expect("x is a unit"))
    }

    /// `max_x ‖π_x(f)‖`.
    pub fn reduced_norm(&self) -> f64 {
        self.reduced_norm_with(Exec::default())
    }

    pub fn reduced_norm_with(&self, exec: Exec) -> f64 {
        exec.map(self.groupoid.units(), |&x| linalg::spectral_norm(&self.rep_block(x).expect("x is a unit").matrix))
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// Restriction to the unit space.
    pub fn conditional_expectation(&self) -> Self {
        self.restricted_to(&self.groupoid.unit_set())
    }

    /// Arrows where `|f| > tol`.
    pub fn support(&self, tol: f64) -> ArrowSet {
        ArrowSet::from_indices(
            self.groupoid.len(),
            self.coeffs.iter().enumerate().filter(|(_, c)| c.norm() > tol).map(|(i, _)| i),
        )
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// True iff `f ∗ δ_x ∗ f*` and `f* ∗ δ_x ∗ f` are supported on units (up
    /// to `tol`) for every unit `x`.
    pub fn is_normalizer(&self, tol: f64) -> bool {
        let g = &self.groupoid;
        let star = self.adjoint();
        g.units().iter().all(|&x| {
            let d = ArrowFunction::delta(g, x);
            let diag_only = |h: &ArrowFunction| h.coeffs.iter().enumerate().all(|(a, c)| g.is_unit(a) || c.norm() <= tol);
            let left = self.convolve(&d).and_then(|h| h.convolve(&star)).expect("same groupoid");
            let right = star.convolve(&d).and_then(|h| h.convolve(self)).expect("same groupoid");
            diag_only(&left) && diag_only(&right)
        })
    }

    /// Pieces `f·1_B` over the greedy bisection cover of `supp(f)`; they sum
    /// to `f` exactly.
    pub fn decompose_partition_of_unity(&self) -> Vec<ArrowFunction> {
        self.groupoid.cover_by_bisections(&self.support(0.0)).iter().map(|b| self.restricted_to(b)).collect()
    }
}

/// `m = n ∗ E(n* ∗ a)` with `n = 1_B`; in closed form
/// `m(γ) = |n(γ)|² a(γ)` on `B` and zero elsewhere.
pub fn normalizer_from_bisection(a: &ArrowFunction, bisection: &ArrowSet) -> Result<ArrowFunction> {
    let g = a.groupoid();
    if !g.is_bisection(bisection) {
        return Err(Error::NotABisection);
    }
    if !bisection.is_subset(&a.support(0.0)) {
        return Err(Error::NotInSupport);
    }
    let n = ArrowFunction::indicator(g, bisection);
    let mut m = ArrowFunction::zero(g);
    for gamma in bisection.iter() {
        m.coeffs[gamma] = n.coeffs[gamma] * n.coeffs[gamma].conj() * a.coeffs[gamma];
    }
    Ok(m)
}

/// Reads `j(f)(γ) = ⟨δ_γ, π_{s(γ)}(f) δ_{s(γ)}⟩` off a complete family of
/// blocks, then checks every block entry against the recovered function.
pub fn fourier_coefficients(groupoid: &Groupoid, blocks: &[RepBlock]) -> Result<ArrowFunction> {
    let g = groupoid;
    let mut by_unit: Vec<Option<&RepBlock>> = vec![None; g.len()];
    for b in blocks {
        if b.unit >= g.len() || !g.is_unit(b.unit) {
            return Err(Error::InconsistentBlocks(format!("block for non-unit #{}", b.unit)));
        }
        if by_unit[b.unit].replace(b).is_some() {
            return Err(Error::InconsistentBlocks(format!("two blocks for `{}`", g.name(b.unit))));
        }
        let fiber = g.source_fiber(b.unit)?;
        if b.basis != fiber || b.matrix.nrows() != fiber.len() || b.matrix.ncols() != fiber.len() {
            return Err(Error::InconsistentBlocks(format!("wrong basis at `{}`", g.name(b.unit))));
        }
    }
    let mut coeffs = vec![ZERO; g.len()];
    for (gamma, slot) in coeffs.iter_mut().enumerate() {
        let x = g.source(gamma);
        let block = by_unit[x].ok_or_else(|| Error::InconsistentBlocks(format!("missing block for `{}`", g.name(x))))?;
        let row = block.basis.iter().position(|&b| b == gamma).unwrap();
        let col = block.basis.iter().position(|&b| b == x).unwrap();
        *slot = block.matrix[(row, col)];
    }
    let f = ArrowFunction::from_coeffs(g, coeffs)?;
    let scale = blocks.iter().map(|b| linalg::max_abs(&b.matrix)).fold(1.0, f64::max);
    for b in blocks {
        let expect = f.rep_block(b.unit)?;
        if linalg::max_abs(&(&expect.matrix - &b.matrix)) > 1e-12 * scale {
            return Err(Error::InconsistentBlocks(format!("block at `{}` is not of the form f(γγ′⁻¹)", g.name(b.unit))));
        }
    }
    Ok(f)
}

impl Add for &ArrowFunction {
    type Output = ArrowFunction;

    fn add(self, rhs: Self) -> ArrowFunction {
        self.try_add(rhs).expect("functions on different groupoids")
    }
}

impl Sub for &ArrowFunction {
    type Output = ArrowFunction;

    fn sub(self, rhs: Self) -> ArrowFunction {
        self.try_sub(rhs).expect("functions on different groupoids")
    }
}

impl Mul<Complex64> for &ArrowFunction {
    type Output = ArrowFunction;

    fn mul(self, rhs: Complex64) -> ArrowFunction {
        self.scale(rhs)
    }
}
