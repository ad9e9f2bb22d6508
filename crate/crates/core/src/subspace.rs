//! Orthonormal bases of subspaces of functions on arrows, and the closure
//! constructions that produce intermediate algebras and diagonal bimodules.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{same_groupoid, ArrowFunction};
use crate::error::{Error, Result};
use crate::groupoid::{ArrowSet, Groupoid};
use crate::linalg::RANK_TOL;

/// Threshold on the mutual projection residual for subspace equality.
pub const SUBSPACE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceKind {
    Plain,
    Algebra,
    Bimodule,
}

/// Orthonormal vectors (under the coordinate inner product) spanning a
/// subspace of `C(G)`.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    groupoid: Groupoid,
    vectors: Vec<ArrowFunction>,
    rank_tol: f64,
    kind: SubspaceKind,
}

fn inner(a: &ArrowFunction, b: &ArrowFunction) -> Complex64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x.conj() * y).sum()
}

impl SubspaceBasis {
    pub fn new(groupoid: &Groupoid, kind: SubspaceKind) -> Self {
        Self { groupoid: groupoid.clone(), vectors: Vec::new(), rank_tol: RANK_TOL, kind }
    }

    /// Orthonormal basis of the span of `vectors`.
    pub fn span(groupoid: &Groupoid, vectors: &[ArrowFunction], kind: SubspaceKind) -> Result<Self> {
        let mut basis = Self::new(groupoid, kind);
        for v in vectors {
            basis.insert(v)?;
        }
        Ok(basis)
    }

    /// `span{δ_γ : γ ∈ set}`.
    pub fn coordinate(groupoid: &Groupoid, set: &ArrowSet) -> Self {
        Self {
            groupoid: groupoid.clone(),
            vectors: set.iter().map(|g| ArrowFunction::delta(groupoid, g)).collect(),
            rank_tol: RANK_TOL,
            kind: SubspaceKind::Plain,
        }
    }

    pub fn with_kind(mut self, kind: SubspaceKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn groupoid(&self) -> &Groupoid {
        &self.groupoid
    }

    pub fn vectors(&self) -> &[ArrowFunction] {
        &self.vectors
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn kind(&self) -> SubspaceKind {
        self.kind
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    /// Adds the component of `v` orthogonal to the current span when it is
    /// larger than `rank_tol · ‖v‖`. Returns whether the rank grew.
    pub fn insert(&mut self, v: &ArrowFunction) -> Result<bool> {
        if !same_groupoid(&self.groupoid, v.groupoid()) {
            return Err(Error::GroupoidMismatch);
        }
        let norm = v.l2_norm();
        if norm == 0.0 {
            return Ok(false);
        }
        // Two passes of modified Gram-Schmidt.
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &self.vectors {
                let c = inner(q, &r);
                r = &r - &q.scale(c);
            }
        }
        let rn = r.l2_norm();
        if rn <= self.rank_tol * norm {
            return Ok(false);
        }
        self.vectors.push(r.scale(Complex64::new(1.0 / rn, 0.0)));
        Ok(true)
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, f: &ArrowFunction) -> ArrowFunction {
        self.vectors.iter().fold(ArrowFunction::zero(&self.groupoid), |acc, q| &acc + &q.scale(inner(q, f)))
    }

    /// `‖f − Pf‖`.
    pub fn residual(&self, f: &ArrowFunction) -> f64 {
        (f - &self.project(f)).l2_norm()
    }

    /// Largest residual of either basis projected onto the other.
    pub fn mutual_residual(&self, other: &SubspaceBasis) -> f64 {
        let one = self.vectors.iter().map(|v| other.residual(v));
        let two = other.vectors.iter().map(|v| self.residual(v));
        one.chain(two).fold(0.0, f64::max)
    }

    pub fn same_subspace(&self, other: &SubspaceBasis, tol: f64) -> bool {
        self.rank() == other.rank() && self.mutual_residual(other) <= tol
    }

    /// Union of the supports of the basis vectors.
    pub fn support_union(&self, tol: f64) -> ArrowSet {
        self.vectors.iter().fold(ArrowSet::empty(self.groupoid.len()), |acc, v| acc.union(&v.support(tol)))
    }
}

/// Smallest *-subalgebra containing `generators` (and every `δ_x` when
/// `adjoin_units`), grown by adding adjoints and pairwise products until the
/// rank stops changing.
pub fn algebra_closure(groupoid: &Groupoid, generators: &[ArrowFunction], adjoin_units: bool) -> Result<SubspaceBasis> {
    let mut basis = SubspaceBasis::new(groupoid, SubspaceKind::Algebra);
    if adjoin_units {
        for &x in groupoid.units() {
            basis.insert(&ArrowFunction::delta(groupoid, x))?;
        }
    }
    for g in generators {
        basis.insert(g)?;
    }
    let max_rounds = groupoid.len() + 2;
    let mut done = 0;
    for _ in 0..max_rounds {
        let len = basis.rank();
        if done == len {
            return Ok(basis);
        }
        for i in done..len {
            let star = basis.vectors[i].adjoint();
            basis.insert(&star)?;
        }
        for i in 0..len {
            for j in 0..len {
                if i < done && j < done {
                    continue;
                }
                let prod = basis.vectors[i].convolve(&basis.vectors[j])?;
                basis.insert(&prod)?;
            }
        }
        done = len;
    }
    Err(Error::ClosureDiverged(max_rounds))
}

/// Smallest subspace containing `generators` and closed under left and right
/// convolution by every `δ_x`.
pub fn bimodule_closure(groupoid: &Groupoid, generators: &[ArrowFunction]) -> Result<SubspaceBasis> {
    let mut basis = SubspaceBasis::new(groupoid, SubspaceKind::Bimodule);
    for g in generators {
        basis.insert(g)?;
    }
    let deltas: Vec<ArrowFunction> = groupoid.units().iter().map(|&x| ArrowFunction::delta(groupoid, x)).collect();
    let max_rounds = groupoid.len() + 2;
    let mut done = 0;
    for _ in 0..max_rounds {
        let len = basis.rank();
        if done == len {
            return Ok(basis);
        }
        for i in done..len {
            for d in &deltas {
                let left = d.convolve(&basis.vectors[i])?;
                let right = basis.vectors[i].convolve(d)?;
                basis.insert(&left)?;
                basis.insert(&right)?;
            }
        }
        done = len;
    }
    Err(Error::ClosureDiverged(max_rounds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn delta(g: &Groupoid, name: &str) -> ArrowFunction {
        ArrowFunction::delta_named(g, name).unwrap()
    }

    #[test]
    fn algebra_closure_examples() {
        let r2 = corpus::pair_groupoid(&["p", "q"]);
        let b = algebra_closure(&r2, &[delta(&r2, "(p,q)")], true).unwrap();
        assert_eq!(b.rank(), 4);
        assert_eq!(algebra_closure(&r2, &[], true).unwrap().rank(), 2);

        let z2 = corpus::cyclic_group(2);
        let b = algebra_closure(&z2, &[delta(&z2, "e")], false).unwrap();
        assert_eq!(b.rank(), 1);
        assert_eq!(b.kind(), SubspaceKind::Algebra);
    }

    #[test]
    fn bimodule_closure_examples() {
        let r2 = corpus::pair_groupoid(&["p", "q"]);
        let m = bimodule_closure(&r2, &[delta(&r2, "(p,q)")]).unwrap();
        assert_eq!(m.rank(), 1);
        let expected = SubspaceBasis::coordinate(&r2, &ArrowSet::from_indices(4, [r2.index_of("(p,q)").unwrap()]));
        assert!(m.same_subspace(&expected, SUBSPACE_TOL));

        let z2 = corpus::cyclic_group(2);
        let f = &delta(&z2, "e") + &delta(&z2, "a");
        let m = bimodule_closure(&z2, std::slice::from_ref(&f)).unwrap();
        assert_eq!(m.rank(), 1);
        assert!(m.residual(&f) < 1e-12);

        let all: Vec<ArrowFunction> = (0..r2.len()).map(|g| ArrowFunction::delta(&r2, g)).collect();
        assert_eq!(bimodule_closure(&r2, &all).unwrap().rank(), 4);
    }

    #[test]
    fn mutual_residual_detects_difference() {
        let r2 = corpus::pair_groupoid(&["p", "q"]);
        let a = SubspaceBasis::coordinate(&r2, &ArrowSet::from_indices(4, [0, 1]));
        let b = SubspaceBasis::coordinate(&r2, &ArrowSet::from_indices(4, [0, 2]));
        assert!(!a.same_subspace(&b, SUBSPACE_TOL));
        let rotated =
            SubspaceBasis::span(&r2, &[&delta(&r2, "(p,p)") + &delta(&r2, "(q,q)"), delta(&r2, "(q,q)")], SubspaceKind::Plain)
                .unwrap();
        assert!(a.same_subspace(&rotated, SUBSPACE_TOL));
    }
}
