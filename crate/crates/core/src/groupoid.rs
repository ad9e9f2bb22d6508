//! Finite groupoids with the discrete topology.
//!
//! Arrows are identified by their position in declaration order; that order is
//! the canonical order used by every greedy procedure and basis in the crate.
//! In the discrete topology every [`ArrowSet`] is open, closed and compact, so
//! the étale and Hausdorff hypotheses hold automatically.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of arrows for subset enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 16;

pub type Groupoid = Arc<FiniteGroupoid>;

/// A single broken axiom found by [`FiniteGroupoid::from_raw`] or [`FiniteGroupoid::from_parts`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateArrow(String),
    UndeclaredArrow(String),
    MissingMap { map: &'static str, arrow: String },
    MissingComposite { first: String, second: String },
    SpuriousComposite { first: String, second: String },
    ConflictingComposite { first: String, second: String },
    CompositeEndpoints { first: String, second: String },
    NonAssociative { a: String, b: String, c: String },
    InverseNotInvolutive(String),
    InverseEndpoints(String),
    InverseLaw(String),
    IdentityLaw(String),
    UnitInconsistent(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateArrow(a) => write!(f, "duplicate arrow `{a}`"),
            Violation::UndeclaredArrow(a) => write!(f, "undeclared arrow `{a}`"),
            Violation::MissingMap { map, arrow } => write!(f, "{map} missing for `{arrow}`"),
            Violation::MissingComposite { first, second } => {
                write!(f, "missing composite `{first}`∘`{second}`")
            }
            Violation::SpuriousComposite { first, second } => {
                write!(f, "composite `{first}`∘`{second}` given for a non-composable pair")
            }
            Violation::ConflictingComposite { first, second } => {
                write!(f, "conflicting entries for `{first}`∘`{second}`")
            }
            Violation::CompositeEndpoints { first, second } => {
                write!(f, "source/range of `{first}`∘`{second}` are wrong")
            }
            Violation::NonAssociative { a, b, c } => {
                write!(f, "non-associative triple (`{a}`, `{b}`, `{c}`)")
            }
            Violation::InverseNotInvolutive(a) => write!(f, "inverse not involutive at `{a}`"),
            Violation::InverseEndpoints(a) => write!(f, "source(inverse(`{a}`)) != range(`{a}`)"),
            Violation::InverseLaw(a) => write!(f, "`{a}` composed with its inverse is not a unit"),
            Violation::IdentityLaw(a) => write!(f, "identity law fails at `{a}`"),
            Violation::UnitInconsistent(a) => write!(f, "unit set inconsistent at `{a}`"),
        }
    }
}

/// On-disk groupoid table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGroupoid {
    pub arrows: Vec<String>,
    pub source: BTreeMap<String, String>,
    pub range: BTreeMap<String, String>,
    pub inverse: BTreeMap<String, String>,
    /// Triples `[a, b, c]` meaning `a ∘ b = c`.
    pub compose: Vec<[String; 3]>,
}

/// A validated finite groupoid. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    names: Vec<String>,
    index: HashMap<String, usize>,
    source: Vec<usize>,
    range: Vec<usize>,
    inverse: Vec<usize>,
    table: Vec<Option<usize>>,
    units: Vec<usize>,
}

/// Membership vector over the arrows of one groupoid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowSet {
    members: Vec<bool>,
}

impl ArrowSet {
    pub fn empty(len: usize) -> Self {
        Self { members: vec![false; len] }
    }

    pub fn full(len: usize) -> Self {
        Self { members: vec![true; len] }
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(len);
        for i in indices {
            set.members[i] = true;
        }
        set
    }

    pub fn from_mask(len: usize, mask: u64) -> Self {
        Self { members: (0..len).map(|i| mask >> i & 1 == 1).collect() }
    }

    pub fn universe_len(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, arrow: usize) -> bool {
        self.members[arrow]
    }

    pub fn insert(&mut self, arrow: usize) {
        self.members[arrow] = true;
    }

    pub fn remove(&mut self, arrow: usize) {
        self.members[arrow] = false;
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    /// Members in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn is_subset(&self, other: &ArrowSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn union(&self, other: &ArrowSet) -> ArrowSet {
        ArrowSet { members: self.members.iter().zip(&other.members).map(|(a, b)| *a || *b).collect() }
    }

    pub fn complement(&self) -> ArrowSet {
        ArrowSet { members: self.members.iter().map(|m| !m).collect() }
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.members
    }
}

impl FiniteGroupoid {
    /// Validates a raw table. Every axiom violation found is reported.
    pub fn from_raw(raw: &RawGroupoid) -> Result<Groupoid> {
        let mut violations = Vec::new();
        let mut index = HashMap::new();
        for (i, name) in raw.arrows.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                violations.push(Violation::DuplicateArrow(name.clone()));
            }
        }
        if !violations.is_empty() {
            return Err(Error::InvalidGroupoid(violations));
        }

        let lookup_map = |map: &BTreeMap<String, String>, label: &'static str, violations: &mut Vec<Violation>| -> Vec<usize> {
            for (k, v) in map {
                for name in [k, v] {
                    if !index.contains_key(name) {
                        violations.push(Violation::UndeclaredArrow(name.clone()));
                    }
                }
            }
            raw.arrows
                .iter()
                .map(|a| match map.get(a).and_then(|v| index.get(v)) {
                    Some(&j) => j,
                    None => {
                        violations.push(Violation::MissingMap { map: label, arrow: a.clone() });
                        0
                    }
                })
                .collect()
        };
        let source = lookup_map(&raw.source, "source", &mut violations);
        let range = lookup_map(&raw.range, "range", &mut violations);
        let inverse = lookup_map(&raw.inverse, "inverse", &mut violations);

        let n = raw.arrows.len();
        let mut table = vec![None; n * n];
        for [a, b, c] in &raw.compose {
            let ids: Vec<Option<usize>> = [a, b, c].iter().map(|x| index.get(*x).copied()).collect();
            for (name, id) in [a, b, c].iter().zip(&ids) {
                if id.is_none() {
                    violations.push(Violation::UndeclaredArrow((*name).clone()));
                }
            }
            if let [Some(i), Some(j), Some(k)] = ids[..] {
                match table[i * n + j] {
                    Some(prev) if prev != k => {
                        violations.push(Violation::ConflictingComposite { first: a.clone(), second: b.clone() })
                    }
                    _ => table[i * n + j] = Some(k),
                }
            }
        }
        if !violations.is_empty() {
            return Err(Error::InvalidGroupoid(violations));
        }
        Self::from_parts(raw.arrows.clone(), source, range, inverse, table)
    }

    /// Builds and validates from index tables. `table[a * n + b]` holds `a ∘ b`.
    pub fn from_parts(
        names: Vec<String>,
        source: Vec<usize>,
        range: Vec<usize>,
        inverse: Vec<usize>,
        table: Vec<Option<usize>>,
    ) -> Result<Groupoid> {
        let n = names.len();
        let index = names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect::<HashMap<_, _>>();
        if index.len() != n {
            let mut seen = HashMap::new();
            let dups = names
                .iter()
                .filter(|s| seen.insert(s.as_str(), ()).is_some())
                .map(|s| Violation::DuplicateArrow(s.clone()))
                .collect();
            return Err(Error::InvalidGroupoid(dups));
        }
        let units = (0..n).filter(|&g| inverse[g] == g && table[g * n + g] == Some(g)).collect();
        let g = FiniteGroupoid { names, index, source, range, inverse, table, units };
        let violations = g.violations();
        if violations.is_empty() {
            Ok(Arc::new(g))
        } else {
            Err(Error::InvalidGroupoid(violations))
        }
    }

    fn violations(&self) -> Vec<Violation> {
        let n = self.len();
        let name = |i: usize| self.names[i].clone();
        let mut out = Vec::new();
        let is_unit = |g: usize| self.units.binary_search(&g).is_ok();

        for g in 0..n {
            for (end, label) in [(self.source[g], "source"), (self.range[g], "range")] {
                if !is_unit(end) || self.source[end] != end || self.range[end] != end {
                    out.push(Violation::UnitInconsistent(format!("{label} of {}", name(g))));
                }
            }
        }
        for &u in &self.units {
            if self.source[u] != u || self.range[u] != u {
                out.push(Violation::UnitInconsistent(name(u)));
            }
        }
        if !out.is_empty() {
            return out;
        }

        for a in 0..n {
            for b in 0..n {
                let composable = self.source[a] == self.range[b];
                match (composable, self.table[a * n + b]) {
                    (true, None) => out.push(Violation::MissingComposite { first: name(a), second: name(b) }),
                    (false, Some(_)) => out.push(Violation::SpuriousComposite { first: name(a), second: name(b) }),
                    (true, Some(c)) => {
                        if self.source[c] != self.source[b] || self.range[c] != self.range[a] {
                            out.push(Violation::CompositeEndpoints { first: name(a), second: name(b) });
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        if !out.is_empty() {
            return out;
        }

        for g in 0..n {
            let inv = self.inverse[g];
            if self.inverse[inv] != g {
                out.push(Violation::InverseNotInvolutive(name(g)));
            }
            if self.source[inv] != self.range[g] {
                out.push(Violation::InverseEndpoints(name(g)));
            }
            if out.is_empty()
                && (self.table[g * n + inv] != Some(self.range[g]) || self.table[inv * n + g] != Some(self.source[g]))
            {
                out.push(Violation::InverseLaw(name(g)));
            }
            if self.table[self.range[g] * n + g] != Some(g) || self.table[g * n + self.source[g]] != Some(g) {
                out.push(Violation::IdentityLaw(name(g)));
            }
        }
        if !out.is_empty() {
            return out;
        }

        for a in 0..n {
            for b in self.with_source_any(self.source[a]) {
                let ab = self.table[a * n + b].unwrap();
                for c in self.with_source_any(self.source[b]) {
                    let bc = self.table[b * n + c].unwrap();
                    if self.table[ab * n + c] != self.table[a * n + bc] {
                        out.push(Violation::NonAssociative { a: name(a), b: name(b), c: name(c) });
                    }
                }
            }
        }
        out
    }

    // Arrows whose range is `x`, i.e. those that can be composed on the right of
    // anything with source `x`.
    fn with_source_any(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&b| self.range[b] == x)
    }

    pub fn to_raw(&self) -> RawGroupoid {
        let map = |v: &[usize]| self.names.iter().zip(v).map(|(a, &b)| (a.clone(), self.names[b].clone())).collect();
        let n = self.len();
        let mut compose = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if let Some(c) = self.table[a * n + b] {
                    compose.push([self.names[a].clone(), self.names[b].clone(), self.names[c].clone()]);
                }
            }
        }
        RawGroupoid {
            arrows: self.names.clone(),
            source: map(&self.source),
            range: map(&self.range),
            inverse: map(&self.inverse),
            compose,
        }
    }

    /// The groupoid with no arrows.
    pub fn empty() -> Groupoid {
        Arc::new(FiniteGroupoid {
            names: Vec::new(),
            index: HashMap::new(),
            source: Vec::new(),
            range: Vec::new(),
            inverse: Vec::new(),
            table: Vec::new(),
            units: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, arrow: usize) -> &str {
        &self.names[arrow]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownArrow(name.to_owned()))
    }

    pub fn source(&self, arrow: usize) -> usize {
        self.source[arrow]
    }

    pub fn range(&self, arrow: usize) -> usize {
        self.range[arrow]
    }

    pub fn inverse(&self, arrow: usize) -> usize {
        self.inverse[arrow]
    }

    /// `a ∘ b`, defined iff `source(a) == range(b)`.
    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.table[a * self.len() + b]
    }

    /// Units in canonical order.
    pub fn units(&self) -> &[usize] {
        &self.units
    }

    pub fn is_unit(&self, arrow: usize) -> bool {
        self.units.binary_search(&arrow).is_ok()
    }

    pub fn unit_set(&self) -> ArrowSet {
        ArrowSet::from_indices(self.len(), self.units.iter().copied())
    }

    fn check_unit(&self, x: usize) -> Result<()> {
        if x < self.len() && self.is_unit(x) {
            Ok(())
        } else if x < self.len() {
            Err(Error::NotAUnit(self.names[x].clone()))
        } else {
            Err(Error::UnknownArrow(format!("#{x}")))
        }
    }

    /// `G_x = {γ : s(γ) = x}` in canonical order.
    pub fn source_fiber(&self, x: usize) -> Result<Vec<usize>> {
        self.check_unit(x)?;
        Ok((0..self.len()).filter(|&g| self.source[g] == x).collect())
    }

    /// True iff source and range are both injective on `set`.
    pub fn is_bisection(&self, set: &ArrowSet) -> bool {
        let mut seen_source = vec![false; self.len()];
        let mut seen_range = vec![false; self.len()];
        for g in set.iter() {
            let (s, r) = (self.source[g], self.range[g]);
            if seen_source[s] || seen_range[r] {
                return false;
            }
            seen_source[s] = true;
            seen_range[r] = true;
        }
        true
    }

    /// Greedy partition of `set` into bisections. Arrows are scanned in
    /// canonical order and each goes into the first class where neither its
    /// source nor its range is already used.
    pub fn cover_by_bisections(&self, set: &ArrowSet) -> Vec<ArrowSet> {
        let n = self.len();
        let mut classes: Vec<(ArrowSet, Vec<bool>, Vec<bool>)> = Vec::new();
        for g in set.iter() {
            let (s, r) = (self.source[g], self.range[g]);
            match classes.iter_mut().find(|(_, src, rng)| !src[s] && !rng[r]) {
                Some((class, src, rng)) => {
                    class.insert(g);
                    src[s] = true;
                    rng[r] = true;
                }
                None => {
                    let mut src = vec![false; n];
                    let mut rng = vec![false; n];
                    src[s] = true;
                    rng[r] = true;
                    classes.push((ArrowSet::from_indices(n, [g]), src, rng));
                }
            }
        }
        classes.into_iter().map(|(c, _, _)| c).collect()
    }

    /// `Iso(x) = {γ : s(γ) = r(γ) = x}`.
    pub fn isotropy(&self, x: usize) -> Result<ArrowSet> {
        self.check_unit(x)?;
        Ok(ArrowSet::from_indices(self.len(), (0..self.len()).filter(|&g| self.source[g] == x && self.range[g] == x)))
    }

    /// Every isotropy group is trivial. For a finite discrete groupoid this is
    /// the same as being topologically principal.
    pub fn is_principal(&self) -> bool {
        (0..self.len()).all(|g| self.source[g] != self.range[g] || self.is_unit(g))
    }

    /// Orbits of the unit space, each listed in canonical order, ordered by
    /// their first unit.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for g in 0..n {
            let a = find(&mut parent, self.source[g]);
            let b = find(&mut parent, self.range[g]);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &u in &self.units {
            let root = find(&mut parent, u);
            groups.entry(root).or_default().push(u);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by_key(|o| o[0]);
        out
    }

    /// `s(γ) ∈ U ⇔ r(γ) ∈ U` for every arrow.
    pub fn is_invariant(&self, units: &ArrowSet) -> bool {
        units.iter().all(|u| self.is_unit(u))
            && (0..self.len()).all(|g| units.contains(self.source[g]) == units.contains(self.range[g]))
    }

    /// All invariant unit sets, i.e. all unions of orbits. Bit `i` of the
    /// enumeration index selects orbit `i`.
    pub fn invariant_subsets(&self) -> Vec<ArrowSet> {
        let orbits = self.orbits();
        let k = orbits.len();
        assert!(k < 63, "too many orbits to enumerate");
        (0u64..1 << k)
            .map(|mask| {
                let mut set = ArrowSet::empty(self.len());
                for (i, orbit) in orbits.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        orbit.iter().for_each(|&u| set.insert(u));
                    }
                }
                set
            })
            .collect()
    }

    /// `G|_F = {γ : s(γ) ∈ F, r(γ) ∈ F}` together with the parent index of
    /// every arrow of the restriction.
    pub fn restrict_with_embedding(&self, units: &ArrowSet) -> Result<(Groupoid, Vec<usize>)> {
        if !self.is_invariant(units) {
            return Err(Error::NotInvariant);
        }
        let keep: Vec<usize> =
            (0..self.len()).filter(|&g| units.contains(self.source[g]) && units.contains(self.range[g])).collect();
        Ok((self.subgroupoid_on(&keep)?, keep))
    }

    pub fn restrict(&self, units: &ArrowSet) -> Result<Groupoid> {
        self.restrict_with_embedding(units).map(|(g, _)| g)
    }

    /// Full subgroupoid on the listed arrows, which must be closed under the
    /// structure maps.
    pub(crate) fn subgroupoid_on(&self, keep: &[usize]) -> Result<Groupoid> {
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &g) in keep.iter().enumerate() {
            pos[g] = i;
        }
        let remap = |g: usize| pos[g];
        let m = keep.len();
        let mut table = vec![None; m * m];
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                table[i * m + j] = self.compose(a, b).map(remap);
            }
        }
        FiniteGroupoid::from_parts(
            keep.iter().map(|&g| self.names[g].clone()).collect(),
            keep.iter().map(|&g| remap(self.source[g])).collect(),
            keep.iter().map(|&g| remap(self.range[g])).collect(),
            keep.iter().map(|&g| remap(self.inverse[g])).collect(),
            table,
        )
    }

    /// Closed under inverse and composition and containing the endpoints of
    /// its members.
    pub fn is_subgroupoid(&self, set: &ArrowSet) -> bool {
        set.iter().all(|g| {
            set.contains(self.inverse[g])
                && set.contains(self.source[g])
                && set.contains(self.range[g])
                && set.iter().all(|h| match self.compose(g, h) {
                    Some(c) => set.contains(c),
                    None => true,
                })
        })
    }

    /// Brute-force subgroupoid census over all `2^|arrows|` subsets.
    pub fn enumerate_subgroupoids(&self, require_all_units: bool, cap: usize) -> Result<Vec<ArrowSet>> {
        let n = self.len();
        if n > cap || n >= 63 {
            return Err(Error::CapExceeded { what: "subgroupoid enumeration", size: n, cap });
        }
        let units = self.unit_set();
        Ok((0u64..1 << n)
            .map(|mask| ArrowSet::from_mask(n, mask))
            .filter(|s| (!require_all_units || units.is_subset(s)) && self.is_subgroupoid(s))
            .collect())
    }

    /// Searches for a structure-preserving bijection `self → other` by
    /// backtracking. Returns the image of each arrow.
    pub fn find_isomorphism(&self, other: &FiniteGroupoid) -> Option<Vec<usize>> {
        if self.len() != other.len() || self.units.len() != other.units.len() {
            return None;
        }
        let n = self.len();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        // Units first so endpoint constraints prune early.
        let order: Vec<usize> = self.units.iter().copied().chain((0..n).filter(|g| !self.is_unit(*g))).collect();
        fn consistent(a: &FiniteGroupoid, b: &FiniteGroupoid, map: &[usize], g: usize) -> bool {
            let img = map[g];
            if a.is_unit(g) != b.is_unit(img) {
                return false;
            }
            let mapped = |x: usize| (map[x] != usize::MAX).then(|| map[x]);
            for (x, y) in [(a.source(g), b.source(img)), (a.range(g), b.range(img))] {
                if let Some(m) = mapped(x) {
                    if m != y {
                        return false;
                    }
                }
            }
            if let Some(m) = mapped(a.inverse(g)) {
                if m != b.inverse(img) {
                    return false;
                }
            }
            for h in 0..a.len() {
                let Some(hm) = mapped(h) else { continue };
                for (p, q) in [(g, h), (h, g)] {
                    let (pm, qm) = (map[p], map[q]);
                    match (a.compose(p, q), b.compose(pm, qm)) {
                        (None, None) => {}
                        (Some(c), Some(d)) => {
                            if let Some(cm) = mapped(c) {
                                if cm != d {
                                    return false;
                                }
                            }
                        }
                        _ => return false,
                    }
                }
                let _ = hm;
            }
            true
        }
        fn go(
            a: &FiniteGroupoid,
            b: &FiniteGroupoid,
            order: &[usize],
            depth: usize,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            if depth == order.len() {
                return true;
            }
            let g = order[depth];
            for img in 0..b.len() {
                if used[img] {
                    continue;
                }
                map[g] = img;
                used[img] = true;
                if consistent(a, b, map, g) && go(a, b, order, depth + 1, map, used) {
                    return true;
                }
                used[img] = false;
                map[g] = usize::MAX;
            }
            false
        }
        go(self, other, &order, 0, &mut map, &mut used).then_some(map)
    }
}

/// Tagged disjoint union; arrows of `left` come first, prefixed `1.`, then
/// those of `right`, prefixed `2.`. No cross composition exists.
pub fn disjoint_union(left: &FiniteGroupoid, right: &FiniteGroupoid) -> Groupoid {
    let (n, m) = (left.len(), right.len());
    let total = n + m;
    let names = left.names.iter().map(|s| format!("1.{s}")).chain(right.names.iter().map(|s| format!("2.{s}"))).collect();
    let shift = |v: &[usize]| v.iter().map(|&x| x + n).collect::<Vec<_>>();
    let cat = |a: &[usize], b: &[usize]| a.iter().copied().chain(shift(b)).collect::<Vec<_>>();
    let mut table = vec![None; total * total];
    for a in 0..n {
        for b in 0..n {
            table[a * total + b] = left.compose(a, b);
        }
    }
    for a in 0..m {
        for b in 0..m {
            table[(a + n) * total + b + n] = right.compose(a, b).map(|c| c + n);
        }
    }
    FiniteGroupoid::from_parts(
        names,
        cat(&left.source, &right.source),
        cat(&left.range, &right.range),
        cat(&left.inverse, &right.inverse),
        table,
    )
    .expect("disjoint union of valid groupoids is valid")
}

/// On-disk action description. Cayley entries may be element names or
/// indices into `elements`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawAction {
    pub cayley: Vec<Vec<CayleyEntry>>,
    pub elements: Vec<String>,
    pub space: Vec<String>,
    pub act: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CayleyEntry {
    Index(usize),
    Name(String),
}

/// A finite group acting on a finite set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAction {
    elements: Vec<String>,
    space: Vec<String>,
    /// `mul[g * k + h] = g·h`.
    mul: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    /// `act[g * |X| + x] = g·x`.
    act: Vec<usize>,
}

impl GroupAction {
    pub fn from_raw(raw: &RawAction) -> Result<Self> {
        let bad = |m: String| Error::InvalidAction(m);
        let k = raw.elements.len();
        let el: HashMap<&str, usize> = raw.elements.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let pt: HashMap<&str, usize> = raw.space.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if el.len() != k || pt.len() != raw.space.len() {
            return Err(bad("duplicate element or point names".into()));
        }
        if raw.cayley.len() != k || raw.cayley.iter().any(|row| row.len() != k) {
            return Err(bad(format!("cayley table must be {k}x{k}")));
        }
        let mut mul = Vec::with_capacity(k * k);
        for row in &raw.cayley {
            for entry in row {
                mul.push(match entry {
                    CayleyEntry::Index(i) if *i < k => *i,
                    CayleyEntry::Index(i) => return Err(bad(format!("cayley index {i} out of range"))),
                    CayleyEntry::Name(s) => {
                        *el.get(s.as_str()).ok_or_else(|| bad(format!("unknown element `{s}` in cayley table")))?
                    }
                });
            }
        }
        let nx = raw.space.len();
        let mut act = vec![usize::MAX; k * nx];
        for (g, row) in &raw.act {
            let gi = *el.get(g.as_str()).ok_or_else(|| bad(format!("unknown element `{g}`")))?;
            for (x, y) in row {
                let xi = *pt.get(x.as_str()).ok_or_else(|| bad(format!("unknown point `{x}`")))?;
                let yi = *pt.get(y.as_str()).ok_or_else(|| bad(format!("unknown point `{y}`")))?;
                act[gi * nx + xi] = yi;
            }
        }
        if act.contains(&usize::MAX) {
            return Err(bad("act table is incomplete".into()));
        }
        Self::new(raw.elements.clone(), raw.space.clone(), mul, act)
    }

    pub fn new(elements: Vec<String>, space: Vec<String>, mul: Vec<usize>, act: Vec<usize>) -> Result<Self> {
        let bad = |m: String| Error::InvalidAction(m);
        let k = elements.len();
        let nx = space.len();
        if k == 0 {
            return Err(bad("group has no elements".into()));
        }
        if mul.len() != k * k || act.len() != k * nx {
            return Err(bad("table sizes do not match".into()));
        }
        let identity = (0..k)
            .find(|&e| (0..k).all(|g| mul[e * k + g] == g && mul[g * k + e] == g))
            .ok_or_else(|| bad("no identity element".into()))?;
        let mut inverse = vec![usize::MAX; k];
        for g in 0..k {
            inverse[g] = (0..k)
                .find(|&h| mul[g * k + h] == identity && mul[h * k + g] == identity)
                .ok_or_else(|| bad(format!("`{}` has no inverse", elements[g])))?;
            for h in 0..k {
                for l in 0..k {
                    if mul[mul[g * k + h] * k + l] != mul[g * k + mul[h * k + l]] {
                        return Err(bad("cayley table is not associative".into()));
                    }
                }
            }
        }
        for x in 0..nx {
            if act[identity * nx + x] != x {
                return Err(bad(format!("identity moves `{}`", space[x])));
            }
            for g in 0..k {
                for h in 0..k {
                    if act[g * nx + act[h * nx + x]] != act[mul[g * k + h] * nx + x] {
                        return Err(bad("act(g, act(h, x)) != act(gh, x)".into()));
                    }
                }
            }
        }
        Ok(Self { elements, space, mul, identity, inverse, act })
    }

    pub fn to_raw(&self) -> RawAction {
        let k = self.elements.len();
        RawAction {
            cayley: (0..k).map(|g| (0..k).map(|h| CayleyEntry::Name(self.elements[self.mul(g, h)].clone())).collect()).collect(),
            elements: self.elements.clone(),
            space: self.space.clone(),
            act: (0..k)
                .map(|g| {
                    let row =
                        (0..self.space.len()).map(|x| (self.space[x].clone(), self.space[self.act(g, x)].clone())).collect();
                    (self.elements[g].clone(), row)
                })
                .collect(),
        }
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn space(&self) -> &[String] {
        &self.space
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mul[g * self.elements.len() + h]
    }

    pub fn group_inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.act[g * self.space.len() + x]
    }

    /// Arrow index of `(g, x)` inside [`GroupAction::transformation_groupoid`].
    pub fn arrow(&self, g: usize, x: usize) -> usize {
        g * self.space.len() + x
    }

    /// `Γ ⋉ X`: arrows `(γ, x)` with `s = x`, `r = γx` and
    /// `(γ₁, γ₂x)(γ₂, x) = (γ₁γ₂, x)`. Arrow `(g, x)` sits at index `g·|X| + x`.
    pub fn transformation_groupoid(&self) -> Groupoid {
        let (k, nx) = (self.elements.len(), self.space.len());
        let n = k * nx;
        let e = self.identity;
        let names = (0..k)
            .flat_map(|g| (0..nx).map(move |x| (g, x)))
            .map(|(g, x)| format!("({},{})", self.elements[g], self.space[x]))
            .collect();
        let mut source = vec![0; n];
        let mut range = vec![0; n];
        let mut inverse = vec![0; n];
        let mut table = vec![None; n * n];
        for g in 0..k {
            for x in 0..nx {
                let a = self.arrow(g, x);
                let gx = self.act(g, x);
                source[a] = self.arrow(e, x);
                range[a] = self.arrow(e, gx);
                inverse[a] = self.arrow(self.inverse[g], gx);
                for h in 0..k {
                    for y in 0..nx {
                        if self.act(h, y) == x {
                            let b = self.arrow(h, y);
                            table[a * n + b] = Some(self.arrow(self.mul(g, h), y));
                        }
                    }
                }
            }
        }
        FiniteGroupoid::from_parts(names, source, range, inverse, table)
            .expect("transformation groupoid of a valid action is valid")
    }

    /// The group itself, acting on a single point.
    pub fn group_groupoid(&self) -> Groupoid {
        let only = GroupAction {
            elements: self.elements.clone(),
            space: vec!["*".into()],
            mul: self.mul.clone(),
            identity: self.identity,
            inverse: self.inverse.clone(),
            act: vec![0; self.elements.len()],
        };
        only.transformation_groupoid()
    }
}
