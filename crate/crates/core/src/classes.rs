//! Decidable subsets of ω used to quotient the branching of nodes.
//!
//! A class is `{n ≥ from : n mod m ∈ residues} ∪ finite`. It is infinite
//! exactly when its residue part is nonempty, which keeps "infinitely many
//! children" decidable.

use crate::error::{invalid, Error, Result};
use crate::nat::{Nat, JsonNat};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Largest period/threshold span we are willing to scan exhaustively.
const SCAN_LIMIT: u64 = 20_000_000;

#[derive(Serialize, Deserialize)]
struct RawClass {
    modulus: u64,
    #[serde(default)]
    residues: BTreeSet<u64>,
    #[serde(default)]
    from: JsonNat,
    #[serde(default)]
    finite: BTreeSet<JsonNat>,
    #[serde(default)]
    infinite: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawClass", into = "RawClass")]
pub struct ClassSpec {
    modulus: u64,
    residues: BTreeSet<u64>,
    from: Nat,
    finite: BTreeSet<Nat>,
}

impl TryFrom<RawClass> for ClassSpec {
    type Error = Error;
    fn try_from(r: RawClass) -> Result<Self> {
        let c = ClassSpec::new(r.modulus, r.residues, r.from.0, r.finite.into_iter().map(|n| n.0))?;
        if let Some(flag) = r.infinite {
            if flag != c.is_infinite() {
                return Err(invalid("class infinite flag disagrees with its residues"));
            }
        }
        Ok(c)
    }
}

impl From<ClassSpec> for RawClass {
    fn from(c: ClassSpec) -> Self {
        let infinite = Some(c.is_infinite());
        RawClass {
            modulus: c.modulus,
            residues: c.residues,
            from: JsonNat(c.from),
            finite: c.finite.into_iter().map(JsonNat).collect(),
            infinite,
        }
    }
}

impl ClassSpec {
    pub fn new(
        modulus: u64,
        residues: impl IntoIterator<Item = u64>,
        from: Nat,
        finite: impl IntoIterator<Item = Nat>,
    ) -> Result<Self> {
        if modulus == 0 {
            return Err(invalid("class modulus must be positive"));
        }
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        if residues.iter().any(|&r| r >= modulus) {
            return Err(invalid("residue out of range for modulus"));
        }
        let mut c = ClassSpec { modulus, residues, from, finite: finite.into_iter().collect() };
        if c.residues.is_empty() {
            c.from = Nat::zero();
        }
        Ok(c)
    }

    /// `{n : n mod m ∈ residues}`.
    pub fn residues(modulus: u64, residues: &[u64]) -> Self {
        Self::new(modulus, residues.iter().copied(), Nat::zero(), []).unwrap()
    }

    /// An explicit finite set.
    pub fn finite(values: &[u64]) -> Self {
        Self::new(1, [], Nat::zero(), values.iter().map(|&v| Nat::from(v))).unwrap()
    }

    /// `{n : n ≥ from}`.
    pub fn at_least(from: u64) -> Self {
        Self::new(1, [0], Nat::from(from), []).unwrap()
    }

    /// Everything.
    pub fn all() -> Self {
        Self::at_least(0)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn finite_part(&self) -> &BTreeSet<Nat> {
        &self.finite
    }

    pub fn is_infinite(&self) -> bool {
        !self.residues.is_empty()
    }

    pub fn contains(&self, n: &Nat) -> bool {
        if self.finite.contains(n) {
            return true;
        }
        if self.residues.is_empty() || n < &self.from {
            return false;
        }
        let r = (n % self.modulus).to_u64().unwrap();
        self.residues.contains(&r)
    }

    /// Every member is below this value or in the periodic residue part.
    pub fn threshold(&self) -> Nat {
        let f = self.finite.iter().next_back().map(|n| n + 1u32).unwrap_or_default();
        f.max(self.from.clone())
    }

    pub fn constants(&self) -> impl Iterator<Item = &Nat> {
        self.finite.iter().chain(std::iter::once(&self.from))
    }

    /// Least member `≥ n`, jumping along the residue progression.
    pub fn next_member(&self, n: &Nat) -> Option<Nat> {
        let finite = self.finite.range(n.clone()..).next().cloned();
        let periodic = (!self.residues.is_empty()).then(|| {
            let base = n.max(&self.from).clone();
            let r = (&base % self.modulus).to_u64().unwrap();
            match self.residues.range(r..).next() {
                Some(&r2) => &base + (r2 - r),
                None => &base + (self.modulus - r + self.residues.iter().next().unwrap()),
            }
        });
        match (finite, periodic) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Largest member, for finite classes.
    pub fn max_member(&self) -> Option<&Nat> {
        if self.is_infinite() {
            None
        } else {
            self.finite.iter().next_back()
        }
    }
}

/// A finite partition of ω into classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<ClassSpec>", into = "Vec<ClassSpec>")]
pub struct ClassPartition(Vec<ClassSpec>);

impl TryFrom<Vec<ClassSpec>> for ClassPartition {
    type Error = Error;
    fn try_from(v: Vec<ClassSpec>) -> Result<Self> {
        ClassPartition::new(v)
    }
}

impl From<ClassPartition> for Vec<ClassSpec> {
    fn from(p: ClassPartition) -> Self {
        p.0
    }
}

impl ClassPartition {
    /// Checks pairwise disjointness and cover by scanning one full period past
    /// the largest threshold; beyond that membership is periodic.
    pub fn new(classes: Vec<ClassSpec>) -> Result<Self> {
        if classes.is_empty() {
            return Err(invalid("partition needs at least one class"));
        }
        let span = scan_span(&classes)?;
        for n in 0..span {
            let n = Nat::from(n);
            let hits = classes.iter().filter(|c| c.contains(&n)).count();
            if hits != 1 {
                return Err(invalid(format!(
                    "classes must partition ω: {n} lies in {hits} classes"
                )));
            }
        }
        Ok(ClassPartition(classes))
    }

    /// The single class ω.
    pub fn trivial() -> Self {
        ClassPartition(vec![ClassSpec::all()])
    }

    /// Even / odd.
    pub fn parity() -> Self {
        ClassPartition(vec![ClassSpec::residues(2, &[0]), ClassSpec::residues(2, &[1])])
    }

    pub fn classes(&self) -> &[ClassSpec] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn classify(&self, n: &Nat) -> usize {
        self.0.iter().position(|c| c.contains(n)).expect("partition covers ω")
    }

    pub fn lcm(&self) -> u64 {
        self.0.iter().fold(1u64, |acc, c| acc.lcm(&c.modulus))
    }
}

fn scan_span(classes: &[ClassSpec]) -> Result<u64> {
    let lcm = classes.iter().fold(1u64, |acc, c| acc.lcm(&c.modulus));
    let thr = classes.iter().map(ClassSpec::threshold).max().unwrap_or_default();
    let span = thr + lcm;
    span.to_u64()
        .filter(|&s| s <= SCAN_LIMIT)
        .ok_or_else(|| invalid("class thresholds and moduli too large to validate"))
}

/// The set of values a single coordinate may take inside a region: either a
/// fixed value or an intersection of classes minus finitely many exclusions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoordSet {
    pub fixed: Option<Nat>,
    pub classes: Vec<ClassSpec>,
    pub excluded: BTreeSet<Nat>,
}

impl CoordSet {
    pub fn any() -> Self {
        CoordSet::default()
    }

    pub fn fixed(n: Nat) -> Self {
        CoordSet { fixed: Some(n), ..Default::default() }
    }

    pub fn is_any(&self) -> bool {
        self.fixed.is_none() && self.classes.is_empty() && self.excluded.is_empty()
    }

    pub fn contains(&self, n: &Nat) -> bool {
        if let Some(f) = &self.fixed {
            if f != n {
                return false;
            }
        }
        !self.excluded.contains(n) && self.classes.iter().all(|c| c.contains(n))
    }

    fn threshold(&self) -> Nat {
        let c = self.classes.iter().map(ClassSpec::threshold).max().unwrap_or_default();
        let e = self.excluded.iter().next_back().map(|n| n + 1u32).unwrap_or_default();
        c.max(e)
    }

    fn period(&self) -> u64 {
        self.classes.iter().fold(1u64, |acc, c| acc.lcm(&c.modulus))
    }

    pub fn is_infinite(&self) -> bool {
        if self.fixed.is_some() {
            return false;
        }
        let start = self.threshold();
        (0..self.period()).any(|k| self.contains(&(&start + k)))
    }

    /// Least member `≥ floor`, if any.
    pub fn least_at_least(&self, floor: &Nat) -> Option<Nat> {
        self.members_from(floor).next()
    }

    /// Members in increasing order starting at `floor`; finite when the set is.
    pub fn members_from<'a>(&'a self, floor: &Nat) -> Box<dyn Iterator<Item = Nat> + 'a> {
        if let Some(f) = &self.fixed {
            let ok = f >= floor && self.contains(f);
            return Box::new(ok.then(|| f.clone()).into_iter());
        }
        let infinite = self.is_infinite();
        let end = self.threshold().max(floor.clone()) + self.period();
        let mut n = floor.clone();
        Box::new(std::iter::from_fn(move || loop {
            if !infinite && n >= end {
                return None;
            }
            let cur = n.clone();
            n += 1u32;
            if self.contains(&cur) {
                return Some(cur);
            }
        }))
    }

    pub fn is_nonempty(&self) -> bool {
        self.least_at_least(&Nat::zero()).is_some()
    }

    /// All members, for a finite set.
    pub fn finite_members(&self) -> Option<Vec<Nat>> {
        (!self.is_infinite()).then(|| self.members_from(&Nat::zero()).collect())
    }

    pub fn intersect_class(&self, c: &ClassSpec) -> CoordSet {
        let mut out = self.clone();
        out.classes.push(c.clone());
        out
    }
}
