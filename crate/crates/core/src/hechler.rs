//! Hechler-style conditions, extension into dense sets, and the fusion that
//! builds a point `x` with `f_a(x)(i) = g(x)(i)` for the first `N`
//! coordinates, together with a certificate and its independent checker.

use crate::classes::{ClassPartition, CoordSet};
use crate::codes::{ChallengeCode, FunctionFamilyCode};
use crate::encode::{encode_f, ASet};
use crate::error::{invalid, Error, Result};
use crate::nat::{as_json, Nat};
use crate::reach::{HFun, QuotientAutomaton};
use crate::seq::{EventuallyPeriodicSeq, NodeSeq};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// A condition `(t, h)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub stem: NodeSeq,
    #[serde(default)]
    pub side: HFun,
}

impl Condition {
    pub fn new(stem: NodeSeq, side: HFun) -> Self {
        Condition { stem, side }
    }
}

/// `t2 ⊒_h t1`: every new entry is at least `h` of the node before it.
pub fn extends_right_of(t2: &NodeSeq, t1: &NodeSeq, h: &HFun) -> bool {
    t1.is_prefix_of(t2) && (t1.len()..t2.len()).all(|n| t2.entries()[n] >= h.eval(&t2.restrict(n)))
}

/// `(t2, h2) ≤ (t1, h1)`.
pub fn leq_h(p2: &Condition, p1: &Condition) -> Result<bool> {
    Ok(extends_right_of(&p2.stem, &p1.stem, &p1.side) && p2.side.geq(&p1.side)?)
}

/// `(t2, h2) ≤^A (t1, h1)`: as `leq_h`, and new entries avoid `A`.
pub fn leq_ha(p2: &Condition, p1: &Condition, a: &ASet) -> Result<bool> {
    let avoids = p1.stem.is_prefix_of(&p2.stem) && p2.stem.entries()[p1.stem.len()..].iter().all(|v| !a.contains(v));
    Ok(avoids && leq_h(p2, p1)?)
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawDense {
    stems: QuotientAutomaton,
    #[serde(default)]
    h_floor: HFun,
}

/// `U = {(t, h) : stems accepts t, h ≥ hFloor}`. Dense because every state
/// of `stems` has a rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", try_from = "RawDense")]
pub struct DenseSetSpec {
    stems: QuotientAutomaton,
    h_floor: HFun,
}

impl TryFrom<RawDense> for DenseSetSpec {
    type Error = Error;
    fn try_from(r: RawDense) -> Result<Self> {
        DenseSetSpec::new(r.stems, r.h_floor)
    }
}

impl DenseSetSpec {
    pub fn new(stems: QuotientAutomaton, h_floor: HFun) -> Result<Self> {
        h_floor.validate()?;
        if let Some(q) = stems.ranks().iter().position(Option::is_none) {
            return Err(invalid(format!("dense set stems: state {q} cannot reach acceptance")));
        }
        Ok(DenseSetSpec { stems, h_floor })
    }

    pub fn stems(&self) -> &QuotientAutomaton {
        &self.stems
    }

    pub fn h_floor(&self) -> &HFun {
        &self.h_floor
    }

    pub fn contains(&self, p: &Condition) -> Result<bool> {
        Ok(self.stems.accepts(&p.stem) && p.side.geq(&self.h_floor)?)
    }
}

/// A finite stand-in for a countable model: dense sets to meet and the code
/// of `g : ω^ω → ω^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ToyModel {
    #[serde(default)]
    pub dense_sets: Vec<DenseSetSpec>,
    pub g: FunctionFamilyCode,
}

/// `p' ≤^A p` in `U`.
pub fn extend_into_dense(p: &Condition, u: &DenseSetSpec, a: &ASet, bound: &Nat) -> Result<Condition> {
    if u.contains(p)? {
        return Ok(p.clone());
    }
    let stem = u.stems.find_extension(&p.stem, a, &p.side, bound)?;
    Ok(Condition { stem, side: p.side.join(&u.h_floor) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Purpose {
    Dense,
    Determine,
    Bump,
    Strategy,
}

/// One appended stem entry and what it claims about itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Move {
    pub pos: usize,
    #[serde(with = "as_json")]
    pub value: Nat,
    #[serde(with = "as_json")]
    pub floor: Nat,
    pub avoids_a: bool,
    pub purpose: Purpose,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateRecord {
    pub i: usize,
    #[serde(with = "as_json")]
    pub m: Nat,
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseHit {
    pub index: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FusionCertificate {
    pub a: EventuallyPeriodicSeq,
    pub model: ToyModel,
    pub n: usize,
    pub x_prefix: NodeSeq,
    pub coordinates: Vec<CoordinateRecord>,
    pub dense_hits: Vec<DenseHit>,
    pub moves: Vec<Move>,
}

impl FusionCertificate {
    /// `xPrefix` followed by zeros, which never lie in `A`.
    pub fn completed_x(&self) -> EventuallyPeriodicSeq {
        EventuallyPeriodicSeq::node_then(&self.x_prefix, vec![Nat::zero()]).unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FuseBounds {
    /// Width of the window searched above a floor for an avoiding witness.
    pub witness_bound: u64,
    /// Extra stem length allowed past a code's analysis depth when looking
    /// for a determining extension.
    pub extra_depth: usize,
    /// Most nodes visited by one determination search.
    pub max_nodes: usize,
    /// Make every bump exceed the entry before it instead of reusing the
    /// least element of `A` with the right η value.
    #[serde(default)]
    pub increasing_bumps: bool,
}

impl Default for FuseBounds {
    fn default() -> Self {
        FuseBounds { witness_bound: 1_000_000, extra_depth: 2, max_nodes: 20_000, increasing_bumps: false }
    }
}

/// Values worth trying after `u`: per joint cell of the partitions the codes
/// read at coordinate `|u|` and the classes the side's automata use there,
/// every tree entry in the cell and the least fresh value, all at least the
/// floor `side(u)` and outside `avoid` when given.
pub fn representatives(codes: &[&ChallengeCode], side: &HFun, u: &NodeSeq, avoid: Option<&ASet>) -> Vec<Nat> {
    let coord = u.len();
    let floor = side.eval(u);
    let mut partitions = Vec::new();
    for code in codes {
        collect_partitions_at(code, coord, &mut partitions);
    }
    let automata = side.automata();
    for aut in &automata {
        let p = &aut.state(aut.state_of(u)).classes;
        if !partitions.contains(&p) {
            partitions.push(p);
        }
    }
    let special: BTreeSet<Nat> =
        codes.iter().flat_map(|c| c.trees()).flat_map(|t| t.constants().cloned()).collect();
    let mut cells = vec![CoordSet::any()];
    for p in partitions {
        cells = cells
            .iter()
            .flat_map(|cell| p.classes().iter().map(move |c| cell.intersect_class(c)))
            .filter(CoordSet::is_nonempty)
            .collect();
    }
    let allowed = |v: &Nat| avoid.is_none_or(|a| !a.contains(v));
    let mut out = BTreeSet::new();
    for cell in &cells {
        out.extend(special.iter().filter(|v| **v >= floor && cell.contains(v) && allowed(v)).cloned());
        if let Some(v) = cell.members_from(&floor).take(10_000).find(|v| !special.contains(v) && allowed(v)) {
            out.insert(v);
        }
    }
    out.into_iter().collect()
}

fn collect_partitions_at<'a>(code: &'a ChallengeCode, coord: usize, out: &mut Vec<&'a ClassPartition>) {
    if let ChallengeCode::Query { coord: c, partition, children } = code {
        if *c == coord && !out.contains(&partition) {
            out.push(partition);
        }
        for ch in children {
            collect_partitions_at(ch, coord, out);
        }
    }
}

/// Shortest `t' ⊒^A_h t` (among representative values) on whose cylinder
/// `code` is constant, with that constant.
pub fn determine(code: &ChallengeCode, p: &Condition, a: &ASet, bounds: &FuseBounds) -> Option<(NodeSeq, Nat)> {
    let depth = code.analysis_depth() + bounds.extra_depth;
    let mut queue = VecDeque::from([p.stem.clone()]);
    let mut visited = 0;
    while let Some(u) = queue.pop_front() {
        if let Some(v) = code.determined_value(&u) {
            return Some((u, v));
        }
        visited += 1;
        if visited > bounds.max_nodes {
            return None;
        }
        if u.len() < p.stem.len() + depth {
            for v in representatives(&[code], &p.side, &u, Some(a)) {
                queue.push_back(u.child(v));
            }
        }
    }
    None
}

/// Builds the certificate stage by stage: meet a dense set, determine the
/// next coordinate, then append an element of `A` carrying that value.
pub struct Fusion<'a> {
    pub a: &'a ASet,
    pub p: Condition,
    pub moves: Vec<Move>,
    pub coordinates: Vec<CoordinateRecord>,
    pub dense_hits: Vec<DenseHit>,
    pub increasing_bumps: bool,
}

impl<'a> Fusion<'a> {
    pub fn new(a: &'a ASet, increasing_bumps: bool) -> Self {
        Fusion {
            a,
            p: Condition::default(),
            moves: Vec::new(),
            coordinates: Vec::new(),
            dense_hits: Vec::new(),
            increasing_bumps,
        }
    }

    /// Replaces the condition, logging the new stem entries.
    pub fn advance(&mut self, next: Condition, purpose: Purpose) {
        for pos in self.p.stem.len()..next.stem.len() {
            let value = next.stem.entries()[pos].clone();
            self.moves.push(Move {
                pos,
                floor: self.p.side.eval(&next.stem.restrict(pos)),
                avoids_a: !self.a.contains(&value),
                value,
                purpose,
            });
        }
        self.p = next;
    }

    pub fn hit_dense(&mut self, index: usize, u: &DenseSetSpec, bound: &Nat) -> Result<()> {
        let next = extend_into_dense(&self.p, u, self.a, bound)?;
        self.advance(next, Purpose::Dense);
        self.dense_hits.push(DenseHit { index, len: self.p.stem.len() });
        Ok(())
    }

    /// Appends the least `e ∈ A` with `η(e) = m` above the floor.
    pub fn bump(&mut self, i: usize, m: Nat) -> Result<()> {
        let mut floor = self.p.side.eval(&self.p.stem);
        if let Some(last) = self.p.stem.entries().last().filter(|_| self.increasing_bumps) {
            floor = floor.max(last + 1u32);
        }
        let e = self.a.least_with_eta(&m, &floor)?;
        let pos = self.p.stem.len();
        let next = Condition { stem: self.p.stem.child(e), side: self.p.side.clone() };
        self.advance(next, Purpose::Bump);
        self.coordinates.push(CoordinateRecord { i, m, pos });
        Ok(())
    }

    pub fn finish(self, a: &EventuallyPeriodicSeq, model: &ToyModel, n: usize) -> FusionCertificate {
        FusionCertificate {
            a: a.clone(),
            model: model.clone(),
            n,
            x_prefix: self.p.stem,
            coordinates: self.coordinates,
            dense_hits: self.dense_hits,
            moves: self.moves,
        }
    }
}

pub fn fuse(a: &EventuallyPeriodicSeq, model: &ToyModel, n: usize, bounds: &FuseBounds) -> Result<FusionCertificate> {
    let set = ASet::new(a.clone());
    let mut f = Fusion::new(&set, bounds.increasing_bumps);
    let k = model.dense_sets.len();
    let witness_bound = Nat::from(bounds.witness_bound);
    for stage in 0..n.max(k) {
        if k > 0 {
            f.hit_dense(stage % k, &model.dense_sets[stage % k], &witness_bound)?;
        }
        if stage < n {
            let code = model.g.coordinate_code(&Nat::from(stage));
            let (stem, m) = determine(&code, &f.p, &set, bounds).ok_or(Error::DeterminationFailed(stage))?;
            let next = Condition { stem, side: f.p.side.clone() };
            f.advance(next, Purpose::Determine);
            f.bump(stage, m)?;
        }
    }
    Ok(f.finish(a, model, n))
}

/// Outcome of re-checking a certificate; valid iff `problems` is empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub valid: bool,
    pub problems: Vec<String>,
}

/// Re-validates a certificate from its own contents, without search.
pub fn check_certificate(cert: &FusionCertificate) -> CertificateCheck {
    let mut problems = Vec::new();
    let a = ASet::new(cert.a.clone());
    let x = &cert.x_prefix;
    let k = cert.model.dense_sets.len();

    if cert.moves.len() != x.len() {
        problems.push(format!("{} moves for a stem of length {}", cert.moves.len(), x.len()));
    }
    let mut hits: Vec<&DenseHit> = cert.dense_hits.iter().collect();
    hits.sort_by_key(|h| h.len);
    for h in &hits {
        match cert.model.dense_sets.get(h.index) {
            None => problems.push(format!("dense hit names unknown set {}", h.index)),
            Some(u) if h.len > x.len() || !u.stems().accepts(&x.restrict(h.len)) => {
                problems.push(format!("dense set {} does not accept the stem of length {}", h.index, h.len))
            }
            _ => {}
        }
    }
    let met: BTreeSet<usize> = hits.iter().map(|h| h.index).collect();
    if met.len() < k.min(cert.n.max(k)) {
        problems.push(format!("only {} of {} dense sets were met", met.len(), k));
    }

    let bumps: BTreeSet<usize> = cert.coordinates.iter().map(|c| c.pos).collect();
    for (j, mv) in cert.moves.iter().enumerate() {
        if mv.pos != j || x.get(j) != Some(&mv.value) {
            problems.push(format!("move {j} does not match the stem"));
            continue;
        }
        let side = hits
            .iter()
            .filter(|h| h.len <= j)
            .filter_map(|h| cert.model.dense_sets.get(h.index))
            .fold(HFun::zero(), |s, u| s.join(u.h_floor()));
        let floor = side.eval(&x.restrict(j));
        if mv.value < floor || mv.floor != floor {
            problems.push(format!("move {j} ignores the floor {floor}"));
        }
        let in_a = a.contains(&mv.value);
        if mv.avoids_a == in_a {
            problems.push(format!("move {j} misstates avoidance of A"));
        }
        let is_bump = mv.purpose == Purpose::Bump;
        if is_bump != bumps.contains(&j) {
            problems.push(format!("move {j} is mislabelled as a bump"));
        }
        if is_bump != in_a {
            problems.push(format!("move {j}: only bumps may enter A"));
        }
    }

    let completed = cert.completed_x();
    if cert.coordinates.len() != cert.n {
        problems.push(format!("{} coordinates recorded, {} required", cert.coordinates.len(), cert.n));
    }
    for (want, rec) in cert.coordinates.iter().enumerate() {
        if rec.i != want {
            problems.push(format!("coordinate {} out of order", rec.i));
            continue;
        }
        let code = cert.model.g.coordinate_code(&Nat::from(rec.i));
        if code.determined_value(&x.restrict(rec.pos)) != Some(rec.m.clone()) {
            problems.push(format!("coordinate {} is not determined as {} before its bump", rec.i, rec.m));
        }
        match x.get(rec.pos).map(|e| a.eta(e)) {
            Some(Ok(eta)) if eta == rec.m => {}
            _ => problems.push(format!("bump for coordinate {} does not carry {}", rec.i, rec.m)),
        }
        let fa = encode_f(&a, &completed, &Nat::from(rec.i));
        let gx = cert.model.g.eval(&completed, &Nat::from(rec.i));
        if fa != rec.m || gx != rec.m {
            problems.push(format!("coordinate {}: f_a(x) = {fa}, g(x) = {gx}, claimed {}", rec.i, rec.m));
        }
    }
    CertificateCheck { valid: problems.is_empty(), problems }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reach::examples::*;
    use crate::reach::HPrimitive;

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    fn zeros() -> EventuallyPeriodicSeq {
        EventuallyPeriodicSeq::from_u64s(&[], &[0])
    }

    fn cond(stem: &[u64], h: u64) -> Condition {
        Condition::new(NodeSeq::from_u64s(stem), HFun::constant(h))
    }

    #[test]
    fn order_examples() {
        assert!(leq_h(&cond(&[3, 7], 5), &cond(&[], 2)).unwrap());
        assert!(!leq_h(&cond(&[1], 2), &cond(&[], 2)).unwrap());
        assert!(!leq_h(&cond(&[3], 1), &cond(&[], 2)).unwrap());
        let a = ASet::new(zeros());
        assert!(leq_ha(&cond(&[3, 7], 2), &cond(&[], 2), &a).unwrap());
        assert!(!leq_ha(&cond(&[6], 2), &cond(&[], 2), &a).unwrap());
        let p = cond(&[4, 9], 3);
        assert!(leq_ha(&p, &p, &a).unwrap());
    }

    #[test]
    fn dense_examples() {
        let a = ASet::new(zeros());
        let bound = n(1000);
        let u = DenseSetSpec::new(length_at_least(3), HFun::zero()).unwrap();
        let p = cond(&[], 2);
        let q = extend_into_dense(&p, &u, &a, &bound).unwrap();
        assert_eq!(q.stem, NodeSeq::from_u64s(&[3, 3, 3]));
        assert!(u.contains(&q).unwrap() && leq_ha(&q, &p, &a).unwrap());
        let odd = DenseSetSpec::new(last_entry_odd(), HFun::zero()).unwrap();
        let q = extend_into_dense(&cond(&[8], 2), &odd, &a, &bound).unwrap();
        assert_eq!(q.stem, NodeSeq::from_u64s(&[8, 3]));
        let inside = cond(&[8, 3], 2);
        assert_eq!(extend_into_dense(&inside, &odd, &a, &bound).unwrap(), inside);
        assert!(DenseSetSpec::new(odd_odd(), HFun::zero()).is_err());
    }

    fn model(dense: Vec<DenseSetSpec>, base: ChallengeCode) -> ToyModel {
        ToyModel { dense_sets: dense, g: FunctionFamilyCode::new(base) }
    }

    #[test]
    fn fuse_constant_zero() {
        let m = model(
            vec![DenseSetSpec::new(length_at_least(1), HFun::zero()).unwrap()],
            ChallengeCode::constant(0),
        );
        let cert = fuse(&zeros(), &m, 2, &FuseBounds::default()).unwrap();
        // Bumps reuse the least element of A with the right η value.
        assert_eq!(cert.x_prefix, NodeSeq::from_u64s(&[3, 6, 6]));
        assert_eq!(cert.coordinates.iter().map(|c| (c.i, c.m.clone())).collect::<Vec<_>>(), vec![(0, n(0)), (1, n(0))]);
        assert_eq!(check_certificate(&cert), CertificateCheck { valid: true, problems: vec![] });
        let inc = FuseBounds { increasing_bumps: true, ..FuseBounds::default() };
        let cert = fuse(&zeros(), &m, 2, &inc).unwrap();
        assert_eq!(cert.x_prefix, NodeSeq::from_u64s(&[3, 6, 24]));
        assert!(check_certificate(&cert).valid);
    }

    #[test]
    fn fuse_parity_family() {
        // g(x)(n) is the parity of x(0): coordinate 1 of the prepended point.
        let m = model(
            vec![DenseSetSpec::new(last_entry_odd(), HFun::constant(4)).unwrap()],
            ChallengeCode::parity(1),
        );
        let cert = fuse(&zeros(), &m, 3, &FuseBounds::default()).unwrap();
        let check = check_certificate(&cert);
        assert!(check.valid, "{:?}", check.problems);
        assert_eq!(cert.x_prefix.entries()[0], n(1));
    }

    #[test]
    fn fuse_empty() {
        let cert = fuse(&zeros(), &model(vec![], ChallengeCode::constant(0)), 0, &FuseBounds::default()).unwrap();
        assert!(cert.x_prefix.is_empty() && cert.moves.is_empty() && cert.coordinates.is_empty());
        assert!(check_certificate(&cert).valid);
    }

    #[test]
    fn checker_rejects_tampering() {
        let m = model(
            vec![DenseSetSpec::new(
                length_at_least(2),
                HFun(vec![HPrimitive::Level { table: vec![], tail: n(10) }]),
            )
            .unwrap()],
            ChallengeCode::constant(1),
        );
        let cert = fuse(&zeros(), &m, 2, &FuseBounds::default()).unwrap();
        assert!(check_certificate(&cert).valid);
        let mut bad = cert.clone();
        bad.coordinates[1].m = n(0);
        assert!(!check_certificate(&bad).valid);
        let mut bad = cert.clone();
        let last = bad.x_prefix.len() - 1;
        bad.x_prefix.0[last] = n(7);
        bad.moves[last].value = n(7);
        assert!(!check_certificate(&bad).valid);
        let mut bad = cert;
        bad.dense_hits.clear();
        assert!(!check_certificate(&bad).valid);
    }
}
