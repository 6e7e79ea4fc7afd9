//! The game `G(j, m)`: Player I extends with `≤`, Player II with `≤^A`, and
//! II wins iff `j(x) = m`. Player I moves first.
//!
//! For bit-valued codes the game is decided exactly. Player I can reach any
//! extension respecting the side condition, so II wins iff no such extension
//! has `j` determined to `1 - m`. Conversely II can leave every spine with a
//! fresh entry, after which `j` is determined along the play.

use crate::codes::{ChallengeCode, FunctionFamilyCode};
use crate::encode::ASet;
use crate::error::{invalid, Error, Result};
use crate::hechler::{determine, representatives, Condition, FuseBounds, Fusion, FusionCertificate, Purpose, ToyModel};
use crate::nat::Nat;
use crate::reach::HFun;
use crate::seq::{EventuallyPeriodicSeq, NodeSeq};
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GameBounds {
    /// Most nodes visited by one reachability search.
    pub max_nodes: usize,
    /// Levels searched past the deepest point where the codes can still vary.
    pub extra_depth: usize,
    /// As in [`FuseBounds`].
    #[serde(default)]
    pub increasing_bumps: bool,
}

impl Default for GameBounds {
    fn default() -> Self {
        GameBounds { max_nodes: 50_000, extra_depth: 2, increasing_bumps: false }
    }
}

impl GameBounds {
    fn fuse(&self) -> FuseBounds {
        FuseBounds {
            extra_depth: self.extra_depth,
            max_nodes: self.max_nodes,
            increasing_bumps: self.increasing_bumps,
            ..FuseBounds::default()
        }
    }
}

/// Rejects codes that can take a value other than 0 or 1.
pub fn check_bit_code(j: &ChallengeCode) -> Result<()> {
    match j.sup_over_cylinder(&NodeSeq::root()) {
        Some(v) if v <= Nat::one() => Ok(()),
        _ => Err(invalid("code must take values in {0,1}")),
    }
}

fn bit(m: u8) -> Result<Nat> {
    if m > 1 {
        return Err(invalid(format!("target {m} is not a bit")));
    }
    Ok(Nat::from(m))
}

/// Breadth-first search for an extension of `stem` satisfying `goal`, with
/// entries respecting `side` and, when `avoid` is given, outside `A`.
pub fn search_extension(
    codes: &[&ChallengeCode],
    stem: &NodeSeq,
    side: &HFun,
    avoid: Option<&ASet>,
    bounds: &GameBounds,
    mut goal: impl FnMut(&NodeSeq) -> bool,
) -> Result<Option<NodeSeq>> {
    let depth = codes.iter().map(|c| c.analysis_depth()).max().unwrap_or(0).max(stem.len()) + bounds.extra_depth;
    let mut queue = VecDeque::from([stem.clone()]);
    let mut visited = 0;
    while let Some(u) = queue.pop_front() {
        if goal(&u) {
            return Ok(Some(u));
        }
        visited += 1;
        if visited > bounds.max_nodes {
            return Err(Error::BoundExceeded(format!("reachability search passed {} nodes", bounds.max_nodes)));
        }
        if u.len() < depth {
            for v in representatives(codes, side, &u, avoid) {
                queue.push_back(u.child(v));
            }
        }
    }
    Ok(None)
}

/// Player II's strategy in `G(j, m)`: pass while `j` is determined, otherwise
/// step off every tree with the least fresh entry outside `A`.
#[derive(Debug, Clone)]
pub struct StrategyHandle {
    j: ChallengeCode,
    m: u8,
    a: ASet,
    avoid: BTreeSet<Nat>,
    moves: usize,
}

impl StrategyHandle {
    fn new(j: ChallengeCode, m: u8, a: ASet) -> Self {
        let avoid = j.trees().iter().flat_map(|t| t.constants().cloned()).collect();
        StrategyHandle { j, m, a, avoid, moves: 0 }
    }

    pub fn target(&self) -> u8 {
        self.m
    }

    pub fn code(&self) -> &ChallengeCode {
        &self.j
    }

    /// Moves that actually extended the stem so far.
    pub fn moves_made(&self) -> usize {
        self.moves
    }

    pub fn next_move(&mut self, position: &Condition) -> Condition {
        if self.j.determined_value(&position.stem).is_some() {
            return position.clone();
        }
        let mut v = position.side.eval(&position.stem);
        while self.avoid.contains(&v) || self.a.contains(&v) {
            v += 1u32;
        }
        self.moves += 1;
        Condition { stem: position.stem.child(v), side: position.side.clone() }
    }
}

/// `Some(strategy)` iff `p` ensures `j(x) = m`.
pub fn ensures(p: &Condition, j: &ChallengeCode, m: u8, a: &ASet, bounds: &GameBounds) -> Result<Option<StrategyHandle>> {
    check_bit_code(j)?;
    let target = bit(m)?;
    let wins = match j.determined_value(&p.stem) {
        Some(v) => v == target,
        None => {
            let other = Nat::one() - &target;
            search_extension(&[j], &p.stem, &p.side, None, bounds, |u| j.determined_value(u).as_ref() == Some(&other))?
                .is_none()
        }
    };
    Ok(wins.then(|| StrategyHandle::new(j.clone(), m, a.clone())))
}

/// JSON summary of an `ensures` call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EnsureReport {
    pub ensured: bool,
    pub m: u8,
    pub determined: Option<u8>,
}

impl EnsureReport {
    pub fn new(p: &Condition, j: &ChallengeCode, m: u8, strategy: &Option<StrategyHandle>) -> Self {
        let determined = j.determined_value(&p.stem).map(|v| if v.is_zero() { 0 } else { 1 });
        EnsureReport { ensured: strategy.is_some(), m, determined }
    }
}

/// Fusion without dense sets where each coordinate is ensured by a strategy
/// and every earlier strategy gets one move per stage, round-robin.
pub fn play_fusion(a: &EventuallyPeriodicSeq, gfam: &FunctionFamilyCode, n: usize, bounds: &GameBounds) -> Result<FusionCertificate> {
    let set = ASet::new(a.clone());
    let mut f = Fusion::new(&set, bounds.increasing_bumps);
    let mut strategies: Vec<StrategyHandle> = Vec::new();
    for k in 0..n {
        for s in &mut strategies {
            let next = s.next_move(&f.p);
            f.advance(next, Purpose::Strategy);
        }
        let code = gfam.coordinate_code(&Nat::from(k));
        check_bit_code(&code)?;
        let (stem, m) = determine(&code, &f.p, &set, &bounds.fuse()).ok_or(Error::EnsureFailed(k))?;
        let next = Condition { stem, side: f.p.side.clone() };
        f.advance(next, Purpose::Determine);
        strategies.push(StrategyHandle::new(code, if m.is_zero() { 0 } else { 1 }, set.clone()));
        f.bump(k, m)?;
    }
    let model = ToyModel { dense_sets: Vec::new(), g: gfam.clone() };
    Ok(f.finish(a, &model, n))
}

/// `j_0, …, j_K`, with every later index behaving as `j_K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct Baire1Family {
    codes: Vec<ChallengeCode>,
}

#[derive(Deserialize)]
struct RawFamily {
    codes: Vec<ChallengeCode>,
}

impl TryFrom<RawFamily> for Baire1Family {
    type Error = Error;
    fn try_from(r: RawFamily) -> Result<Self> {
        Baire1Family::new(r.codes)
    }
}

impl Baire1Family {
    pub fn new(codes: Vec<ChallengeCode>) -> Result<Self> {
        if codes.is_empty() {
            return Err(invalid("a family needs at least one code"));
        }
        codes.iter().try_for_each(check_bit_code)?;
        Ok(Baire1Family { codes })
    }

    /// `K`.
    pub fn last_index(&self) -> usize {
        self.codes.len() - 1
    }

    pub fn code(&self, n: usize) -> &ChallengeCode {
        &self.codes[n.min(self.last_index())]
    }

    /// The pointwise limit, which is `j_K`.
    pub fn limit(&self) -> &ChallengeCode {
        &self.codes[self.last_index()]
    }

    /// One more than every entry on any spine of any code.
    pub fn generic_floor(&self) -> Nat {
        self.codes
            .iter()
            .flat_map(|c| c.trees())
            .flat_map(|t| t.constants().cloned())
            .max()
            .map_or_else(Nat::zero, |v| v + 1u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AlternationStep {
    pub n: usize,
    pub m: u8,
    pub stem_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitOutcome {
    pub m: u8,
    pub condition: Condition,
    pub trace: Vec<AlternationStep>,
}

/// Finds `p' ≤^A p` and `m` with `j(x) = m` for every completion of `p'`.
///
/// The side is first raised to a constant floor above every spine entry, so
/// completions never follow a spine. Then alternate: from a node where
/// `j_{n_i}` is `m_i`, look for a reachable node where some later code is
/// `1 - m_i`; move there and flip, or stop when none is reachable.
pub fn limit_ensure(fam: &Baire1Family, p: &Condition, a: &ASet, bounds: &GameBounds) -> Result<LimitOutcome> {
    let floor = fam.generic_floor();
    let side = if floor.is_zero() { p.side.clone() } else { p.side.join(&HFun(vec![crate::reach::HPrimitive::Level { table: vec![], tail: floor }])) };
    let start = Condition { stem: p.stem.clone(), side };
    let (stem, m0) = determine(fam.code(0), &start, a, &bounds.fuse())
        .ok_or_else(|| Error::BoundExceeded("no determining extension for j_0".into()))?;
    let mut cur = Condition { stem, side: start.side };
    let mut n = 0;
    let mut m: u8 = if m0.is_zero() { 0 } else { 1 };
    let mut trace = vec![AlternationStep { n, m, stem_len: cur.stem.len() }];
    let k = fam.last_index();
    loop {
        if trace.len() > k + 1 {
            return Err(Error::BoundExceeded(format!("more than {} alternations", k)));
        }
        let later: Vec<usize> = if n < k { (n + 1..=k).collect() } else { vec![k] };
        let codes: Vec<&ChallengeCode> = later.iter().map(|&i| fam.code(i)).collect();
        let flip = Nat::from(1 - m);
        let hit = |u: &NodeSeq| codes.iter().position(|c| c.determined_value(u).as_ref() == Some(&flip));
        let found = search_extension(&codes, &cur.stem, &cur.side, Some(a), bounds, |u| hit(u).is_some())?;
        match found {
            None => return Ok(LimitOutcome { m, condition: cur, trace }),
            Some(u) => {
                n = later[hit(&u).unwrap()];
                m = 1 - m;
                cur.stem = u;
                trace.push(AlternationStep { n, m, stem_len: cur.stem.len() });
            }
        }
    }
}

/// A random completion of `p`: a few entries respecting the side and
/// avoiding `A`, then a constant tail above every floor.
pub fn sample_completion(rng: &mut impl Rng, p: &Condition, a: &ASet) -> EventuallyPeriodicSeq {
    let pick = |rng: &mut dyn rand::RngCore, floor: Nat| {
        let mut v = floor + rng.gen_range(0u32..12);
        while a.contains(&v) {
            v += 1u32;
        }
        v
    };
    let mut stem = p.stem.clone();
    for _ in 0..rng.gen_range(0..6) {
        let v = pick(rng, p.side.eval(&stem));
        stem.push(v);
    }
    let tail = pick(rng, p.side.sup());
    EventuallyPeriodicSeq::node_then(&stem, vec![tail]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hechler::check_certificate;
    use crate::tree::PresentedTree;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zeros() -> EventuallyPeriodicSeq {
        EventuallyPeriodicSeq::from_u64s(&[], &[0])
    }

    fn cond(stem: &[u64]) -> Condition {
        Condition::new(NodeSeq::from_u64s(stem), HFun::zero())
    }

    fn thresh_exit() -> ChallengeCode {
        ChallengeCode::thresh(ChallengeCode::exit(PresentedTree::single(zeros()), 5, 0), Nat::from(2u32)).unwrap()
    }

    #[test]
    fn ensure_examples() {
        let a = ASet::new(zeros());
        let b = GameBounds::default();
        assert!(ensures(&cond(&[0]), &thresh_exit(), 1, &a, &b).unwrap().is_some());
        assert!(ensures(&cond(&[0]), &thresh_exit(), 0, &a, &b).unwrap().is_none());
        let parity = ChallengeCode::parity(0);
        assert!(ensures(&cond(&[]), &parity, 0, &a, &b).unwrap().is_none());
        assert!(ensures(&cond(&[]), &parity, 1, &a, &b).unwrap().is_none());
        assert!(ensures(&cond(&[5]), &parity, 1, &a, &b).unwrap().is_some());
        assert!(ensures(&cond(&[]), &ChallengeCode::constant(3), 1, &a, &b).is_err());
    }

    #[test]
    fn strategy_wins_against_random_play() {
        let a = ASet::new(zeros());
        let j = thresh_exit();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut s = ensures(&cond(&[0]), &j, 1, &a, &GameBounds::default()).unwrap().unwrap();
            let mut p = cond(&[0]);
            for _ in 0..3 {
                for _ in 0..rng.gen_range(0..3) {
                    p.stem.push(Nat::from(rng.gen_range(0u64..2)));
                }
                p = s.next_move(&p);
            }
            let x = EventuallyPeriodicSeq::node_then(&p.stem, vec![Nat::from(9u32)]).unwrap();
            assert_eq!(j.eval(&x), Nat::one());
        }
    }

    #[test]
    fn play_fusion_examples() {
        let b = GameBounds::default();
        let cert = play_fusion(&zeros(), &FunctionFamilyCode::new(ChallengeCode::constant(0)), 2, &b).unwrap();
        assert_eq!(cert.x_prefix, NodeSeq::from_u64s(&[6, 6]));
        assert!(check_certificate(&cert).valid);
        let inc = GameBounds { increasing_bumps: true, ..b };
        let cert = play_fusion(&zeros(), &FunctionFamilyCode::new(ChallengeCode::constant(0)), 2, &inc).unwrap();
        assert_eq!(cert.x_prefix, NodeSeq::from_u64s(&[6, 24]));
        let cert = play_fusion(&zeros(), &FunctionFamilyCode::new(ChallengeCode::parity(1)), 1, &b).unwrap();
        assert_eq!(cert.x_prefix, NodeSeq::from_u64s(&[0, 6]));
        assert!(check_certificate(&cert).valid);
        let cert = play_fusion(&zeros(), &FunctionFamilyCode::new(ChallengeCode::parity(1)), 0, &b).unwrap();
        assert!(cert.x_prefix.is_empty());
    }

    #[test]
    fn limit_examples() {
        let a = ASet::new(zeros());
        let b = GameBounds::default();
        let c = ChallengeCode::constant;
        let fam = Baire1Family::new(vec![ChallengeCode::parity(0), c(0)]).unwrap();
        let out = limit_ensure(&fam, &cond(&[]), &a, &b).unwrap();
        assert_eq!(out.m, 0);
        assert!(out.trace.len() <= 2);

        let fam = Baire1Family::new(vec![ChallengeCode::parity(0); 3]).unwrap();
        let out = limit_ensure(&fam, &cond(&[5]), &a, &b).unwrap();
        assert_eq!((out.m, out.trace.len()), (1, 1));

        let fam = Baire1Family::new(vec![c(0), ChallengeCode::parity(0)]).unwrap();
        let p = cond(&[]);
        let out = limit_ensure(&fam, &p, &a, &b).unwrap();
        assert_eq!(out.trace.len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = sample_completion(&mut rng, &out.condition, &a);
            assert_eq!(fam.limit().eval(&x), Nat::from(out.m));
        }
    }

    #[test]
    fn limit_blocks_spines() {
        // The limit is 1 exactly off the zero spine; the floor forces that.
        let a = ASet::new(zeros());
        let j = ChallengeCode::thresh(ChallengeCode::exit(PresentedTree::single(zeros()), 0, 0), Nat::one()).unwrap();
        let fam = Baire1Family::new(vec![j.clone()]).unwrap();
        let out = limit_ensure(&fam, &cond(&[]), &a, &GameBounds::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            assert_eq!(j.eval(&sample_completion(&mut rng, &out.condition, &a)), Nat::from(out.m));
        }
    }
}
