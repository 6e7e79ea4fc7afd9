//! Reachability ranks over node sets presented by finite automata, blocking
//! side functions, and `⊒^A_h` extensions into the set.

use crate::classes::{ClassPartition, ClassSpec, CoordSet};
use crate::encode::ASet;
use crate::error::{invalid, Error, Result};
use crate::nat::{vec_json, Nat};
use crate::seq::NodeSeq;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// Most joint node types explored when comparing side functions.
pub const PRODUCT_CAP: usize = 200_000;

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawState {
    classes: ClassPartition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    flags: Option<Vec<bool>>,
    next: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawAutomaton {
    states: usize,
    start: usize,
    per_state: Vec<RawState>,
    accepting: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSpec {
    pub classes: ClassPartition,
    pub next: Vec<usize>,
}

/// Classifies nodes by running over their entries; each state splits ω into
/// classes and each class moves to a fixed next state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawAutomaton", into = "RawAutomaton")]
pub struct QuotientAutomaton {
    start: usize,
    per_state: Vec<StateSpec>,
    accepting: BTreeSet<usize>,
}

impl TryFrom<RawAutomaton> for QuotientAutomaton {
    type Error = Error;
    fn try_from(r: RawAutomaton) -> Result<Self> {
        if r.per_state.len() != r.states {
            return Err(invalid("perState must list every state"));
        }
        let mut per_state = Vec::new();
        for s in r.per_state {
            if let Some(flags) = &s.flags {
                let actual: Vec<bool> = s.classes.classes().iter().map(ClassSpec::is_infinite).collect();
                if flags != &actual {
                    return Err(invalid("class flags disagree with the classes"));
                }
            }
            per_state.push(StateSpec { classes: s.classes, next: s.next });
        }
        QuotientAutomaton::new(r.start, per_state, r.accepting)
    }
}

impl From<QuotientAutomaton> for RawAutomaton {
    fn from(a: QuotientAutomaton) -> Self {
        RawAutomaton {
            states: a.per_state.len(),
            start: a.start,
            per_state: a
                .per_state
                .into_iter()
                .map(|s| RawState {
                    flags: Some(s.classes.classes().iter().map(ClassSpec::is_infinite).collect()),
                    classes: s.classes,
                    next: s.next,
                })
                .collect(),
            accepting: a.accepting,
        }
    }
}

impl QuotientAutomaton {
    pub fn new(start: usize, per_state: Vec<StateSpec>, accepting: BTreeSet<usize>) -> Result<Self> {
        let n = per_state.len();
        if start >= n || accepting.iter().any(|&q| q >= n) {
            return Err(invalid("state index out of range"));
        }
        for s in &per_state {
            if s.next.len() != s.classes.len() || s.next.iter().any(|&q| q >= n) {
                return Err(invalid("each class needs a target state in range"));
            }
        }
        Ok(QuotientAutomaton { start, per_state, accepting })
    }

    pub fn state_count(&self) -> usize {
        self.per_state.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn state(&self, q: usize) -> &StateSpec {
        &self.per_state[q]
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(&q)
    }

    pub fn step(&self, q: usize, n: &Nat) -> usize {
        let s = &self.per_state[q];
        s.next[s.classes.classify(n)]
    }

    pub fn run_from(&self, q: usize, entries: &[Nat]) -> usize {
        entries.iter().fold(q, |q, n| self.step(q, n))
    }

    pub fn state_of(&self, t: &NodeSeq) -> usize {
        self.run_from(self.start, t.entries())
    }

    pub fn accepts(&self, t: &NodeSeq) -> bool {
        self.is_accepting(self.state_of(t))
    }

    /// Least-fixpoint ranks: 0 on accepting states, otherwise one more than
    /// the least rank reachable through an infinite class.
    pub fn ranks(&self) -> Vec<Option<usize>> {
        let n = self.per_state.len();
        let mut rank: Vec<Option<usize>> = (0..n).map(|q| self.is_accepting(q).then_some(0)).collect();
        for stage in 1..=n {
            let snapshot = rank.clone();
            for q in 0..n {
                if rank[q].is_some() {
                    continue;
                }
                let s = &self.per_state[q];
                let hit = s
                    .classes
                    .classes()
                    .iter()
                    .zip(&s.next)
                    .any(|(c, &q2)| c.is_infinite() && snapshot[q2].is_some());
                if hit {
                    rank[q] = Some(stage);
                }
            }
            if rank == snapshot {
                break;
            }
        }
        rank
    }

    pub fn rank_of(&self, q: usize) -> Option<usize> {
        self.ranks()[q]
    }

    /// Per-state bounds: on an unreachable state, one more than the largest
    /// member of a finite class leading to a reachable state; 0 elsewhere.
    pub fn blocking_bounds(&self) -> Vec<Nat> {
        let ranks = self.ranks();
        (0..self.per_state.len())
            .map(|q| {
                if ranks[q].is_some() {
                    return Nat::zero();
                }
                let s = &self.per_state[q];
                s.classes
                    .classes()
                    .iter()
                    .zip(&s.next)
                    .filter(|(_, &q2)| ranks[q2].is_some())
                    .filter_map(|(c, _)| c.max_member())
                    .max()
                    .map_or(Nat::zero(), |m| m + 1u32)
            })
            .collect()
    }

    pub fn blocking_h(&self) -> HFun {
        HFun(vec![HPrimitive::State { automaton: self.clone(), bounds: self.blocking_bounds() }])
    }

    /// Greedy rank descent from `t`: each appended entry lies in an infinite
    /// rank-decreasing class, avoids `A`, and is at least `h` of the current
    /// node. Among classes the least witness wins.
    pub fn find_extension(&self, t: &NodeSeq, a: &ASet, h: &HFun, bound: &Nat) -> Result<NodeSeq> {
        let ranks = self.ranks();
        let mut q = self.state_of(t);
        if ranks[q].is_none() {
            return Err(Error::NotReachable);
        }
        let mut cur = t.clone();
        while let Some(r) = ranks[q].filter(|&r| r > 0) {
            let floor = h.eval(&cur);
            let s = &self.per_state[q];
            let mut best: Option<(Nat, usize)> = None;
            for (c, &q2) in s.classes.classes().iter().zip(&s.next) {
                if !c.is_infinite() || !ranks[q2].is_some_and(|r2| r2 < r) {
                    continue;
                }
                if let Ok(n) = class_avoid_witness(c, a, &floor, bound) {
                    if best.as_ref().is_none_or(|(b, _)| &n < b) {
                        best = Some((n, q2));
                    }
                }
            }
            let (n, q2) = best.ok_or_else(|| Error::ClassCaptured {
                floor: floor.to_string(),
                bound: bound.to_string(),
            })?;
            cur.push(n);
            q = q2;
        }
        Ok(cur)
    }
}

/// Least `n ∈ c` with `floor ≤ n ≤ floor + bound` and `n ∉ A`.
pub fn class_avoid_witness(c: &ClassSpec, a: &ASet, floor: &Nat, bound: &Nat) -> Result<Nat> {
    let limit = floor + bound;
    let mut n = c.next_member(floor);
    while let Some(m) = n {
        if m > limit {
            break;
        }
        if !a.contains(&m) {
            return Ok(m);
        }
        n = c.next_member(&(m + 1u32));
    }
    Err(Error::ClassCaptured { floor: floor.to_string(), bound: bound.to_string() })
}

/// One building block of a side function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HPrimitive {
    /// `table[|t|]`, or `tail` past the end of the table.
    Level {
        #[serde(with = "vec_json", default)]
        table: Vec<Nat>,
        #[serde(with = "crate::nat::as_json")]
        tail: Nat,
    },
    /// `bounds[q]` where `q` is the state reached on `t`.
    State {
        automaton: QuotientAutomaton,
        #[serde(with = "vec_json")]
        bounds: Vec<Nat>,
    },
}

/// A side function `h : ω^{<ω} → ω`, the pointwise max of its primitives
/// (0 when there are none).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HFun(pub Vec<HPrimitive>);

impl HFun {
    pub fn zero() -> Self {
        HFun(Vec::new())
    }

    pub fn constant(k: u64) -> Self {
        HFun(vec![HPrimitive::Level { table: Vec::new(), tail: Nat::from(k) }])
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.0 {
            if let HPrimitive::State { automaton, bounds } = p {
                if bounds.len() != automaton.state_count() {
                    return Err(invalid("state bounds must cover every state"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: &NodeSeq) -> Nat {
        self.0
            .iter()
            .map(|p| match p {
                HPrimitive::Level { table, tail } => table.get(t.len()).unwrap_or(tail).clone(),
                HPrimitive::State { automaton, bounds } => bounds[automaton.state_of(t)].clone(),
            })
            .max()
            .unwrap_or_default()
    }

    /// Pointwise max.
    /// The largest value `h` ever takes.
    pub fn sup(&self) -> Nat {
        self.0
            .iter()
            .flat_map(|p| match p {
                HPrimitive::Level { table, tail } => table.iter().chain(std::iter::once(tail)).collect::<Vec<_>>(),
                HPrimitive::State { bounds, .. } => bounds.iter().collect(),
            })
            .max()
            .cloned()
            .unwrap_or_default()
    }

    pub fn join(&self, other: &HFun) -> HFun {
        let mut out = self.0.clone();
        for p in &other.0 {
            if !out.contains(p) {
                out.push(p.clone());
            }
        }
        HFun(out)
    }

    pub fn automata(&self) -> Vec<&QuotientAutomaton> {
        self.0
            .iter()
            .filter_map(|p| match p {
                HPrimitive::State { automaton, .. } => Some(automaton),
                _ => None,
            })
            .collect()
    }

    /// Levels past which every level table reads its tail.
    pub fn level_cap(&self) -> usize {
        self.0
            .iter()
            .map(|p| match p {
                HPrimitive::Level { table, .. } => table.len(),
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Value on a node of (capped) length `level` whose runs of this
    /// function's automata end in `states`.
    pub fn eval_type(&self, level: usize, states: &[usize]) -> Nat {
        let mut k = 0;
        self.0
            .iter()
            .map(|p| match p {
                HPrimitive::Level { table, tail } => table.get(level).unwrap_or(tail).clone(),
                HPrimitive::State { bounds, .. } => {
                    k += 1;
                    bounds[states[k - 1]].clone()
                }
            })
            .max()
            .unwrap_or_default()
    }

    /// Whether `self ≥ other` at every node, decided over the joint node
    /// types of both functions' automata.
    pub fn geq(&self, other: &HFun) -> Result<bool> {
        let mut automata = self.automata();
        let split = automata.len();
        automata.extend(other.automata());
        let product = Product::new(automata, self.level_cap().max(other.level_cap()));
        let mut ok = true;
        product.explore(&product.root(), PRODUCT_CAP, |ty| {
            let lvl = ty.level;
            if self.eval_type(lvl, &ty.states[..split]) < other.eval_type(lvl, &ty.states[split..]) {
                ok = false;
            }
            ok
        })?;
        Ok(ok)
    }
}

/// A node type for a family of automata: its length capped at a fixed level
/// and the state each automaton reaches on it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeType {
    pub level: usize,
    pub states: Vec<usize>,
}

/// Joint classification of nodes by several automata and capped length.
pub struct Product<'a> {
    automata: Vec<&'a QuotientAutomaton>,
    cap: usize,
}

impl<'a> Product<'a> {
    pub fn new(automata: Vec<&'a QuotientAutomaton>, cap: usize) -> Self {
        Product { automata, cap }
    }

    pub fn root(&self) -> NodeType {
        self.type_of(&NodeSeq::root())
    }

    pub fn type_of(&self, t: &NodeSeq) -> NodeType {
        NodeType {
            level: t.len().min(self.cap),
            states: self.automata.iter().map(|a| a.state_of(t)).collect(),
        }
    }

    /// Nonempty joint classes at `ty` and the type each leads to.
    pub fn successors(&self, ty: &NodeType) -> Vec<(CoordSet, NodeType)> {
        let mut out = vec![(CoordSet::any(), Vec::new())];
        for (a, &q) in self.automata.iter().zip(&ty.states) {
            let s = a.state(q);
            let mut next = Vec::new();
            for (set, states) in &out {
                for (c, &q2) in s.classes.classes().iter().zip(&s.next) {
                    let meet = set.intersect_class(c);
                    if meet.is_nonempty() {
                        let mut st: Vec<usize> = states.clone();
                        st.push(q2);
                        next.push((meet, st));
                    }
                }
            }
            out = next;
        }
        out.into_iter()
            .map(|(set, states)| (set, NodeType { level: (ty.level + 1).min(self.cap), states }))
            .collect()
    }

    /// Breadth-first walk over types reachable from `from`; `visit` returns
    /// false to stop early.
    pub fn explore(&self, from: &NodeType, cap: usize, mut visit: impl FnMut(&NodeType) -> bool) -> Result<()> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([from.clone()]);
        seen.insert(from.clone());
        while let Some(ty) = queue.pop_front() {
            if !visit(&ty) {
                return Ok(());
            }
            for (_, next) in self.successors(&ty) {
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        return Err(Error::IncomparableSideConditions);
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(())
    }
}

/// Small automata used by examples, tests and the generator.
pub mod examples {
    use super::*;

    fn state(classes: Vec<ClassSpec>, next: Vec<usize>) -> StateSpec {
        StateSpec { classes: ClassPartition::new(classes).unwrap(), next }
    }

    fn parity() -> Vec<ClassSpec> {
        vec![ClassSpec::residues(2, &[0]), ClassSpec::residues(2, &[1])]
    }

    /// Accepts nodes whose first two entries are odd.
    pub fn odd_odd() -> QuotientAutomaton {
        QuotientAutomaton::new(
            0,
            vec![
                state(parity(), vec![3, 1]),
                state(parity(), vec![3, 2]),
                state(vec![ClassSpec::all()], vec![2]),
                state(vec![ClassSpec::all()], vec![3]),
            ],
            [2].into(),
        )
        .unwrap()
    }

    /// Accepts nodes with at least `k` entries that are `≥ 3`; smaller
    /// entries leave the state unchanged.
    pub fn length_at_least(k: usize) -> QuotientAutomaton {
        let split = || vec![ClassSpec::finite(&[0, 1, 2]), ClassSpec::at_least(3)];
        let per_state = (0..=k).map(|q| state(split(), vec![q, (q + 1).min(k)])).collect();
        QuotientAutomaton::new(0, per_state, [k].into()).unwrap()
    }

    /// Accepts nodes with at least `k` entries of any size.
    pub fn any_length_at_least(k: usize) -> QuotientAutomaton {
        let per_state = (0..=k).map(|q| state(vec![ClassSpec::all()], vec![(q + 1).min(k)])).collect();
        QuotientAutomaton::new(0, per_state, [k].into()).unwrap()
    }

    /// Accepts nonempty nodes whose last entry is odd.
    pub fn last_entry_odd() -> QuotientAutomaton {
        QuotientAutomaton::new(0, vec![state(parity(), vec![0, 1]), state(parity(), vec![0, 1])], [1].into())
            .unwrap()
    }

    /// Accepts exactly the one-entry nodes with entry in `{0, 1, 2}`.
    pub fn small_singletons() -> QuotientAutomaton {
        QuotientAutomaton::new(
            0,
            vec![
                state(vec![ClassSpec::finite(&[0, 1, 2]), ClassSpec::at_least(3)], vec![1, 2]),
                state(vec![ClassSpec::all()], vec![2]),
                state(vec![ClassSpec::all()], vec![2]),
            ],
            [1].into(),
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::seq::EventuallyPeriodicSeq;

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    fn zeros_a() -> ASet {
        ASet::new(EventuallyPeriodicSeq::from_u64s(&[], &[0]))
    }

    #[test]
    fn rank_examples() {
        let a = odd_odd();
        assert_eq!(a.ranks(), vec![Some(2), Some(1), Some(0), None]);
        let acc = QuotientAutomaton::new(
            0,
            vec![StateSpec { classes: ClassPartition::trivial(), next: vec![0] }],
            [0].into(),
        )
        .unwrap();
        assert_eq!(acc.rank_of(0), Some(0));
    }

    #[test]
    fn blocking_examples() {
        let s = small_singletons();
        assert_eq!(s.ranks()[0], None);
        assert_eq!(s.blocking_bounds(), vec![n(3), n(0), n(0)]);
        let h = s.blocking_h();
        // Exhaustive: entries ≤ 10, depth ≤ 3, every entry at least h.
        let mut stack = vec![NodeSeq::root()];
        while let Some(t) = stack.pop() {
            assert!(!s.accepts(&t), "{t}");
            if t.len() < 3 {
                let floor = h.eval(&t);
                stack.extend((0..=10u64).map(n).filter(|v| v >= &floor).map(|v| t.child(v)));
            }
        }
        assert_eq!(length_at_least(2).blocking_bounds(), vec![n(0), n(0), n(0)]);
        assert_eq!(odd_odd().blocking_bounds(), vec![n(0); 4]);
    }

    #[test]
    fn extension_examples() {
        let a = zeros_a();
        let bound = n(1000);
        let s = odd_odd();
        let root = NodeSeq::root();
        assert_eq!(s.find_extension(&root, &a, &HFun::constant(5), &bound).unwrap(), NodeSeq::from_u64s(&[5, 5]));
        assert_eq!(s.find_extension(&root, &a, &HFun::constant(7), &bound).unwrap(), NodeSeq::from_u64s(&[7, 7]));
        let t = NodeSeq::from_u64s(&[1, 1]);
        assert_eq!(s.find_extension(&t, &a, &HFun::constant(9), &bound).unwrap(), t);
        let dead = NodeSeq::from_u64s(&[2]);
        assert!(matches!(s.find_extension(&dead, &a, &HFun::zero(), &bound), Err(Error::NotReachable)));
    }

    #[test]
    fn witness_examples() {
        let a = zeros_a();
        let bound = n(2_000_000);
        assert_eq!(class_avoid_witness(&ClassSpec::residues(2, &[1]), &a, &n(5), &bound).unwrap(), n(5));
        assert_eq!(class_avoid_witness(&ClassSpec::residues(2, &[0]), &a, &n(6), &bound).unwrap(), n(8));
        let sparse = ClassSpec::residues(1_000_000, &[0]);
        assert_eq!(class_avoid_witness(&sparse, &a, &n(1), &bound).unwrap(), n(1_000_000));
        let captured = ClassSpec::finite(&[6, 24]);
        assert!(matches!(class_avoid_witness(&captured, &a, &n(0), &bound), Err(Error::ClassCaptured { .. })));
    }

    #[test]
    fn side_function_order() {
        let s = odd_odd();
        let by_state = HFun(vec![HPrimitive::State { automaton: s.clone(), bounds: vec![n(1), n(4), n(2), n(0)] }]);
        assert!(HFun::constant(4).geq(&by_state).unwrap());
        assert!(!HFun::constant(3).geq(&by_state).unwrap());
        assert!(by_state.geq(&HFun::zero()).unwrap());
        // Level 1 holds the nodes in state 1, which need 4.
        let by_level = HFun(vec![HPrimitive::Level { table: vec![n(1), n(4)], tail: n(2) }]);
        assert!(by_level.geq(&by_state).unwrap());
        let low = HFun(vec![HPrimitive::Level { table: vec![n(1), n(3)], tail: n(2) }]);
        assert!(!low.geq(&by_state).unwrap());
        assert!(low.join(&HFun::constant(4)).geq(&by_state).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let s = length_at_least(3);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<QuotientAutomaton>(&text).unwrap(), s);
        let h = s.blocking_h();
        let text = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<HFun>(&text).unwrap(), h);
    }
}
