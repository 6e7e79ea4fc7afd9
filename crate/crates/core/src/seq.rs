//! Finite nodes and eventually periodic points of Baire space.

use crate::error::{invalid, Error, Result};
use crate::nat::{vec_json, Nat};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A node `t` of the tree of finite sequences of naturals.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeSeq(#[serde(with = "vec_json")] pub Vec<Nat>);

impl NodeSeq {
    pub fn root() -> Self {
        NodeSeq(Vec::new())
    }

    pub fn from_u64s(v: &[u64]) -> Self {
        NodeSeq(v.iter().map(|&n| Nat::from(n)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Nat] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<&Nat> {
        self.0.get(i)
    }

    pub fn is_prefix_of(&self, other: &NodeSeq) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn restrict(&self, l: usize) -> NodeSeq {
        NodeSeq(self.0[..l.min(self.0.len())].to_vec())
    }

    pub fn child(&self, n: Nat) -> NodeSeq {
        let mut v = self.0.clone();
        v.push(n);
        NodeSeq(v)
    }

    pub fn push(&mut self, n: Nat) {
        self.0.push(n);
    }
}

impl fmt::Display for NodeSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Serialize, Deserialize)]
struct RawSeq {
    #[serde(with = "vec_json")]
    prefix: Vec<Nat>,
    #[serde(with = "vec_json")]
    period: Vec<Nat>,
}

/// A point of Baire space given by a finite prefix followed by a repeating
/// period. Always stored in canonical form (minimal period, then minimal
/// prefix), so structural equality is equality as functions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSeq", into = "RawSeq")]
pub struct EventuallyPeriodicSeq {
    prefix: Vec<Nat>,
    period: Vec<Nat>,
}

impl TryFrom<RawSeq> for EventuallyPeriodicSeq {
    type Error = Error;
    fn try_from(r: RawSeq) -> Result<Self> {
        EventuallyPeriodicSeq::new(r.prefix, r.period)
    }
}

impl From<EventuallyPeriodicSeq> for RawSeq {
    fn from(s: EventuallyPeriodicSeq) -> Self {
        RawSeq { prefix: s.prefix, period: s.period }
    }
}

impl EventuallyPeriodicSeq {
    pub fn new(prefix: Vec<Nat>, period: Vec<Nat>) -> Result<Self> {
        if period.is_empty() {
            return Err(invalid("period must be nonempty"));
        }
        let mut s = EventuallyPeriodicSeq { prefix, period };
        s.canonicalize();
        Ok(s)
    }

    pub fn from_u64s(prefix: &[u64], period: &[u64]) -> Self {
        Self::new(
            prefix.iter().map(|&n| Nat::from(n)).collect(),
            period.iter().map(|&n| Nat::from(n)).collect(),
        )
        .expect("nonempty period")
    }

    pub fn constant(n: Nat) -> Self {
        EventuallyPeriodicSeq { prefix: Vec::new(), period: vec![n] }
    }

    /// `node` followed by `period` repeated forever.
    pub fn node_then(node: &NodeSeq, period: Vec<Nat>) -> Result<Self> {
        Self::new(node.0.clone(), period)
    }

    pub fn prefix(&self) -> &[Nat] {
        &self.prefix
    }

    pub fn period(&self) -> &[Nat] {
        &self.period
    }

    /// Length after which agreement with another point can no longer change
    /// in kind: the prefix plus one period.
    pub fn horizon(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    pub fn at(&self, i: usize) -> &Nat {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn restrict(&self, l: usize) -> NodeSeq {
        NodeSeq((0..l).map(|i| self.at(i).clone()).collect())
    }

    /// Drops the first `k` entries.
    pub fn shift(&self, k: usize) -> Self {
        if k <= self.prefix.len() {
            return Self::new(self.prefix[k..].to_vec(), self.period.clone()).unwrap();
        }
        let r = (k - self.prefix.len()) % self.period.len();
        let mut period = self.period[r..].to_vec();
        period.extend_from_slice(&self.period[..r]);
        Self::new(Vec::new(), period).unwrap()
    }

    pub fn prepend(&self, n: Nat) -> Self {
        let mut prefix = vec![n];
        prefix.extend(self.prefix.iter().cloned());
        Self::new(prefix, self.period.clone()).unwrap()
    }

    pub fn extends(&self, t: &NodeSeq) -> bool {
        t.0.iter().enumerate().all(|(i, v)| self.at(i) == v)
    }

    /// Number of leading entries on which the two points agree, or `None`
    /// when they are equal.
    pub fn agreement(&self, other: &Self) -> Option<usize> {
        let span = self.prefix.len().max(other.prefix.len())
            + self.period.len().lcm(&other.period.len());
        (0..span).find(|&i| self.at(i) != other.at(i))
    }

    /// Whether some entry lies in `pred` (decidable: prefix plus one period).
    pub fn first_index_where(&self, mut pred: impl FnMut(&Nat) -> bool) -> Option<usize> {
        (0..self.horizon()).find(|&i| pred(self.at(i)))
    }

    fn canonicalize(&mut self) {
        let p = self.period.len();
        if let Some(q) = (1..=p)
            .filter(|q| p.is_multiple_of(*q))
            .find(|&q| (0..p).all(|i| self.period[i] == self.period[i % q]))
        {
            self.period.truncate(q);
        }
        while let Some(last) = self.prefix.last() {
            if last != self.period.last().unwrap() {
                break;
            }
            self.prefix.pop();
            self.period.rotate_right(1);
        }
    }
}

impl fmt::Display for EventuallyPeriodicSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.prefix.iter().map(|n| n.to_string()).collect();
        let q: Vec<String> = self.period.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]({})^w", p.join(","), q.join(","))
    }
}
