//! Finite challenge-response relations, their norms, and morphisms.

use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Deserialize)]
struct RawRelation {
    challenges: Vec<String>,
    responses: Vec<String>,
    meets: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRelation")]
pub struct FiniteRelation {
    challenges: Vec<String>,
    responses: Vec<String>,
    meets: BTreeSet<(String, String)>,
}

impl TryFrom<RawRelation> for FiniteRelation {
    type Error = Error;
    fn try_from(r: RawRelation) -> Result<Self> {
        FiniteRelation::new(r.challenges, r.responses, r.meets)
    }
}

impl FiniteRelation {
    pub fn new(
        challenges: impl IntoIterator<Item = String>,
        responses: impl IntoIterator<Item = String>,
        meets: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        let challenges: BTreeSet<String> = challenges.into_iter().collect();
        let responses: BTreeSet<String> = responses.into_iter().collect();
        let meets: BTreeSet<(String, String)> = meets.into_iter().collect();
        if let Some((c, r)) = meets.iter().find(|(c, r)| !challenges.contains(c) || !responses.contains(r)) {
            return Err(invalid(format!("pair ({c}, {r}) is outside challenges × responses")));
        }
        Ok(FiniteRelation {
            challenges: challenges.into_iter().collect(),
            responses: responses.into_iter().collect(),
            meets,
        })
    }

    pub fn challenges(&self) -> &[String] {
        &self.challenges
    }

    pub fn responses(&self) -> &[String] {
        &self.responses
    }

    pub fn meets(&self, c: &str, r: &str) -> bool {
        self.meets.contains(&(c.to_string(), r.to_string()))
    }

    /// Bitmask of challenges met by each response.
    fn cover_masks(&self) -> Vec<u128> {
        self.responses
            .iter()
            .map(|r| {
                self.challenges
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| self.meets(c, r))
                    .fold(0u128, |m, (i, _)| m | 1 << i)
            })
            .collect()
    }

    /// Least number of responses meeting every challenge.
    pub fn norm(&self) -> Result<usize> {
        if self.challenges.len() > 128 {
            return Err(invalid("at most 128 challenges are supported"));
        }
        let full: u128 = if self.challenges.len() == 128 { u128::MAX } else { (1u128 << self.challenges.len()) - 1 };
        let masks = self.cover_masks();
        if masks.iter().fold(0, |a, m| a | m) != full {
            return Err(Error::NoCover);
        }
        if self.challenges.is_empty() {
            return Ok(0);
        }
        let mut best = masks.len();
        branch(&masks, full, 0, 0, &mut best);
        Ok(best)
    }
}

/// Branches on the lowest uncovered challenge: some response must meet it.
fn branch(masks: &[u128], full: u128, covered: u128, used: usize, best: &mut usize) {
    if covered == full {
        *best = (*best).min(used);
        return;
    }
    if used + 1 >= *best {
        return;
    }
    let target = (!covered & full).trailing_zeros();
    for &m in masks.iter().filter(|m| *m >> target & 1 == 1) {
        branch(masks, full, covered | m, used + 1, best);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MorphismWitness {
    /// From challenges of `B` to challenges of `A`.
    pub phi_minus: BTreeMap<String, String>,
    /// From responses of `A` to responses of `B`.
    pub phi_plus: BTreeMap<String, String>,
}

/// Whether `φ₋(c) A r ⇒ c B φ₊(r)` for all challenges `c` of `B` and
/// responses `r` of `A`.
pub fn check_morphism(a: &FiniteRelation, b: &FiniteRelation, w: &MorphismWitness) -> Result<bool> {
    for c in b.challenges() {
        let pc = w.phi_minus.get(c).ok_or_else(|| invalid(format!("phiMinus undefined at {c}")))?;
        if !a.challenges.contains(pc) {
            return Err(invalid(format!("phiMinus({c}) is not a challenge of A")));
        }
    }
    for r in a.responses() {
        let pr = w.phi_plus.get(r).ok_or_else(|| invalid(format!("phiPlus undefined at {r}")))?;
        if !b.responses.contains(pr) {
            return Err(invalid(format!("phiPlus({r}) is not a response of B")));
        }
    }
    Ok(b.challenges().iter().all(|c| {
        a.responses()
            .iter()
            .all(|r| !a.meets(&w.phi_minus[c], r) || b.meets(c, &w.phi_plus[r]))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(nc: usize, nr: usize, pairs: &[(usize, usize)]) -> FiniteRelation {
        FiniteRelation::new(
            (0..nc).map(|i| format!("c{i}")),
            (0..nr).map(|i| format!("r{i}")),
            pairs.iter().map(|&(c, r)| (format!("c{c}"), format!("r{r}"))),
        )
        .unwrap()
    }

    fn identity_maps(n: usize) -> MorphismWitness {
        MorphismWitness {
            phi_minus: (0..n).map(|i| (format!("c{i}"), format!("c{i}"))).collect(),
            phi_plus: (0..n).map(|i| (format!("r{i}"), format!("r{i}"))).collect(),
        }
    }

    fn brute_norm(r: &FiniteRelation) -> Option<usize> {
        let n = r.responses().len();
        (0u32..1 << n)
            .filter(|s| {
                r.challenges().iter().all(|c| (0..n).any(|i| s >> i & 1 == 1 && r.meets(c, &r.responses()[i])))
            })
            .map(|s| s.count_ones() as usize)
            .min()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(rel(2, 2, &[(0, 0), (1, 1)]).norm().unwrap(), 2);
        let full: Vec<_> = (0..3).flat_map(|c| (0..3).map(move |r| (c, r))).collect();
        assert_eq!(rel(3, 3, &full).norm().unwrap(), 1);
        assert!(matches!(rel(1, 1, &[]).norm(), Err(Error::NoCover)));
    }

    #[test]
    fn morphism_examples() {
        let id = rel(2, 2, &[(0, 0), (1, 1)]);
        let full = rel(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert!(check_morphism(&id, &id, &identity_maps(2)).unwrap());
        assert!(!check_morphism(&full, &id, &identity_maps(2)).unwrap());
        assert!(check_morphism(&id, &full, &identity_maps(2)).unwrap());
    }

    #[test]
    fn rejects_pairs_outside_the_product() {
        let bad = FiniteRelation::new(["c".to_string()], ["r".to_string()], [("c".to_string(), "x".to_string())]);
        assert!(bad.is_err());
    }

    proptest! {
        #[test]
        fn norm_is_exact(nc in 1usize..6, nr in 1usize..6, bits in any::<u64>()) {
            let pairs: Vec<_> = (0..nc).flat_map(|c| (0..nr).map(move |r| (c, r)))
                .enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, p)| p).collect();
            let r = rel(nc, nr, &pairs);
            prop_assert_eq!(r.norm().ok(), brute_norm(&r));
        }
    }
}
