//! Arbitrary-precision naturals and their JSON form.
//!
//! Values up to 2^53 travel as JSON numbers; anything larger is written as a
//! decimal string so that consumers with double-precision numbers do not
//! silently round. Both forms are accepted on input.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::fmt;

pub type Nat = BigUint;

const SAFE_INTEGER: u64 = 1 << 53;

pub fn nat(n: u64) -> Nat {
    Nat::from(n)
}

/// Serde adapter for a single [`Nat`].
pub mod as_json {
    use super::*;

    pub fn serialize<S: Serializer>(n: &Nat, s: S) -> Result<S::Ok, S::Error> {
        match n.to_u64() {
            Some(v) if v <= SAFE_INTEGER => s.serialize_u64(v),
            _ => s.serialize_str(&n.to_str_radix(10)),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Nat, D::Error> {
        d.deserialize_any(NatVisitor)
    }
}

/// Serde adapter for `Vec<Nat>`.
pub mod vec_json {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Nat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(JsonNat::from))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Nat>, D::Error> {
        let v: Vec<JsonNat> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|n| n.0).collect())
    }
}

/// Serde adapter for `BTreeSet<Nat>`, written as a sorted array.
pub mod set_json {
    use super::*;
    use std::collections::BTreeSet;

    pub fn serialize<S: Serializer>(v: &BTreeSet<Nat>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(JsonNat::from))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeSet<Nat>, D::Error> {
        let v: Vec<JsonNat> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|n| n.0).collect())
    }
}

/// Newtype wrapper carrying the JSON convention, for use in collections.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[derive(Default)]
pub struct JsonNat(pub Nat);


impl From<&Nat> for JsonNat {
    fn from(n: &Nat) -> Self {
        JsonNat(n.clone())
    }
}

impl Serialize for JsonNat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        as_json::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for JsonNat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        as_json::deserialize(d).map(JsonNat)
    }
}

struct NatVisitor;

impl<'de> Visitor<'de> for NatVisitor {
    type Value = Nat;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a natural number or a decimal string")
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Nat, E> {
        Ok(Nat::from(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Nat, E> {
        u64::try_from(v)
            .map(Nat::from)
            .map_err(|_| E::custom("negative number"))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Nat, E> {
        if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) {
            return Err(E::custom(format!("not a decimal natural: {v:?}")));
        }
        Nat::parse_bytes(v.as_bytes(), 10).ok_or_else(|| E::custom("bad decimal"))
    }
}
