//! Executable constructions on finitely presented fragments of Baire space.

pub mod classes;
pub mod cli;
pub mod codes;
pub mod crrel;
pub mod decode;
pub mod encode;
pub mod error;
pub mod games;
pub mod gen;
pub mod hechler;
pub mod json;
pub mod nat;
pub mod reach;
pub mod seq;
pub mod tree;

pub use error::{Error, Result};
pub use nat::Nat;
