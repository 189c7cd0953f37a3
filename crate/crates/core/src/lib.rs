//! Deterministic factoring toolkit: derandomized p-1 and p+1 splitting,
//! totient-driven factoring and the totient-chain driver.

pub mod arith;
pub mod error;
pub mod factored;
pub mod graf_phi;
pub mod group;
pub mod phi_chain;
pub mod phi_reduce;
pub mod pm1;
pub mod poly;
pub mod quad;
pub mod reference;

pub use error::{Error, Result};
pub use factored::FactoredInteger;
