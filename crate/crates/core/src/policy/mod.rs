//! Policy formulas and their linear secret sharing schemes.

mod formula;
mod lss;

pub use formula::{parse_policy, PolicyFormula, PolicyNode};
pub use lss::{compile_lss, AccessPolicy, Reconstruction, ShareVector};
