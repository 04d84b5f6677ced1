//! Multi-authority attribute-based signcryption with CRT group-key
//! revocation, for authenticated multicast from grid operators and vendors
//! to smart meters.
//!
//! The scheme is generic over a [`Bilinear`] provider. [`Production`] runs
//! on BLS12-381; [`Mock`] carries discrete logs in the clear and exists for
//! tests that compare against hand-computed exponents.

pub mod bench;
pub mod bilinear;
pub mod error;
pub mod field;
pub mod policy;
pub mod revocation;
pub mod scheme;
pub mod sim;
pub mod wire;

pub use bilinear::{Bilinear, GroupElement, MockProvider};
pub use error::{Error, Result};
pub use field::{Scalar, Zp};
pub use policy::{compile_lss, parse_policy, AccessPolicy, PolicyFormula};
pub use revocation::{revoke, AccessListTable, PrimeRegistry};
pub use scheme::{designcrypt, global_setup, signcrypt, GlobalParams, RevokedText, SigncryptedText, Universe};

/// BLS12-381 provider.
pub type Production = bilinear::Bls12;
/// Scalar field of [`Production`].
pub type ProductionScalar = field::Fr;
/// Transparent provider over `Z_1009`, the default for fixtures.
pub type Mock = MockProvider<1009>;
/// Scalar field of [`Mock`].
pub type MockScalar = Zp<1009>;
/// Mock provider over the Mersenne prime 2^61 - 1.
pub type WideMock = MockProvider<{ (1 << 61) - 1 }>;

pub type ProductionParams = GlobalParams<Production>;
pub type MockParams = GlobalParams<Mock>;
