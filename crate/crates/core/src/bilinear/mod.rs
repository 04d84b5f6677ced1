//! Bilinear group abstraction.
//!
//! The scheme is written against [`Bilinear`], an asymmetric pairing
//! `e: G1 x G2 -> GT` over groups of prime order `p`. Decryption/verification
//! key first components, `H(GID)`, `F(u)` and `C4` live in `G1`; `C2`, `C3`,
//! `K'` and `g^y` live in `G2`; `C`, `C1` and `e(g,g)^alpha` live in `GT`.
//!
//! Group operations are written multiplicatively to match the usual
//! presentation of pairing-based schemes: [`GroupElement::mul`] is the group
//! law and [`GroupElement::pow`] is exponentiation by a scalar.

mod bls12;
mod mock;

use std::fmt::Debug;

use num_bigint::BigUint;

use crate::error::Result;
use crate::field::Scalar;

pub use bls12::{Bls12, G1 as Bls12G1, G2 as Bls12G2, Gt as Bls12Gt};
pub use mock::{MockElement, MockProvider, MockRole, Source1, Source2, Target};

/// Which of the three groups an element belongs to. The discriminant is the
/// role tag used on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Role {
    Source1 = 0x01,
    Source2 = 0x02,
    Target = 0x03,
}

impl Role {
    pub fn tag(self) -> u8 {
        self as u8
    }
}

/// An element of one of the pairing groups.
pub trait GroupElement: Clone + Debug + PartialEq + Eq + Send + Sync + 'static {
    type Scalar: Scalar;
    const ROLE: Role;

    fn identity() -> Self;

    fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// The group law.
    fn mul(&self, other: &Self) -> Self;

    fn inverse(&self) -> Self;

    fn pow(&self, exponent: &Self::Scalar) -> Self;

    fn div(&self, other: &Self) -> Self {
        self.mul(&other.inverse())
    }

    /// Canonical encoding.
    fn to_bytes(&self) -> Vec<u8>;

    /// Parses a canonical encoding, rejecting anything that is not a valid
    /// element of the group.
    fn from_bytes(bytes: &[u8]) -> Result<Self>;
}

/// A pairing-friendly group triple with the two hash functions the scheme
/// needs.
///
/// Providers are immutable after construction and safe to share.
pub trait Bilinear: Clone + Debug + Send + Sync + 'static {
    type Scalar: Scalar;
    type G1: GroupElement<Scalar = Self::Scalar>;
    type G2: GroupElement<Scalar = Self::Scalar>;
    type Gt: GroupElement<Scalar = Self::Scalar>;

    /// Short identifier recorded in key files and global parameters.
    const NAME: &'static str;

    fn g1(&self) -> Self::G1;
    fn g2(&self) -> Self::G2;

    /// `e(g1, g2)`, a generator of the target group.
    fn gt(&self) -> Self::Gt;

    fn pair(&self, a: &Self::G1, b: &Self::G2) -> Self::Gt;

    /// Product of pairings. Providers may share the final exponentiation.
    fn multi_pair(&self, pairs: &[(Self::G1, Self::G2)]) -> Self::Gt {
        pairs
            .iter()
            .fold(Self::Gt::identity(), |acc, (a, b)| acc.mul(&self.pair(a, b)))
    }

    /// `H: GID -> G1`.
    fn hash_to_identity_group(&self, gid: &[u8]) -> Self::G1;

    /// `F: U -> G1`, domain-separated from `H`.
    fn hash_to_attribute_group(&self, attribute: &[u8]) -> Self::G1;

    fn params(&self) -> BilinearParams<Self> {
        BilinearParams {
            group_order: Self::Scalar::modulus(),
            generator_g1: self.g1(),
            generator_g2: self.g2(),
            pairing_of_generators: self.gt(),
        }
    }
}

/// Public pairing parameters `(p, g1, g2, e(g1, g2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearParams<E: Bilinear> {
    pub group_order: BigUint,
    pub generator_g1: E::G1,
    pub generator_g2: E::G2,
    pub pairing_of_generators: E::Gt,
}
