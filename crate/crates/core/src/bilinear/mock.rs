//! A transparent bilinear group: every element carries its discrete log.
//!
//! Element `el(a)` of any role stands for `g^a`. The group law adds
//! exponents, exponentiation multiplies them, and the pairing of `el(a)` with
//! `el(b)` is the target element `el(a*b)`. This makes every exponent identity
//! in the scheme checkable with plain modular arithmetic. It provides no
//! security whatsoever.

use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use super::{Bilinear, GroupElement, Role};
use crate::error::{Error, Result};
use crate::field::{Scalar, Zp};

/// Marker for the group an element lives in.
pub trait MockRole: Copy + fmt::Debug + Eq + Hash + Send + Sync + 'static {
    const ROLE: Role;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Source1;
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Source2;
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Target;

impl MockRole for Source1 {
    const ROLE: Role = Role::Source1;
}
impl MockRole for Source2 {
    const ROLE: Role = Role::Source2;
}
impl MockRole for Target {
    const ROLE: Role = Role::Target;
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MockElement<const P: u64, R: MockRole> {
    log: Zp<P>,
    _role: PhantomData<R>,
}

impl<const P: u64, R: MockRole> MockElement<P, R> {
    pub fn from_log(log: Zp<P>) -> Self {
        MockElement {
            log,
            _role: PhantomData,
        }
    }

    /// Shorthand for `from_log(Zp::new(value))`.
    pub fn el(value: u64) -> Self {
        Self::from_log(Zp::new(value))
    }

    /// The discrete log of this element to the role's generator.
    pub fn log(&self) -> Zp<P> {
        self.log
    }
}

impl<const P: u64, R: MockRole> fmt::Debug for MockElement<P, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}^{}", R::ROLE, self.log.value())
    }
}

impl<const P: u64, R: MockRole> GroupElement for MockElement<P, R> {
    type Scalar = Zp<P>;
    const ROLE: Role = R::ROLE;

    fn identity() -> Self {
        Self::from_log(Zp::zero())
    }

    fn mul(&self, other: &Self) -> Self {
        Self::from_log(self.log + other.log)
    }

    fn inverse(&self) -> Self {
        Self::from_log(-self.log)
    }

    fn pow(&self, exponent: &Zp<P>) -> Self {
        Self::from_log(self.log * *exponent)
    }

    fn to_bytes(&self) -> Vec<u8> {
        self.log.to_bytes()
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Zp::<P>::from_bytes(bytes).map(Self::from_log)
    }
}

/// Mock provider over `Z_P`. `H` and `F` are seeded SHA-256 PRFs into `Z_P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MockProvider<const P: u64> {
    seed: u64,
}

impl<const P: u64> MockProvider<P> {
    /// Fails unless `P` is a prime of at least 11.
    pub fn new(seed: u64) -> Result<Self> {
        if P < 11 || !num_prime::nt_funcs::is_prime64(P) {
            return Err(Error::InvalidModulus(P));
        }
        Ok(MockProvider { seed })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `SHA-256(seed_be64 || tag || 0x00 || label) mod P`.
    pub fn prf(&self, tag: &str, label: &[u8]) -> Zp<P> {
        let digest = Sha256::new()
            .chain_update(self.seed.to_be_bytes())
            .chain_update(tag.as_bytes())
            .chain_update([0u8])
            .chain_update(label)
            .finalize();
        Zp::from_biguint(&BigUint::from_bytes_be(&digest))
    }
}

impl<const P: u64> Bilinear for MockProvider<P> {
    type Scalar = Zp<P>;
    type G1 = MockElement<P, Source1>;
    type G2 = MockElement<P, Source2>;
    type Gt = MockElement<P, Target>;

    const NAME: &'static str = "mock";

    fn g1(&self) -> Self::G1 {
        MockElement::from_log(Zp::one())
    }

    fn g2(&self) -> Self::G2 {
        MockElement::from_log(Zp::one())
    }

    fn gt(&self) -> Self::Gt {
        MockElement::from_log(Zp::one())
    }

    fn pair(&self, a: &Self::G1, b: &Self::G2) -> Self::Gt {
        MockElement::from_log(a.log * b.log)
    }

    fn hash_to_identity_group(&self, gid: &[u8]) -> Self::G1 {
        MockElement::from_log(self.prf("H", gid))
    }

    fn hash_to_attribute_group(&self, attribute: &[u8]) -> Self::G1 {
        MockElement::from_log(self.prf("F", attribute))
    }
}
