//! Prime-field scalars.
//!
//! All exponent arithmetic in the scheme, and all LSS matrix arithmetic, is
//! written against [`Scalar`]. Two realizations ship with the crate: [`Zp`],
//! a small prime field used by the transparent mock provider, and the
//! BLS12-381 scalar field `Fr`.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use ark_ff::{BigInteger, PrimeField, UniformRand};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};

/// Nonzero sampling gives up after this many consecutive zero draws.
const NONZERO_ATTEMPTS: usize = 64;

/// An element of a prime field `Z_p`.
pub trait Scalar:
    Copy
    + Debug
    + Eq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// The field characteristic `p`.
    fn modulus() -> BigUint;

    fn from_u64(value: u64) -> Self;

    /// Maps a signed integer into the field, so `-1` becomes `p - 1`.
    fn from_i64(value: i64) -> Self {
        let magnitude = Self::from_u64(value.unsigned_abs());
        if value < 0 {
            -magnitude
        } else {
            magnitude
        }
    }

    /// Multiplicative inverse, `None` for zero.
    fn inverse(&self) -> Option<Self>;

    fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self;

    /// Canonical integer representative in `[0, p)`.
    fn to_biguint(&self) -> BigUint;

    /// Reduces an arbitrary integer modulo `p`.
    fn from_biguint(value: &BigUint) -> Self;

    /// Width of the fixed-length big-endian encoding.
    fn byte_len() -> usize {
        (Self::modulus().bits() as usize).div_ceil(8)
    }

    fn to_bytes(&self) -> Vec<u8> {
        let raw = self.to_biguint().to_bytes_be();
        let mut out = vec![0u8; Self::byte_len() - raw.len()];
        out.extend_from_slice(&raw);
        out
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != Self::byte_len() {
            return Err(Error::Decode(format!(
                "scalar must be {} bytes, got {}",
                Self::byte_len(),
                bytes.len()
            )));
        }
        let value = BigUint::from_bytes_be(bytes);
        if value >= Self::modulus() {
            return Err(Error::Decode("scalar not reduced".into()));
        }
        Ok(Self::from_biguint(&value))
    }

    /// Samples from `Z_p^*`. A source that keeps producing zero is reported
    /// rather than silently yielding a zero key.
    fn random_nonzero<R: RngCore + ?Sized>(rng: &mut R) -> Result<Self> {
        for _ in 0..NONZERO_ATTEMPTS {
            let candidate = Self::random(rng);
            if !candidate.is_zero() {
                return Ok(candidate);
            }
        }
        Err(Error::RandomnessExhausted)
    }
}

/// Integers modulo a compile-time prime `P`.
///
/// Values are kept reduced, so derived equality is field equality.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Zp<const P: u64>(u64);

impl<const P: u64> Zp<P> {
    pub const fn new(value: u64) -> Self {
        Zp(value % P)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }
}

impl<const P: u64> Debug for Zp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.0, P)
    }
}

impl<const P: u64> Display for Zp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(&self.0, f)
    }
}

impl<const P: u64> Add for Zp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Zp(((self.0 as u128 + rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Sub for Zp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const P: u64> Mul for Zp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Zp(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Neg for Zp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        if self.0 == 0 {
            self
        } else {
            Zp(P - self.0)
        }
    }
}

impl<const P: u64> Zero for Zp<P> {
    fn zero() -> Self {
        Zp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Zp<P> {
    fn one() -> Self {
        Zp(1 % P)
    }
}

impl<const P: u64> Scalar for Zp<P> {
    fn modulus() -> BigUint {
        BigUint::from(P)
    }

    fn from_u64(value: u64) -> Self {
        Zp::new(value)
    }

    fn inverse(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }

    fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        Zp(rng.gen_range(0..P))
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from(self.0)
    }

    fn from_biguint(value: &BigUint) -> Self {
        let reduced = value % P;
        Zp(reduced.to_u64().expect("reduced below a u64 modulus"))
    }
}

/// The BLS12-381 scalar field.
pub type Fr = ark_bls12_381::Fr;

fn fr_modulus() -> &'static BigUint {
    static MODULUS: OnceLock<BigUint> = OnceLock::new();
    MODULUS.get_or_init(|| BigUint::from_bytes_be(&Fr::MODULUS.to_bytes_be()))
}

impl Scalar for Fr {
    fn modulus() -> BigUint {
        fr_modulus().clone()
    }

    fn from_u64(value: u64) -> Self {
        Fr::from(value)
    }

    fn inverse(&self) -> Option<Self> {
        ark_ff::Field::inverse(self)
    }

    fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        Fr::rand(rng)
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from_bytes_be(&self.into_bigint().to_bytes_be())
    }

    fn from_biguint(value: &BigUint) -> Self {
        Fr::from_be_bytes_mod_order(&value.to_bytes_be())
    }

    fn byte_len() -> usize {
        32
    }
}
