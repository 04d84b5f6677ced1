//! BLS12-381 realization backed by arkworks.

use std::fmt;
use std::sync::Arc;

use ark_bls12_381::{g1, Bls12_381, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::hashing::curve_maps::wb::WBMap;
use ark_ec::hashing::map_to_curve_hasher::MapToCurveBasedHasher;
use ark_ec::hashing::HashToCurve;
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{CurveGroup, PrimeGroup};
use ark_ff::field_hashers::DefaultFieldHasher;
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use num_traits::Zero;
use sha2::Sha256;

use super::{Bilinear, GroupElement, Role};
use crate::error::{Error, Result};
use crate::field::Fr;

type G1Hasher = MapToCurveBasedHasher<G1Projective, DefaultFieldHasher<Sha256, 128>, WBMap<g1::Config>>;

const IDENTITY_DST: &[u8] = b"MABS-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_H";
const ATTRIBUTE_DST: &[u8] = b"MABS-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_F";

fn serialize<T: CanonicalSerialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::with_capacity(value.compressed_size());
    value
        .serialize_compressed(&mut out)
        .expect("writing to a Vec cannot fail");
    out
}

fn deserialize<T: CanonicalDeserialize>(bytes: &[u8]) -> Result<T> {
    let mut reader = bytes;
    let value = T::deserialize_compressed(&mut reader)
        .map_err(|e| Error::Decode(format!("invalid group element: {e}")))?;
    if !reader.is_empty() {
        return Err(Error::Decode("trailing bytes after group element".into()));
    }
    Ok(value)
}

/// Defines a newtype over an arkworks group so the local trait can be
/// implemented per role.
macro_rules! ark_group {
    ($name:ident, $inner:ty, $role:expr, $encode:expr, $decode:expr) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq)]
        pub struct $name(pub $inner);

        impl GroupElement for $name {
            type Scalar = Fr;
            const ROLE: Role = $role;

            fn identity() -> Self {
                $name(<$inner>::zero())
            }

            fn mul(&self, other: &Self) -> Self {
                $name(self.0 + other.0)
            }

            fn inverse(&self) -> Self {
                $name(-self.0)
            }

            fn pow(&self, exponent: &Fr) -> Self {
                $name(self.0 * exponent)
            }

            fn to_bytes(&self) -> Vec<u8> {
                $encode(&self.0)
            }

            fn from_bytes(bytes: &[u8]) -> Result<Self> {
                $decode(bytes).map($name)
            }
        }
    };
}

ark_group!(
    G1,
    G1Projective,
    Role::Source1,
    |p: &G1Projective| serialize(&p.into_affine()),
    |b| deserialize::<G1Affine>(b).map(G1Projective::from)
);
ark_group!(
    G2,
    G2Projective,
    Role::Source2,
    |p: &G2Projective| serialize(&p.into_affine()),
    |b| deserialize::<G2Affine>(b).map(G2Projective::from)
);
ark_group!(Gt, PairingOutput<Bls12_381>, Role::Target, serialize, deserialize);

/// The production provider: asymmetric BLS12-381 with hash-to-curve
/// (SSWU, SHA-256) into `G1`.
#[derive(Clone)]
pub struct Bls12 {
    identity_hasher: Arc<G1Hasher>,
    attribute_hasher: Arc<G1Hasher>,
    gt: Gt,
}

impl Bls12 {
    pub fn new() -> Self {
        let hasher = |dst| Arc::new(G1Hasher::new(dst).expect("static DST is valid"));
        Bls12 {
            identity_hasher: hasher(IDENTITY_DST),
            attribute_hasher: hasher(ATTRIBUTE_DST),
            gt: Gt(Bls12_381::pairing(G1Projective::generator(), G2Projective::generator())),
        }
    }
}

impl Default for Bls12 {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for Bls12 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Bls12")
    }
}

impl Bilinear for Bls12 {
    type Scalar = Fr;
    type G1 = G1;
    type G2 = G2;
    type Gt = Gt;

    const NAME: &'static str = "production";

    fn g1(&self) -> G1 {
        G1(G1Projective::generator())
    }

    fn g2(&self) -> G2 {
        G2(G2Projective::generator())
    }

    fn gt(&self) -> Gt {
        self.gt
    }

    fn pair(&self, a: &G1, b: &G2) -> Gt {
        Gt(Bls12_381::pairing(a.0, b.0))
    }

    fn multi_pair(&self, pairs: &[(G1, G2)]) -> Gt {
        let left: Vec<G1Affine> =
            G1Projective::normalize_batch(&pairs.iter().map(|(a, _)| a.0).collect::<Vec<_>>());
        let right: Vec<G2Affine> =
            G2Projective::normalize_batch(&pairs.iter().map(|(_, b)| b.0).collect::<Vec<_>>());
        Gt(Bls12_381::multi_pairing(left, right))
    }

    fn hash_to_identity_group(&self, gid: &[u8]) -> G1 {
        G1(self.identity_hasher.hash(gid).expect("hash-to-curve is total").into())
    }

    fn hash_to_attribute_group(&self, attribute: &[u8]) -> G1 {
        G1(self.attribute_hasher.hash(attribute).expect("hash-to-curve is total").into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encodings_have_curve_sizes() {
        let p = Bls12::new();
        assert_eq!(p.g1().to_bytes().len(), 48);
        assert_eq!(p.g2().to_bytes().len(), 96);
        assert!(G1::from_bytes(&[0xffu8; 48]).is_err());
        let mut bytes = p.g1().to_bytes();
        bytes.push(0);
        assert!(G1::from_bytes(&bytes).is_err());
    }
}
