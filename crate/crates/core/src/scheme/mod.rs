//! The signcryption scheme: global setup, authority and signer keys, user
//! key generation, signcryption and designcryption.

mod ciphertext;
mod designcrypt;
mod envelope;
mod keys;
mod signcrypt;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bilinear::{Bilinear, GroupElement};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::wire::Writer;

pub use ciphertext::{RevokedText, RowCiphertext, SigncryptedText};
pub use designcrypt::{aggregate, designcrypt, recover_row_key, row_factor};
pub use envelope::{Envelope, AEAD_CHACHA20_POLY1305, KDF_HKDF_SHA256};
pub use keys::{
    authority_setup, dec_key_gen, dec_key_gen_with, sign_key_gen, ver_key_gen, ver_key_gen_with,
    AuthorityKeypair, AuthorityPublicKey, DecryptionKey, SignerKey, VerificationKey,
};
pub use signcrypt::{check_policy_shape, signcrypt, signcrypt_with, SigncryptRandomness};

/// Attribute and controller universes together with the controller map `T`.
///
/// `attributes` (U_1) are issued by `authorities` (U_Θ); each signer in
/// `signers` (U_Φ) controls exactly one attribute of `identity_attributes`
/// (U_2). `identities` lists the admissible GIDs; an empty set leaves the
/// identity universe open.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Universe {
    pub authorities: BTreeSet<String>,
    pub signers: BTreeSet<String>,
    pub attributes: BTreeSet<String>,
    pub identity_attributes: BTreeSet<String>,
    pub controller_map: BTreeMap<String, String>,
    #[serde(default)]
    pub identities: BTreeSet<String>,
}

impl Universe {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares an attribute authority and the attributes it issues.
    pub fn with_authority<I, A>(mut self, authority: &str, attributes: I) -> Self
    where
        I: IntoIterator<Item = A>,
        A: Into<String>,
    {
        self.authorities.insert(authority.to_string());
        for a in attributes {
            let a = a.into();
            self.controller_map.insert(a.clone(), authority.to_string());
            self.attributes.insert(a);
        }
        self
    }

    /// Declares a signer and its identity attribute.
    pub fn with_signer(mut self, signer: &str, identity_attribute: &str) -> Self {
        self.signers.insert(signer.to_string());
        self.identity_attributes.insert(identity_attribute.to_string());
        self.controller_map
            .insert(identity_attribute.to_string(), signer.to_string());
        self
    }

    pub fn with_identities<I, A>(mut self, identities: I) -> Self
    where
        I: IntoIterator<Item = A>,
        A: Into<String>,
    {
        self.identities.extend(identities.into_iter().map(Into::into));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.attributes.intersection(&self.identity_attributes).next() {
            return Err(Error::InvalidUniverse(format!(
                "`{a}` is both an attribute and a signer identity attribute"
            )));
        }
        for a in &self.attributes {
            let controller = self
                .controller_map
                .get(a)
                .ok_or_else(|| Error::UnmappedAttribute(a.clone()))?;
            if !self.authorities.contains(controller) {
                return Err(Error::InvalidUniverse(format!(
                    "attribute `{a}` maps to `{controller}`, which is not an attribute authority"
                )));
            }
        }
        let mut per_signer: BTreeMap<&str, usize> = BTreeMap::new();
        for s in &self.identity_attributes {
            let controller = self
                .controller_map
                .get(s)
                .ok_or_else(|| Error::UnmappedAttribute(s.clone()))?;
            if !self.signers.contains(controller) {
                return Err(Error::InvalidUniverse(format!(
                    "identity attribute `{s}` maps to `{controller}`, which is not a signer"
                )));
            }
            *per_signer.entry(controller).or_default() += 1;
        }
        for signer in &self.signers {
            match per_signer.get(signer.as_str()).copied().unwrap_or(0) {
                1 => {}
                n => {
                    return Err(Error::InvalidUniverse(format!(
                        "signer `{signer}` controls {n} identity attributes, expected exactly one"
                    )))
                }
            }
        }
        if let Some(extra) = self
            .controller_map
            .keys()
            .find(|k| !self.attributes.contains(*k) && !self.identity_attributes.contains(*k))
        {
            return Err(Error::InvalidUniverse(format!(
                "controller map names `{extra}`, which is in neither attribute universe"
            )));
        }
        Ok(())
    }
}

/// Public global parameters: the bilinear provider (which fixes `p`, the
/// generators, `H` and `F`), the security level, and the universes with `T`.
#[derive(Debug, Clone)]
pub struct GlobalParams<E: Bilinear> {
    provider: E,
    security_bits: u32,
    universe: Universe,
}

/// Validates the universe and publishes the global parameters.
pub fn global_setup<E: Bilinear>(security_bits: u32, universe: Universe, provider: E) -> Result<GlobalParams<E>> {
    universe.validate()?;
    Ok(GlobalParams {
        provider,
        security_bits,
        universe,
    })
}

impl<E: Bilinear> GlobalParams<E> {
    pub fn provider(&self) -> &E {
        &self.provider
    }

    pub fn security_bits(&self) -> u32 {
        self.security_bits
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// `T(attribute)`.
    pub fn controller(&self, attribute: &str) -> Option<&str> {
        self.universe.controller_map.get(attribute).map(String::as_str)
    }

    pub fn is_identity_attribute(&self, attribute: &str) -> bool {
        self.universe.identity_attributes.contains(attribute)
    }

    pub fn is_attribute(&self, attribute: &str) -> bool {
        self.universe.attributes.contains(attribute)
    }

    /// The unique identity attribute `s ∈ T⁻¹(φ)`.
    pub fn signer_attribute(&self, signer: &str) -> Result<&str> {
        if !self.universe.signers.contains(signer) {
            return Err(Error::UnknownSigner(signer.to_string()));
        }
        self.universe
            .identity_attributes
            .iter()
            .find(|s| self.controller(s) == Some(signer))
            .map(String::as_str)
            .ok_or_else(|| Error::UnknownSigner(signer.to_string()))
    }

    pub(crate) fn check_identity(&self, gid: &str) -> Result<()> {
        if gid.is_empty() || (!self.universe.identities.is_empty() && !self.universe.identities.contains(gid)) {
            return Err(Error::UnknownIdentity(gid.to_string()));
        }
        Ok(())
    }

    /// `H(GID)`.
    pub fn hash_identity(&self, gid: &str) -> E::G1 {
        self.provider.hash_to_identity_group(gid.as_bytes())
    }

    /// `F(u)`.
    pub fn hash_attribute(&self, attribute: &str) -> E::G1 {
        self.provider.hash_to_attribute_group(attribute.as_bytes())
    }

    /// Bit length of the group order; the width of the revocation mask.
    pub fn mask_bits(&self) -> u32 {
        E::Scalar::modulus().bits() as u32
    }

    /// Deterministic encoding of the parameters: provider name, group order,
    /// generators, security level and universes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let params = self.provider.params();
        let mut w = Writer::new();
        w.raw(b"MABSGP").u8(1).str(E::NAME);
        w.biguint(&params.group_order);
        w.element(&params.generator_g1)
            .element(&params.generator_g2)
            .element(&params.pairing_of_generators);
        w.u32(self.security_bits);
        let set = |w: &mut Writer, s: &BTreeSet<String>| {
            w.u32(s.len() as u32);
            for item in s {
                w.str(item);
            }
        };
        set(&mut w, &self.universe.authorities);
        set(&mut w, &self.universe.signers);
        set(&mut w, &self.universe.attributes);
        set(&mut w, &self.universe.identity_attributes);
        set(&mut w, &self.universe.identities);
        w.u32(self.universe.controller_map.len() as u32);
        for (k, v) in &self.universe.controller_map {
            w.str(k).str(v);
        }
        // bind the hash functions into the fixture
        w.element(&self.provider.hash_to_identity_group(b"MABSGP-probe"));
        w.element(&self.provider.hash_to_attribute_group(b"MABSGP-probe"));
        w.into_bytes()
    }
}

/// Shorthand for `g^x` in the pairing's source groups and target group.
pub(crate) fn gt_pow<E: Bilinear>(gp: &GlobalParams<E>, e: &E::Scalar) -> E::Gt {
    gp.provider.gt().pow(e)
}
