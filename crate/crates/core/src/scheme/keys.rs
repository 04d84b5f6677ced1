use num_traits::Zero;
use rand::RngCore;

use crate::bilinear::{Bilinear, GroupElement};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::wire::{Reader, Writer};

use super::{gt_pow, GlobalParams};

/// `PK_θ = { e(g,g)^α_θ, g^y_θ }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorityPublicKey<E: Bilinear> {
    pub authority: String,
    pub e_gg_alpha: E::Gt,
    pub g_y: E::G2,
}

/// An attribute authority's key pair. The secret half is `(α_θ, y_θ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorityKeypair<E: Bilinear> {
    pub public: AuthorityPublicKey<E>,
    pub alpha: E::Scalar,
    pub y: E::Scalar,
}

/// A signer's private exponents `(α_φ, y_φ)`. There is no public half.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignerKey<E: Bilinear> {
    pub signer: String,
    pub alpha: E::Scalar,
    pub y: E::Scalar,
}

/// `K = g^α_θ · H(GID)^y_θ · F(u)^t`, `K' = g^t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecryptionKey<E: Bilinear> {
    pub gid: String,
    pub attribute: String,
    pub k: E::G1,
    pub k_prime: E::G2,
}

/// `K = g^α_φ · H(GID)^y_φ · F(s)^r`, `K' = g^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationKey<E: Bilinear> {
    pub gid: String,
    pub signer: String,
    pub attribute: String,
    pub k: E::G1,
    pub k_prime: E::G2,
}

impl<E: Bilinear> AuthorityKeypair<E> {
    /// Builds the key pair for fixed secret exponents.
    pub fn from_secrets(gp: &GlobalParams<E>, authority: &str, alpha: E::Scalar, y: E::Scalar) -> Result<Self> {
        if !gp.universe().authorities.contains(authority) {
            return Err(Error::UnknownAuthority(authority.to_string()));
        }
        Ok(AuthorityKeypair {
            public: AuthorityPublicKey {
                authority: authority.to_string(),
                e_gg_alpha: gt_pow(gp, &alpha),
                g_y: gp.provider().g2().pow(&y),
            },
            alpha,
            y,
        })
    }

    pub fn authority(&self) -> &str {
        &self.public.authority
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.public.write(&mut w);
        w.scalar(&self.alpha).scalar(&self.y);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let public = AuthorityPublicKey::read(&mut r)?;
        let alpha = r.scalar()?;
        let y = r.scalar()?;
        r.finish()?;
        Ok(AuthorityKeypair { public, alpha, y })
    }
}

impl<E: Bilinear> AuthorityPublicKey<E> {
    fn write(&self, w: &mut Writer) {
        w.str(&self.authority).element(&self.e_gg_alpha).element(&self.g_y);
    }

    fn read(r: &mut Reader<'_>) -> Result<Self> {
        Ok(AuthorityPublicKey {
            authority: r.str()?,
            e_gg_alpha: r.element()?,
            g_y: r.element()?,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let key = Self::read(&mut r)?;
        r.finish()?;
        Ok(key)
    }
}

/// Fresh `(α_θ, y_θ)` for authority `θ`.
pub fn authority_setup<E: Bilinear, R: RngCore + ?Sized>(
    gp: &GlobalParams<E>,
    authority: &str,
    rng: &mut R,
) -> Result<AuthorityKeypair<E>> {
    let alpha = E::Scalar::random(rng);
    let y = E::Scalar::random(rng);
    AuthorityKeypair::from_secrets(gp, authority, alpha, y)
}

impl<E: Bilinear> SignerKey<E> {
    /// Wraps fixed exponents; both must be nonzero.
    pub fn from_secrets(gp: &GlobalParams<E>, signer: &str, alpha: E::Scalar, y: E::Scalar) -> Result<Self> {
        gp.signer_attribute(signer)?;
        if alpha.is_zero() || y.is_zero() {
            return Err(Error::ZeroSecret);
        }
        Ok(SignerKey {
            signer: signer.to_string(),
            alpha,
            y,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.str(&self.signer).scalar(&self.alpha).scalar(&self.y);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let key = SignerKey {
            signer: r.str()?,
            alpha: r.scalar()?,
            y: r.scalar()?,
        };
        r.finish()?;
        Ok(key)
    }
}

/// Fresh nonzero `(α_φ, y_φ)` for signer `φ`.
pub fn sign_key_gen<E: Bilinear, R: RngCore + ?Sized>(
    gp: &GlobalParams<E>,
    signer: &str,
    rng: &mut R,
) -> Result<SignerKey<E>> {
    gp.signer_attribute(signer)?;
    let alpha = E::Scalar::random_nonzero(rng)?;
    let y = E::Scalar::random_nonzero(rng)?;
    SignerKey::from_secrets(gp, signer, alpha, y)
}

/// `g^α · H(GID)^y · F(u)^t` and `g^t`.
fn user_key_components<E: Bilinear>(
    gp: &GlobalParams<E>,
    gid: &str,
    attribute: &str,
    alpha: &E::Scalar,
    y: &E::Scalar,
    t: &E::Scalar,
) -> (E::G1, E::G2) {
    let p = gp.provider();
    let k = p
        .g1()
        .pow(alpha)
        .mul(&gp.hash_identity(gid).pow(y))
        .mul(&gp.hash_attribute(attribute).pow(t));
    (k, p.g2().pow(t))
}

/// Decryption key for `(gid, attribute)` with fixed randomness `t`.
pub fn dec_key_gen_with<E: Bilinear>(
    gp: &GlobalParams<E>,
    gid: &str,
    attribute: &str,
    authority: &AuthorityKeypair<E>,
    t: E::Scalar,
) -> Result<DecryptionKey<E>> {
    gp.check_identity(gid)?;
    if !gp.is_attribute(attribute) {
        return Err(Error::UnknownAttribute(attribute.to_string()));
    }
    let expected = gp.controller(attribute).unwrap_or_default();
    if expected != authority.authority() {
        return Err(Error::ControllerMismatch {
            attribute: attribute.to_string(),
            expected: expected.to_string(),
            actual: authority.authority().to_string(),
        });
    }
    let (k, k_prime) = user_key_components(gp, gid, attribute, &authority.alpha, &authority.y, &t);
    Ok(DecryptionKey {
        gid: gid.to_string(),
        attribute: attribute.to_string(),
        k,
        k_prime,
    })
}

pub fn dec_key_gen<E: Bilinear, R: RngCore + ?Sized>(
    gp: &GlobalParams<E>,
    gid: &str,
    attribute: &str,
    authority: &AuthorityKeypair<E>,
    rng: &mut R,
) -> Result<DecryptionKey<E>> {
    dec_key_gen_with(gp, gid, attribute, authority, E::Scalar::random(rng))
}

/// Verification key for `gid` under the signer's identity attribute, with
/// fixed randomness `r`.
pub fn ver_key_gen_with<E: Bilinear>(
    gp: &GlobalParams<E>,
    gid: &str,
    signer: &SignerKey<E>,
    r: E::Scalar,
) -> Result<VerificationKey<E>> {
    gp.check_identity(gid)?;
    let attribute = gp.signer_attribute(&signer.signer)?.to_string();
    let (k, k_prime) = user_key_components(gp, gid, &attribute, &signer.alpha, &signer.y, &r);
    Ok(VerificationKey {
        gid: gid.to_string(),
        signer: signer.signer.clone(),
        attribute,
        k,
        k_prime,
    })
}

pub fn ver_key_gen<E: Bilinear, R: RngCore + ?Sized>(
    gp: &GlobalParams<E>,
    gid: &str,
    signer: &SignerKey<E>,
    rng: &mut R,
) -> Result<VerificationKey<E>> {
    ver_key_gen_with(gp, gid, signer, E::Scalar::random(rng))
}

impl<E: Bilinear> DecryptionKey<E> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.str(&self.gid).str(&self.attribute).element(&self.k).element(&self.k_prime);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let key = DecryptionKey {
            gid: r.str()?,
            attribute: r.str()?,
            k: r.element()?,
            k_prime: r.element()?,
        };
        r.finish()?;
        Ok(key)
    }
}

impl<E: Bilinear> VerificationKey<E> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.str(&self.gid)
            .str(&self.signer)
            .str(&self.attribute)
            .element(&self.k)
            .element(&self.k_prime);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let key = VerificationKey {
            gid: r.str()?,
            signer: r.str()?,
            attribute: r.str()?,
            k: r.element()?,
            k_prime: r.element()?,
        };
        r.finish()?;
        Ok(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::MockProvider;
    use crate::field::Zp;
    use crate::scheme::{global_setup, Universe};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    type M = MockProvider<1009>;
    type F = Zp<1009>;

    fn gp() -> GlobalParams<M> {
        let u = Universe::new()
            .with_authority("theta", ["theta.W", "theta.X"])
            .with_authority("other", ["other.Y"])
            .with_signer("phi", "phi.s");
        global_setup(128, u, M::new(0).unwrap()).unwrap()
    }

    #[test]
    fn authority_public_matches_secrets() {
        let gp = gp();
        let kp = AuthorityKeypair::from_secrets(&gp, "theta", F::new(2), F::new(3)).unwrap();
        assert_eq!(kp.public.e_gg_alpha.log().value(), 2);
        assert_eq!(kp.public.g_y.log().value(), 3);
        assert_eq!(
            AuthorityKeypair::from_secrets(&gp, "nobody", F::new(2), F::new(3)),
            Err(Error::UnknownAuthority("nobody".into()))
        );
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let a = authority_setup(&gp, "theta", &mut rng).unwrap();
        let b = authority_setup(&gp, "theta", &mut rng).unwrap();
        assert_ne!((a.alpha, a.y), (b.alpha, b.y));
        assert_eq!(AuthorityKeypair::<M>::from_bytes(&a.to_bytes()).unwrap(), a);
    }

    #[test]
    fn signer_keys() {
        let gp = gp();
        let sk = SignerKey::from_secrets(&gp, "phi", F::new(5), F::new(7)).unwrap();
        assert_eq!((sk.alpha.value(), sk.y.value()), (5, 7));
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert_eq!(
            sign_key_gen(&gp, "theta", &mut rng),
            Err(Error::UnknownSigner("theta".into()))
        );
        let k = sign_key_gen(&gp, "phi", &mut rng).unwrap();
        assert!(!k.alpha.is_zero() && !k.y.is_zero());
        assert_eq!(SignerKey::<M>::from_bytes(&k.to_bytes()).unwrap(), k);
    }

    #[test]
    fn decryption_key_exponents() {
        let gp = gp();
        let kp = AuthorityKeypair::from_secrets(&gp, "theta", F::new(2), F::new(3)).unwrap();
        let h = gp.hash_identity("GID_1").log();
        let f = gp.hash_attribute("theta.W").log();
        let t = F::new(4);
        let dk = dec_key_gen_with(&gp, "GID_1", "theta.W", &kp, t).unwrap();
        assert_eq!(dk.k.log(), F::new(2) + h * F::new(3) + f * t);
        assert_eq!(dk.k_prime.log(), t);

        let zero_t = dec_key_gen_with(&gp, "GID_1", "theta.W", &kp, F::new(0)).unwrap();
        assert_eq!(zero_t.k.log(), F::new(2) + h * F::new(3));

        assert!(matches!(
            dec_key_gen_with(&gp, "GID_1", "other.Y", &kp, t),
            Err(Error::ControllerMismatch { .. })
        ));
        assert_eq!(DecryptionKey::<M>::from_bytes(&dk.to_bytes()).unwrap(), dk);
    }

    /// With forced H and F exponents (11 and 13) the key exponent is
    /// 2 + 11*3 + 13*4 = 87.
    #[test]
    fn decryption_key_hand_example() {
        let (alpha, y, h, f, t) = (2u64, 3u64, 11u64, 13u64, 4u64);
        assert_eq!((alpha + h * y + f * t) % 1009, 87);
        let g1 = crate::bilinear::MockElement::<1009, crate::bilinear::Source1>::el;
        let k = g1(1)
            .pow(&F::new(alpha))
            .mul(&g1(h).pow(&F::new(y)))
            .mul(&g1(f).pow(&F::new(t)));
        assert_eq!(k.log().value(), 87);
    }

    #[test]
    fn verification_key_exponents() {
        let gp = gp();
        let sk = SignerKey::from_secrets(&gp, "phi", F::new(5), F::new(7)).unwrap();
        let r = F::new(9);
        let vk = ver_key_gen_with(&gp, "GID_1", &sk, r).unwrap();
        let h = gp.hash_identity("GID_1").log();
        let f = gp.hash_attribute("phi.s").log();
        assert_eq!(vk.attribute, "phi.s");
        assert_eq!(vk.k.log(), F::new(5) + h * F::new(7) + f * r);
        assert_eq!(vk.k_prime.log(), r);
        assert_eq!(VerificationKey::<M>::from_bytes(&vk.to_bytes()).unwrap(), vk);
    }

    #[test]
    fn closed_identity_universe() {
        let u = Universe::new()
            .with_authority("theta", ["theta.W"])
            .with_signer("phi", "phi.s")
            .with_identities(["m1"]);
        let gp = global_setup(128, u, M::new(0).unwrap()).unwrap();
        let kp = AuthorityKeypair::from_secrets(&gp, "theta", F::new(2), F::new(3)).unwrap();
        assert!(dec_key_gen_with(&gp, "m1", "theta.W", &kp, F::new(1)).is_ok());
        assert_eq!(
            dec_key_gen_with(&gp, "m2", "theta.W", &kp, F::new(1)),
            Err(Error::UnknownIdentity("m2".into()))
        );
    }
}
