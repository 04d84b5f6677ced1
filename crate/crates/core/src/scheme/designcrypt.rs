use num_bigint::BigUint;

use crate::bilinear::{Bilinear, GroupElement};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::revocation::recover_group_key;

use super::ciphertext::{RevokedText, RowCiphertext, SigncryptedText};
use super::keys::{DecryptionKey, VerificationKey};
use super::GlobalParams;

/// `D_x = C1 · e(K, C2) · e(H(GID), C3) · e(C4, K')`, which equals
/// `e(g,g)^λ_x · e(H(GID), g)^w_x` for a matching key. `c2` is the
/// un-revoked `g^-t_x`.
pub fn row_factor<E: Bilinear>(
    gp: &GlobalParams<E>,
    row: &RowCiphertext<E>,
    c2: &E::G2,
    gid: &str,
    k: &E::G1,
    k_prime: &E::G2,
) -> E::Gt {
    let pairs = [
        (k.clone(), c2.clone()),
        (gp.hash_identity(gid), row.c3.clone()),
        (row.c4.clone(), k_prime.clone()),
    ];
    row.c1.mul(&gp.provider().multi_pair(&pairs))
}

/// `Π D_x^c_x`
pub fn aggregate<E: Bilinear>(factors: &[E::Gt], coefficients: &[E::Scalar]) -> E::Gt {
    factors
        .iter()
        .zip(coefficients)
        .fold(E::Gt::identity(), |acc, (d, c)| acc.mul(&d.pow(c)))
}

/// Recovers the row key `β_x` from the CRT hint with the holder's prime.
/// Returns `None` when the result cannot be a row key (zero, or not below
/// the group order), which is what a holder outside the access list gets
/// with overwhelming probability.
pub fn recover_row_key<S: Scalar>(hint: &BigUint, prime: &BigUint) -> Option<S> {
    let beta = recover_group_key(hint, prime);
    if beta == BigUint::ZERO || beta >= S::modulus() {
        return None;
    }
    Some(S::from_biguint(&beta))
}

struct HeldRow<'k, E: Bilinear> {
    index: usize,
    gid: &'k str,
    k: &'k E::G1,
    k_prime: &'k E::G2,
    /// `None`: the hint was implausible, so the row is usable only as a
    /// last resort.
    c2: Option<E::G2>,
    fallback_c2: Option<E::G2>,
}

/// Verifies the signer row and recovers the message. A holder without
/// the signer's verification key cannot satisfy the policy. `prime` is the
/// holder's registered CRT prime; without it revoked rows cannot be
/// opened.
///
/// Fails with [`Error::Unsatisfied`] when the supplied keys do not cover
/// the policy and with [`Error::AuthenticationFailed`] when they do but the
/// text does not open (revoked key, forged or tampered text).
pub fn designcrypt<E: Bilinear>(
    gp: &GlobalParams<E>,
    revoked: &RevokedText<E>,
    verification_key: Option<&VerificationKey<E>>,
    decryption_keys: &[DecryptionKey<E>],
    prime: Option<&BigUint>,
) -> Result<Vec<u8>> {
    let text: &SigncryptedText<E> = &revoked.text;
    if revoked.group_key_hints.len() != text.rows.len() {
        return Err(Error::DimensionMismatch {
            expected: text.rows.len(),
            actual: revoked.group_key_hints.len(),
        });
    }

    let mut held: Vec<HeldRow<'_, E>> = Vec::new();
    for (x, row) in text.rows.iter().enumerate() {
        let label = text.policy.label(x);
        let (gid, k, k_prime) = if gp.is_identity_attribute(label) {
            match verification_key.filter(|vk| vk.attribute == label) {
                Some(vk) => (vk.gid.as_str(), &vk.k, &vk.k_prime),
                None => continue,
            }
        } else {
            match decryption_keys.iter().find(|key| key.attribute == label) {
                Some(key) => (key.gid.as_str(), &key.k, &key.k_prime),
                None => continue,
            }
        };
        let (c2, fallback_c2) = match (&revoked.group_key_hints[x], prime) {
            (None, _) => (Some(row.c2.clone()), None),
            (Some(_), None) => (None, None),
            (Some(hint), Some(q)) => match recover_row_key::<E::Scalar>(hint, q) {
                Some(beta) => (beta.inverse().map(|b| row.c2.pow(&b)), None),
                None => {
                    let garbage = E::Scalar::from_biguint(&recover_group_key(hint, q));
                    (None, garbage.inverse().map(|b| row.c2.pow(&b)))
                }
            },
        };
        held.push(HeldRow {
            index: x,
            gid,
            k,
            k_prime,
            c2,
            fallback_c2,
        });
    }

    let all: Vec<usize> = held.iter().map(|h| h.index).collect();
    if text.policy.reconstruct_from_rows(&all).is_none() {
        return Err(Error::Unsatisfied);
    }
    let preferred: Vec<usize> = held.iter().filter(|h| h.c2.is_some()).map(|h| h.index).collect();
    let reconstruction = text
        .policy
        .reconstruct_from_rows(&preferred)
        .or_else(|| {
            let usable: Vec<usize> = held
                .iter()
                .filter(|h| h.c2.is_some() || h.fallback_c2.is_some())
                .map(|h| h.index)
                .collect();
            text.policy.reconstruct_from_rows(&usable)
        })
        .ok_or(Error::AuthenticationFailed)?;

    let mut factors = Vec::with_capacity(reconstruction.rows.len());
    for &x in &reconstruction.rows {
        let h = held.iter().find(|h| h.index == x).expect("reconstruction uses held rows");
        let c2 = h.c2.as_ref().or(h.fallback_c2.as_ref()).expect("usable row");
        factors.push(row_factor(gp, &text.rows[x], c2, h.gid, h.k, h.k_prime));
    }
    let d = aggregate::<E>(&factors, &reconstruction.coefficients);
    let session = text.c.div(&d);
    let associated = SigncryptedText::<E>::associated_data(&text.policy, &text.c);
    text.envelope.open(&session.to_bytes(), &associated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::MockProvider;
    use crate::field::Zp;
    use crate::policy::parse_policy;
    use crate::revocation::{revoke, AccessListTable, PrimeRegistry};
    use crate::scheme::{
        dec_key_gen, dec_key_gen_with, global_setup, signcrypt, signcrypt_with, ver_key_gen, AuthorityKeypair,
        SignerKey, SigncryptRandomness, Universe,
    };
    use num_traits::{One, Zero};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    type M = MockProvider<1009>;
    type F = Zp<1009>;

    struct World {
        gp: GlobalParams<M>,
        signer: SignerKey<M>,
        theta: AuthorityKeypair<M>,
        registry: PrimeRegistry,
        table: AccessListTable,
        rng: ChaCha20Rng,
    }

    fn world() -> World {
        let u = Universe::new()
            .with_authority("theta", ["theta.W", "theta.X", "theta.Y"])
            .with_signer("phi", "phi.s");
        let gp = global_setup(128, u, M::new(0).unwrap()).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let signer = SignerKey::from_secrets(&gp, "phi", F::new(5), F::new(7)).unwrap();
        let theta = AuthorityKeypair::from_secrets(&gp, "theta", F::new(2), F::new(3)).unwrap();
        let mut registry = PrimeRegistry::new(gp.mask_bits());
        for gid in ["alice", "bob"] {
            registry.assign_prime(gid, &mut rng).unwrap();
        }
        World {
            gp,
            signer,
            theta,
            registry,
            table: AccessListTable::new(),
            rng,
        }
    }

    struct Holder {
        vk: VerificationKey<M>,
        keys: Vec<DecryptionKey<M>>,
        prime: BigUint,
    }

    fn holder(w: &mut World, gid: &str, attrs: &[&str]) -> Holder {
        let keys = attrs
            .iter()
            .map(|a| {
                w.table.grant(a, gid);
                dec_key_gen(&w.gp, gid, a, &w.theta, &mut w.rng).unwrap()
            })
            .collect();
        Holder {
            vk: ver_key_gen(&w.gp, gid, &w.signer, &mut w.rng).unwrap(),
            keys,
            prime: w.registry.prime(gid).unwrap().clone(),
        }
    }

    fn open(w: &World, rt: &RevokedText<M>, h: &Holder) -> Result<Vec<u8>> {
        designcrypt(&w.gp, rt, Some(&h.vk), &h.keys, Some(&h.prime))
    }

    #[test]
    fn roundtrip_and_revocation() {
        let mut w = world();
        let alice = holder(&mut w, "alice", &["theta.W", "theta.X"]);
        let bob = holder(&mut w, "bob", &["theta.Y"]);
        let publics = [w.theta.public.clone()];
        let st = signcrypt(&w.gp, b"dlc: shed 2kW", "phi.s AND (theta.X OR theta.Y)", &w.signer, &publics, &mut w.rng)
            .unwrap();
        let rt = revoke(&w.gp, &st, &w.registry, &w.table, &mut w.rng).unwrap();
        assert_eq!(open(&w, &rt, &alice).unwrap(), b"dlc: shed 2kW");
        assert_eq!(open(&w, &rt, &bob).unwrap(), b"dlc: shed 2kW");

        w.table.remove("theta.Y", "bob");
        let rt = revoke(&w.gp, &st, &w.registry, &w.table, &mut w.rng).unwrap();
        assert_eq!(open(&w, &rt, &alice).unwrap(), b"dlc: shed 2kW");
        assert_eq!(open(&w, &rt, &bob), Err(Error::AuthenticationFailed));
    }

    #[test]
    fn missing_keys_are_unsatisfied() {
        let mut w = world();
        let alice = holder(&mut w, "alice", &["theta.W"]);
        let publics = [w.theta.public.clone()];
        let st = signcrypt(&w.gp, b"m", "phi.s AND theta.X", &w.signer, &publics, &mut w.rng).unwrap();
        let rt = revoke(&w.gp, &st, &w.registry, &w.table, &mut w.rng).unwrap();
        assert_eq!(open(&w, &rt, &alice), Err(Error::Unsatisfied));

        let st = signcrypt(&w.gp, b"m", "phi.s AND theta.W", &w.signer, &publics, &mut w.rng).unwrap();
        let rt = revoke(&w.gp, &st, &w.registry, &w.table, &mut w.rng).unwrap();
        assert_eq!(
            designcrypt(&w.gp, &rt, None, &alice.keys, Some(&alice.prime)),
            Err(Error::Unsatisfied)
        );
        assert_eq!(
            designcrypt(&w.gp, &rt, Some(&alice.vk), &alice.keys, None),
            Err(Error::AuthenticationFailed)
        );
    }

    /// Replays each pairing term: with key randomness `t` and row blinding
    /// `t_x`, the six cross terms cancel and `log D_x = λ_x + h·w_x`.
    #[test]
    fn row_factor_exponents() {
        let w = world();
        let formula = parse_policy("phi.s AND theta.W").unwrap();
        let randomness = SigncryptRandomness {
            secret: F::new(65),
            secret_mask: vec![F::new(3)],
            zero_mask: vec![F::new(9)],
            row_blinding: vec![F::new(3), F::new(4)],
            session: F::new(100),
            nonce: [0; 12],
        };
        let st = signcrypt_with(&w.gp, b"m", &formula, &w.signer, &[w.theta.public.clone()], &randomness).unwrap();
        let dk = dec_key_gen_with(&w.gp, "alice", "theta.W", &w.theta, F::new(6)).unwrap();
        let h = w.gp.hash_identity("alice").log();
        let (lambda, omega) = (F::from_i64(-3), F::from_i64(-9));

        let (alpha, y, t, tx) = (F::new(2), F::new(3), F::new(6), F::new(4));
        let f = w.gp.hash_attribute("theta.W").log();
        let k = alpha + h * y + f * t;
        let terms = (lambda + alpha * tx) + k * (-tx) + h * (y * tx + omega) + (f * tx) * t;
        assert_eq!(terms, lambda + h * omega);

        let row = &st.rows[1];
        let d = row_factor(&w.gp, row, &row.c2, "alice", &dk.k, &dk.k_prime);
        assert_eq!(d.log(), lambda + h * omega);

        let factors = [MockElement::el(7), MockElement::el(11)];
        let agg = aggregate::<M>(&factors, &[F::one(), F::from_i64(-1)]);
        assert_eq!(agg.log(), F::new(7) - F::new(11));
        assert!(aggregate::<M>(&[], &[]).log().is_zero());
    }

    #[test]
    fn row_key_plausibility() {
        let q = BigUint::from(23u8);
        assert_eq!(recover_row_key::<Zp<11>>(&BigUint::from(18u8), &q), Some(Zp::new(5)));
        // 23 XOR 23 = 0
        assert_eq!(recover_row_key::<Zp<11>>(&BigUint::from(0u8), &q), None);
        // (16 mod 23) XOR 23 = 7, fine for p = 11; 1 XOR 23 = 22 is not below 11
        assert_eq!(recover_row_key::<Zp<11>>(&BigUint::from(16u8), &q), Some(Zp::new(7)));
        assert_eq!(recover_row_key::<Zp<11>>(&BigUint::from(1u8), &q), None);
    }

    use crate::bilinear::MockElement;
}
