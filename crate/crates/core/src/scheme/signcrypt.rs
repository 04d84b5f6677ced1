use rand::RngCore;

use crate::bilinear::{Bilinear, GroupElement};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::policy::{compile_lss, parse_policy, AccessPolicy, PolicyFormula, PolicyNode};

use super::ciphertext::{RowCiphertext, SigncryptedText};
use super::envelope::{Envelope, NONCE_LEN};
use super::keys::{AuthorityPublicKey, SignerKey};
use super::{gt_pow, GlobalParams};

/// Every random value signcryption consumes. Sampling it up front lets tests
/// replay a signcryption with known exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigncryptRandomness<S> {
    /// `z`
    pub secret: S,
    /// `v_2 … v_n`
    pub secret_mask: Vec<S>,
    /// `w_2 … w_n`
    pub zero_mask: Vec<S>,
    /// `t_x`, one per row
    pub row_blinding: Vec<S>,
    /// Discrete log of the session element `M̂`.
    pub session: S,
    pub nonce: [u8; NONCE_LEN],
}

impl<S: Scalar> SigncryptRandomness<S> {
    pub fn sample<R: RngCore + ?Sized>(rows: usize, columns: usize, rng: &mut R) -> Self {
        let mut draw = |n: usize| (0..n).map(|_| S::random(rng)).collect::<Vec<_>>();
        let secret_mask = draw(columns - 1);
        let zero_mask = draw(columns - 1);
        let row_blinding = draw(rows);
        let secret = S::random(rng);
        let session = S::random(rng);
        let mut nonce = [0u8; NONCE_LEN];
        rng.fill_bytes(&mut nonce);
        SigncryptRandomness {
            secret,
            secret_mask,
            zero_mask,
            row_blinding,
            session,
            nonce,
        }
    }
}

/// Checks that the policy is "signer identity attribute AND formula over
/// attributes": exactly one leaf is an identity attribute, it is controlled
/// by `signer`, and it is an operand of the top-level AND chain. Every other
/// leaf must be a known attribute. Returns the identity attribute.
pub fn check_policy_shape<'f, E: Bilinear>(
    gp: &GlobalParams<E>,
    formula: &'f PolicyFormula,
    signer: &str,
) -> Result<&'f str> {
    let mut identity_leaves = Vec::new();
    for leaf in formula.leaves() {
        if gp.is_identity_attribute(leaf) {
            identity_leaves.push(leaf);
        } else if !gp.is_attribute(leaf) {
            return Err(Error::UnknownAttribute(leaf.to_string()));
        }
    }
    let s = match identity_leaves.as_slice() {
        [] => return Err(Error::PolicyShape("policy has no signer identity attribute".into())),
        [s] => *s,
        _ => {
            return Err(Error::PolicyShape(
                "policy names more than one signer identity attribute".into(),
            ))
        }
    };
    let conjuncts = formula.root.conjuncts();
    if conjuncts.len() < 2 || !conjuncts.iter().any(|n| matches!(n, PolicyNode::Leaf(a) if a == s)) {
        return Err(Error::PolicyShape(format!(
            "`{s}` must be AND-ed with the attribute formula at the top level"
        )));
    }
    let controller = gp.controller(s).unwrap_or_default();
    if controller != signer {
        return Err(Error::ControllerMismatch {
            attribute: s.to_string(),
            expected: controller.to_string(),
            actual: signer.to_string(),
        });
    }
    Ok(s)
}

/// Signcrypts `message` under `policy_text` with fresh randomness.
pub fn signcrypt<E: Bilinear, R: RngCore + ?Sized>(
    gp: &GlobalParams<E>,
    message: &[u8],
    policy_text: &str,
    signer: &SignerKey<E>,
    authorities: &[AuthorityPublicKey<E>],
    rng: &mut R,
) -> Result<SigncryptedText<E>> {
    let formula = parse_policy(policy_text)?;
    check_policy_shape(gp, &formula, &signer.signer)?;
    let policy: AccessPolicy<E::Scalar> = compile_lss(&formula);
    let randomness = SigncryptRandomness::sample(policy.rows(), policy.columns(), rng);
    signcrypt_with(gp, message, &formula, signer, authorities, &randomness)
}

/// Signcryption with caller-supplied randomness.
pub fn signcrypt_with<E: Bilinear>(
    gp: &GlobalParams<E>,
    message: &[u8],
    formula: &PolicyFormula,
    signer: &SignerKey<E>,
    authorities: &[AuthorityPublicKey<E>],
    randomness: &SigncryptRandomness<E::Scalar>,
) -> Result<SigncryptedText<E>> {
    check_policy_shape(gp, formula, &signer.signer)?;
    let policy: AccessPolicy<E::Scalar> = compile_lss(formula);
    if randomness.row_blinding.len() != policy.rows() {
        return Err(Error::DimensionMismatch {
            expected: policy.rows(),
            actual: randomness.row_blinding.len(),
        });
    }
    let lambda = policy.share_secret(randomness.secret, &randomness.secret_mask)?;
    let omega = policy.share_zero(&randomness.zero_mask)?;

    let provider = gp.provider();
    let g2 = provider.g2();
    // The signer row uses (e(g,g)^α_φ, g^y_φ), computable only from SK_φ.
    let signer_public = (gt_pow(gp, &signer.alpha), g2.pow(&signer.y));

    let mut rows = Vec::with_capacity(policy.rows());
    for x in 0..policy.rows() {
        let attribute = policy.label(x);
        let (e_gg_alpha, g_y) = if gp.is_identity_attribute(attribute) {
            (&signer_public.0, &signer_public.1)
        } else {
            let controller = gp
                .controller(attribute)
                .ok_or_else(|| Error::UnmappedAttribute(attribute.to_string()))?;
            let pk = authorities
                .iter()
                .find(|pk| pk.authority == controller)
                .ok_or_else(|| Error::MissingAuthorityKey(controller.to_string()))?;
            (&pk.e_gg_alpha, &pk.g_y)
        };
        let t = &randomness.row_blinding[x];
        rows.push(RowCiphertext {
            c1: gt_pow(gp, &lambda.0[x]).mul(&e_gg_alpha.pow(t)),
            c2: g2.pow(&-*t),
            c3: g_y.pow(t).mul(&g2.pow(&omega.0[x])),
            c4: gp.hash_attribute(attribute).pow(t),
        });
    }

    let session = gt_pow(gp, &randomness.session);
    let c = session.mul(&gt_pow(gp, &randomness.secret));
    let associated = SigncryptedText::<E>::associated_data(&policy, &c);
    let envelope = Envelope::seal(&session.to_bytes(), randomness.nonce, &associated, message);
    Ok(SigncryptedText {
        policy,
        c,
        rows,
        envelope,
    })
}
