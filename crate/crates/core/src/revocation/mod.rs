//! Group-key re-encryption of `C2` and CRT distribution of the row keys.

mod crt;
mod registry;

pub use crt::{crt_solve, recover_group_key};
pub use registry::{AccessListTable, PrimeRegistry, DEFAULT_PRIME_MARGIN};

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;

use crate::bilinear::{Bilinear, GroupElement};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::scheme::{GlobalParams, RevokedText, SigncryptedText};

/// Re-encrypts every attribute row under a fresh row key `β_x` and attaches
/// `B_x` for the current members of that attribute's access list.
pub fn revoke<E: Bilinear, R: RngCore + ?Sized>(
    gp: &GlobalParams<E>,
    text: &SigncryptedText<E>,
    registry: &PrimeRegistry,
    table: &AccessListTable,
    rng: &mut R,
) -> Result<RevokedText<E>> {
    let betas = (0..text.rows.len())
        .map(|x| {
            if gp.is_identity_attribute(text.policy.label(x)) {
                Ok(None)
            } else {
                E::Scalar::random_nonzero(rng).map(Some)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    revoke_with(gp, text, registry, table, &betas)
}

/// [`revoke`] with caller-chosen row keys; `None` for the signer row.
pub fn revoke_with<E: Bilinear>(
    gp: &GlobalParams<E>,
    text: &SigncryptedText<E>,
    registry: &PrimeRegistry,
    table: &AccessListTable,
    betas: &[Option<E::Scalar>],
) -> Result<RevokedText<E>> {
    if betas.len() != text.rows.len() {
        return Err(Error::DimensionMismatch {
            expected: text.rows.len(),
            actual: betas.len(),
        });
    }
    if registry.mask_bits() < gp.mask_bits() {
        return Err(Error::MaskWidth {
            expected: gp.mask_bits(),
            actual: registry.mask_bits(),
        });
    }
    let mut out = text.clone();
    let mut hints = Vec::with_capacity(betas.len());
    for (x, beta) in betas.iter().enumerate() {
        let label = text.policy.label(x);
        let identity_row = gp.is_identity_attribute(label);
        let beta = match (identity_row, beta) {
            (true, None) => {
                hints.push(None);
                continue;
            }
            (false, Some(beta)) if !beta.is_zero() => beta,
            (false, Some(_)) => return Err(Error::ZeroSecret),
            _ => {
                return Err(Error::PolicyShape(format!(
                    "row key for `{label}` must be given exactly for attribute rows"
                )))
            }
        };
        let beta_int = beta.to_biguint();
        let residues = table
            .members(label)
            .map(|gid| {
                let q = registry
                    .prime(gid)
                    .ok_or_else(|| Error::UnregisteredIdentity(gid.to_string()))?;
                Ok((&beta_int ^ q, q.clone()))
            })
            .collect::<Result<Vec<(BigUint, BigUint)>>>()?;
        hints.push(Some(crt_solve(&residues)?));
        out.rows[x].c2 = text.rows[x].c2.pow(beta);
    }
    Ok(RevokedText {
        text: out,
        group_key_hints: hints,
    })
}
