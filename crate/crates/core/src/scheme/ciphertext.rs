use num_bigint::BigUint;

use crate::bilinear::Bilinear;
use crate::error::{Error, Result};
use crate::policy::AccessPolicy;
use crate::wire::{Reader, Writer};

use super::envelope::Envelope;

const MAGIC: &[u8; 4] = b"MABS";
const VERSION: u8 = 1;

/// Per-row components `C1..C4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowCiphertext<E: Bilinear> {
    /// `e(g,g)^λ_x · e(g,g)^(α_ρ(x) t_x)`
    pub c1: E::Gt,
    /// `g^-t_x`, or `g^(-β_x t_x)` once revoked
    pub c2: E::G2,
    /// `g^(y_ρ(x) t_x) · g^w_x`
    pub c3: E::G2,
    /// `F(δ(x))^t_x`
    pub c4: E::G1,
}

/// Output of signcryption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigncryptedText<E: Bilinear> {
    pub policy: AccessPolicy<E::Scalar>,
    /// `M̂ · e(g,g)^z`
    pub c: E::Gt,
    pub rows: Vec<RowCiphertext<E>>,
    pub envelope: Envelope,
}

/// A signcrypted text after the revocation step: attribute rows carry a
/// re-randomized `C2` and the CRT solution `B_x`; the signer row carries
/// neither.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevokedText<E: Bilinear> {
    pub text: SigncryptedText<E>,
    pub group_key_hints: Vec<Option<BigUint>>,
}

impl<E: Bilinear> SigncryptedText<E> {
    /// Bytes authenticated by the payload AEAD: the policy block and `C`.
    pub(crate) fn associated_data(policy: &AccessPolicy<E::Scalar>, c: &E::Gt) -> Vec<u8> {
        let mut w = Writer::new();
        w.raw(MAGIC).u8(VERSION).len_prefixed(&policy.to_bytes()).element(c);
        w.into_bytes()
    }

    fn write(&self, w: &mut Writer, hints: Option<&[Option<BigUint>]>) {
        w.raw(MAGIC).u8(VERSION);
        w.len_prefixed(&self.policy.to_bytes());
        w.element(&self.c);
        w.u32(self.rows.len() as u32);
        for row in &self.rows {
            w.element(&row.c1).element(&row.c2).element(&row.c3).element(&row.c4);
        }
        match hints {
            None => {
                w.u8(0);
            }
            Some(hints) => {
                w.u8(1);
                for hint in hints {
                    match hint {
                        None => w.u8(0),
                        Some(b) => w.u8(1).biguint(b),
                    };
                }
            }
        }
        self.envelope.write(w);
    }

    fn read(bytes: &[u8]) -> Result<(Self, Option<Vec<Option<BigUint>>>)> {
        let mut r = Reader::new(bytes);
        if r.raw(4)? != MAGIC {
            return Err(Error::Decode("bad magic".into()));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::Decode(format!("unsupported version {version}")));
        }
        let policy = AccessPolicy::from_bytes(r.len_prefixed()?)?;
        let c = r.element()?;
        let count = r.u32()? as usize;
        if count != policy.rows() {
            return Err(Error::DimensionMismatch {
                expected: policy.rows(),
                actual: count,
            });
        }
        let mut rows = Vec::with_capacity(count);
        for _ in 0..count {
            rows.push(RowCiphertext {
                c1: r.element()?,
                c2: r.element()?,
                c3: r.element()?,
                c4: r.element()?,
            });
        }
        let hints = match r.u8()? {
            0 => None,
            1 => Some(
                (0..count)
                    .map(|_| match r.u8()? {
                        0 => Ok(None),
                        1 => r.biguint().map(Some),
                        f => Err(Error::Decode(format!("bad hint flag {f}"))),
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            f => return Err(Error::Decode(format!("bad revocation flag {f}"))),
        };
        let envelope = Envelope::read(&mut r)?;
        r.finish()?;
        Ok((
            SigncryptedText {
                policy,
                c,
                rows,
                envelope,
            },
            hints,
        ))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w, None);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        match Self::read(bytes)? {
            (text, None) => Ok(text),
            (_, Some(_)) => Err(Error::Decode("expected a signcrypted text, found a revoked text".into())),
        }
    }
}

impl<E: Bilinear> RevokedText<E> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.text.write(&mut w, Some(&self.group_key_hints));
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        match SigncryptedText::read(bytes)? {
            (text, Some(group_key_hints)) => Ok(RevokedText {
                text,
                group_key_hints,
            }),
            (_, None) => Err(Error::Decode("expected a revoked text, found a signcrypted text".into())),
        }
    }
}
