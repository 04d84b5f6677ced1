//! Payload encapsulation: the session element `M̂` carried in `C` is run
//! through HKDF-SHA256 and the derived key seals the message with
//! ChaCha20-Poly1305.

use chacha20poly1305::aead::{AeadInPlace, KeyInit};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce, Tag};
use hkdf::Hkdf;
use sha2::Sha256;

use crate::error::{Error, Result};
use crate::wire::{Reader, Writer};

pub const KDF_HKDF_SHA256: u8 = 0x01;
pub const AEAD_CHACHA20_POLY1305: u8 = 0x01;

const KDF_INFO: &[u8] = b"MABS payload key v1";
pub(crate) const NONCE_LEN: usize = 12;
const TAG_LEN: usize = 16;

/// AEAD header, ciphertext body and tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub kdf_id: u8,
    pub aead_id: u8,
    pub nonce: [u8; NONCE_LEN],
    pub payload: Vec<u8>,
    pub tag: [u8; TAG_LEN],
}

fn derive_key(session: &[u8]) -> Key {
    let mut okm = [0u8; 32];
    Hkdf::<Sha256>::new(None, session)
        .expand(KDF_INFO, &mut okm)
        .expect("32 bytes is a valid HKDF-SHA256 output length");
    Key::from(okm)
}

impl Envelope {
    /// Seals `message` under a key derived from the session element's
    /// canonical bytes.
    pub fn seal(session: &[u8], nonce: [u8; NONCE_LEN], associated: &[u8], message: &[u8]) -> Self {
        let cipher = ChaCha20Poly1305::new(&derive_key(session));
        let mut payload = message.to_vec();
        let tag = cipher
            .encrypt_in_place_detached(Nonce::from_slice(&nonce), associated, &mut payload)
            .expect("payload within ChaCha20-Poly1305 limits");
        Envelope {
            kdf_id: KDF_HKDF_SHA256,
            aead_id: AEAD_CHACHA20_POLY1305,
            nonce,
            payload,
            tag: tag.into(),
        }
    }

    pub fn open(&self, session: &[u8], associated: &[u8]) -> Result<Vec<u8>> {
        if self.kdf_id != KDF_HKDF_SHA256 || self.aead_id != AEAD_CHACHA20_POLY1305 {
            return Err(Error::Decode(format!(
                "unsupported KDF/AEAD pair {:#04x}/{:#04x}",
                self.kdf_id, self.aead_id
            )));
        }
        let cipher = ChaCha20Poly1305::new(&derive_key(session));
        let mut plaintext = self.payload.clone();
        cipher
            .decrypt_in_place_detached(
                Nonce::from_slice(&self.nonce),
                associated,
                &mut plaintext,
                Tag::from_slice(&self.tag),
            )
            .map_err(|_| Error::AuthenticationFailed)?;
        Ok(plaintext)
    }

    /// KDF id, AEAD id, nonce, payload, tag.
    pub fn write(&self, w: &mut Writer) {
        w.u8(self.kdf_id)
            .u8(self.aead_id)
            .len_prefixed(&self.nonce)
            .len_prefixed(&self.payload)
            .len_prefixed(&self.tag);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        let kdf_id = r.u8()?;
        let aead_id = r.u8()?;
        let nonce = r
            .len_prefixed()?
            .try_into()
            .map_err(|_| Error::Decode("nonce must be 12 bytes".into()))?;
        let payload = r.len_prefixed()?.to_vec();
        let tag = r
            .len_prefixed()?
            .try_into()
            .map_err(|_| Error::Decode("tag must be 16 bytes".into()))?;
        Ok(Envelope {
            kdf_id,
            aead_id,
            nonce,
            payload,
            tag,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seal_open() {
        let env = Envelope::seal(b"session", [7; 12], b"hdr", b"firmware image");
        assert_eq!(env.open(b"session", b"hdr").unwrap(), b"firmware image");
        assert_eq!(env.open(b"other", b"hdr"), Err(Error::AuthenticationFailed));
        assert_eq!(env.open(b"session", b"HDR"), Err(Error::AuthenticationFailed));
        let mut tampered = env.clone();
        tampered.payload[0] ^= 1;
        assert_eq!(tampered.open(b"session", b"hdr"), Err(Error::AuthenticationFailed));
    }

    #[test]
    fn wire_roundtrip() {
        let env = Envelope::seal(b"k", [1; 12], b"", b"");
        let mut w = Writer::new();
        env.write(&mut w);
        let bytes = w.into_bytes();
        assert_eq!(&bytes[..2], &[KDF_HKDF_SHA256, AEAD_CHACHA20_POLY1305]);
        let mut r = Reader::new(&bytes);
        assert_eq!(Envelope::read(&mut r).unwrap(), env);
        r.finish().unwrap();
    }
}
