//! Byte-level encoding helpers.
//!
//! Every multi-byte integer is big-endian and every variable-length field is
//! prefixed with its 4-byte length. Group elements travel as a 1-byte role
//! tag, a 4-byte length and the provider's canonical bytes.

use num_bigint::BigUint;

use crate::bilinear::GroupElement;
use crate::error::{Error, Result};
use crate::field::Scalar;

#[derive(Debug, Default, Clone)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn raw(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(bytes);
        self
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.raw(&v.to_be_bytes())
    }

    pub fn len_prefixed(&mut self, bytes: &[u8]) -> &mut Self {
        let len = u32::try_from(bytes.len()).expect("field longer than 4 GiB");
        self.u32(len).raw(bytes)
    }

    pub fn str(&mut self, s: &str) -> &mut Self {
        self.len_prefixed(s.as_bytes())
    }

    pub fn biguint(&mut self, v: &BigUint) -> &mut Self {
        if v == &BigUint::default() {
            self.len_prefixed(&[])
        } else {
            self.len_prefixed(&v.to_bytes_be())
        }
    }

    pub fn scalar<S: Scalar>(&mut self, s: &S) -> &mut Self {
        self.raw(&s.to_bytes())
    }

    pub fn element<G: GroupElement>(&mut self, el: &G) -> &mut Self {
        self.u8(G::ROLE.tag()).len_prefixed(&el.to_bytes())
    }
}

#[derive(Debug, Clone)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.pos == self.buf.len()
    }

    pub fn finish(&self) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::Decode(format!(
                "{} trailing bytes",
                self.buf.len() - self.pos
            )))
        }
    }

    pub fn raw(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Decode(format!("truncated input at byte {}", self.pos)))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.raw(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        let b = self.raw(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn len_prefixed(&mut self) -> Result<&'a [u8]> {
        let n = self.u32()? as usize;
        self.raw(n)
    }

    pub fn str(&mut self) -> Result<String> {
        let bytes = self.len_prefixed()?;
        String::from_utf8(bytes.to_vec()).map_err(|_| Error::Decode("invalid UTF-8".into()))
    }

    pub fn biguint(&mut self) -> Result<BigUint> {
        Ok(BigUint::from_bytes_be(self.len_prefixed()?))
    }

    pub fn scalar<S: Scalar>(&mut self) -> Result<S> {
        S::from_bytes(self.raw(S::byte_len())?)
    }

    pub fn element<G: GroupElement>(&mut self) -> Result<G> {
        let tag = self.u8()?;
        if tag != G::ROLE.tag() {
            return Err(Error::Decode(format!(
                "expected role tag {:#04x}, found {tag:#04x}",
                G::ROLE.tag()
            )));
        }
        G::from_bytes(self.len_prefixed()?)
    }
}

/// Encodes a single element in the tagged wire format.
pub fn encode_element<G: GroupElement>(el: &G) -> Vec<u8> {
    let mut w = Writer::new();
    w.element(el);
    w.into_bytes()
}

pub fn decode_element<G: GroupElement>(bytes: &[u8]) -> Result<G> {
    let mut r = Reader::new(bytes);
    let el = r.element()?;
    r.finish()?;
    Ok(el)
}
