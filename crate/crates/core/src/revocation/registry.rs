use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigUint, RandBigInt};
use num_prime::nt_funcs::is_prime;
use rand::RngCore;

use crate::error::{Error, Result};

/// Extra bits above the mask width for production primes. Any `q_i`
/// exceeds the group order by a factor of about 2^64, so a non-member's
/// recovered value lands outside `Z_p` except with probability ~2^-64.
pub const DEFAULT_PRIME_MARGIN: u32 = 64;

const MAX_PRIME_ATTEMPTS: usize = 1 << 16;

/// Per-identity CRT primes. Every prime has its low `mask_bits` bits set,
/// which makes `β XOR q = q - β` for any `β < 2^mask_bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeRegistry {
    mask_bits: u32,
    prime_bits: u32,
    primes: BTreeMap<String, BigUint>,
}

impl PrimeRegistry {
    /// Registry for a group order of `mask_bits` bits, with primes
    /// `mask_bits + DEFAULT_PRIME_MARGIN` bits long.
    pub fn new(mask_bits: u32) -> Self {
        Self::with_prime_bits(mask_bits, mask_bits + DEFAULT_PRIME_MARGIN)
    }

    /// # Panics
    /// If `prime_bits < mask_bits + 2`.
    pub fn with_prime_bits(mask_bits: u32, prime_bits: u32) -> Self {
        assert!(prime_bits >= mask_bits + 2, "primes need at least two bits above the mask");
        PrimeRegistry {
            mask_bits,
            prime_bits,
            primes: BTreeMap::new(),
        }
    }

    pub fn mask_bits(&self) -> u32 {
        self.mask_bits
    }

    pub fn prime_bits(&self) -> u32 {
        self.prime_bits
    }

    pub fn prime(&self, gid: &str) -> Option<&BigUint> {
        self.primes.get(gid)
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BigUint)> {
        self.primes.iter().map(|(g, q)| (g.as_str(), q))
    }

    fn has_mask_shape(&self, q: &BigUint) -> bool {
        (0..self.mask_bits as u64).all(|i| q.bit(i))
    }

    /// Draws a fresh prime for `gid` and records it. Fails with
    /// [`Error::RandomnessExhausted`] if the prime space looks used up.
    pub fn assign_prime<R: RngCore + ?Sized>(&mut self, gid: &str, rng: &mut R) -> Result<BigUint> {
        if self.primes.contains_key(gid) {
            return Err(Error::AlreadyAssigned(gid.to_string()));
        }
        let free_bits = (self.prime_bits - self.mask_bits - 1) as u64;
        let top = BigUint::from(1u8) << (self.prime_bits - 1);
        let mask = (BigUint::from(1u8) << self.mask_bits) - 1u8;
        for _ in 0..MAX_PRIME_ATTEMPTS {
            let middle = rng.gen_biguint(free_bits) << self.mask_bits;
            let candidate = &top | middle | &mask;
            if is_prime(&candidate, None).probably() && !self.primes.values().any(|q| q == &candidate) {
                self.primes.insert(gid.to_string(), candidate.clone());
                return Ok(candidate);
            }
        }
        Err(Error::RandomnessExhausted)
    }

    /// Records an externally assigned prime after checking its shape.
    pub fn insert(&mut self, gid: &str, prime: BigUint) -> Result<()> {
        if self.primes.contains_key(gid) {
            return Err(Error::AlreadyAssigned(gid.to_string()));
        }
        if prime.bits() < self.mask_bits as u64 + 2 || !self.has_mask_shape(&prime) {
            return Err(Error::Decode(format!("prime for `{gid}` lacks the mask shape")));
        }
        if self.primes.values().any(|q| q == &prime) {
            return Err(Error::NonCoprimeModuli);
        }
        self.primes.insert(gid.to_string(), prime);
        Ok(())
    }

    /// `{gid: hex}`
    pub fn to_json(&self) -> String {
        let map: BTreeMap<&str, String> = self.primes.iter().map(|(g, q)| (g.as_str(), q.to_str_radix(16))).collect();
        serde_json::to_string_pretty(&map).expect("string map serializes")
    }

    pub fn from_json(json: &str, mask_bits: u32, prime_bits: u32) -> Result<Self> {
        let map: BTreeMap<String, String> = serde_json::from_str(json).map_err(|e| Error::Decode(e.to_string()))?;
        let mut registry = Self::with_prime_bits(mask_bits, prime_bits);
        for (gid, hex) in map {
            let q = BigUint::parse_bytes(hex.as_bytes(), 16)
                .ok_or_else(|| Error::Decode(format!("bad hex prime for `{gid}`")))?;
            registry.insert(&gid, q)?;
        }
        Ok(registry)
    }
}

/// Attribute → member identities (`G_x`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AccessListTable {
    lists: BTreeMap<String, BTreeSet<String>>,
}

impl AccessListTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if `gid` was already listed.
    pub fn grant(&mut self, attribute: &str, gid: &str) -> bool {
        self.lists.entry(attribute.to_string()).or_default().insert(gid.to_string())
    }

    /// Returns false if `gid` was not listed. The (possibly empty) list is
    /// kept.
    pub fn remove(&mut self, attribute: &str, gid: &str) -> bool {
        self.lists.get_mut(attribute).is_some_and(|l| l.remove(gid))
    }

    pub fn members(&self, attribute: &str) -> impl Iterator<Item = &str> {
        self.lists.get(attribute).into_iter().flatten().map(String::as_str)
    }

    pub fn contains(&self, attribute: &str, gid: &str) -> bool {
        self.lists.get(attribute).is_some_and(|l| l.contains(gid))
    }

    /// Attributes currently listing `gid`.
    pub fn attributes_of<'a>(&'a self, gid: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.lists.iter().filter(move |(_, l)| l.contains(gid)).map(|(a, _)| a.as_str())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.lists).expect("string map serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let lists = serde_json::from_str(json).map_err(|e| Error::Decode(e.to_string()))?;
        Ok(AccessListTable { lists })
    }
}
