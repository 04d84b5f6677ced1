use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Solves `B ≡ b_i (mod q_i)` for pairwise coprime `q_i`, returning the
/// unique `0 ≤ B < Π q_i`. An empty system yields 0.
pub fn crt_solve(residues: &[(BigUint, BigUint)]) -> Result<BigUint> {
    if residues.iter().any(|(b, q)| q == &BigUint::ZERO || b >= q) {
        return Err(Error::ResidueOutOfRange);
    }
    let modulus: BigUint = residues.iter().map(|(_, q)| q).product();
    let mut acc = BigUint::ZERO;
    for (b, q) in residues {
        let cofactor = &modulus / q;
        let y = if q == &BigUint::from(1u8) {
            BigUint::ZERO
        } else {
            (&cofactor % q).modinv(q).ok_or(Error::NonCoprimeModuli)?
        };
        acc += b * &cofactor * y;
    }
    let solution = acc % &modulus;
    // modinv alone misses a repeated modulus paired with equal residues.
    if residues.iter().any(|(b, q)| &(&solution % q) != b) {
        return Err(Error::NonCoprimeModuli);
    }
    Ok(solution)
}

/// `(B mod q) XOR q`
pub fn recover_group_key(hint: &BigUint, prime: &BigUint) -> BigUint {
    (hint % prime) ^ prime
}
