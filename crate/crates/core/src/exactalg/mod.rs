//! Exact dense linear algebra over prime fields and the rationals.
//!
//! Three matrix families live here:
//!
//! * [`Gf2Matrix`]: bit-packed rows over GF(2), word-parallel elimination
//!   with a Four-Russians style table for batched row updates.
//! * [`PrimeFieldMatrix`]: residues modulo an arbitrary prime `p < 2^32`.
//!   When `p = 2` the storage is a [`Gf2Matrix`]; otherwise it is a dense
//!   row-major `u32` buffer with schoolbook elimination.
//! * [`IntMatrix`] / [`RationalMatrix`]: arbitrary-precision entries. Rank
//!   over the reals is computed over the rationals, which is exact for
//!   every integer or rational input.
//!
//! Nothing in this module uses floating point.

mod fp;
mod gf2;
mod int;
mod rational;
pub mod text;

pub use fp::PrimeFieldMatrix;
pub use gf2::Gf2Matrix;
pub use int::IntMatrix;
pub use rational::{membership, parse_rational, RationalMatrix};
pub use text::{
    matrix_digest, prime_matrix_digest, read_matrix, write_matrix, write_matrix_to, write_prime_to, AnyMatrix,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is outside the supported range [2, 2^32)")]
    ModulusOutOfRange(u64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(u32, u32),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Deterministic primality test for 64-bit inputs below 2^32 and beyond.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    // Miller-Rabin with the first 12 primes is deterministic for all u64.
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Validates a modulus for [`PrimeFieldMatrix`].
pub fn check_prime(p: u64) -> Result<u32, MatrixError> {
    if !(2..(1u64 << 32)).contains(&p) {
        return Err(MatrixError::ModulusOutOfRange(p));
    }
    if !is_prime(p) {
        return Err(MatrixError::NotPrime(p));
    }
    Ok(p as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_trial_division() {
        let trial = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
        assert!(is_prime(4_294_967_291));
        assert!(!is_prime(4_294_967_295));
    }

    #[test]
    fn composite_modulus_rejected() {
        assert_eq!(check_prime(4), Err(MatrixError::NotPrime(4)));
        assert_eq!(check_prime(1), Err(MatrixError::ModulusOutOfRange(1)));
        assert_eq!(check_prime(1 << 32), Err(MatrixError::ModulusOutOfRange(1 << 32)));
        assert_eq!(check_prime(5), Ok(5));
    }
}
