//! Chebyshev polynomials over `Z_N`.
//!
//! [`cheb_eval`] computes `T_n(x) mod N` with 2x2 matrix binary
//! exponentiation, so a degree of `b` bits costs `O(b)` matrix products.
//! [`cheb_eval_recursive`] is the plain three-term recurrence, kept as an
//! oracle. [`gen_modulus`] produces moduli whose neighbours `N +- 1` carry
//! large prime factors, with a [`ModulusCertificate`] that can be re-checked.

mod eval;
mod exponent;
mod field;
mod matrix;
pub mod prime;

use num_bigint::BigUint;
use thiserror::Error;

pub use eval::{
    cheb_eval, cheb_eval_by_entries, cheb_eval_raw, cheb_eval_recursive, dlog_bruteforce,
    dlog_scan, DlogScan, DLOG_MAX, RECURSIVE_MAX_DEGREE,
};
pub use exponent::{gen_exponent, Exponent};
pub use field::{FieldElement, Modulus};
pub use matrix::{mat_pow, Mat2};
pub use prime::{
    default_factor_bits, gen_modulus, gen_modulus_with_budget, is_probable_prime,
    ModulusCertificate,
};

pub(crate) use exponent::random_below;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChebError {
    #[error("modulus {0} is not an odd prime >= 3")]
    InvalidModulus(BigUint),
    #[error("value {value} is not below the modulus {modulus}")]
    OutOfRange { value: BigUint, modulus: BigUint },
    #[error("expected {expected} bytes, got {actual}")]
    EncodingWidth { expected: usize, actual: usize },
    #[error("exponent encoding has a leading zero byte")]
    NonMinimalEncoding,
    #[error("elements belong to different moduli")]
    ModulusMismatch,
    #[error("negative degree {0}")]
    NegativeDegree(i64),
    #[error("random exponents need at least 2 bits, got {0}")]
    ExponentBits(u64),
    #[error("oracle range: {0}")]
    OracleRange(String),
    #[error("unsupported modulus search: {bits} bits with {factor_bits}-bit factors")]
    ModulusParams { bits: u64, factor_bits: u64 },
    #[error("modulus search exhausted after {attempts} candidates")]
    SearchExhausted { attempts: u64 },
    #[error("invalid modulus certificate: {0}")]
    BadCertificate(String),
}
