use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;

use super::ChebError;

/// A Chebyshev degree: an unbounded non-negative integer.
///
/// Products of degrees are never reduced; `T_u(T_v(x)) = T_{uv}(x)` holds for the
/// plain integer product.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Exponent(BigUint);

impl Exponent {
    pub fn new(value: BigUint) -> Self {
        Exponent(value)
    }

    pub fn zero() -> Self {
        Exponent(BigUint::zero())
    }

    pub fn one() -> Self {
        Exponent(BigUint::one())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn bits(&self) -> u64 {
        self.0.bits()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Degrees 0 and 1 give `T_0 = 1` and `T_1 = x`, which leak nothing and are
    /// refused wherever a degree should hide a secret.
    pub fn is_degenerate(&self) -> bool {
        self.0 <= BigUint::one()
    }

    pub fn from_bytes_be(bytes: &[u8]) -> Self {
        Exponent(BigUint::from_bytes_be(bytes))
    }

    /// Minimal big-endian bytes; zero encodes as the empty string.
    pub fn to_bytes_be(&self) -> Vec<u8> {
        if self.0.is_zero() {
            Vec::new()
        } else {
            self.0.to_bytes_be()
        }
    }

    /// Minimal big-endian bytes behind a 2-byte big-endian length prefix.
    pub fn to_prefixed_bytes(&self) -> Vec<u8> {
        let body = self.to_bytes_be();
        let len = u16::try_from(body.len()).expect("exponent wider than 65535 bytes");
        let mut out = Vec::with_capacity(body.len() + 2);
        out.extend_from_slice(&len.to_be_bytes());
        out.extend_from_slice(&body);
        out
    }

    /// Parses one length-prefixed exponent and returns the unread tail.
    pub fn from_prefixed_bytes(bytes: &[u8]) -> Result<(Self, &[u8]), ChebError> {
        if bytes.len() < 2 {
            return Err(ChebError::EncodingWidth {
                expected: 2,
                actual: bytes.len(),
            });
        }
        let len = u16::from_be_bytes([bytes[0], bytes[1]]) as usize;
        let rest = &bytes[2..];
        if rest.len() < len {
            return Err(ChebError::EncodingWidth {
                expected: len,
                actual: rest.len(),
            });
        }
        if len > 0 && rest[0] == 0 {
            return Err(ChebError::NonMinimalEncoding);
        }
        Ok((Self::from_bytes_be(&rest[..len]), &rest[len..]))
    }

    pub fn mul(&self, other: &Exponent) -> Exponent {
        Exponent(&self.0 * &other.0)
    }
}

impl From<u64> for Exponent {
    fn from(v: u64) -> Self {
        Exponent(BigUint::from(v))
    }
}

impl From<BigUint> for Exponent {
    fn from(v: BigUint) -> Self {
        Exponent(v)
    }
}

impl TryFrom<i64> for Exponent {
    type Error = ChebError;

    fn try_from(v: i64) -> Result<Self, ChebError> {
        u64::try_from(v)
            .map(Exponent::from)
            .map_err(|_| ChebError::NegativeDegree(v))
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exponent({})", self.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Draws a uniform `bits`-bit integer with the top bit set, `[2^(bits-1), 2^bits)`.
pub fn gen_exponent<R: RngCore + ?Sized>(bits: u64, rng: &mut R) -> Result<Exponent, ChebError> {
    if bits < 2 {
        return Err(ChebError::ExponentBits(bits));
    }
    Ok(Exponent(random_bits(bits, rng)))
}

/// Uniform integer with exactly `bits` bits (top bit forced).
pub(crate) fn random_bits<R: RngCore + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    debug_assert!(bits >= 1);
    let nbytes = bits.div_ceil(8) as usize;
    let mut buf = vec![0u8; nbytes];
    rng.fill_bytes(&mut buf);
    let excess = nbytes as u64 * 8 - bits;
    buf[0] &= 0xffu8 >> excess;
    buf[0] |= 0x80u8 >> excess;
    BigUint::from_bytes_be(&buf)
}

/// Uniform integer in `[0, bound)` by rejection sampling.
pub(crate) fn random_below<R: RngCore + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    let bits = bound.bits();
    let nbytes = bits.div_ceil(8) as usize;
    let excess = nbytes as u64 * 8 - bits;
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[0] &= 0xffu8 >> excess;
        let v = BigUint::from_bytes_be(&buf);
        if &v < bound {
            return v;
        }
    }
}
