use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::prime::is_probable_prime;
use super::ChebError;

/// An odd prime modulus `N`, shared by every [`FieldElement`] built on it.
///
/// Cloning is cheap; the value lives behind an `Arc`.
#[derive(Clone)]
pub struct Modulus(Arc<ModulusInner>);

struct ModulusInner {
    value: BigUint,
    bits: u64,
    byte_len: usize,
}

impl Modulus {
    /// Builds a modulus after checking that `n` is an odd prime `>= 3`.
    pub fn new(n: BigUint) -> Result<Self, ChebError> {
        if n < BigUint::from(3u8) || n.is_even() {
            return Err(ChebError::InvalidModulus(n));
        }
        if !is_probable_prime(&n) {
            return Err(ChebError::InvalidModulus(n));
        }
        Ok(Self::from_verified(n))
    }

    pub(crate) fn from_verified(n: BigUint) -> Self {
        let bits = n.bits();
        let byte_len = bits.div_ceil(8) as usize;
        Modulus(Arc::new(ModulusInner {
            value: n,
            bits,
            byte_len,
        }))
    }

    pub fn value(&self) -> &BigUint {
        &self.0.value
    }

    pub fn bits(&self) -> u64 {
        self.0.bits
    }

    /// Width of the canonical big-endian encoding of an element.
    pub fn byte_len(&self) -> usize {
        self.0.byte_len
    }

    /// Range-checked element constructor.
    pub fn element(&self, value: BigUint) -> Result<FieldElement, ChebError> {
        FieldElement::new(value, self)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            value: BigUint::zero(),
            modulus: self.clone(),
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            value: BigUint::one(),
            modulus: self.clone(),
        }
    }
}

impl PartialEq for Modulus {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.value == other.0.value
    }
}

impl Eq for Modulus {}

impl Hash for Modulus {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.value.hash(state);
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus({} bits: {})", self.0.bits, self.0.value)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0.value, f)
    }
}

/// An integer in `[0, N)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: BigUint,
    modulus: Modulus,
}

impl FieldElement {
    pub fn new(value: BigUint, modulus: &Modulus) -> Result<Self, ChebError> {
        if &value >= modulus.value() {
            return Err(ChebError::OutOfRange {
                value,
                modulus: modulus.value().clone(),
            });
        }
        Ok(FieldElement {
            value,
            modulus: modulus.clone(),
        })
    }

    pub fn from_u64(value: u64, modulus: &Modulus) -> Result<Self, ChebError> {
        Self::new(BigUint::from(value), modulus)
    }

    /// Reduces an arbitrary integer into the field.
    pub fn reduce(value: &BigUint, modulus: &Modulus) -> Self {
        FieldElement {
            value: value % modulus.value(),
            modulus: modulus.clone(),
        }
    }

    pub(crate) fn from_reduced(value: BigUint, modulus: &Modulus) -> Self {
        debug_assert!(&value < modulus.value());
        FieldElement {
            value,
            modulus: modulus.clone(),
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Fixed-width big-endian encoding, `modulus.byte_len()` bytes.
    pub fn to_bytes_be(&self) -> Vec<u8> {
        let width = self.modulus.byte_len();
        let raw = self.value.to_bytes_be();
        let mut out = vec![0u8; width];
        if !self.value.is_zero() {
            out[width - raw.len()..].copy_from_slice(&raw);
        }
        out
    }

    /// Inverse of [`to_bytes_be`](Self::to_bytes_be); rejects wrong widths and values `>= N`.
    pub fn from_bytes_be(bytes: &[u8], modulus: &Modulus) -> Result<Self, ChebError> {
        if bytes.len() != modulus.byte_len() {
            return Err(ChebError::EncodingWidth {
                expected: modulus.byte_len(),
                actual: bytes.len(),
            });
        }
        Self::new(BigUint::from_bytes_be(bytes), modulus)
    }

    fn check_same(&self, other: &Self) {
        assert!(
            self.modulus == other.modulus,
            "field elements from different moduli"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut v = &self.value + &other.value;
        if &v >= self.modulus.value() {
            v -= self.modulus.value();
        }
        Self::from_reduced(v, &self.modulus)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same(other);
        let v = if self.value >= other.value {
            &self.value - &other.value
        } else {
            self.modulus.value() - (&other.value - &self.value)
        };
        Self::from_reduced(v, &self.modulus)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same(other);
        Self::from_reduced(
            (&self.value * &other.value) % self.modulus.value(),
            &self.modulus,
        )
    }

    pub fn neg(&self) -> Self {
        self.modulus.zero().sub(self)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({})", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.value, f)
    }
}
