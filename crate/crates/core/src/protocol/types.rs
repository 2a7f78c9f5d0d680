use std::fmt;

use crate::cheb::{Exponent, FieldElement};

use super::hash::{hash, tag};
use super::ProtocolError;

/// Output length of `h`, in bytes (`l = 160` bits).
pub const DIGEST_LEN: usize = 20;

/// A 160-bit output of `h`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest(pub [u8; DIGEST_LEN]);

impl Digest {
    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        bytes.try_into().ok().map(Digest)
    }

    pub fn xor(&self, other: &[u8; DIGEST_LEN]) -> Digest {
        Digest(xor20(&self.0, other))
    }

    /// Reads the digest as a 160-bit big-endian Chebyshev degree.
    ///
    /// Degrees 0 and 1 are refused; they occur with probability about 2^-159.
    pub fn as_degree(&self) -> Result<Exponent, ProtocolError> {
        let e = Exponent::from_bytes_be(&self.0);
        if e.is_degenerate() {
            return Err(ProtocolError::DegenerateDegree);
        }
        Ok(e)
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// A party identity, right-padded with zero bytes to exactly 20 bytes so it
/// can be XORed with digests.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Identity([u8; DIGEST_LEN]);

impl Identity {
    /// Rejects payloads longer than 20 bytes and payloads that are empty or
    /// all zero (which would read as the degenerate degree 0).
    pub fn new(name: &str) -> Result<Self, ProtocolError> {
        let payload = name.as_bytes();
        if payload.len() > DIGEST_LEN {
            return Err(ProtocolError::IdentityTooLong(payload.len()));
        }
        if payload.iter().all(|&b| b == 0) {
            return Err(ProtocolError::EmptyIdentity);
        }
        let mut raw = [0u8; DIGEST_LEN];
        raw[..payload.len()].copy_from_slice(payload);
        Ok(Identity(raw))
    }

    /// Any 20 bytes, as recovered from `M_i XOR h(k_j)`.
    pub fn from_bytes(raw: [u8; DIGEST_LEN]) -> Self {
        Identity(raw)
    }

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    /// The identity as a big-endian Chebyshev degree.
    pub fn as_degree(&self) -> Exponent {
        Exponent::from_bytes_be(&self.0)
    }

    pub fn xor(&self, other: &[u8; DIGEST_LEN]) -> [u8; DIGEST_LEN] {
        xor20(&self.0, other)
    }

    /// The payload with trailing padding removed, lossily decoded.
    pub fn display_name(&self) -> String {
        let end = self.0.iter().rposition(|&b| b != 0).map_or(0, |i| i + 1);
        String::from_utf8_lossy(&self.0[..end]).into_owned()
    }
}

impl fmt::Debug for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Identity({:?})", self.display_name())
    }
}

/// A user password. Only its 20-byte canonical form enters the protocol.
#[derive(Clone, PartialEq, Eq)]
pub struct Password(String);

impl Password {
    pub fn new(pw: impl Into<String>) -> Result<Self, ProtocolError> {
        let pw = pw.into();
        if pw.is_empty() {
            return Err(ProtocolError::EmptyPassword);
        }
        Ok(Password(pw))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Fixed-width form used wherever the password is XORed or concatenated.
    pub fn canonical(&self) -> [u8; DIGEST_LEN] {
        hash(tag::CANONICAL, &[self.0.as_bytes()]).0
    }
}

impl fmt::Debug for Password {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Password(..)")
    }
}

pub(crate) fn xor20(a: &[u8; DIGEST_LEN], b: &[u8; DIGEST_LEN]) -> [u8; DIGEST_LEN] {
    std::array::from_fn(|i| a[i] ^ b[i])
}

/// 20-byte form of an exponent for XOR: left-padded big-endian when it fits,
/// otherwise hashed down.
pub fn xor_operand(e: &Exponent) -> [u8; DIGEST_LEN] {
    let bytes = e.to_bytes_be();
    if bytes.len() <= DIGEST_LEN {
        let mut out = [0u8; DIGEST_LEN];
        out[DIGEST_LEN - bytes.len()..].copy_from_slice(&bytes);
        out
    } else {
        hash(tag::CANONICAL, &[&bytes]).0
    }
}

/// Canonical byte encoding used inside `h(a || b || ...)`.
pub trait Canonical {
    fn encode_into(&self, out: &mut Vec<u8>);
}

impl Canonical for FieldElement {
    fn encode_into(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_bytes_be());
    }
}

impl Canonical for Exponent {
    fn encode_into(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_prefixed_bytes());
    }
}

impl Canonical for Digest {
    fn encode_into(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.0);
    }
}

impl Canonical for Identity {
    fn encode_into(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.0);
    }
}

impl Canonical for [u8; DIGEST_LEN] {
    fn encode_into(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(self);
    }
}
