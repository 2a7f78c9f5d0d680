use sha2::{Digest as _, Sha256};

use crate::cheb::{cheb_eval, Exponent, FieldElement};

use super::types::{Canonical, Digest, DIGEST_LEN};

/// Domain-separation tags for [`hash`].
pub mod tag {
    /// Every `h(...)` appearing in the protocol equations.
    pub const PROTOCOL: u8 = 0x01;
    /// Width normalisation of passwords and wide exponents before XOR.
    pub const CANONICAL: u8 = 0x02;
}

/// `h: {0,1}* -> {0,1}^160`: SHA-256 over `tag || parts[0] || parts[1] || ...`,
/// truncated to 20 bytes.
///
/// Parts are concatenated raw, so only the overall byte string matters:
/// `hash(t, &[b"ab", b"c"]) == hash(t, &[b"a", b"bc"])`.
pub fn hash(domain_tag: u8, parts: &[&[u8]]) -> Digest {
    let mut hasher = Sha256::new();
    hasher.update([domain_tag]);
    for part in parts {
        hasher.update(part);
    }
    let full = hasher.finalize();
    let mut out = [0u8; DIGEST_LEN];
    out.copy_from_slice(&full[..DIGEST_LEN]);
    Digest(out)
}

/// Protocol hash over canonical encodings.
pub fn h(parts: &[&dyn Canonical]) -> Digest {
    let mut buf = Vec::with_capacity(parts.len() * 32);
    for p in parts {
        p.encode_into(&mut buf);
    }
    hash(tag::PROTOCOL, &[&buf])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Ev,
    Agt,
}

/// Chebyshev evaluations and hash calls performed by one party during login
/// and authentication. Registration work is never counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpCounter {
    pub party: Party,
    pub chebyshev_evals: u64,
    pub hash_calls: u64,
    /// Hashes whose value was served from a registration-time cache
    /// (the aggregator's `h(k_j)`).
    pub cached_hashes: u64,
}

impl OpCounter {
    pub fn new(party: Party) -> Self {
        OpCounter {
            party,
            chebyshev_evals: 0,
            hash_calls: 0,
            cached_hashes: 0,
        }
    }

    /// Hashes computed online.
    pub fn online_hashes(&self) -> u64 {
        self.hash_calls
    }

    /// Online hashes plus cached ones, i.e. the count without the cache.
    pub fn total_hashes(&self) -> u64 {
        self.hash_calls + self.cached_hashes
    }

    pub(crate) fn cheb(&mut self, n: &Exponent, x: &FieldElement) -> FieldElement {
        self.chebyshev_evals += 1;
        cheb_eval(n, x)
    }

    pub(crate) fn h(&mut self, parts: &[&dyn Canonical]) -> Digest {
        self.hash_calls += 1;
        h(parts)
    }

    pub(crate) fn cache_hit(&mut self) {
        self.cached_hashes += 1;
    }

    pub fn merge(&mut self, other: &OpCounter) {
        self.chebyshev_evals += other.chebyshev_evals;
        self.hash_calls += other.hash_calls;
        self.cached_hashes += other.cached_hashes;
    }
}
