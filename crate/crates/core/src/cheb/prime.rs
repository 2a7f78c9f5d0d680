//! Primality testing and generation of moduli whose neighbours `N +- 1`
//! carry large prime factors.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest as _, Sha256};

use super::exponent::{random_below, random_bits};
use super::{ChebError, Modulus};

/// Miller-Rabin rounds for inputs above the deterministic range.
pub const MILLER_RABIN_ROUNDS: usize = 64;

/// Trial-division bound used when splitting `(N +- 1) / 2`.
pub const TRIAL_DIVISION_BOUND: u32 = 1 << 14;

/// Default attempt budget for [`gen_modulus`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;

// The first 13 primes are a deterministic Miller-Rabin witness set for every
// n < 3_317_044_064_679_887_385_961_981.
const DETERMINISTIC_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const DETERMINISTIC_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = TRIAL_DIVISION_BOUND as usize;
        let mut composite = vec![false; limit + 1];
        let mut out = Vec::new();
        for i in 2..=limit {
            if !composite[i] {
                out.push(i as u32);
                let mut j = i * i;
                while j <= limit {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        out
    })
}

/// Probabilistic primality test.
///
/// Inputs below `3.3e24` use a deterministic witness set; larger inputs run
/// [`MILLER_RABIN_ROUNDS`] rounds with bases drawn from a ChaCha stream keyed
/// by the candidate itself, so the answer is reproducible.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if n < &BigUint::from(2u8) {
        return false;
    }
    for &p in &small_primes()[..64] {
        if n == &BigUint::from(p) {
            return true;
        }
        if (n % p).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().expect("n > 1");
    let d = &n_minus_one >> s;

    if n.to_u128().is_some_and(|v| v < DETERMINISTIC_LIMIT) {
        return DETERMINISTIC_BASES
            .iter()
            .all(|&a| miller_rabin_round(n, &n_minus_one, &d, s, &BigUint::from(a)));
    }

    let seed: [u8; 32] = Sha256::digest(n.to_bytes_be()).into();
    let mut rng = ChaCha8Rng::from_seed(seed);
    let span = n - 3u32;
    (0..MILLER_RABIN_ROUNDS).all(|_| {
        let a = random_below(&span, &mut rng) + 2u32;
        miller_rabin_round(n, &n_minus_one, &d, s, &a)
    })
}

fn miller_rabin_round(
    n: &BigUint,
    n_minus_one: &BigUint,
    d: &BigUint,
    s: u64,
    a: &BigUint,
) -> bool {
    let a = a % n;
    if a.is_zero() || a.is_one() || &a == n_minus_one {
        return true;
    }
    let mut x = a.modpow(d, n);
    if x.is_one() || &x == n_minus_one {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if &x == n_minus_one {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// `N - 1 = 2 p1` and `N + 1 = 2 p2` with both `p1`, `p2` prime.
///
/// Consecutive integers `(N-1)/2` and `(N+1)/2` are both prime only for 2 and 3,
/// so `N = 5` is the only modulus meeting this form.
pub fn satisfies_literal_strong_condition(n: &BigUint) -> bool {
    if n < &BigUint::from(3u8) || n.is_even() {
        return false;
    }
    let lo = (n - 1u32) >> 1;
    let hi = (n + 1u32) >> 1;
    is_probable_prime(n) && is_probable_prime(&lo) && is_probable_prime(&hi)
}

/// Evidence that a prime `N` has large prime factors in both `(N-1)/2` and
/// `(N+1)/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulusCertificate {
    pub modulus: BigUint,
    pub p1_factor: BigUint,
    pub cofactor1: BigUint,
    pub p2_factor: BigUint,
    pub cofactor2: BigUint,
    pub factor_bits: u64,
}

impl ModulusCertificate {
    /// Re-checks every claim in the certificate.
    pub fn verify(&self) -> Result<(), ChebError> {
        let fail = |why: &str| Err(ChebError::BadCertificate(why.to_string()));
        let n = &self.modulus;
        if n < &BigUint::from(3u8) || n.is_even() || !is_probable_prime(n) {
            return fail("modulus is not an odd prime");
        }
        if (n - 1u32) >> 1 != &self.p1_factor * &self.cofactor1 {
            return fail("(N-1)/2 != p1 * cofactor1");
        }
        if (n + 1u32) >> 1 != &self.p2_factor * &self.cofactor2 {
            return fail("(N+1)/2 != p2 * cofactor2");
        }
        for (name, p) in [("p1", &self.p1_factor), ("p2", &self.p2_factor)] {
            if !is_probable_prime(p) {
                return fail(&format!("{name} is not prime"));
            }
            if p.bits() < self.factor_bits {
                return fail(&format!("{name} is shorter than {} bits", self.factor_bits));
            }
        }
        Ok(())
    }

    pub fn to_modulus(&self) -> Result<Modulus, ChebError> {
        self.verify()?;
        Ok(Modulus::from_verified(self.modulus.clone()))
    }

    /// Built-in 256-bit modulus with 200-bit factors on both sides.
    pub fn default_256() -> &'static ModulusCertificate {
        static CERT: OnceLock<ModulusCertificate> = OnceLock::new();
        CERT.get_or_init(|| {
            include_str!("default_256.cert")
                .parse()
                .expect("embedded certificate parses")
        })
    }
}

impl fmt::Display for ModulusCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N={}", self.modulus)?;
        writeln!(f, "p1={}", self.p1_factor)?;
        writeln!(f, "cofactor1={}", self.cofactor1)?;
        writeln!(f, "p2={}", self.p2_factor)?;
        writeln!(f, "cofactor2={}", self.cofactor2)?;
        writeln!(f, "factor_bits={}", self.factor_bits)
    }
}

impl FromStr for ModulusCertificate {
    type Err = ChebError;

    fn from_str(s: &str) -> Result<Self, ChebError> {
        let mut fields: [Option<&str>; 6] = [None; 6];
        const KEYS: [&str; 6] = ["N", "p1", "cofactor1", "p2", "cofactor2", "factor_bits"];
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ChebError::BadCertificate(format!("line {}: expected key=value", lineno + 1))
            })?;
            let slot = KEYS
                .iter()
                .position(|k| *k == key.trim())
                .ok_or_else(|| ChebError::BadCertificate(format!("unknown key {key:?}")))?;
            if fields[slot].replace(value.trim()).is_some() {
                return Err(ChebError::BadCertificate(format!("duplicate key {key:?}")));
            }
        }
        let get = |i: usize| {
            fields[i].ok_or_else(|| ChebError::BadCertificate(format!("missing key {:?}", KEYS[i])))
        };
        let int = |i: usize| -> Result<BigUint, ChebError> {
            get(i)?
                .parse::<BigUint>()
                .map_err(|e| ChebError::BadCertificate(format!("{}: {e}", KEYS[i])))
        };
        Ok(ModulusCertificate {
            modulus: int(0)?,
            p1_factor: int(1)?,
            cofactor1: int(2)?,
            p2_factor: int(3)?,
            cofactor2: int(4)?,
            factor_bits: get(5)?
                .parse()
                .map_err(|e| ChebError::BadCertificate(format!("factor_bits: {e}")))?,
        })
    }
}

/// Splits `m` as `q * cofactor` with `q` its largest prime factor, provided
/// everything except `q` is below the trial-division bound and `q` has at
/// least `factor_bits` bits.
fn large_prime_factor(m: &BigUint, factor_bits: u64) -> Option<(BigUint, BigUint)> {
    if m.is_zero() || m.is_one() {
        return None;
    }
    let mut rest = m.clone();
    let mut largest_small = None;
    for &p in small_primes() {
        if rest.is_one() {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            largest_small = Some(p);
        }
    }
    let q = if rest.is_one() {
        BigUint::from(largest_small?)
    } else {
        if rest.bits() < factor_bits || !is_probable_prime(&rest) {
            return None;
        }
        rest
    };
    if q.bits() < factor_bits {
        return None;
    }
    let cofactor = m / &q;
    Some((q, cofactor))
}

/// Searches for a prime `N` of exactly `bits` bits such that `(N-1)/2` and
/// `(N+1)/2` each contain a prime factor of at least `factor_bits` bits.
pub fn gen_modulus<R: RngCore + ?Sized>(
    bits: u64,
    factor_bits: u64,
    rng: &mut R,
) -> Result<ModulusCertificate, ChebError> {
    gen_modulus_with_budget(bits, factor_bits, DEFAULT_SEARCH_BUDGET, rng)
}

pub fn gen_modulus_with_budget<R: RngCore + ?Sized>(
    bits: u64,
    factor_bits: u64,
    max_attempts: u64,
    rng: &mut R,
) -> Result<ModulusCertificate, ChebError> {
    if bits < 3 || factor_bits >= bits {
        return Err(ChebError::ModulusParams { bits, factor_bits });
    }
    let sieve = &small_primes()[1..168]; // odd primes below 1000
    'candidates: for _ in 0..max_attempts {
        let n = random_bits(bits, rng) | BigUint::one();
        for &p in sieve {
            if (&n % p).is_zero() && n != BigUint::from(p) {
                continue 'candidates;
            }
        }
        if !is_probable_prime(&n) {
            continue;
        }
        let Some((p1, c1)) = large_prime_factor(&((&n - 1u32) >> 1), factor_bits) else {
            continue;
        };
        let Some((p2, c2)) = large_prime_factor(&((&n + 1u32) >> 1), factor_bits) else {
            continue;
        };
        return Ok(ModulusCertificate {
            modulus: n,
            p1_factor: p1,
            cofactor1: c1,
            p2_factor: p2,
            cofactor2: c2,
            factor_bits,
        });
    }
    Err(ChebError::SearchExhausted {
        attempts: max_attempts,
    })
}

/// Factor-size threshold used when none is given: 25/32 of the modulus
/// width (200 bits for a 256-bit modulus).
pub fn default_factor_bits(bits: u64) -> u64 {
    bits * 25 / 32
}
