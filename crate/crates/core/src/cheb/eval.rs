use num_bigint::BigUint;

use super::{mat_pow, ChebError, Exponent, FieldElement, Mat2, Modulus};

/// Largest degree accepted by [`cheb_eval_recursive`].
pub const RECURSIVE_MAX_DEGREE: u64 = 1 << 20;

/// Largest modulus and search bound accepted by [`dlog_bruteforce`].
pub const DLOG_MAX: u64 = 1 << 24;

/// Evaluates `T_n(x) mod N`.
///
/// Uses `[T_{n+1}, T_n]^T = M^n [T_1, T_0]^T` with `M = [[2x, -1], [1, 0]]`,
/// `T_1 = x` and `T_0 = 1`, raising `M` by binary exponentiation. The result
/// is the second component of that vector, so the cost is `O(bits(n))`
/// 2x2 matrix products.
///
/// ```
/// use chebyshev_auth::cheb::{cheb_eval, Exponent, FieldElement, Modulus};
/// use num_bigint::BigUint;
///
/// let n = Modulus::new(BigUint::from(7u32)).unwrap();
/// let x = FieldElement::from_u64(3, &n).unwrap();
/// // T_2(3) = 2*3*3 - 1 = 17 = 3 (mod 7)
/// assert_eq!(cheb_eval(&Exponent::from(2), &x).value(), &BigUint::from(3u32));
/// ```
pub fn cheb_eval(n: &Exponent, x: &FieldElement) -> FieldElement {
    let power = mat_pow(&Mat2::stepping(x), n);
    let one = x.modulus().one();
    power.apply(x, &one).1
}

/// Same as [`cheb_eval`] but reads `T_n(x)` off the bottom row of `M^n`
/// directly: `T_n = M^n[1][0] * x + M^n[1][1]`.
pub fn cheb_eval_by_entries(n: &Exponent, x: &FieldElement) -> FieldElement {
    let [_, _, c, d] = mat_pow(&Mat2::stepping(x), n).entries();
    c.mul(x).add(&d)
}

/// Range-checked entry point for raw integers.
pub fn cheb_eval_raw(
    n: &Exponent,
    x: &BigUint,
    modulus: &Modulus,
) -> Result<FieldElement, ChebError> {
    let x = FieldElement::new(x.clone(), modulus)?;
    Ok(cheb_eval(n, &x))
}

/// Direct three-term recurrence `T_n = 2x T_{n-1} - T_{n-2}`, `O(n)` steps.
///
/// Only meant as a test oracle; degrees above [`RECURSIVE_MAX_DEGREE`] are refused.
pub fn cheb_eval_recursive(n: &Exponent, x: &FieldElement) -> Result<FieldElement, ChebError> {
    let limit = BigUint::from(RECURSIVE_MAX_DEGREE);
    if n.value() > &limit {
        return Err(ChebError::OracleRange(format!(
            "degree {n} exceeds recursive oracle bound {RECURSIVE_MAX_DEGREE}"
        )));
    }
    let steps = u64::try_from(n.value()).expect("checked against bound");
    let modulus = x.modulus();
    let two_x = x.add(x);
    let mut prev = modulus.one();
    if steps == 0 {
        return Ok(prev);
    }
    let mut cur = x.clone();
    for _ in 1..steps {
        let next = two_x.mul(&cur).sub(&prev);
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

/// Smallest `v <= max_n` with `T_v(x) = y`, scanning the recurrence.
///
/// Toy-size only: both `N` and `max_n` must be at most [`DLOG_MAX`].
pub fn dlog_bruteforce(
    x: &FieldElement,
    y: &FieldElement,
    max_n: u64,
) -> Result<Option<Exponent>, ChebError> {
    Ok(dlog_scan(x, y, max_n)?.solution)
}

/// Result of a brute-force discrete-log scan, with the number of
/// polynomial values that were inspected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlogScan {
    pub solution: Option<Exponent>,
    pub evaluations: u64,
}

pub fn dlog_scan(x: &FieldElement, y: &FieldElement, max_n: u64) -> Result<DlogScan, ChebError> {
    let modulus = x.modulus();
    if y.modulus() != modulus {
        return Err(ChebError::ModulusMismatch);
    }
    if modulus.value() > &BigUint::from(DLOG_MAX) {
        return Err(ChebError::OracleRange(format!(
            "modulus {modulus} exceeds brute-force bound {DLOG_MAX}"
        )));
    }
    if max_n > DLOG_MAX {
        return Err(ChebError::OracleRange(format!(
            "search bound {max_n} exceeds brute-force bound {DLOG_MAX}"
        )));
    }
    // Everything fits in u64 from here on.
    let n = u64::try_from(modulus.value()).expect("checked");
    let xv = u64::try_from(x.value()).expect("reduced");
    let target = u64::try_from(y.value()).expect("reduced");
    let two_x = (2 * xv) % n;
    let (mut prev, mut cur) = (1u64, xv);
    for v in 0..=max_n {
        let value = if v == 0 { prev } else { cur };
        if value == target {
            return Ok(DlogScan {
                solution: Some(Exponent::from(v)),
                evaluations: v + 1,
            });
        }
        if v >= 1 {
            let next = (two_x * cur % n + n - prev) % n;
            prev = cur;
            cur = next;
        }
    }
    Ok(DlogScan {
        solution: None,
        evaluations: max_n + 1,
    })
}
