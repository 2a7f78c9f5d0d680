use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{ChebError, Exponent, FieldElement, Modulus};

/// Row-major 2x2 matrix over `Z_N`:
///
/// ```text
/// | a  b |
/// | c  d |
/// ```
///
/// Entries are stored reduced and share one modulus by construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat2 {
    a: BigUint,
    b: BigUint,
    c: BigUint,
    d: BigUint,
    modulus: Modulus,
}

impl Mat2 {
    pub fn new(
        a: FieldElement,
        b: FieldElement,
        c: FieldElement,
        d: FieldElement,
    ) -> Result<Self, ChebError> {
        let modulus = a.modulus().clone();
        if [&b, &c, &d].iter().any(|e| e.modulus() != &modulus) {
            return Err(ChebError::ModulusMismatch);
        }
        Ok(Mat2 {
            a: a.value().clone(),
            b: b.value().clone(),
            c: c.value().clone(),
            d: d.value().clone(),
            modulus,
        })
    }

    pub fn identity(modulus: &Modulus) -> Self {
        Mat2 {
            a: BigUint::one(),
            b: BigUint::zero(),
            c: BigUint::zero(),
            d: BigUint::one(),
            modulus: modulus.clone(),
        }
    }

    /// The Chebyshev stepping matrix `[[2x, -1], [1, 0]]`, which maps
    /// `[T_n, T_{n-1}]` to `[T_{n+1}, T_n]`.
    pub fn stepping(x: &FieldElement) -> Self {
        let n = x.modulus().value();
        let two_x = (x.value() << 1u32) % n;
        Mat2 {
            a: two_x,
            b: n - 1u32,
            c: BigUint::one(),
            d: BigUint::zero(),
            modulus: x.modulus().clone(),
        }
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> [FieldElement; 4] {
        [&self.a, &self.b, &self.c, &self.d]
            .map(|v| FieldElement::from_reduced(v.clone(), &self.modulus))
    }

    pub fn mul(&self, rhs: &Mat2) -> Result<Mat2, ChebError> {
        if self.modulus != rhs.modulus {
            return Err(ChebError::ModulusMismatch);
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Mat2) -> Mat2 {
        let n = self.modulus.value();
        Mat2 {
            a: (&self.a * &rhs.a + &self.b * &rhs.c) % n,
            b: (&self.a * &rhs.b + &self.b * &rhs.d) % n,
            c: (&self.c * &rhs.a + &self.d * &rhs.c) % n,
            d: (&self.c * &rhs.b + &self.d * &rhs.d) % n,
            modulus: self.modulus.clone(),
        }
    }

    /// `self * [u, v]^T`.
    pub fn apply(&self, u: &FieldElement, v: &FieldElement) -> (FieldElement, FieldElement) {
        assert!(
            u.modulus() == &self.modulus && v.modulus() == &self.modulus,
            "vector from a different modulus"
        );
        let n = self.modulus.value();
        let top = (&self.a * u.value() + &self.b * v.value()) % n;
        let bottom = (&self.c * u.value() + &self.d * v.value()) % n;
        (
            FieldElement::from_reduced(top, &self.modulus),
            FieldElement::from_reduced(bottom, &self.modulus),
        )
    }
}

/// `m^n mod N` by right-to-left square-and-multiply; `m^0` is the identity.
///
/// Costs `bits(n)` squarings plus one multiply per set bit.
pub fn mat_pow(m: &Mat2, n: &Exponent) -> Mat2 {
    let mut result = Mat2::identity(&m.modulus);
    let bits = n.bits();
    if bits == 0 {
        return result;
    }
    let e = n.value();
    let mut base = m.clone();
    for i in 0..bits {
        if e.bit(i) {
            result = result.mul_unchecked(&base);
        }
        if i + 1 < bits {
            base = base.mul_unchecked(&base);
        }
    }
    result
}
