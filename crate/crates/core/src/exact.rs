//! Exact scalars for the lattice algebra.
//!
//! Coefficients of the ladder actions live in the biquadratic field
//! `Q(√d1, √d2)`, where `d1 = α₁²` and `d2 = α₂²` are rational whenever the
//! physical inputs are (every finite `f64` is a dyadic rational). An element
//! is stored in the basis `{1, √d1, √d2, √d1·√d2}`.
//!
//! Degenerate radicands are folded at construction time ([`adjoin_alphas`]):
//! a perfect-square radicand becomes a plain rational, and a second radicand
//! that is a rational square multiple of the first is expressed through
//! `√d1`. After folding, the basis elements actually in use are linearly
//! independent over `Q`, so equality is a coefficient-wise comparison.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arithmetic shared by the floating-point and exact lattice backends.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Div<Output = Self>
{
    fn from_rational(q: &BigRational) -> Self;

    /// Embeds a float. Exact backends take the exact binary value.
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// True when equality tests on this backend are exact.
    fn is_exact() -> bool;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }
}

impl Scalar for f64 {
    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q)
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_exact() -> bool {
        false
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

/// Exact rational image of a finite float.
///
/// Panics on NaN or infinity; callers validate parameters first.
pub fn rational_from_f64(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite float")
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // numerator or denominator overflowed f64 on its own
    let shift = q.numer().bits().max(q.denom().bits()) as i64 - 900;
    let shift = shift.max(0) as usize;
    let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

/// The pair of radicands `d1`, `d2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalField {
    d1: BigRational,
    d2: BigRational,
}

impl RadicalField {
    pub fn radicands(&self) -> (&BigRational, &BigRational) {
        (&self.d1, &self.d2)
    }
}

/// Element `c0 + c1·√d1 + c2·√d2 + c3·√d1·√d2` of a [`RadicalField`].
///
/// Purely rational elements need no field context; `field` is `None` for them
/// until they are combined with an element that carries one.
#[derive(Clone)]
pub struct Surd {
    coeffs: [BigRational; 4],
    field: Option<Arc<RadicalField>>,
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Builds `√a1` and `√a2` (non-negative roots) as exact scalars over a shared
/// field.
///
/// Panics if a radicand is negative.
pub fn adjoin_alphas(a1: &BigRational, a2: &BigRational) -> (Surd, Surd) {
    assert!(
        !a1.is_negative() && !a2.is_negative(),
        "radicands must be non-negative"
    );
    let field = Arc::new(RadicalField {
        d1: a1.clone(),
        d2: a2.clone(),
    });
    let root1 = rational_sqrt(a1);
    let alpha1 = match &root1 {
        Some(r) => Surd::rational(r.clone()),
        None => Surd::basis(&field, 1),
    };
    let alpha2 = if let Some(r) = rational_sqrt(a2) {
        Surd::rational(r)
    } else if root1.is_none() {
        match rational_sqrt(&(a2 / a1)) {
            Some(ratio) => Surd::basis(&field, 1).scale(&ratio),
            None => Surd::basis(&field, 2),
        }
    } else {
        Surd::basis(&field, 2)
    };
    (alpha1, alpha2)
}

impl Surd {
    pub fn rational(q: BigRational) -> Self {
        let z = BigRational::zero();
        Surd {
            coeffs: [q, z.clone(), z.clone(), z],
            field: None,
        }
    }

    fn basis(field: &Arc<RadicalField>, index: usize) -> Self {
        let mut s = Surd::zero();
        s.coeffs[index] = BigRational::one();
        s.field = Some(field.clone());
        s
    }

    pub fn coefficients(&self) -> &[BigRational; 4] {
        &self.coeffs
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Surd {
            coeffs: [
                &self.coeffs[0] * q,
                &self.coeffs[1] * q,
                &self.coeffs[2] * q,
                &self.coeffs[3] * q,
            ],
            field: self.field.clone(),
        }
    }

    fn join_field(a: &Surd, b: &Surd) -> Option<Arc<RadicalField>> {
        match (&a.field, &b.field) {
            (Some(x), Some(y)) => {
                debug_assert!(Arc::ptr_eq(x, y) || x == y, "mixed radical fields");
                Some(x.clone())
            }
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        }
    }

    // flips the sign of the √d2 component
    fn conj2(&self) -> Self {
        let c = &self.coeffs;
        Surd {
            coeffs: [c[0].clone(), c[1].clone(), -&c[2], -&c[3]],
            field: self.field.clone(),
        }
    }

    fn conj1(&self) -> Self {
        let c = &self.coeffs;
        Surd {
            coeffs: [c[0].clone(), -&c[1], c[2].clone(), -&c[3]],
            field: self.field.clone(),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inverse(&self) -> Self {
        assert!(!self.is_zero(), "division by zero in radical field");
        if self.is_rational() {
            return Surd::rational(self.coeffs[0].recip());
        }
        let c2 = self.conj2();
        let norm2 = self.clone() * c2.clone();
        let c1 = norm2.conj1();
        let norm = norm2 * c1.clone();
        debug_assert!(norm.is_rational());
        let t = norm.coeffs[0].clone();
        assert!(!t.is_zero(), "degenerate radical field");
        (c2 * c1).scale(&t.recip())
    }

    /// Exact sign, when it can be decided without floating point.
    pub fn sign(&self) -> Option<Sign> {
        if self.is_zero() {
            return Some(Sign::NoSign);
        }
        if self.is_rational() {
            return Some(if self.coeffs[0].is_positive() {
                Sign::Plus
            } else {
                Sign::Minus
            });
        }
        None
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.coeffs;
        match &self.field {
            None => write!(f, "{}", c[0]),
            Some(field) => write!(
                f,
                "{} + {}·√({}) + {}·√({}) + {}·√({}·{})",
                c[0], c[1], field.d1, c[2], field.d2, c[3], field.d1, field.d2
            ),
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, rhs: Surd) -> Surd {
        let field = Surd::join_field(&self, &rhs);
        let [a0, a1, a2, a3] = self.coeffs;
        let [b0, b1, b2, b3] = rhs.coeffs;
        Surd {
            coeffs: [a0 + b0, a1 + b1, a2 + b2, a3 + b3],
            field,
        }
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        let [a0, a1, a2, a3] = self.coeffs;
        Surd {
            coeffs: [-a0, -a1, -a2, -a3],
            field: self.field,
        }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        if rhs.is_rational() {
            return self.scale(&rhs.coeffs[0]);
        }
        if self.is_rational() {
            return rhs.scale(&self.coeffs[0]);
        }
        let field = Surd::join_field(&self, &rhs).expect("irrational elements carry a field");
        let (d1, d2) = (&field.d1, &field.d2);
        let [a0, a1, a2, a3] = &self.coeffs;
        let [b0, b1, b2, b3] = &rhs.coeffs;
        let d12 = d1 * d2;
        let c0 = a0 * b0 + d1 * (a1 * b1) + d2 * (a2 * b2) + &d12 * (a3 * b3);
        let c1 = a0 * b1 + a1 * b0 + d2 * (a2 * b3 + a3 * b2);
        let c2 = a0 * b2 + a2 * b0 + d1 * (a1 * b3 + a3 * b1);
        let c3 = a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1;
        Surd {
            coeffs: [c0, c1, c2, c3],
            field: Some(field),
        }
    }
}

impl Div for Surd {
    type Output = Surd;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Surd) -> Surd {
        self * rhs.inverse()
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Surd::rational(BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl One for Surd {
    fn one() -> Self {
        Surd::rational(BigRational::one())
    }
}

impl Scalar for Surd {
    fn from_rational(q: &BigRational) -> Self {
        Surd::rational(q.clone())
    }

    fn from_f64(v: f64) -> Self {
        Surd::rational(rational_from_f64(v))
    }

    fn to_f64(&self) -> f64 {
        let c = &self.coeffs;
        let mut v = rational_to_f64(&c[0]);
        if let Some(field) = &self.field {
            let r1 = rational_to_f64(&field.d1).sqrt();
            let r2 = rational_to_f64(&field.d2).sqrt();
            v += rational_to_f64(&c[1]) * r1
                + rational_to_f64(&c[2]) * r2
                + rational_to_f64(&c[3]) * r1 * r2;
        }
        v
    }

    fn is_exact() -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn square_of_root_is_radicand() {
        let (a1, a2) = adjoin_alphas(&q(3, 1), &q(17, 4));
        assert_eq!(a1.clone() * a1.clone(), Surd::rational(q(3, 1)));
        assert_eq!(a2.clone() * a2.clone(), Surd::rational(q(17, 4)));
        assert!(!(a1 * a2).is_rational());
    }

    #[test]
    fn perfect_squares_fold_to_rationals() {
        let (a1, a2) = adjoin_alphas(&q(9, 4), &q(8, 1));
        assert!(a1.is_rational());
        assert_eq!(a1, Surd::rational(q(3, 2)));
        assert!(!a2.is_rational());
    }

    #[test]
    fn proportional_radicands_share_a_root() {
        // √12 = 2·√3
        let (a1, a2) = adjoin_alphas(&q(3, 1), &q(12, 1));
        assert_eq!(a2.clone() - a1.clone().scale(&q(2, 1)), Surd::zero());
        assert_eq!(a1 * a2, Surd::rational(q(6, 1)));
    }

    #[test]
    fn inverse_round_trips() {
        let (a1, a2) = adjoin_alphas(&q(2, 1), &q(5, 1));
        let x = Surd::from_i64(3) + a1.clone() - a2.clone().scale(&q(1, 7)) + a1 * a2;
        let inv = x.inverse();
        assert_eq!(x.clone() * inv.clone(), Surd::one());
        assert!((x.to_f64() * inv.to_f64() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn to_f64_matches_float_image() {
        let (a1, a2) = adjoin_alphas(&q(3, 1), &q(12, 1));
        let x = a1.clone() * Surd::from_i64(5) + a2.clone();
        assert!((x.to_f64() - 7.0 * 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn float_embedding_is_exact() {
        let x = Surd::from_f64(0.1);
        assert_ne!(x, Surd::rational(q(1, 10)));
        assert_eq!(x.to_f64(), 0.1);
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigRational::new(BigInt::from(3) << 2000, BigInt::from(1) << 2000);
        assert_eq!(rational_to_f64(&big), 3.0);
    }
}
