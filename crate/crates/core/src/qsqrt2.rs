//! Exact arithmetic in the real field `Q(sqrt 2)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::numfmt;

/// `rat + sqrt2 * sqrt(2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct QSqrt2 {
    #[serde(with = "numfmt::rational")]
    pub rat: BigRational,
    #[serde(with = "numfmt::rational")]
    pub sqrt2: BigRational,
}

impl QSqrt2 {
    pub fn new(rat: BigRational, sqrt2: BigRational) -> Self {
        QSqrt2 { rat, sqrt2 }
    }

    pub fn from_rat(rat: BigRational) -> Self {
        QSqrt2 { rat, sqrt2: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn sqrt2() -> Self {
        QSqrt2 { rat: BigRational::zero(), sqrt2: BigRational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.sqrt2.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.sqrt2.is_zero()
    }

    pub fn signum(&self) -> i32 {
        let sa = sign(&self.rat);
        let sb = sign(&self.sqrt2);
        if sa == 0 || sa == sb {
            return sb;
        }
        if sb == 0 {
            return sa;
        }
        // opposite signs: compare a^2 with 2 b^2
        let a2 = &self.rat * &self.rat;
        let b2 = &self.sqrt2 * &self.sqrt2 * BigRational::from_integer(BigInt::from(2));
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        QSqrt2 { rat: &self.rat * k, sqrt2: &self.sqrt2 * k }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let n = &self.rat * &self.rat - &self.sqrt2 * &self.sqrt2 * two;
        Some(QSqrt2 { rat: &self.rat / &n, sqrt2: -&self.sqrt2 / &n })
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> BigInt {
        let bound: BigInt = (self.rat.abs() + self.sqrt2.abs() * BigRational::from_integer(BigInt::from(2)))
            .ceil()
            .to_integer()
            + 1;
        let (mut lo, mut hi) = (-bound.clone(), bound);
        // invariant: lo <= self < hi
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            if QSqrt2::from_rat(BigRational::from_integer(mid.clone())) <= *self {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Rational `r` with `other = r * self`, if one exists.
    pub fn rational_ratio(&self, other: &QSqrt2) -> Option<BigRational> {
        let q = other * &self.inv()?;
        q.is_rational().then_some(q.rat)
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.rat.to_f64().unwrap_or(f64::NAN)
            + self.sqrt2.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }
}

fn sign(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl Add for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 { rat: &self.rat + &o.rat, sqrt2: &self.sqrt2 + &o.sqrt2 }
    }
}

impl Sub for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 { rat: &self.rat - &o.rat, sqrt2: &self.sqrt2 - &o.sqrt2 }
    }
}

impl Mul for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: &QSqrt2) -> QSqrt2 {
        let two = BigRational::from_integer(BigInt::from(2));
        QSqrt2 {
            rat: &self.rat * &o.rat + &self.sqrt2 * &o.sqrt2 * two,
            sqrt2: &self.rat * &o.sqrt2 + &self.sqrt2 * &o.rat,
        }
    }
}

impl Div for &QSqrt2 {
    type Output = QSqrt2;
    fn div(self, o: &QSqrt2) -> QSqrt2 {
        self * &o.inv().expect("division by zero in Q(sqrt 2)")
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 { rat: -&self.rat, sqrt2: -&self.sqrt2 }
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: QSqrt2) -> QSqrt2 {
        &self + &o
    }
}

impl Sub for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: QSqrt2) -> QSqrt2 {
        &self - &o
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: QSqrt2) -> QSqrt2 {
        &self * &o
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        -&self
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rat.is_zero(), self.sqrt2.is_zero()) {
            (_, true) => write!(f, "{}", numfmt::rat_to_string(&self.rat)),
            (true, false) => write!(f, "{}*sqrt2", numfmt::rat_to_string(&self.sqrt2)),
            (false, false) => write!(
                f,
                "{} + {}*sqrt2",
                numfmt::rat_to_string(&self.rat),
                numfmt::rat_to_string(&self.sqrt2)
            ),
        }
    }
}

/// A complex number with both coordinates in `Q(sqrt 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ComplexQ2 {
    pub re: QSqrt2,
    pub im: QSqrt2,
}

impl ComplexQ2 {
    pub fn new(re: QSqrt2, im: QSqrt2) -> Self {
        ComplexQ2 { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl Add for &ComplexQ2 {
    type Output = ComplexQ2;
    fn add(self, o: &ComplexQ2) -> ComplexQ2 {
        ComplexQ2 { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &ComplexQ2 {
    type Output = ComplexQ2;
    fn sub(self, o: &ComplexQ2) -> ComplexQ2 {
        ComplexQ2 { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl fmt::Display for ComplexQ2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfmt::rat;
    use proptest::prelude::*;

    fn q(a: (i64, i64), b: (i64, i64)) -> QSqrt2 {
        QSqrt2::new(rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn signs_near_cancellation() {
        // 99/70 is a convergent of sqrt 2 from above, 140/99 from below
        assert_eq!(q((99, 70), (-1, 1)).signum(), 1);
        assert_eq!(q((140, 99), (-1, 1)).signum(), -1);
        assert_eq!(q((0, 1), (0, 1)).signum(), 0);
    }

    #[test]
    fn floor_examples() {
        assert_eq!(QSqrt2::sqrt2().floor(), BigInt::from(1));
        assert_eq!((-QSqrt2::sqrt2()).floor(), BigInt::from(-2));
        assert_eq!(QSqrt2::from_int(3).floor(), BigInt::from(3));
        assert_eq!(q((-1, 2), (0, 1)).floor(), BigInt::from(-1));
    }

    proptest! {
        #[test]
        fn field_laws(a in -50i64..50, b in -50i64..50, c in 1i64..9, d in -50i64..50) {
            let x = q((a, c), (b, c));
            let y = q((d, 1), (a, 7));
            if let Some(inv) = x.inv() {
                prop_assert_eq!(&x * &inv, QSqrt2::one());
            }
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            // exact sign agrees with floating point away from zero
            let f = x.to_f64();
            if f.abs() > 1e-9 {
                prop_assert_eq!(x.signum(), if f > 0.0 { 1 } else { -1 });
            }
            let fl = x.floor();
            prop_assert!(QSqrt2::from_rat(BigRational::from_integer(fl.clone())) <= x);
            prop_assert!(QSqrt2::from_rat(BigRational::from_integer(fl + 1)) > x);
        }
    }
}
