//! Quadratic polynomials in the twist parameter with exact coefficients.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::rational::{floor, int, Rational};

/// `a2·d² + a1·d + a0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadraticPolynomial {
    #[serde(with = "crate::rational::as_string")]
    pub a2: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub a1: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub a0: Rational,
}

impl QuadraticPolynomial {
    pub fn new(a2: Rational, a1: Rational, a0: Rational) -> Self {
        QuadraticPolynomial { a2, a1, a0 }
    }

    pub fn zero() -> Self {
        QuadraticPolynomial::new(Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a2.is_zero() && self.a1.is_zero() && self.a0.is_zero()
    }

    pub fn eval(&self, d: &Rational) -> Rational {
        (&self.a2 * d + &self.a1) * d + &self.a0
    }

    pub fn eval_int(&self, d: i64) -> Rational {
        self.eval(&int(d))
    }

    /// Lagrange interpolation through the values at `d = 0, 1, 2`.
    pub fn through_0_1_2(y0: &Rational, y1: &Rational, y2: &Rational) -> Self {
        // second difference / 2, then back out the linear term
        let two = int(2);
        let a2 = (y2 - two.clone() * y1 + y0) / &two;
        let a1 = y1 - y0 - &a2;
        QuadraticPolynomial::new(a2, a1, y0.clone())
    }

    /// Coefficient-wise `self - other`.
    pub fn minus(&self, other: &Self) -> Self {
        QuadraticPolynomial::new(
            &self.a2 - &other.a2,
            &self.a1 - &other.a1,
            &self.a0 - &other.a0,
        )
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        QuadraticPolynomial::new(&self.a2 * factor, &self.a1 * factor, &self.a0 * factor)
    }

    /// The least integer `d₀ ≥ 0` with `q(d) > 0` for every integer `d ≥ d₀`.
    pub fn positivity_threshold(&self) -> Threshold {
        let a2 = &self.a2;
        let a1 = &self.a1;
        if a2.is_negative() || (a2.is_zero() && a1.is_negative()) {
            return Threshold::Never;
        }
        if a2.is_zero() && a1.is_zero() {
            return if self.a0.is_positive() {
                Threshold::From(BigInt::zero())
            } else {
                Threshold::Never
            };
        }
        // q is eventually increasing; every integer with q ≤ 0 lies on one
        // side of the vertex or the other, so inspect the two integers
        // around the vertex and then walk the increasing branch.
        let vertex = if a2.is_zero() {
            // linear: treat the root as the "vertex" of a monotone function
            -&self.a0 / a1
        } else {
            -a1 / (int(2) * a2)
        };
        let below = floor(&vertex);
        let above = if Rational::from_integer(below.clone()) == vertex {
            below.clone()
        } else {
            &below + BigInt::one()
        };
        let start = above.max(BigInt::zero());
        let q = |n: &BigInt| self.eval(&Rational::from_integer(n.clone()));
        if !q(&start).is_positive() {
            return Threshold::From(self.last_nonpositive_from(start) + BigInt::one());
        }
        if !below.is_negative() && below < start && !q(&below).is_positive() {
            return Threshold::From(below + BigInt::one());
        }
        Threshold::From(BigInt::zero())
    }

    /// Largest integer `n ≥ start` with `q(n) ≤ 0`, given `q(start) ≤ 0` and
    /// `q` increasing on `[start, ∞)`.
    fn last_nonpositive_from(&self, start: BigInt) -> BigInt {
        let q = |n: &BigInt| self.eval(&Rational::from_integer(n.clone()));
        let mut lo = start;
        let mut step = BigInt::one();
        let mut hi = &lo + &step;
        while !q(&hi).is_positive() {
            lo = hi;
            step <<= 1;
            hi = &lo + &step;
        }
        // invariant: q(lo) ≤ 0 < q(hi)
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            if q(&mid).is_positive() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }
}

/// Where a quadratic becomes and stays strictly positive on the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Threshold {
    From(BigInt),
    Never,
}

impl Threshold {
    pub fn as_finite(&self) -> Option<&BigInt> {
        match self {
            Threshold::From(d) => Some(d),
            Threshold::Never => None,
        }
    }
}

impl std::fmt::Display for Threshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Threshold::From(d) => write!(f, "{d}"),
            Threshold::Never => write!(f, "none"),
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Threshold::From(d) => s.serialize_str(&d.to_string()),
            Threshold::Never => s.serialize_none(),
        }
    }
}
