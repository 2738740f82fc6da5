//! Rational interval enclosures of pi and square roots.
//!
//! Endpoints are exact rationals, so every enclosure is rigorous without
//! relying on floating-point rounding modes.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exactfield::{int, rat, Rational};

/// Closed interval [lo, hi] with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    /// Reciprocal of an interval that does not contain zero.
    pub fn recip(&self) -> Option<Interval> {
        if self.contains(&Rational::zero()) {
            return None;
        }
        Some(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn to_f64_mid(&self) -> f64 {
        crate::exactfield::rational_to_f64(&((&self.lo + &self.hi) / int(2)))
    }
}

/// arctan(1/x) enclosed by partial sums of its alternating Taylor series.
fn atan_inv(x: i64, terms: u32) -> Interval {
    let x2 = int(x * x);
    let mut pow = rat(1, x);
    let mut sum = Rational::zero();
    for k in 0..terms {
        let term = &pow / int(2 * k as i64 + 1);
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        pow = &pow / &x2;
    }
    // The first omitted term bounds the error and has sign (-1)^terms.
    let next = &pow / int(2 * terms as i64 + 1);
    if terms.is_multiple_of(2) {
        Interval { lo: sum.clone(), hi: sum + next }
    } else {
        Interval { lo: &sum - next, hi: sum }
    }
}

/// Enclosure of pi from Machin's formula, with roughly `1.4 * terms` correct digits.
pub fn pi_enclosure(terms: u32) -> Interval {
    let a = atan_inv(5, terms);
    let b = atan_inv(239, terms);
    let four_a = a.mul(&Interval::point(int(16)));
    let four_b = b.mul(&Interval::point(int(4)));
    four_a.sub(&four_b)
}

/// Enclosure of sqrt(n) of width at most 2^-bits, by bisection on exact squares.
pub fn sqrt_enclosure(n: u64, bits: u32) -> Interval {
    let target = int(n as i64);
    let mut lo = Rational::zero();
    let mut hi = int(n as i64 + 1);
    let eps = Rational::new(BigInt::one(), BigInt::one() << bits);
    while &hi - &lo > eps {
        let mid = (&lo + &hi) / int(2);
        if &mid * &mid <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Interval { lo, hi }
}
