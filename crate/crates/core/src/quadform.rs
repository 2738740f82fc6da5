//! Half-integral index forms, sending matrices and determining sets.
//!
//! An index form `[a^b c]` stands for the symmetric matrix [[a, b], [b, c]]
//! with a, c even, i.e. twice a half-integral matrix. Equivalence is under
//! GL2(Z) acting by U T U^t.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::exactfield::{int, rat, Rational};
use crate::interval::{pi_enclosure, sqrt_enclosure, Interval};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("index form [{0}^{1} {2}] must have a and c even")]
    OddDiagonal(i64, i64, i64),
    #[error("index form [{0}^{1} {2}] is not positive definite")]
    NotPositive(i64, i64, i64),
    #[error("sending matrix [[{0},{1}],[{1},{2}]] is not positive definite")]
    SendingNotPositive(i64, i64, i64),
    #[error("level {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("weight must be at least 1")]
    BadWeight,
    #[error("threshold enclosure {lo}..{hi} could not separate dyadic trace {w}")]
    Undecided { lo: String, hi: String, w: String },
}

/// Entries of the doubled matrix [[a, b], [b, c]].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 3]", into = "[i64; 3]")]
pub struct IndexForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl IndexForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self, QuadError> {
        if a % 2 != 0 || c % 2 != 0 {
            return Err(QuadError::OddDiagonal(a, b, c));
        }
        if a <= 0 || a * c - b * b <= 0 {
            return Err(QuadError::NotPositive(a, b, c));
        }
        Ok(IndexForm { a, b, c })
    }

    /// Determinant of the doubled matrix.
    pub fn det(&self) -> i64 {
        self.a * self.c - self.b * self.b
    }

    /// (a + c - |b|) / 2.
    pub fn dyadic_trace(&self) -> Rational {
        rat(self.a + self.c - self.b.abs(), 2)
    }

    /// 0 <= 2b <= a <= c.
    pub fn is_reduced(&self) -> bool {
        0 <= 2 * self.b && 2 * self.b <= self.a && self.a <= self.c
    }

    /// The unique reduced representative of the GL2(Z) class.
    pub fn reduce(&self) -> IndexForm {
        // Work with the integral binary form A x^2 + B xy + C y^2.
        let (mut aa, mut bb, mut cc) = (self.a / 2, self.b, self.c / 2);
        loop {
            if bb.abs() > aa {
                // x -> x + k y sends B to B + 2kA.
                let k = -Integer::div_floor(&(bb + aa), &(2 * aa));
                cc += k * bb + k * k * aa;
                bb += 2 * k * aa;
            }
            if aa > cc {
                std::mem::swap(&mut aa, &mut cc);
                bb = -bb;
                continue;
            }
            if bb.abs() <= aa {
                break;
            }
        }
        IndexForm { a: 2 * aa, b: bb.abs(), c: 2 * cc }
    }
}

impl TryFrom<[i64; 3]> for IndexForm {
    type Error = QuadError;
    fn try_from(v: [i64; 3]) -> Result<Self, QuadError> {
        IndexForm::new(v[0], v[1], v[2])
    }
}

impl From<IndexForm> for [i64; 3] {
    fn from(t: IndexForm) -> [i64; 3] {
        [t.a, t.b, t.c]
    }
}

impl fmt::Display for IndexForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}^{} {}]", self.a, self.b, self.c)
    }
}

/// Positive definite integral symmetric matrix [[s1, s2], [s2, s4]].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 3]", into = "[i64; 3]")]
pub struct SendingMatrix {
    pub s1: i64,
    pub s2: i64,
    pub s4: i64,
}

impl SendingMatrix {
    pub fn new(s1: i64, s2: i64, s4: i64) -> Result<Self, QuadError> {
        if s1 <= 0 || s1 * s4 - s2 * s2 <= 0 {
            return Err(QuadError::SendingNotPositive(s1, s2, s4));
        }
        Ok(SendingMatrix { s1, s2, s4 })
    }

    pub fn identity() -> Self {
        SendingMatrix { s1: 1, s2: 0, s4: 1 }
    }

    pub fn det(&self) -> i64 {
        self.s1 * self.s4 - self.s2 * self.s2
    }

    pub fn trace(&self) -> i64 {
        self.s1 + self.s4
    }
}

impl TryFrom<[i64; 3]> for SendingMatrix {
    type Error = QuadError;
    fn try_from(v: [i64; 3]) -> Result<Self, QuadError> {
        SendingMatrix::new(v[0], v[1], v[2])
    }
}

impl From<SendingMatrix> for [i64; 3] {
    fn from(s: SendingMatrix) -> [i64; 3] {
        [s.s1, s.s2, s.s4]
    }
}

impl fmt::Display for SendingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.s1, self.s2, self.s2, self.s4)
    }
}

/// a s1 / 2 + b s2 + c s4 / 2, always an integer since a and c are even.
pub fn inner_int(t: &IndexForm, s: &SendingMatrix) -> i64 {
    t.a / 2 * s.s1 + t.b * s.s2 + t.c / 2 * s.s4
}

pub fn inner(t: &IndexForm, s: &SendingMatrix) -> Rational {
    int(inner_int(t, s))
}

/// Splits a level into (p, i) with level = p^i, p prime, i >= 1.
pub fn prime_power(level: u64) -> Result<(u64, u32), QuadError> {
    if level < 2 {
        return Err(QuadError::NotPrimePower(level));
    }
    let p = (2..=level).find(|d| level.is_multiple_of(*d)).unwrap();
    let mut m = level;
    let mut i = 0;
    while m.is_multiple_of(p) {
        m /= p;
        i += 1;
    }
    if m != 1 {
        return Err(QuadError::NotPrimePower(level));
    }
    Ok((p, i))
}

/// Strict upper bound on the dyadic trace of determining-set members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Threshold {
    /// w < bound, with the bound known exactly.
    Exact(Rational),
    /// w < B for an irrational B; the enclosure is refined on demand.
    Certified { p: u64, i: u32, k: u32, enclosure: Interval },
}

const MAX_REFINEMENTS: u32 = 8;

/// Rigorous enclosure of the prime-power bound at a given refinement step.
fn prime_power_enclosure(p: u64, i: u32, k: u32, step: u32) -> Interval {
    let pi = pi_enclosure(8 * (step + 1));
    let s3 = sqrt_enclosure(3, 32 * (step + 1));
    // 1 / (sqrt3 * pi); both factors are positive.
    let r = s3.mul(&pi).recip().expect("positive");
    let pe = int(p.pow(i) as i64);
    let mut prod = int(1);
    for j in 1..=i {
        prod *= int(1) + rat(1, p.pow(j) as i64);
    }
    // The bound is increasing in r, so evaluate at both endpoints.
    let f = |x: &Rational| -> Rational {
        let inner = int(k as i64) * x - rat(3, 2) / &pe;
        rat(3, 2) + &pe * inner * &prod
    };
    Interval { lo: f(&r.lo), hi: f(&r.hi) }
}

impl Threshold {
    /// Tests w < bound. Certified bounds are refined until the comparison is decided.
    pub fn admits(&self, w: &Rational) -> Result<bool, QuadError> {
        match self {
            Threshold::Exact(b) => Ok(w < b),
            Threshold::Certified { p, i, k, enclosure } => {
                let mut enc = enclosure.clone();
                for step in 0..=MAX_REFINEMENTS {
                    if w < &enc.lo {
                        return Ok(true);
                    }
                    if w >= &enc.hi {
                        return Ok(false);
                    }
                    enc = prime_power_enclosure(*p, *i, *k, step + 1);
                }
                Err(QuadError::Undecided {
                    lo: enc.lo.to_string(),
                    hi: enc.hi.to_string(),
                    w: w.to_string(),
                })
            }
        }
    }

    /// A rational number that is at least the bound.
    pub fn upper(&self) -> Rational {
        match self {
            Threshold::Exact(b) => b.clone(),
            Threshold::Certified { enclosure, .. } => enclosure.hi.clone(),
        }
    }

    /// Threshold given on the unhalved quantity a + c - |b| < x.
    pub fn unhalved(x: Rational) -> Self {
        Threshold::Exact(x / int(2))
    }

    pub fn describe(&self) -> String {
        match self {
            Threshold::Exact(b) => format!("w < {b}"),
            Threshold::Certified { enclosure, .. } => format!(
                "w < B with B in [{:.9}, {:.9}]",
                crate::exactfield::rational_to_f64(&enclosure.lo),
                crate::exactfield::rational_to_f64(&enclosure.hi)
            ),
        }
    }
}

/// Dyadic-trace bound for level p^i and weight k.
///
/// For i = 1 this is (1 + p) k / 6. For i > 1 it is
/// 3/2 + p^i (k / (sqrt3 pi) - 3 / (2 p^i)) prod_{j<=i} (1 + p^-j),
/// returned as a certified enclosure of width below 1/4.
pub fn determining_bound(p: u64, i: u32, k: u32) -> Result<Threshold, QuadError> {
    if k == 0 {
        return Err(QuadError::BadWeight);
    }
    if i == 0 || prime_power(p) != Ok((p, 1)) {
        return Err(QuadError::NotPrimePower(p.pow(i)));
    }
    if i == 1 {
        return Ok(Threshold::Exact(rat((1 + p as i64) * k as i64, 6)));
    }
    let enclosure = prime_power_enclosure(p, i, k, 0);
    debug_assert!(enclosure.width() < rat(1, 4));
    Ok(Threshold::Certified { p, i, k, enclosure })
}

/// Reduced forms whose dyadic trace is below the threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminingSet {
    pub level: u64,
    pub weight: u32,
    pub threshold: Threshold,
    pub forms: Vec<IndexForm>,
}

/// Enumerates reduced forms with w below `threshold` in lexicographic (a, b, c) order.
pub fn enumerate_with(threshold: &Threshold) -> Result<Vec<IndexForm>, QuadError> {
    // Reduced forms satisfy a + c - b >= 3a/2 and c >= a.
    let two_b = threshold.upper() * int(2);
    let mut out = Vec::new();
    let mut a = 2i64;
    while rat(3 * a, 2) < two_b {
        for b in 0..=a / 2 {
            let mut c = a;
            while int(a + c - b) < two_b {
                let t = IndexForm { a, b, c };
                if threshold.admits(&t.dyadic_trace())? {
                    out.push(t);
                }
                c += 2;
            }
        }
        a += 2;
    }
    Ok(out)
}

pub fn enumerate_determining(level: u64, weight: u32) -> Result<DeterminingSet, QuadError> {
    let (p, i) = prime_power(level)?;
    let threshold = determining_bound(p, i, weight)?;
    let forms = enumerate_with(&threshold)?;
    Ok(DeterminingSet { level, weight, threshold, forms })
}

pub fn enumerate_determining_with(
    level: u64,
    weight: u32,
    threshold: Threshold,
) -> Result<DeterminingSet, QuadError> {
    prime_power(level)?;
    if weight == 0 {
        return Err(QuadError::BadWeight);
    }
    let forms = enumerate_with(&threshold)?;
    Ok(DeterminingSet { level, weight, threshold, forms })
}

#[derive(Serialize)]
struct DeterminingSetRepr<'a> {
    level: u64,
    weight: u32,
    forms: &'a [IndexForm],
}

impl Serialize for DeterminingSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DeterminingSetRepr { level: self.level, weight: self.weight, forms: &self.forms }
            .serialize(s)
    }
}
