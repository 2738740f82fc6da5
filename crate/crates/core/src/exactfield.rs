//! Exact arithmetic in the cyclotomic fields Q(zeta_n).
//!
//! Elements are kept in the power basis 1, z, ..., z^(phi(n)-1) reduced
//! modulo the n-th cyclotomic polynomial. Operands from different fields are
//! lifted to Q(zeta_lcm) before combining.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("cyclotomic order must be at least 1")]
    ZeroOrder,
    #[error("division by zero in Q(zeta_{0})")]
    DivisionByZero(u64),
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
}

/// Parses `"p"` or `"p/q"` into a reduced rational. Only ASCII digits and a
/// leading minus on p are allowed.
pub fn parse_rational(s: &str) -> Result<Rational, FieldError> {
    let bad = || FieldError::BadRational(s.to_string());
    let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
    let (p, q) = s.split_once('/').map_or((s, None), |(p, q)| (p, Some(q)));
    if !digits(p.strip_prefix('-').unwrap_or(p)) {
        return Err(bad());
    }
    let p: BigInt = p.parse().map_err(|_| bad())?;
    match q {
        None => Ok(Rational::from_integer(p)),
        Some(q) if digits(q) => {
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        Some(_) => Err(bad()),
    }
}

/// Like `parse_rational`, but also accepts a terminating decimal such as `"8.5"`.
pub fn parse_decimal(s: &str) -> Result<Rational, FieldError> {
    let t = s.trim();
    let Some((whole, frac)) = t.split_once('.') else {
        return parse_rational(t);
    };
    let bad = || FieldError::BadRational(s.to_string());
    if frac.is_empty() || !frac.chars().all(|ch| ch.is_ascii_digit()) {
        return Err(bad());
    }
    let neg = whole.starts_with('-');
    let digits: BigInt = format!("{}{frac}", whole.trim_start_matches('-')).parse().map_err(|_| bad())?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let r = Rational::new(digits, scale);
    Ok(if neg { -r } else { r })
}

/// Canonical text of a rational: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Euler's totient.
pub fn phi(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// Integer coefficients of the n-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    // x^n - 1 divided by every Phi_d with d | n, d < n.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let den = cyclotomic_poly(d);
        num = exact_div_monic(&num, &den);
    }
    num
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut q = vec![BigInt::zero(); num.len() - dn];
    for i in (0..q.len()).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (k, dk) in den.iter().enumerate() {
            rem[i + k] -= &c * dk;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    q
}

/// Reduces a rational polynomial (constant term first) modulo Phi_n.
fn reduce_mod_phi(mut poly: Vec<Rational>, n: u64) -> Vec<Rational> {
    let m = cyclotomic_poly(n);
    let deg = m.len() - 1;
    let m: Vec<Rational> = m.into_iter().map(Rational::from_integer).collect();
    while poly.len() > deg {
        let top = poly.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let shift = poly.len() - deg;
        for k in 0..deg {
            poly[shift + k] -= &top * &m[k];
        }
    }
    poly.resize(deg, Rational::zero());
    poly
}

/// An element of Q(zeta_n) in the reduced power basis.
#[derive(Clone, Debug)]
pub struct CycNum {
    n: u64,
    c: Vec<Rational>,
}

impl CycNum {
    /// Builds `sum_i coeffs[i] * zeta_n^i`, reducing modulo Phi_n.
    pub fn new(n: u64, coeffs: Vec<Rational>) -> Result<Self, FieldError> {
        if n == 0 {
            return Err(FieldError::ZeroOrder);
        }
        Ok(CycNum { n, c: reduce_mod_phi(coeffs, n) })
    }

    pub fn from_rational(n: u64, r: Rational) -> Self {
        CycNum::new(n, vec![r]).expect("n >= 1")
    }

    pub fn from_int(n: u64, k: i64) -> Self {
        CycNum::from_rational(n, int(k))
    }

    pub fn zero(n: u64) -> Self {
        CycNum::from_int(n, 0)
    }

    pub fn one(n: u64) -> Self {
        CycNum::from_int(n, 1)
    }

    /// `zeta_n^k` for any integer k.
    pub fn root(n: u64, k: i64) -> Self {
        assert!(n >= 1, "cyclotomic order must be at least 1");
        let e = k.rem_euclid(n as i64) as usize;
        let mut v = vec![Rational::zero(); e + 1];
        v[e] = Rational::one();
        CycNum::new(n, v).expect("n >= 1")
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.c.first().is_some_and(|x| x.is_one()) && self.c.iter().skip(1).all(|x| x.is_zero())
    }

    /// Returns the rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.c.iter().skip(1).all(|x| x.is_zero()) {
            Some(self.c.first().cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    /// Re-expresses the element in Q(zeta_m); `m` must be a multiple of n.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m.is_multiple_of(self.n), "cannot lift Q(zeta_{}) into Q(zeta_{})", self.n, m);
        if m == self.n {
            return self.clone();
        }
        let step = (m / self.n) as usize;
        let mut v = vec![Rational::zero(); step * self.c.len().max(1)];
        for (i, x) in self.c.iter().enumerate() {
            v[i * step] = x.clone();
        }
        CycNum::new(m, v).expect("m >= 1")
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = self.n.lcm(&other.n);
        (self.lift(m), other.lift(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let c = a.c.iter().zip(b.c.iter()).map(|(x, y)| x + y).collect();
        CycNum { n: a.n, c }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CycNum { n: self.n, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let d = a.c.len();
        let mut prod = vec![Rational::zero(); (2 * d).saturating_sub(1).max(1)];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        CycNum::new(a.n, prod).expect("n >= 1")
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycNum { n: self.n, c: self.c.iter().map(|x| x * r).collect() }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x].
    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero(self.n));
        }
        let modulus: Vec<Rational> =
            cyclotomic_poly(self.n).into_iter().map(Rational::from_integer).collect();
        let (g, s) = ext_gcd_inverse(trim(self.c.clone()), modulus);
        // g is a nonzero constant since Phi_n is irreducible.
        debug_assert_eq!(g.len(), 1);
        let ginv = g[0].recip();
        let s: Vec<Rational> = s.into_iter().map(|x| x * &ginv).collect();
        CycNum::new(self.n, s)
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self, FieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = CycNum::one(self.n);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Complex conjugation zeta -> zeta^-1.
    pub fn conj(&self) -> Self {
        let mut acc = CycNum::zero(self.n);
        for (i, x) in self.c.iter().enumerate() {
            if !x.is_zero() {
                acc = acc.add(&CycNum::root(self.n, -(i as i64)).scale(x));
            }
        }
        acc
    }

    /// Numeric value at zeta_n = exp(2 pi i / n), for display and diagnostics.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, x) in self.c.iter().enumerate() {
            let v = rational_to_f64(x);
            let ang = 2.0 * std::f64::consts::PI * i as f64 / self.n as f64;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }
}

pub fn rational_to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.len() > 1 && p.last().is_some_and(|x| x.is_zero()) {
        p.pop();
    }
    if p.is_empty() {
        p.push(Rational::zero());
    }
    p
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (vec![Rational::zero()], r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - 1 - db;
        let c = r.last().unwrap() / &lead;
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] -= &c * bk;
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
        if r.len() < b.len() {
            break;
        }
    }
    (trim(q), r)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

/// Returns (g, s) with s * a = g (mod m), g = gcd(a, m).
fn ext_gcd_inverse(a: Vec<Rational>, m: Vec<Rational>) -> (Vec<Rational>, Vec<Rational>) {
    let (mut r0, mut r1) = (a, m);
    let (mut s0, mut s1) = (vec![Rational::one()], vec![Rational::zero()]);
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divrem(&r0, &r1);
        let s = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    (r0, s0)
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.n == other.n {
            return self.c == other.c;
        }
        let (a, b) = self.common(other);
        a.c == b.c
    }
}

impl Eq for CycNum {}

impl Add for &CycNum {
    type Output = CycNum;
    fn add(self, o: &CycNum) -> CycNum {
        CycNum::add(self, o)
    }
}

impl Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, o: &CycNum) -> CycNum {
        CycNum::sub(self, o)
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, o: &CycNum) -> CycNum {
        CycNum::mul(self, o)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum::neg(self)
    }
}

/// Renders as a polynomial in `zetaN`, highest power first, e.g. `-9*zeta6 + 9`.
impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (i, x) in self.c.iter().enumerate().rev() {
            if x.is_zero() {
                continue;
            }
            let neg = x.is_negative();
            let mag = format_rational(&x.abs());
            let mono = match i {
                0 => mag,
                _ => {
                    let z = if i == 1 {
                        format!("zeta{}", self.n)
                    } else {
                        format!("zeta{}^{}", self.n, i)
                    };
                    if x.abs().is_one() {
                        z
                    } else {
                        format!("{mag}*{z}")
                    }
                }
            };
            parts.push((neg, mono));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (k, (neg, mono)) in parts.iter().enumerate() {
            match (k, neg) {
                (0, true) => write!(f, "-{mono}")?,
                (0, false) => write!(f, "{mono}")?,
                (_, true) => write!(f, " - {mono}")?,
                (_, false) => write!(f, " + {mono}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CycNumRepr {
    n: u64,
    c: Vec<String>,
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycNumRepr { n: self.n, c: self.c.iter().map(format_rational).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = CycNumRepr::deserialize(d)?;
        let c = r
            .c
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        CycNum::new(r.n, c).map_err(D::Error::custom)
    }
}

/// Convenience constructor from small integer coefficients.
pub fn cyc(n: u64, coeffs: &[i64]) -> CycNum {
    CycNum::new(n, coeffs.iter().map(|&k| int(k)).collect()).expect("n >= 1")
}
