//! Scalars picked up by restricted forms under Atkin-Lehner and Fricke operators.
//!
//! Context: Siegel level l, sending matrix s with det(s) = l', gcd(l, l') = 1,
//! Siegel weight k and a character chi mod l. The restriction has level l l'.

use num_integer::Integer;
use serde::Serialize;

use crate::charmod::{CharError, DirichletChar};
use crate::exactfield::{int, CycNum, Rational};
use crate::quadform::SendingMatrix;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum OperatorError {
    #[error("level {l} and det(s) = {lprime} are not coprime")]
    NotCoprime { l: u64, lprime: u64 },
    #[error("character modulus {got} does not match level {want}")]
    CharacterModulus { got: u64, want: u64 },
    #[error("level {0} must be prime for this operator")]
    NotPrime(u64),
    #[error(transparent)]
    Char(#[from] CharError),
}

#[derive(Clone, Debug)]
pub struct ALContext {
    pub l: u64,
    pub lprime: u64,
    pub k: u32,
    pub chi: DirichletChar,
    pub s: SendingMatrix,
}

impl ALContext {
    pub fn new(l: u64, k: u32, chi: DirichletChar, s: SendingMatrix) -> Result<Self, OperatorError> {
        let lprime = s.det() as u64;
        if l.gcd(&lprime) != 1 {
            return Err(OperatorError::NotCoprime { l, lprime });
        }
        if chi.modulus() != l {
            return Err(OperatorError::CharacterModulus { got: chi.modulus(), want: l });
        }
        Ok(ALContext { l, lprime, k, chi, s })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScalarKind {
    Wl,
    Wlprime,
    Fricke,
    FrickeCombined,
}

/// Integer data that reproduces a scalar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    /// W_l = [[l x, y], [l l' z, l w]] with l x w - l' z y = 1 and y = 1.
    Decomposition { x: i64, y: i64, z: i64, w: i64 },
    /// Least positive inverse of l modulo l'.
    Inverse { lhat: i64 },
    None {},
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OperatorScalar {
    pub value: CycNum,
    pub provenance: ScalarKind,
    pub witness: Witness,
}

/// Integers (x, y, z, w) with y = 1 and l x w - l' z = 1, taking the smallest |z|
/// and then the smallest |w| (positive on ties), with x = 1.
pub fn wl_decomposition(l: u64, lprime: u64) -> Result<(i64, i64, i64, i64), OperatorError> {
    if l.gcd(&lprime) != 1 {
        return Err(OperatorError::NotCoprime { l, lprime });
    }
    let (l, lp) = (l as i64, lprime as i64);
    // l w = 1 mod l' makes z = (l w - 1) / l' integral.
    let lhat = mod_inverse(l, lp);
    let mut best: Option<(i64, i64)> = None;
    for t in -(l + 2)..=(l + 2) {
        let w = lhat + t * lp;
        let z = (l * w - 1) / lp;
        if l * w - lp * z != 1 {
            continue;
        }
        let better = match best {
            None => true,
            Some((bz, bw)) => (z.abs(), w.abs(), w < 0) < (bz.abs(), bw.abs(), bw < 0),
        };
        if better {
            best = Some((z, w));
        }
    }
    let (z, w) = best.expect("a solution exists when gcd(l, l') = 1");
    Ok((1, 1, z, w))
}

/// Least positive inverse of a modulo m (1 when m = 1).
pub fn mod_inverse(a: i64, m: i64) -> i64 {
    if m == 1 {
        return 1;
    }
    let e = Integer::extended_gcd(&a.rem_euclid(m), &m);
    e.x.rem_euclid(m)
}

fn l_pow(l: u64, e: i64) -> Rational {
    let base = int(l as i64);
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

/// Scalar of W_l on the restriction: l^k chi(l' z^2) with the normalized decomposition.
pub fn al_scalar_wl(ctx: &ALContext) -> Result<OperatorScalar, OperatorError> {
    if crate::quadform::prime_power(ctx.l) != Ok((ctx.l, 1)) {
        return Err(OperatorError::NotPrime(ctx.l));
    }
    let (x, y, z, w) = wl_decomposition(ctx.l, ctx.lprime)?;
    let arg = ctx.lprime as i64 * z * z;
    let value = ctx.chi.eval(arg)?.scale(&l_pow(ctx.l, ctx.k as i64));
    Ok(OperatorScalar { value, provenance: ScalarKind::Wl, witness: Witness::Decomposition { x, y, z, w } })
}

/// Scalar of W_l' on the restriction: chi(((1 - l lhat)^2 / l') mod l).
pub fn al_scalar_wlprime(ctx: &ALContext) -> Result<OperatorScalar, OperatorError> {
    let (l, lp) = (ctx.l as i64, ctx.lprime as i64);
    let lhat = mod_inverse(l, lp);
    let num = (1 - l * lhat) * (1 - l * lhat);
    debug_assert_eq!(num % lp, 0);
    let value = ctx.chi.eval(num / lp)?;
    Ok(OperatorScalar { value, provenance: ScalarKind::Wlprime, witness: Witness::Inverse { lhat } })
}

/// Factor l^-k relating the Fricke image to the W_l side.
pub fn fricke_factor(ctx: &ALContext) -> OperatorScalar {
    OperatorScalar {
        value: CycNum::from_rational(1, l_pow(ctx.l, -(ctx.k as i64))),
        provenance: ScalarKind::Fricke,
        witness: Witness::None {},
    }
}

/// Fricke factor divided by the W_l scalar: l^-2k chi^-1(l' z^2).
pub fn fricke_combined(ctx: &ALContext) -> Result<OperatorScalar, OperatorError> {
    let wl = al_scalar_wl(ctx)?;
    let f = fricke_factor(ctx);
    let value = f.value.div(&wl.value).expect("W_l scalar is nonzero");
    Ok(OperatorScalar { value, provenance: ScalarKind::FrickeCombined, witness: wl.witness })
}
