//! Linear constraints on the determining-set variables and the resulting bound.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::exactfield::CycNum;
use crate::quadform::{DeterminingSet, IndexForm};
use crate::restrict::{LinForm, SymbolicQExp};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LinsysError {
    #[error("operator matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },
    #[error("{what} mismatch: expansion has {exp}, {other_name} has {other}")]
    Mismatch { what: &'static str, exp: u64, other_name: &'static str, other: u64 },
    #[error("q-power range {lo}..={hi} exceeds the expansion truncation {jmax}")]
    BeyondExpansion { lo: u32, hi: u32, jmax: u32 },
    #[error("basis form {label} is known only to q^{precision}, but q^{needed} is required")]
    BasisPrecision { label: String, precision: u32, needed: u32 },
    #[error("basis is degenerate up to q^{0}: its forms are linearly dependent there")]
    DegenerateBasis(u32),
    #[error("expansions are over different variable sets")]
    VariableMismatch,
    #[error("empty q-power range {0}..={1}")]
    EmptyRange(u32, u32),
}

/// Square matrix of an operator on a space of elliptic cusp forms, in the
/// coordinates of a fixed basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorMatrix {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub entries: Vec<Vec<CycNum>>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn check_square(&self) -> Result<(), LinsysError> {
        let dim = self.entries.len();
        for (row, r) in self.entries.iter().enumerate() {
            if r.len() != dim {
                return Err(LinsysError::NotSquare { row, len: r.len(), dim });
            }
        }
        Ok(())
    }
}

/// One q-expansion from a basis of elliptic cusp forms, exact up to `precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisForm {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub precision: u32,
    pub coeffs: BTreeMap<u32, CycNum>,
}

impl BasisForm {
    pub fn coeff(&self, j: u32) -> CycNum {
        self.coeffs.get(&j).cloned().unwrap_or_else(|| CycNum::zero(1))
    }
}

/// A linear relation lhs = 0 together with where it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub lhs: LinForm,
    pub origin: String,
    /// True if the underlying coefficient omits classes outside the variable set.
    pub truncated: bool,
}

/// Recipes that produce constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintRecipe {
    KernelVanishing,
    BasisMatch,
    Proportionality,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelOutcome {
    /// c is not an eigenvalue, so every coefficient in range vanishes.
    Constraints(Vec<Constraint>),
    /// c is an eigenvalue with the given geometric multiplicity; nothing is emitted.
    Refused { nullity: usize },
}

/// Reduced row echelon form of a matrix over a cyclotomic field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rows: Vec<Vec<CycNum>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn common_order(m: &[Vec<CycNum>]) -> u64 {
    m.iter().flatten().fold(1, |acc, x| acc.lcm(&x.order()))
}

/// Gauss-Jordan elimination; all entries are first lifted to a common field.
pub fn rref(m: &[Vec<CycNum>]) -> Rref {
    let n = common_order(m);
    let mut rows: Vec<Vec<CycNum>> = m.iter().map(|r| r.iter().map(|x| x.lift(n)).collect()).collect();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inv().expect("nonzero pivot");
        rows[r] = rows[r].iter().map(|x| x.mul(&inv)).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(pivot_row.iter()) {
                    *x = x.sub(&y.mul(&f));
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    Rref { rows, pivots }
}

fn check_range(exp: &SymbolicQExp, jrange: &RangeInclusive<u32>) -> Result<(), LinsysError> {
    let (lo, hi) = (*jrange.start(), *jrange.end());
    if lo > hi || lo == 0 {
        return Err(LinsysError::EmptyRange(lo, hi));
    }
    if hi > exp.jmax {
        return Err(LinsysError::BeyondExpansion { lo, hi, jmax: exp.jmax });
    }
    Ok(())
}

fn is_truncated(exp: &SymbolicQExp, j: u32) -> bool {
    exp.dropped.get(&j).is_some_and(|m| !m.is_empty())
}

/// If W phi = c phi forces phi = 0, every coefficient of phi in range vanishes.
pub fn kernel_vanishing(
    exp: &SymbolicQExp,
    a: &OperatorMatrix,
    c: &CycNum,
    jrange: RangeInclusive<u32>,
    origin: &str,
) -> Result<KernelOutcome, LinsysError> {
    a.check_square()?;
    if a.level != exp.level {
        return Err(LinsysError::Mismatch { what: "level", exp: exp.level, other_name: "operator", other: a.level });
    }
    if a.weight != exp.weight {
        return Err(LinsysError::Mismatch {
            what: "weight",
            exp: exp.weight as u64,
            other_name: "operator",
            other: a.weight as u64,
        });
    }
    check_range(exp, &jrange)?;
    let dim = a.dim();
    let shifted: Vec<Vec<CycNum>> = (0..dim)
        .map(|i| (0..dim).map(|k| if i == k { a.entries[i][k].sub(c) } else { a.entries[i][k].clone() }).collect())
        .collect();
    let nullity = dim - rref(&shifted).rank();
    if nullity > 0 {
        return Ok(KernelOutcome::Refused { nullity });
    }
    let rows = jrange
        .filter_map(|j| {
            let f = exp.coeff(j);
            (!f.is_zero()).then(|| Constraint {
                lhs: f,
                origin: format!("{origin} q^{j}"),
                truncated: is_truncated(exp, j),
            })
        })
        .collect();
    Ok(KernelOutcome::Constraints(rows))
}

/// Writes the expansion in an echelonized basis: the coefficient at each pivot
/// fixes that basis element's multiplier, and every non-pivot power in range
/// gives one relation.
pub fn basis_match(
    exp: &SymbolicQExp,
    basis: &[BasisForm],
    jrange: RangeInclusive<u32>,
    origin: &str,
) -> Result<Vec<Constraint>, LinsysError> {
    check_range(exp, &jrange)?;
    let hi = *jrange.end();
    for b in basis {
        if b.level != exp.level {
            return Err(LinsysError::Mismatch { what: "level", exp: exp.level, other_name: "basis", other: b.level });
        }
        if b.weight != exp.weight {
            return Err(LinsysError::Mismatch {
                what: "weight",
                exp: exp.weight as u64,
                other_name: "basis",
                other: b.weight as u64,
            });
        }
        if b.precision < hi {
            return Err(LinsysError::BasisPrecision { label: b.label.clone(), precision: b.precision, needed: hi });
        }
    }
    // Column k holds the q^(k+1) coefficient.
    let m: Vec<Vec<CycNum>> = basis.iter().map(|b| (1..=hi).map(|j| b.coeff(j)).collect()).collect();
    let ech = rref(&m);
    if ech.rank() < basis.len() {
        return Err(LinsysError::DegenerateBasis(hi));
    }
    let pivot_powers: Vec<u32> = ech.pivots.iter().map(|&k| k as u32 + 1).collect();
    let mut out = Vec::new();
    for j in jrange {
        if pivot_powers.contains(&j) {
            continue;
        }
        let mut f = exp.coeff(j);
        let mut truncated = is_truncated(exp, j);
        for (row, &pj) in ech.rows.iter().zip(pivot_powers.iter()) {
            let bj = &row[j as usize - 1];
            if !bj.is_zero() {
                f = f.sub(&exp.coeff(pj).scale(bj));
                truncated |= is_truncated(exp, pj);
            }
        }
        if !f.is_zero() {
            out.push(Constraint { lhs: f, origin: format!("{origin} q^{j}"), truncated });
        }
    }
    Ok(out)
}

/// Relations exp1[j] - c exp2[j] = 0 for j in range, dropping identically zero rows.
pub fn proportionality(
    exp1: &SymbolicQExp,
    exp2: &SymbolicQExp,
    c: &CycNum,
    jrange: RangeInclusive<u32>,
    origin: &str,
) -> Result<Vec<Constraint>, LinsysError> {
    if exp1.variables != exp2.variables {
        return Err(LinsysError::VariableMismatch);
    }
    check_range(exp1, &jrange)?;
    check_range(exp2, &jrange)?;
    let mut out = Vec::new();
    for j in jrange {
        let f = exp1.coeff(j).sub(&exp2.coeff(j).scale(c));
        if !f.is_zero() {
            out.push(Constraint {
                lhs: f,
                origin: format!("{origin} q^{j}"),
                truncated: is_truncated(exp1, j) || is_truncated(exp2, j),
            });
        }
    }
    Ok(out)
}

/// Coefficient vector of a linear form in the given variable order.
pub fn row_vector(f: &LinForm, vars: &[IndexForm]) -> Vec<CycNum> {
    vars.iter().map(|t| f.coeff(t).cloned().unwrap_or_else(|| CycNum::zero(1))).collect()
}

/// Scales a row so its first nonzero entry is 1.
fn normalized(row: &[CycNum]) -> Vec<CycNum> {
    let n = common_order(&[row.to_vec()]);
    match row.iter().find(|x| !x.is_zero()) {
        None => row.iter().map(|x| x.lift(n)).collect(),
        Some(lead) => {
            let inv = lead.inv().expect("nonzero");
            row.iter().map(|x| x.mul(&inv).lift(n)).collect()
        }
    }
}

/// Constraints with rows that are scalar multiples of an earlier row removed.
pub fn dedup_constraints(cons: &[Constraint], vars: &[IndexForm]) -> Vec<Constraint> {
    let mut seen: Vec<Vec<CycNum>> = Vec::new();
    let mut out = Vec::new();
    for c in cons {
        let r = normalized(&row_vector(&c.lhs, vars));
        if r.iter().all(|x| x.is_zero()) || seen.contains(&r) {
            continue;
        }
        seen.push(r);
        out.push(c.clone());
    }
    out
}

/// A kernel recipe that declined to emit rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refusal {
    pub recipe: String,
    pub eigenvalue: CycNum,
    pub nullity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub level: u64,
    pub weight: u32,
    pub character: String,
    pub num_vars: usize,
    pub rank: usize,
    pub upper_bound: usize,
    pub equations: Vec<LinForm>,
    pub equation_origins: Vec<String>,
    /// Indices of equations built from coefficients that omit classes outside the variable set.
    pub truncated_equations: Vec<usize>,
    /// Bound from the equations that involve no omitted classes.
    pub strict_rank: usize,
    pub strict_upper_bound: usize,
    pub refusals: Vec<Refusal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<u64>,
    /// Set when a supplied lower bound exceeds the computed upper bound.
    pub inconsistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_upper_bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharper_than_reference: Option<bool>,
}

/// Rank of the deduplicated constraint system; the bound is |set| - rank.
pub fn solve_bound(constraints: &[Constraint], det: &DeterminingSet, character: &str) -> BoundReport {
    let vars = &det.forms;
    let eqs = dedup_constraints(constraints, vars);
    let rows: Vec<Vec<CycNum>> = eqs.iter().map(|c| row_vector(&c.lhs, vars)).collect();
    let rank = rref(&rows).rank();
    let strict_rows: Vec<Vec<CycNum>> =
        eqs.iter().filter(|c| !c.truncated).map(|c| row_vector(&c.lhs, vars)).collect();
    let strict_rank = rref(&strict_rows).rank();
    BoundReport {
        level: det.level,
        weight: det.weight,
        character: character.to_string(),
        num_vars: vars.len(),
        rank,
        upper_bound: vars.len() - rank,
        truncated_equations: eqs.iter().enumerate().filter(|(_, c)| c.truncated).map(|(i, _)| i).collect(),
        equation_origins: eqs.iter().map(|c| c.origin.clone()).collect(),
        equations: eqs.into_iter().map(|c| c.lhs).collect(),
        strict_rank,
        strict_upper_bound: vars.len() - strict_rank,
        refusals: Vec::new(),
        lower_bound: None,
        inconsistent: false,
        reference_upper_bound: None,
        sharper_than_reference: None,
    }
}

impl BoundReport {
    /// Records a known lower bound and flags it if it exceeds the upper bound.
    pub fn with_lower_bound(mut self, lower: Option<u64>) -> Self {
        self.lower_bound = lower;
        self.inconsistent = lower.is_some_and(|l| l > self.upper_bound as u64);
        self
    }

    pub fn with_reference(mut self, reference: Option<u64>) -> Self {
        self.reference_upper_bound = reference;
        self.sharper_than_reference = reference.map(|r| (self.upper_bound as u64) < r);
        self
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("level {} weight {} character {}\n", self.level, self.weight, self.character));
        s.push_str(&format!("variables {}\n", self.num_vars));
        for (i, (e, o)) in self.equations.iter().zip(&self.equation_origins).enumerate() {
            let mark = if self.truncated_equations.contains(&i) { " *" } else { "" };
            s.push_str(&format!("E{}: {e} = 0    [{o}]{mark}\n", i + 1));
        }
        if !self.truncated_equations.is_empty() {
            s.push_str("* coefficient omits classes outside the variable set\n");
        }
        for r in &self.refusals {
            s.push_str(&format!(
                "refused {}: eigenvalue {} has multiplicity {}\n",
                r.recipe, r.eigenvalue, r.nullity
            ));
        }
        s.push_str(&format!("rank {}\nupper bound {}\n", self.rank, self.upper_bound));
        s.push_str(&format!("strict rank {}\nstrict upper bound {}\n", self.strict_rank, self.strict_upper_bound));
        if let Some(l) = self.lower_bound {
            s.push_str(&format!("lower bound {l}\n"));
        }
        if self.inconsistent {
            s.push_str("INCONSISTENT: lower bound exceeds upper bound\n");
        }
        if let (Some(r), Some(sharp)) = (self.reference_upper_bound, self.sharper_than_reference) {
            s.push_str(&format!("reference bound {r}: {}\n", if sharp { "improved" } else { "not improved" }));
        }
        s
    }
}
