//! Dirichlet characters stored as exponent tables over zeta_n.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::exactfield::CycNum;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("modulus must be at least 1")]
    BadModulus,
    #[error("{0} is not a unit modulo {1}")]
    NotAUnit(i64, u64),
    #[error("value assigned to {0} is not a {1}-th root of unity")]
    NotARootOfUnity(u64, u64),
    #[error("generator values are inconsistent at residue {0}")]
    Inconsistent(u64),
    #[error("assigned residues generate a subgroup of size {got}, not the full unit group of size {want}")]
    DoesNotGenerate { got: usize, want: usize },
    #[error("extension factor must be at least 1")]
    BadExtension,
}

/// A Dirichlet character modulo `modulus` with values in mu_n, n = `zeta_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletChar {
    modulus: u64,
    zeta_order: u64,
    /// Unit residue -> exponent e with chi(residue) = zeta_n^e.
    table: BTreeMap<u64, u64>,
    generators: Vec<(u64, CycNum)>,
    label: String,
}

fn root_exponent(value: &CycNum, n: u64) -> Option<u64> {
    (0..n).find(|&e| CycNum::root(n, e as i64) == *value)
}

impl DirichletChar {
    /// Builds the character by closing the generator assignment under multiplication.
    pub fn from_generators(
        modulus: u64,
        zeta_order: u64,
        generators: &[(u64, CycNum)],
    ) -> Result<Self, CharError> {
        if modulus == 0 || zeta_order == 0 {
            return Err(CharError::BadModulus);
        }
        let mut gens = Vec::new();
        for (g, v) in generators {
            let g = g % modulus;
            if g.gcd(&modulus) != 1 {
                return Err(CharError::NotAUnit(g as i64, modulus));
            }
            let e = root_exponent(v, zeta_order).ok_or(CharError::NotARootOfUnity(g, zeta_order))?;
            gens.push((g, e));
        }
        let mut table: BTreeMap<u64, u64> = BTreeMap::new();
        table.insert(1 % modulus, 0);
        let mut frontier = vec![1 % modulus];
        while let Some(x) = frontier.pop() {
            let ex = table[&x];
            for &(g, eg) in &gens {
                let y = (x * g) % modulus;
                let ey = (ex + eg) % zeta_order;
                match table.get(&y) {
                    Some(&prev) if prev != ey => return Err(CharError::Inconsistent(y)),
                    Some(_) => {}
                    None => {
                        table.insert(y, ey);
                        frontier.push(y);
                    }
                }
            }
        }
        let want = (0..modulus).filter(|a| a.gcd(&modulus) == 1).count();
        if table.len() != want {
            return Err(CharError::DoesNotGenerate { got: table.len(), want });
        }
        Ok(DirichletChar {
            modulus,
            zeta_order,
            table,
            generators: generators.iter().map(|(g, v)| (*g, v.clone())).collect(),
            label: String::new(),
        })
    }

    pub fn trivial(modulus: u64) -> Self {
        let table = (0..modulus.max(1))
            .filter(|a| a.gcd(&modulus) == 1)
            .map(|a| (a % modulus.max(1), 0))
            .collect();
        DirichletChar {
            modulus,
            zeta_order: 1,
            table,
            generators: Vec::new(),
            label: format!("trivial mod {modulus}"),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn zeta_order(&self) -> u64 {
        self.zeta_order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn generators(&self) -> &[(u64, CycNum)] {
        &self.generators
    }

    fn exponent(&self, a: i64) -> Result<u64, CharError> {
        let r = a.rem_euclid(self.modulus as i64) as u64;
        self.table.get(&r).copied().ok_or(CharError::NotAUnit(a, self.modulus))
    }

    /// chi(a) for any integer a coprime to the modulus.
    pub fn eval(&self, a: i64) -> Result<CycNum, CharError> {
        Ok(CycNum::root(self.zeta_order, self.exponent(a)? as i64))
    }

    /// chi(a)^-1, which is the complex conjugate of chi(a).
    pub fn eval_inv(&self, a: i64) -> Result<CycNum, CharError> {
        Ok(CycNum::root(self.zeta_order, -(self.exponent(a)? as i64)))
    }

    /// The character modulo `modulus * m` induced by reduction mod `modulus`.
    pub fn extend(&self, m: u64) -> Result<Self, CharError> {
        if m == 0 {
            return Err(CharError::BadExtension);
        }
        let big = self.modulus * m;
        let mut table = BTreeMap::new();
        for a in 0..big {
            if a.gcd(&big) == 1 {
                table.insert(a, self.table[&(a % self.modulus)]);
            }
        }
        Ok(DirichletChar {
            modulus: big,
            zeta_order: self.zeta_order,
            table,
            generators: self.generators.clone(),
            label: format!("{} extended to modulus {big}", self.label),
        })
    }

    /// Order of the character as a group element.
    pub fn order(&self) -> u64 {
        self.table
            .values()
            .map(|&e| self.zeta_order / e.gcd(&self.zeta_order))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    /// The pointwise square, chi^2.
    pub fn square(&self) -> Self {
        let table = self.table.iter().map(|(&a, &e)| (a, (2 * e) % self.zeta_order)).collect();
        DirichletChar {
            modulus: self.modulus,
            zeta_order: self.zeta_order,
            table,
            generators: self
                .generators
                .iter()
                .map(|(g, v)| (*g, v.mul(v)))
                .collect(),
            label: format!("({})^2", self.label),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.table.values().all(|&e| e == 0)
    }

    pub fn to_file(&self) -> CharacterFile {
        CharacterFile {
            modulus: self.modulus,
            zeta_order: self.zeta_order,
            generators: self.generators.clone(),
            label: self.label.clone(),
        }
    }
}

/// On-disk character description: generator assignments only, no order field.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CharacterFile {
    pub modulus: u64,
    pub zeta_order: u64,
    pub generators: Vec<(u64, CycNum)>,
    pub label: String,
}

impl CharacterFile {
    pub fn build(&self) -> Result<DirichletChar, CharError> {
        Ok(DirichletChar::from_generators(self.modulus, self.zeta_order, &self.generators)?
            .with_label(self.label.clone()))
    }
}
