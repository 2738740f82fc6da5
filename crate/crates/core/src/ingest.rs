//! Loading and validating JSON inputs: characters, bases, operator matrices and run configs.
//!
//! All rationals are strings (`"p"` or `"p/q"`) and all field elements are
//! `{"n": N, "c": [...]}` objects, so files round-trip without loss.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::charmod::{CharError, CharacterFile, DirichletChar};
use crate::exactfield::CycNum;
use crate::linsys::{BasisForm, LinsysError, OperatorMatrix};
use crate::operators::{al_scalar_wlprime, ALContext, OperatorError};
use crate::quadform::{
    enumerate_determining, enumerate_determining_with, prime_power, DeterminingSet, QuadError,
    SendingMatrix, Threshold,
};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON in {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {msg}")]
    Invalid { path: PathBuf, msg: String },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
}

fn invalid(path: &Path, msg: impl Into<String>) -> IngestError {
    IngestError::Invalid { path: path.to_path_buf(), msg: msg.into() }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| IngestError::Json { path: path.to_path_buf(), source })
}

/// Pretty JSON with a trailing newline, the format used for every fixture.
pub fn to_json_file<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFormFile {
    pub label: String,
    pub coeffs: BTreeMap<u32, CycNum>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub level: u64,
    pub weight: u32,
    pub character: String,
    /// Coefficients are exact for q^j with j <= precision; absent ones are zero.
    pub precision: u32,
    pub forms: Vec<BasisFormFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl BasisFile {
    pub fn to_forms(&self) -> Vec<BasisForm> {
        self.forms
            .iter()
            .map(|f| BasisForm {
                label: f.label.clone(),
                level: self.level,
                weight: self.weight,
                precision: self.precision,
                coeffs: f.coeffs.clone(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub entries: Vec<Vec<CycNum>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl OperatorFile {
    pub fn to_matrix(&self) -> OperatorMatrix {
        OperatorMatrix {
            label: self.label.clone(),
            level: self.level,
            weight: self.weight,
            entries: self.entries.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EigenSpec {
    /// `"wlprime"`: the W_l' scalar of the recipe's sending matrix.
    Named(String),
    Value(CycNum),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Fricke,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RecipeSpec {
    KernelVanishing { label: String, s: usize, operator: String, eigenvalue: EigenSpec, jrange: [u32; 2] },
    BasisMatch { label: String, s: usize, basis: String, jrange: [u32; 2] },
    Proportionality { label: String, s: usize, relation: Relation, jrange: [u32; 2] },
}

impl RecipeSpec {
    pub fn label(&self) -> &str {
        match self {
            RecipeSpec::KernelVanishing { label, .. }
            | RecipeSpec::BasisMatch { label, .. }
            | RecipeSpec::Proportionality { label, .. } => label,
        }
    }

    fn s_and_range(&self) -> (usize, [u32; 2]) {
        match self {
            RecipeSpec::KernelVanishing { s, jrange, .. }
            | RecipeSpec::BasisMatch { s, jrange, .. }
            | RecipeSpec::Proportionality { s, jrange, .. } => (*s, *jrange),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub level: u64,
    pub weight: u32,
    /// `"trivial"` or a path to a character file, relative to the config.
    pub character: String,
    pub sending_matrices: Vec<SendingMatrix>,
    pub recipes: Vec<RecipeSpec>,
    /// Override of the determining-set cutoff on a + c - |b|, as a rational string.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jmax: Option<u32>,
    /// Known dimension of the classical subspace, reported as a lower bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical_dim: Option<u64>,
    /// A previously known upper bound to compare against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_upper_bound: Option<u64>,
}

pub fn load_character(path: &Path) -> Result<DirichletChar, IngestError> {
    let f: CharacterFile = read_json(path)?;
    Ok(f.build()?)
}

pub fn load_basis_file(path: &Path) -> Result<BasisFile, IngestError> {
    let f: BasisFile = read_json(path)?;
    for form in &f.forms {
        if let Some((&j, _)) = form.coeffs.iter().find(|(&j, _)| j == 0 || j > f.precision) {
            return Err(invalid(path, format!("form {} has a coefficient at q^{j} outside 1..={}", form.label, f.precision)));
        }
    }
    Ok(f)
}

pub fn load_basis(path: &Path) -> Result<Vec<BasisForm>, IngestError> {
    Ok(load_basis_file(path)?.to_forms())
}

pub fn load_operator(path: &Path) -> Result<OperatorMatrix, IngestError> {
    let f: OperatorFile = read_json(path)?;
    let m = f.to_matrix();
    m.check_square().map_err(|e| invalid(path, e.to_string()))?;
    Ok(m)
}

pub fn load_config(path: &Path) -> Result<ConfigFile, IngestError> {
    read_json(path)
}

#[derive(Clone, Debug)]
pub enum PlannedKind {
    Kernel { operator: OperatorMatrix, eigenvalue: CycNum },
    Basis { basis: Vec<BasisForm> },
    Fricke,
}

#[derive(Clone, Debug)]
pub struct PlannedRecipe {
    pub label: String,
    pub s: SendingMatrix,
    pub s_index: usize,
    pub jrange: [u32; 2],
    pub kind: PlannedKind,
}

/// A validated config with every referenced file loaded.
#[derive(Clone, Debug)]
pub struct Plan {
    pub config: ConfigFile,
    pub character: DirichletChar,
    pub det: DeterminingSet,
    pub recipes: Vec<PlannedRecipe>,
}

/// Known lower bound carried by the config, if any.
pub fn report_lower_bound(cfg: &ConfigFile) -> Option<u64> {
    cfg.classical_dim
}

/// Checks a config and everything it references; returns a runnable plan.
pub fn validate_config(path: &Path) -> Result<Plan, IngestError> {
    let cfg = load_config(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let level = cfg.level;
    prime_power(level)?;
    if cfg.weight == 0 {
        return Err(invalid(path, "weight must be positive"));
    }
    let character = if cfg.character == "trivial" {
        DirichletChar::trivial(level)
    } else {
        let c = load_character(&dir.join(&cfg.character))?;
        if c.modulus() != level {
            return Err(invalid(path, format!("character modulus {} differs from level {level}", c.modulus())));
        }
        c
    };
    for s in &cfg.sending_matrices {
        let d = s.det() as u64;
        if d.gcd(&level) != 1 {
            return Err(invalid(path, format!("det({s}) = {d} is not coprime to level {level}")));
        }
    }
    let det = match &cfg.threshold {
        None => enumerate_determining(level, cfg.weight)?,
        Some(t) => {
            let x = crate::exactfield::parse_decimal(t).map_err(|e| invalid(path, e.to_string()))?;
            enumerate_determining_with(level, cfg.weight, Threshold::unhalved(x))?
        }
    };
    let mut recipes = Vec::new();
    for r in &cfg.recipes {
        let (si, jrange) = r.s_and_range();
        let s = *cfg
            .sending_matrices
            .get(si)
            .ok_or_else(|| invalid(path, format!("recipe {:?} refers to sending matrix {si}", r.label())))?;
        if jrange[0] == 0 || jrange[0] > jrange[1] {
            return Err(invalid(path, format!("recipe {:?} has empty range {:?}", r.label(), jrange)));
        }
        let target_level = level * s.det() as u64;
        let target_weight = 2 * cfg.weight;
        let kind = match r {
            RecipeSpec::KernelVanishing { operator, eigenvalue, .. } => {
                let op = load_operator(&dir.join(operator))?;
                if op.level != target_level || op.weight != target_weight {
                    return Err(invalid(
                        path,
                        format!(
                            "operator {} has level {} weight {}, expected level {target_level} weight {target_weight}",
                            op.label, op.level, op.weight
                        ),
                    ));
                }
                let eigenvalue = match eigenvalue {
                    EigenSpec::Value(v) => v.clone(),
                    EigenSpec::Named(n) if n == "wlprime" => {
                        let ctx = ALContext::new(level, cfg.weight, character.clone(), s)?;
                        al_scalar_wlprime(&ctx)?.value
                    }
                    EigenSpec::Named(n) => return Err(invalid(path, format!("unknown eigenvalue {n:?}"))),
                };
                PlannedKind::Kernel { operator: op, eigenvalue }
            }
            RecipeSpec::BasisMatch { basis, .. } => {
                let bf = load_basis_file(&dir.join(basis))?;
                if bf.level != target_level || bf.weight != target_weight {
                    return Err(invalid(
                        path,
                        format!(
                            "basis has level {} weight {}, expected level {target_level} weight {target_weight}",
                            bf.level, bf.weight
                        ),
                    ));
                }
                PlannedKind::Basis { basis: bf.to_forms() }
            }
            RecipeSpec::Proportionality { relation: Relation::Fricke, .. } => {
                ALContext::new(level, cfg.weight, character.clone(), s)?;
                prime_power(level)
                    .ok()
                    .filter(|&(_, i)| i == 1)
                    .ok_or_else(|| invalid(path, "the Fricke relation needs a prime level"))?;
                PlannedKind::Fricke
            }
        };
        recipes.push(PlannedRecipe { label: r.label().to_string(), s, s_index: si, jrange, kind });
    }
    Ok(Plan { config: cfg, character, det, recipes })
}
