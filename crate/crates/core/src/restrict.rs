//! Restriction of a Siegel Fourier expansion along a sending matrix.
//!
//! The q^j coefficient of the restriction is a sum of a(v) over positive
//! definite index forms v with <v, s> = j. Grouping by GL2(Z) class gives
//! counts vcount(j, s, t) multiplying the variable a(t).

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::exactfield::CycNum;
use crate::quadform::{inner_int, DeterminingSet, IndexForm, SendingMatrix};

/// Sparse linear form sum_t coeff_t * a(t) with exact coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinForm {
    terms: BTreeMap<IndexForm, CycNum>,
}

impl LinForm {
    pub fn new() -> Self {
        LinForm::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (IndexForm, CycNum)>) -> Self {
        let mut f = LinForm::new();
        for (t, c) in terms {
            f.add_term(t, &c);
        }
        f
    }

    pub fn add_term(&mut self, t: IndexForm, c: &CycNum) {
        let v = match self.terms.get(&t) {
            Some(old) => old.add(c),
            None => c.clone(),
        };
        if v.is_zero() {
            self.terms.remove(&t);
        } else {
            self.terms.insert(t, v);
        }
    }

    pub fn coeff(&self, t: &IndexForm) -> Option<&CycNum> {
        self.terms.get(t)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexForm, &CycNum)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &LinForm) -> LinForm {
        let mut out = self.clone();
        for (t, c) in &o.terms {
            out.add_term(*t, c);
        }
        out
    }

    pub fn scale(&self, c: &CycNum) -> LinForm {
        LinForm::from_terms(self.terms.iter().map(|(t, x)| (*t, x.mul(c))))
    }

    pub fn sub(&self, o: &LinForm) -> LinForm {
        self.add(&o.scale(&CycNum::from_int(1, -1)))
    }

    /// Complex conjugate of every coefficient.
    pub fn conj(&self) -> LinForm {
        LinForm::from_terms(self.terms.iter().map(|(t, x)| (*t, x.conj())))
    }
}

/// Renders as `a0[2^0 2] + 2 a0[2^1 2]`.
impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (t, c)) in self.terms.iter().enumerate() {
            let r = c.as_rational();
            let neg = r.as_ref().is_some_and(|x| x < &num_traits::Zero::zero());
            let sep = match (k, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            let coef = match r {
                Some(x) => {
                    let x = if neg { -x } else { x };
                    if num_traits::One::is_one(&x) {
                        String::new()
                    } else {
                        format!("{} ", crate::exactfield::format_rational(&x))
                    }
                }
                None => format!("({c}) "),
            };
            write!(f, "{sep}{coef}a0{t}")?;
        }
        Ok(())
    }
}

impl Serialize for LinForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|(t, c)| ([t.a, t.b, t.c], c)))
    }
}

/// Partial q-expansion with linear-form coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicQExp {
    /// Level of the restricted elliptic form.
    pub level: u64,
    /// Weight of the restricted elliptic form.
    pub weight: u32,
    pub jmax: u32,
    /// Variables of the underlying determining set.
    pub variables: Vec<IndexForm>,
    pub coeffs: BTreeMap<u32, LinForm>,
    /// Reduced classes outside the variable set that also occur at q^j, with counts.
    pub dropped: BTreeMap<u32, BTreeMap<IndexForm, u64>>,
}

impl SymbolicQExp {
    pub fn coeff(&self, j: u32) -> LinForm {
        self.coeffs.get(&j).cloned().unwrap_or_default()
    }

    /// Powers q^j (j <= jmax) whose true coefficient involves classes outside the variable set.
    pub fn truncated_powers(&self) -> Vec<u32> {
        self.dropped.iter().filter(|(_, m)| !m.is_empty()).map(|(j, _)| *j).collect()
    }

    pub fn scale(&self, c: &CycNum) -> SymbolicQExp {
        let mut out = self.clone();
        out.coeffs = self.coeffs.iter().map(|(j, f)| (*j, f.scale(c))).collect();
        out.coeffs.retain(|_, f| !f.is_zero());
        out
    }

    /// Plain text, one power per line: `(a0[2^0 2] + 2 a0[2^1 2]) q^2`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (j, f) in &self.coeffs {
            out.push_str(&format!("({f}) q^{j}\n"));
        }
        out
    }
}

struct JKey<'a, V>(&'a BTreeMap<u32, V>);

impl<V: Serialize> Serialize for JKey<'_, V> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (j, v) in self.0 {
            m.serialize_entry(&j.to_string(), v)?;
        }
        m.end()
    }
}

struct Dropped<'a>(&'a BTreeMap<IndexForm, u64>);

impl Serialize for Dropped<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|(t, n)| ([t.a, t.b, t.c], n)))
    }
}

impl Serialize for SymbolicQExp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let dropped: BTreeMap<u32, Dropped> = self
            .dropped
            .iter()
            .filter(|(_, m)| !m.is_empty())
            .map(|(j, m)| (*j, Dropped(m)))
            .collect();
        let mut m = s.serialize_map(Some(6))?;
        m.serialize_entry("level", &self.level)?;
        m.serialize_entry("weight", &self.weight)?;
        m.serialize_entry("jmax", &self.jmax)?;
        m.serialize_entry("variables", &self.variables)?;
        m.serialize_entry("coeffs", &JKey(&self.coeffs))?;
        m.serialize_entry("dropped", &JKey(&dropped))?;
        m.end()
    }
}

/// Number of positive definite v with <v, s> = j, grouped by reduced class.
pub fn vcount_all(j: u32, s: &SendingMatrix) -> BTreeMap<IndexForm, u64> {
    let j = j as i64;
    let mut out = BTreeMap::new();
    // tr(v/2) <= j tr(s) / det(s), since the smallest eigenvalue of s is at least det/tr.
    let trace_cap = 2 * j * s.trace() / s.det();
    let mut a = 2;
    while a + 2 <= trace_cap {
        let mut c = 2;
        while a + c <= trace_cap {
            let rest = 2 * j - a * s.s1 - c * s.s4;
            let mut visit = |b: i64| {
                if a * c - b * b > 0 {
                    let v = IndexForm { a, b, c };
                    *out.entry(v.reduce()).or_insert(0) += 1;
                }
            };
            if s.s2 != 0 {
                if rest % (2 * s.s2) == 0 {
                    visit(rest / (2 * s.s2));
                }
            } else if rest == 0 {
                let mut b = 0;
                while b * b < a * c {
                    b += 1;
                }
                for b in -(b - 1)..=(b - 1) {
                    visit(b);
                }
            }
            c += 2;
        }
        a += 2;
    }
    out
}

/// Number of positive definite v in the class of `t` with <v, s> = j.
pub fn vcount(j: u32, s: &SendingMatrix, t: &IndexForm) -> u64 {
    vcount_all(j, s).get(&t.reduce()).copied().unwrap_or(0)
}

/// Candidate box used by the oracle count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OracleBounds {
    /// Candidate and unimodular entry ranges derived per case from positivity.
    Derived,
    /// Fixed box: a in [2, a_max] even, b in [-b_max, b_max], d in [2, d_max] even,
    /// unimodular entries in [-u_max, u_max].
    Fixed { a_max: i64, b_max: i64, d_max: i64, u_max: i64 },
}

impl OracleBounds {
    /// The fixed box used by the original search program that printed the
    /// level-13 tables.
    pub const LEGACY_BOX: OracleBounds = OracleBounds::Fixed { a_max: 10, b_max: 10, d_max: 10, u_max: 8 };
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCount {
    pub count: u64,
    pub candidates: u64,
    pub bounds: OracleBounds,
    /// Largest candidate entries and unimodular entry radius actually used.
    pub a_max: i64,
    pub b_max: i64,
    pub d_max: i64,
    pub u_max: i64,
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Finds a unimodular U with U V U^t = T by direct search over rows of U.
fn unimodular_witness(v: (i64, i64, i64), t: &IndexForm, radius: Option<i64>) -> Option<[i64; 4]> {
    let (a, b, d) = v;
    let q = |x: i64, y: i64| a * x * x + 2 * b * x * y + d * y * y;
    // q(x, y) >= det/tr (x^2 + y^2), which bounds rows representing t.a and t.c.
    let det = a * d - b * b;
    let row_radius = |target: i64| -> i64 {
        match radius {
            Some(r) => r,
            None => isqrt(target * (a + d) / det) + 1,
        }
    };
    let rows = |target: i64| -> Vec<(i64, i64)> {
        let r = row_radius(target);
        let mut out = Vec::new();
        for x in -r..=r {
            for y in -r..=r {
                if q(x, y) == target {
                    out.push((x, y));
                }
            }
        }
        out
    };
    let first = rows(t.a);
    let second = rows(t.c);
    for &(m, n) in &first {
        for &(o, p) in &second {
            let du = m * p - n * o;
            if du != 1 && du != -1 {
                continue;
            }
            let cross = a * m * o + b * (m * p + n * o) + d * n * p;
            if cross == t.b {
                return Some([m, n, o, p]);
            }
        }
    }
    None
}

/// Counts v with <v, s> = j that are unimodularly equivalent to `t`, searching
/// for an explicit transformation for each candidate. Does not use reduction.
pub fn vcount_oracle(j: u32, s: &SendingMatrix, t: &IndexForm, bounds: OracleBounds) -> OracleCount {
    let j = j as i64;
    let (a_max, b_max, d_max, radius) = match bounds {
        OracleBounds::Fixed { a_max, b_max, d_max, u_max } => (a_max, b_max, d_max, Some(u_max)),
        OracleBounds::Derived => {
            // a s1 + 2 b s2 + d s4 = 2j with V, S positive: a + d <= 2j (s1 + s4) / det(s).
            let cap = 2 * j * (s.s1 + s.s4) / (s.s1 * s.s4 - s.s2 * s.s2);
            (cap, cap / 2, cap, None)
        }
    };
    let mut count = 0;
    let mut candidates = 0;
    let mut used_u = 0;
    for a in (2..=a_max).step_by(2) {
        for b in -b_max..=b_max {
            for d in (2..=d_max).step_by(2) {
                if a * d - b * b <= 0 || a * s.s1 + 2 * b * s.s2 + d * s.s4 != 2 * j {
                    continue;
                }
                candidates += 1;
                if let Some(r) = radius {
                    used_u = r;
                } else {
                    let det = a * d - b * b;
                    used_u = used_u.max(isqrt(t.a.max(t.c) * (a + d) / det) + 1);
                }
                if unimodular_witness((a, b, d), t, radius).is_some() {
                    count += 1;
                }
            }
        }
    }
    OracleCount { count, candidates, bounds, a_max, b_max, d_max, u_max: used_u }
}

/// Default truncation: one past the largest <t, s> over the variable set.
pub fn default_jmax(det: &DeterminingSet, s: &SendingMatrix) -> u32 {
    det.forms.iter().map(|t| inner_int(t, s)).max().unwrap_or(0) as u32 + 1
}

/// Restriction expansion up to q^jmax in the determining-set variables.
pub fn restrict_expansion(det: &DeterminingSet, s: &SendingMatrix, jmax: Option<u32>) -> SymbolicQExp {
    let jmax = jmax.unwrap_or_else(|| default_jmax(det, s));
    let per_j: Vec<(u32, BTreeMap<IndexForm, u64>)> =
        (1..=jmax).into_par_iter().map(|j| (j, vcount_all(j, s))).collect();
    assemble(det, s, jmax, per_j)
}

/// The same expansion with every count taken from `vcount_oracle` under `bounds`.
pub fn restrict_expansion_oracle(
    det: &DeterminingSet,
    s: &SendingMatrix,
    jmax: u32,
    bounds: OracleBounds,
) -> SymbolicQExp {
    let per_j: Vec<(u32, BTreeMap<IndexForm, u64>)> = (1..=jmax)
        .into_par_iter()
        .map(|j| {
            let m = det
                .forms
                .iter()
                .map(|t| (*t, vcount_oracle(j, s, t, bounds).count))
                .filter(|(_, n)| *n > 0)
                .collect();
            (j, m)
        })
        .collect();
    assemble(det, s, jmax, per_j)
}

fn assemble(
    det: &DeterminingSet,
    s: &SendingMatrix,
    jmax: u32,
    per_j: Vec<(u32, BTreeMap<IndexForm, u64>)>,
) -> SymbolicQExp {
    let mut coeffs = BTreeMap::new();
    let mut dropped = BTreeMap::new();
    for (j, counts) in per_j {
        let mut f = LinForm::new();
        let mut out = BTreeMap::new();
        for (t, n) in counts {
            if det.forms.binary_search(&t).is_ok() {
                f.add_term(t, &CycNum::from_int(1, n as i64));
            } else {
                out.insert(t, n);
            }
        }
        if !f.is_zero() {
            coeffs.insert(j, f);
        }
        dropped.insert(j, out);
    }
    SymbolicQExp {
        level: det.level * s.det() as u64,
        weight: 2 * det.weight,
        jmax,
        variables: det.forms.clone(),
        coeffs,
        dropped,
    }
}
