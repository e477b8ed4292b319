//! Folded double presentations, Britton reduction and word enumeration.

mod enumerate;
mod present;
pub mod toy;
mod word;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use enumerate::{enumerate_reduced_words, letter_order, WordEnumerator, WordSpace};
pub use present::{
    dm_to_fm, double_presentation, folded_presentation, Presentation, PresentationKind,
};
pub use word::{dm_word_to_string, syllable_length, DmLetter, DmWord, Letter, Syllable, Word};

use crate::lattice::{cusp_membership, preserves_form, CuspData, ExactMatrix, LatticeError};
use crate::qforms::DiagonalForm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("malformed word: {0}")]
    Malformed(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("faithfulness violation on word {word}: {reason}")]
    FaithfulnessViolation { word: String, reason: String },
    #[error("the double needs at least one cusp")]
    NoCusps,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: ExactMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CuspSpec {
    #[serde(with = "crate::io::rational_vec_str")]
    pub point: Vec<BigRational>,
    /// Cusp subgroup generators as words in the base generators.
    pub generators: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepBounds {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "E")]
    pub e: i64,
    #[serde(rename = "B")]
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroupConfig {
    pub form: DiagonalForm,
    pub subform_indices: Vec<usize>,
    pub base_generators: Vec<NamedMatrix>,
    pub cusps: Vec<CuspSpec>,
    pub stable_letters: Vec<ExactMatrix>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBounds>,
}

impl GroupConfig {
    pub fn from_json(s: &str) -> Result<GroupConfig, GroupError> {
        serde_json::from_str(s).map_err(|e| GroupError::Invalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// A validated configuration with cached inverses and cusp data.
#[derive(Debug, Clone)]
pub struct Group {
    cfg: GroupConfig,
    base_inv: Vec<ExactMatrix>,
    stable_inv: Vec<ExactMatrix>,
    cusps: Vec<CuspData>,
}

fn invalid(s: String) -> GroupError {
    GroupError::Invalid(s)
}

impl Group {
    pub fn new(cfg: GroupConfig) -> Result<Group, GroupError> {
        let q = cfg.form.clone();
        let q = &q;
        let n = q.rank();
        let mut seen = vec![false; n];
        for &i in &cfg.subform_indices {
            if i >= n || seen[i] {
                return Err(invalid(format!("bad subform index {i}")));
            }
            seen[i] = true;
        }
        for (j, g) in cfg.base_generators.iter().enumerate() {
            let m = &g.matrix;
            if m.dim() != n || !preserves_form(m, q)? {
                return Err(invalid(format!(
                    "base generator {} does not preserve q",
                    g.name
                )));
            }
            for &c in &cfg.subform_indices {
                for r in 0..n {
                    if !seen[r] && !num_traits::Zero::is_zero(m.get(r, c)) {
                        return Err(invalid(format!(
                            "base generator {j} ({}) does not preserve H_G",
                            g.name
                        )));
                    }
                }
            }
        }
        if cfg.stable_letters.len() != cfg.cusps.len() {
            return Err(invalid(format!(
                "{} stable letters for {} cusps",
                cfg.stable_letters.len(),
                cfg.cusps.len()
            )));
        }
        for (i, t) in cfg.stable_letters.iter().enumerate() {
            if t.dim() != n || !preserves_form(t, q)? {
                return Err(invalid(format!("stable letter {i} does not preserve q")));
            }
        }
        let base_inv = cfg
            .base_generators
            .iter()
            .map(|g| g.matrix.inverse())
            .collect::<Result<Vec<_>, _>>()?;
        let stable_inv = cfg
            .stable_letters
            .iter()
            .map(|g| g.inverse())
            .collect::<Result<Vec<_>, _>>()?;
        let mut group = Group {
            cfg,
            base_inv,
            stable_inv,
            cusps: Vec::new(),
        };
        let mut cusps = Vec::new();
        for (i, c) in group.cfg.cusps.iter().enumerate() {
            let gens = c
                .generators
                .iter()
                .map(|w| group.evaluate_base(w))
                .collect::<Result<Vec<_>, _>>()?;
            let t = &group.cfg.stable_letters[i];
            for (j, g) in gens.iter().enumerate() {
                if (t * g) != (g * t) {
                    return Err(invalid(format!(
                        "stable letter {i} does not commute with cusp generator {j}"
                    )));
                }
            }
            cusps.push(CuspData::new(q, i, c.point.clone(), gens)?);
        }
        group.cusps = cusps;
        Ok(group)
    }

    pub fn config(&self) -> &GroupConfig {
        &self.cfg
    }

    pub fn form(&self) -> &DiagonalForm {
        &self.cfg.form
    }

    pub fn dim(&self) -> usize {
        self.cfg.form.rank()
    }

    pub fn base_count(&self) -> usize {
        self.cfg.base_generators.len()
    }

    pub fn cusp_count(&self) -> usize {
        self.cfg.cusps.len()
    }

    pub fn cusp(&self, i: usize) -> &CuspData {
        &self.cusps[i]
    }

    pub fn cusp_generator_words(&self, i: usize) -> &[Vec<i32>] {
        &self.cfg.cusps[i].generators
    }

    pub fn base_letter(&self, l: i32) -> Result<&ExactMatrix, GroupError> {
        let i = l.unsigned_abs() as usize;
        if l == 0 || i > self.base_count() {
            return Err(GroupError::IndexOutOfRange(format!("base letter {l}")));
        }
        Ok(if l > 0 {
            &self.cfg.base_generators[i - 1].matrix
        } else {
            &self.base_inv[i - 1]
        })
    }

    pub fn stable_power(&self, cusp: usize, k: i64) -> Result<ExactMatrix, GroupError> {
        if cusp >= self.cusp_count() {
            return Err(GroupError::IndexOutOfRange(format!(
                "stable letter t{cusp}"
            )));
        }
        let m = if k >= 0 {
            &self.cfg.stable_letters[cusp]
        } else {
            &self.stable_inv[cusp]
        };
        Ok(m.pow(k.abs())?)
    }

    pub fn evaluate_base(&self, letters: &[i32]) -> Result<ExactMatrix, GroupError> {
        let mut m = ExactMatrix::identity(self.dim());
        for &l in letters {
            m = &m * self.base_letter(l)?;
        }
        Ok(m)
    }

    /// Same configuration with the stable letters replaced.
    pub fn with_stable_letters(&self, stables: Vec<ExactMatrix>) -> Result<Group, GroupError> {
        let mut cfg = self.cfg.clone();
        cfg.stable_letters = stables;
        Group::new(cfg)
    }

    /// Whether the base syllable lies in the cusp subgroup P_r.
    pub fn in_cusp_subgroup(&self, letters: &[i32], r: usize) -> Result<bool, GroupError> {
        let m = self.evaluate_base(letters)?;
        Ok(cusp_membership(&m, &self.cusps[r])?.is_some())
    }
}

pub fn evaluate(w: &Word, g: &Group) -> Result<ExactMatrix, GroupError> {
    let mut m = ExactMatrix::identity(g.dim());
    for (i, b) in w.bases().iter().enumerate() {
        if !b.is_empty() {
            m = &m * &g.evaluate_base(b)?;
        }
        if let Some(&(c, k)) = w.stables().get(i) {
            m = &m * &g.stable_power(c, k)?;
        }
    }
    Ok(m)
}

/// Repeatedly rewrites t_r^k m t_r^k' with m in P_r to t_r^(k+k') m,
/// scanning left to right and restarting after each rewrite.
pub fn britton_reduce(w: &Word, g: &Group) -> Result<Word, GroupError> {
    for &(c, _) in w.stables() {
        if c >= g.cusp_count() {
            return Err(GroupError::IndexOutOfRange(format!("stable letter t{c}")));
        }
    }
    if w.max_base_letter() > g.base_count() {
        return Err(GroupError::IndexOutOfRange(format!(
            "base letter {}",
            w.max_base_letter()
        )));
    }
    let mut cur = w.clone();
    'outer: loop {
        let st = cur.stables();
        for i in 0..st.len().saturating_sub(1) {
            let r = st[i].0;
            if st[i + 1].0 != r || !g.in_cusp_subgroup(&cur.bases()[i + 1], r)? {
                continue;
            }
            let mut letters = Vec::new();
            for j in 0..=i {
                letters.extend(cur.bases()[j].iter().map(|&l| Letter::Base(l)));
                if j < i {
                    let (cusp, power) = st[j];
                    letters.push(Letter::Stable { cusp, power });
                }
            }
            letters.push(Letter::Stable {
                cusp: r,
                power: st[i].1 + st[i + 1].1,
            });
            for j in i + 1..cur.bases().len() {
                letters.extend(cur.bases()[j].iter().map(|&l| Letter::Base(l)));
                if j > i + 1 {
                    if let Some(&(cusp, power)) = st.get(j) {
                        letters.push(Letter::Stable { cusp, power });
                    }
                }
            }
            cur = Word::from_letters(&letters)?;
            continue 'outer;
        }
        return Ok(cur);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityVerdict {
    pub identity: bool,
    pub reason: String,
    pub reduced: Word,
}

/// Britton criterion on the reduced word, cross-checked against the exact
/// matrix image.
pub fn is_identity(w: &Word, g: &Group) -> Result<IdentityVerdict, GroupError> {
    let reduced = britton_reduce(w, g)?;
    let (identity, reason) = if reduced.is_empty() {
        (true, "empty word".to_string())
    } else if reduced.ell() == 1 {
        if g.evaluate_base(&reduced.bases()[0])?.is_identity() {
            (true, "ℓ=1, m₁=1".to_string())
        } else {
            (false, "ℓ=1, m₁≠1".to_string())
        }
    } else {
        (false, format!("reduced with ℓ={}", reduced.ell()))
    };
    let matrix_identity = evaluate(w, g)?.is_identity();
    if matrix_identity != identity {
        return Err(GroupError::FaithfulnessViolation {
            word: w.to_string(),
            reason: format!(
                "Britton criterion says {identity}, matrix image says {matrix_identity}"
            ),
        });
    }
    Ok(IdentityVerdict {
        identity,
        reason,
        reduced,
    })
}
