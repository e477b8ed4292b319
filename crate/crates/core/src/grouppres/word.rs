use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GroupError;

/// One letter of the folded alphabet: a signed base generator (1-based) or
/// a power of a stable letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    Base(i32),
    Stable { cusp: usize, power: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Syllable {
    Base { letters: Vec<i32> },
    Stable { cusp: usize, power: i64 },
}

/// m_1 t^{k_1} m_2 ... m_l, kept in canonical alternating form: base
/// syllables freely reduced, stable exponents nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    bases: Vec<Vec<i32>>,
    stables: Vec<(usize, i64)>,
}

fn push_base(cur: &mut Vec<i32>, l: i32) {
    if cur.last() == Some(&-l) {
        cur.pop();
    } else {
        cur.push(l);
    }
}

impl Word {
    pub fn empty() -> Word {
        Word {
            bases: vec![Vec::new()],
            stables: Vec::new(),
        }
    }

    /// Normalizes an arbitrary letter sequence: free reduction, merging of
    /// adjacent stable powers, dropping zero powers.
    pub fn from_letters(letters: &[Letter]) -> Result<Word, GroupError> {
        let mut bases: Vec<Vec<i32>> = Vec::new();
        let mut stables: Vec<(usize, i64)> = Vec::new();
        let mut cur: Vec<i32> = Vec::new();
        for l in letters {
            match *l {
                Letter::Base(0) => return Err(GroupError::Malformed("letter 0".into())),
                Letter::Base(g) => push_base(&mut cur, g),
                Letter::Stable { power: 0, .. } => {}
                Letter::Stable { cusp, power } => {
                    if cur.is_empty() && stables.last().map(|s| s.0) == Some(cusp) {
                        let last = stables.last_mut().expect("checked");
                        last.1 += power;
                        if last.1 == 0 {
                            stables.pop();
                            cur = bases.pop().expect("one base per stable");
                        }
                    } else {
                        bases.push(std::mem::take(&mut cur));
                        stables.push((cusp, power));
                    }
                }
            }
        }
        bases.push(cur);
        Ok(Word { bases, stables })
    }

    pub fn from_syllables(s: &[Syllable]) -> Result<Word, GroupError> {
        let mut letters = Vec::new();
        for syl in s {
            match syl {
                Syllable::Base { letters: ls } => {
                    letters.extend(ls.iter().map(|&g| Letter::Base(g)))
                }
                Syllable::Stable { cusp, power } => letters.push(Letter::Stable {
                    cusp: *cusp,
                    power: *power,
                }),
            }
        }
        Word::from_letters(&letters)
    }

    /// Builds directly from parts that are already canonical.
    pub(crate) fn from_parts(bases: Vec<Vec<i32>>, stables: Vec<(usize, i64)>) -> Word {
        debug_assert_eq!(bases.len(), stables.len() + 1);
        Word { bases, stables }
    }

    pub fn base(letters: &[i32]) -> Result<Word, GroupError> {
        Word::from_letters(&letters.iter().map(|&g| Letter::Base(g)).collect::<Vec<_>>())
    }

    pub fn stable(cusp: usize, power: i64) -> Word {
        Word::from_letters(&[Letter::Stable { cusp, power }]).expect("stable letters are valid")
    }

    pub fn bases(&self) -> &[Vec<i32>] {
        &self.bases
    }

    pub fn stables(&self) -> &[(usize, i64)] {
        &self.stables
    }

    pub fn is_empty(&self) -> bool {
        self.stables.is_empty() && self.bases[0].is_empty()
    }

    /// Number of base syllables (0 for the empty word).
    pub fn ell(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.bases.len()
        }
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for (i, b) in self.bases.iter().enumerate() {
            out.extend(b.iter().map(|&g| Letter::Base(g)));
            if let Some(&(cusp, power)) = self.stables.get(i) {
                out.push(Letter::Stable { cusp, power });
            }
        }
        out
    }

    /// Canonical syllable list; empty base syllables are left out.
    pub fn syllables(&self) -> Vec<Syllable> {
        let mut out = Vec::new();
        for (i, b) in self.bases.iter().enumerate() {
            if !b.is_empty() {
                out.push(Syllable::Base { letters: b.clone() });
            }
            if let Some(&(cusp, power)) = self.stables.get(i) {
                out.push(Syllable::Stable { cusp, power });
            }
        }
        out
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut l = self.letters();
        l.extend(other.letters());
        Word::from_letters(&l).expect("letters of valid words")
    }

    pub fn inverse(&self) -> Word {
        let l: Vec<Letter> = self
            .letters()
            .into_iter()
            .rev()
            .map(|l| match l {
                Letter::Base(g) => Letter::Base(-g),
                Letter::Stable { cusp, power } => Letter::Stable {
                    cusp,
                    power: -power,
                },
            })
            .collect();
        Word::from_letters(&l).expect("letters of valid words")
    }

    pub fn max_base_letter(&self) -> usize {
        self.bases
            .iter()
            .flatten()
            .map(|g| g.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }
}

/// 2l - 1, or 0 for the empty word.
pub fn syllable_length(w: &Word) -> usize {
    match w.ell() {
        0 => 0,
        l => 2 * l - 1,
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for (i, b) in self.bases.iter().enumerate() {
            if !b.is_empty() {
                let ls: Vec<String> = b.iter().map(|g| g.to_string()).collect();
                parts.push(format!("[{}]", ls.join(",")));
            }
            if let Some((c, k)) = self.stables.get(i) {
                parts.push(format!("t{c}^{k}"));
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.syllables().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = Vec::<Syllable>::deserialize(d)?;
        Word::from_syllables(&s).map_err(serde::de::Error::custom)
    }
}

/// Letters of the double: two copies of the base group and stable letters
/// t_1, ..., t_{n-1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DmLetter {
    First { letter: i32 },
    Second { letter: i32 },
    Stable { cusp: usize, power: i64 },
}

pub type DmWord = Vec<DmLetter>;

pub fn dm_word_to_string(w: &[DmLetter]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter()
        .map(|l| match l {
            DmLetter::First { letter } => format!("{letter}"),
            DmLetter::Second { letter } => format!("{letter}'"),
            DmLetter::Stable { cusp, power } => format!("t{cusp}^{power}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(c: usize, k: i64) -> Letter {
        Letter::Stable { cusp: c, power: k }
    }

    #[test]
    fn normalization() {
        let w =
            Word::from_letters(&[Letter::Base(1), Letter::Base(-1), st(0, 2), st(0, -2)]).unwrap();
        assert!(w.is_empty());
        let w = Word::from_letters(&[
            Letter::Base(2),
            st(0, 1),
            Letter::Base(1),
            Letter::Base(-1),
            st(0, 1),
            Letter::Base(2),
        ])
        .unwrap();
        assert_eq!(w.stables(), &[(0, 2)]);
        assert_eq!(w.bases(), &[vec![2], vec![2]]);
        let w =
            Word::from_letters(&[Letter::Base(2), st(0, 1), st(0, -1), Letter::Base(-2)]).unwrap();
        assert!(w.is_empty());
        assert!(Word::from_letters(&[Letter::Base(0)]).is_err());
    }

    #[test]
    fn lengths() {
        assert_eq!(syllable_length(&Word::empty()), 0);
        assert_eq!(syllable_length(&Word::base(&[1, 2]).unwrap()), 1);
        let w = Word::base(&[1])
            .unwrap()
            .concat(&Word::stable(0, 3))
            .concat(&Word::base(&[2]).unwrap());
        assert_eq!(syllable_length(&w), 3);
        assert_eq!(syllable_length(&Word::stable(1, 3)), 3);
    }

    #[test]
    fn json() {
        let w = Word::base(&[1]).unwrap().concat(&Word::stable(1, -2));
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(
            s,
            r#"[{"kind":"base","letters":[1]},{"kind":"stable","cusp":1,"power":-2}]"#
        );
        let back: Word = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert!(w.concat(&w.inverse()).is_empty());
    }
}
