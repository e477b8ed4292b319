use serde::Serialize;

use super::{dm_word_to_string, DmLetter, DmWord, Group, GroupError, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PresentationKind {
    #[serde(rename = "double")]
    Double,
    #[serde(rename = "folded")]
    Folded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Presentation {
    pub kind: PresentationKind,
    pub generators: Vec<String>,
    /// Human readable relators, in the same order as the word lists.
    pub relators: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub folded_relators: Vec<Word>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub double_relators: Vec<DmWord>,
    pub spanning_tree: Option<String>,
}

fn invert_letters(w: &[i32]) -> Vec<i32> {
    w.iter().rev().map(|&l| -l).collect()
}

fn base_names(g: &Group) -> Vec<String> {
    g.config()
        .base_generators
        .iter()
        .map(|b| b.name.clone())
        .collect()
}

/// pi1(M) with stable letters t_0..t_{N-1} and relators [t_i, c] over the
/// generators c of each cusp subgroup.
pub fn folded_presentation(g: &Group) -> Presentation {
    let mut generators = base_names(g);
    generators.extend((0..g.cusp_count()).map(|i| format!("t{i}")));
    let mut words = Vec::new();
    for i in 0..g.cusp_count() {
        for c in g.cusp_generator_words(i) {
            let mut l = vec![Letter::Stable { cusp: i, power: 1 }];
            l.extend(c.iter().map(|&x| Letter::Base(x)));
            l.push(Letter::Stable { cusp: i, power: -1 });
            l.extend(invert_letters(c).into_iter().map(Letter::Base));
            words.push(Word::from_letters(&l).expect("valid letters"));
        }
    }
    let mut relators = Vec::new();
    for i in 0..g.cusp_count() {
        for c in g.cusp_generator_words(i) {
            relators.push(format!("[t{i}, {c:?}]"));
        }
    }
    Presentation {
        kind: PresentationKind::Folded,
        generators,
        relators,
        folded_relators: words,
        double_relators: Vec::new(),
        spanning_tree: None,
    }
}

/// Two copies of pi1(M) amalgamated along cusp 0, with stable letters
/// t_1..t_{N-1} for the remaining cusps; t_0 is the spanning tree edge.
pub fn double_presentation(g: &Group) -> Result<Presentation, GroupError> {
    if g.cusp_count() == 0 {
        return Err(GroupError::NoCusps);
    }
    let names = base_names(g);
    let mut generators = names.clone();
    generators.extend(names.iter().map(|n| format!("{n}'")));
    generators.extend((1..g.cusp_count()).map(|i| format!("t{i}")));
    let mut words = Vec::new();
    for i in 0..g.cusp_count() {
        for c in g.cusp_generator_words(i) {
            let mut w: DmWord = Vec::new();
            if i > 0 {
                w.push(DmLetter::Stable { cusp: i, power: 1 });
            }
            w.extend(c.iter().map(|&l| DmLetter::First { letter: l }));
            if i > 0 {
                w.push(DmLetter::Stable { cusp: i, power: -1 });
            }
            w.extend(
                invert_letters(c)
                    .into_iter()
                    .map(|l| DmLetter::Second { letter: l }),
            );
            words.push(w);
        }
    }
    Ok(Presentation {
        kind: PresentationKind::Double,
        generators,
        relators: words.iter().map(|w| dm_word_to_string(w)).collect(),
        folded_relators: Vec::new(),
        double_relators: words,
        spanning_tree: Some("t0".into()),
    })
}

/// m -> m, m' -> t_0^-1 m t_0, t_i -> t_0^-1 t_i.
pub fn dm_to_fm(w: &[DmLetter], g: &Group) -> Result<Word, GroupError> {
    let t0 = |power| Letter::Stable { cusp: 0, power };
    let mut out = Vec::new();
    for l in w {
        match *l {
            DmLetter::First { letter } | DmLetter::Second { letter }
                if letter == 0 || letter.unsigned_abs() as usize > g.base_count() =>
            {
                return Err(GroupError::Malformed(format!("base letter {letter}")));
            }
            DmLetter::First { letter } => out.push(Letter::Base(letter)),
            DmLetter::Second { letter } => {
                out.push(t0(-1));
                out.push(Letter::Base(letter));
                out.push(t0(1));
            }
            DmLetter::Stable { cusp, power } => {
                if cusp == 0 || cusp >= g.cusp_count() {
                    return Err(GroupError::Malformed(format!(
                        "t{cusp} is not a stable letter of the double"
                    )));
                }
                for _ in 0..power.unsigned_abs() {
                    if power > 0 {
                        out.push(t0(-1));
                        out.push(Letter::Stable { cusp, power: 1 });
                    } else {
                        out.push(Letter::Stable { cusp, power: -1 });
                        out.push(t0(1));
                    }
                }
            }
        }
    }
    Word::from_letters(&out)
}
