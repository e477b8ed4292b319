use super::{Group, GroupError, Word};

/// Sort key of a base letter: 1, -1, 2, -2, ...
pub fn letter_order(l: i32) -> u32 {
    2 * (l.unsigned_abs() - 1) + u32::from(l < 0)
}

/// The finite alphabet a bounded enumeration draws from.
#[derive(Debug, Clone)]
pub struct WordSpace {
    /// Freely reduced base words of length <= B, shortest first, then
    /// lexicographic in `letter_order`; index 0 is the empty syllable.
    pub base_syllables: Vec<Vec<i32>>,
    /// (cusp, power) ordered by cusp, then 1, -1, 2, -2, ...
    pub stables: Vec<(usize, i64)>,
    /// member[s][r]: base syllable s lies in the cusp subgroup P_r.
    pub member: Vec<Vec<bool>>,
}

impl WordSpace {
    pub fn new(g: &Group, max_power: i64, max_letters: usize) -> Result<WordSpace, GroupError> {
        let mut alphabet: Vec<i32> = (1..=g.base_count() as i32).flat_map(|i| [i, -i]).collect();
        alphabet.sort_by_key(|&l| letter_order(l));
        let mut base_syllables = vec![Vec::new()];
        let mut layer: Vec<Vec<i32>> = vec![Vec::new()];
        for _ in 0..max_letters {
            let mut next = Vec::new();
            for w in &layer {
                for &l in &alphabet {
                    if w.last() != Some(&-l) {
                        let mut v = w.clone();
                        v.push(l);
                        next.push(v);
                    }
                }
            }
            base_syllables.extend(next.iter().cloned());
            layer = next;
        }
        let mut stables = Vec::new();
        for c in 0..g.cusp_count() {
            for k in 1..=max_power {
                stables.push((c, k));
                stables.push((c, -k));
            }
        }
        let member = base_syllables
            .iter()
            .map(|s| {
                (0..g.cusp_count())
                    .map(|r| g.in_cusp_subgroup(s, r))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WordSpace {
            base_syllables,
            stables,
            member,
        })
    }

    /// Whether base syllable `m` may sit between stables `a` and `b`
    /// without creating a Britton pinch.
    pub fn allowed_middle(&self, a: usize, m: usize, b: usize) -> bool {
        let (ra, _) = self.stables[a];
        let (rb, _) = self.stables[b];
        ra != rb || !self.member[m][ra]
    }

    pub fn word(&self, bases: &[usize], stables: &[usize]) -> Word {
        Word::from_parts(
            bases
                .iter()
                .map(|&i| self.base_syllables[i].clone())
                .collect(),
            stables.iter().map(|&i| self.stables[i]).collect(),
        )
    }
}

/// Reduced words of syllable length <= L: the empty word, then by l
/// ascending, each level in odometer order m_1, t_1, m_2, ..., m_l.
pub struct WordEnumerator {
    space: WordSpace,
    max_ell: usize,
    ell: usize,
    digits: Vec<usize>,
    started: bool,
    done: bool,
}

impl WordEnumerator {
    pub fn space(&self) -> &WordSpace {
        &self.space
    }

    fn radix(&self, pos: usize) -> usize {
        if pos.is_multiple_of(2) {
            self.space.base_syllables.len()
        } else {
            self.space.stables.len()
        }
    }

    fn valid(&self) -> bool {
        if self.ell == 1 {
            return self.digits[0] != 0;
        }
        (1..self.ell - 1).all(|i| {
            self.space.allowed_middle(
                self.digits[2 * i - 1],
                self.digits[2 * i],
                self.digits[2 * i + 1],
            )
        })
    }

    fn step(&mut self) -> bool {
        for pos in (0..self.digits.len()).rev() {
            self.digits[pos] += 1;
            if self.digits[pos] < self.radix(pos) {
                return true;
            }
            self.digits[pos] = 0;
        }
        false
    }

    fn current(&self) -> Word {
        let bases: Vec<usize> = self.digits.iter().step_by(2).copied().collect();
        let stables: Vec<usize> = self.digits.iter().skip(1).step_by(2).copied().collect();
        self.space.word(&bases, &stables)
    }
}

impl Iterator for WordEnumerator {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(Word::empty());
        }
        loop {
            if self.ell == 0 || !self.step() {
                self.ell += 1;
                if self.ell > self.max_ell || (self.ell > 1 && self.space.stables.is_empty()) {
                    self.done = true;
                    return None;
                }
                self.digits = vec![0; 2 * self.ell - 1];
            }
            if self.valid() {
                return Some(self.current());
            }
        }
    }
}

pub fn enumerate_reduced_words(
    g: &Group,
    max_len: usize,
    max_power: i64,
    max_letters: usize,
) -> Result<WordEnumerator, GroupError> {
    let space = WordSpace::new(g, max_power, max_letters)?;
    let max_ell = max_len.div_ceil(2);
    Ok(WordEnumerator {
        space,
        max_ell,
        ell: 0,
        digits: Vec::new(),
        started: false,
        done: false,
    })
}
