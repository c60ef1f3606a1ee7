//! Return words to the seed letter and the induced return substitution.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, RowVector};
use crate::words::{expand_prefix, Alphabet, FixedPointSeed, Letter, Substitution, Word};

/// Return words `R_a` in discovery order together with the return substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnSystem {
    /// The substitution the system was computed for (already raised to the seed power).
    pub base: Substitution,
    pub seed_letter: Letter,
    pub words: Vec<Word>,
    /// Return substitution over the index alphabet `0..words.len()`.
    pub tau: Substitution,
    pub m_tau: IntMatrix,
    /// `|w|` for each return word, in index order.
    pub lengths: RowVector,
    index: HashMap<Word, usize>,
}

impl ReturnSystem {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, w: &[Letter]) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn render_word(&self, i: usize) -> String {
        self.base.alphabet().render(&self.words[i])
    }
}

/// Splits a word at every occurrence of `a`; each piece starts with `a`.
fn split_at_letter(w: &[Letter], a: Letter) -> Result<Vec<&[Letter]>> {
    if w.first() != Some(&a) {
        return Err(Error::NotStartingWithSeed);
    }
    let mut pieces = Vec::new();
    let mut start = 0;
    for (i, &l) in w.iter().enumerate().skip(1) {
        if l == a {
            pieces.push(&w[start..i]);
            start = i;
        }
    }
    pieces.push(&w[start..]);
    Ok(pieces)
}

/// The prefix of the fixed point before the second occurrence of the seed letter.
pub fn first_return_word(phi: &Substitution, seed: &FixedPointSeed) -> Result<Word> {
    if !phi.is_growing() {
        return Err(Error::FiniteSystem);
    }
    let psi = phi.power(seed.power);
    // The first return word lies inside ψ^d(a).
    let mut window = RowVector::ones(psi.size());
    let m = psi.incidence_matrix();
    for _ in 0..psi.size() {
        window = window.mul_matrix(&m)?;
    }
    let limit = window.0[seed.letter].to_usize().unwrap_or(usize::MAX);
    let mut len = 16usize.min(limit);
    loop {
        let prefix = expand_prefix(phi, seed, len)?;
        if let Some(pos) = prefix.iter().skip(1).position(|&l| l == seed.letter) {
            return Ok(Word(prefix[..pos + 1].to_vec()));
        }
        if len >= limit {
            return Err(Error::ContractViolation(format!(
                "no second occurrence of the seed letter within {limit} letters"
            )));
        }
        len = len.saturating_mul(2).min(limit);
    }
}

/// Factorises `w` over the known return words.
pub fn factorize_over_returns(rs: &ReturnSystem, w: &[Letter]) -> Result<Vec<usize>> {
    split_at_letter(w, rs.seed_letter)?
        .into_iter()
        .map(|piece| {
            rs.index_of(piece)
                .ok_or_else(|| Error::UnknownReturnWord(rs.base.alphabet().render(piece)))
        })
        .collect()
}

/// Upper bound `2d²|φ|^d` on the number of return words.
fn return_word_bound(psi: &Substitution) -> BigUint {
    let d = psi.size() as u32;
    BigUint::from(2u32) * BigUint::from(d * d) * BigUint::from(psi.max_image_len()).pow(d)
}

/// Computes `R_a` by the worklist procedure: starting from the first return
/// word, factorise `φ(w)` for every known `w` in FIFO order and append unseen
/// segments in order of appearance.
pub fn compute_return_system(phi: &Substitution, seed: &FixedPointSeed) -> Result<ReturnSystem> {
    if !phi.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let first = first_return_word(phi, seed)?;
    let psi = phi.power(seed.power);
    let a = seed.letter;
    let bound = return_word_bound(&psi);

    let mut words: Vec<Word> = vec![first.clone()];
    let mut index: HashMap<Word, usize> = HashMap::from([(first, 0)]);
    let mut rules: Vec<Vec<usize>> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        let image = psi.apply(&words[i])?;
        let mut rule = Vec::new();
        for piece in split_at_letter(&image, a)? {
            let j = match index.get(piece) {
                Some(&j) => j,
                None => {
                    let j = words.len();
                    if BigUint::from(j + 1) > bound {
                        return Err(Error::ContractViolation(format!(
                            "more than {bound} return words"
                        )));
                    }
                    words.push(Word(piece.to_vec()));
                    index.insert(Word(piece.to_vec()), j);
                    queue.push_back(j);
                    j
                }
            };
            rule.push(j);
        }
        if rules.len() <= i {
            rules.resize(i + 1, Vec::new());
        }
        rules[i] = rule;
    }

    let alphabet = Arc::new(Alphabet::indexed(words.len())?);
    let tau = Substitution::new(alphabet, rules.into_iter().map(Word).collect())?;
    let m_tau = tau.incidence_matrix();
    let lengths = RowVector::from_ints(&words.iter().map(|w| w.len() as u64).collect::<Vec<_>>());
    Ok(ReturnSystem {
        base: psi,
        seed_letter: a,
        words,
        tau,
        m_tau,
        lengths,
        index,
    })
}
