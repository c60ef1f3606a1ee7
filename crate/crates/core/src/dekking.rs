//! Compiles an automatic input into a constant-length substitution, a coding
//! and a base-k digit-reading automaton.
//!
//! Given a factor set `W` compatible with `φ` (the letters themselves, or the
//! return words) whose length vector `n_w = |φ^n(w)|` satisfies
//! `(n_w)·M_τ = k·(n_w)`, every `φ^n(w)` is relabelled into `n_w` fresh
//! letters `(w, i)`. Relabelling `φ^{n+1}(w)` then splits into `n_w` blocks
//! of length `k`, which become the images of the new letters.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{left_eigenvector_test, RowVector};
use crate::returns::ReturnSystem;
use crate::words::{expand_prefix, Alphabet, Coding, FixedPointSeed, Letter, Substitution, Word};

/// The factor set the presentation is built over.
#[derive(Debug, Clone, Copy)]
pub enum FactorSet<'a> {
    /// `W = 𝒜`; the fixed point starts at `seed`.
    Letters { seed: Letter },
    /// `W = R_a`.
    ReturnWords(&'a ReturnSystem),
}

/// A constant-length substitution `φ̄` with a coding `π` back to the source alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantLengthPresentation {
    /// `(w-index, offset)` of each letter; after merging, the representative's pair.
    pub letters: Vec<(usize, usize)>,
    pub k: usize,
    pub phi_bar: Substitution,
    pub pi: Coding,
    pub seed: Letter,
}

impl ConstantLengthPresentation {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Length-`len` prefix of `π(fixed point of φ̄)`, over the source alphabet.
    pub fn coded_prefix(&self, len: usize) -> Result<Word> {
        let seed = FixedPointSeed::one_sided(self.seed, 1);
        let raw = expand_prefix(&self.phi_bar, &seed, len)?;
        Ok(self.pi.apply(&raw))
    }

    pub fn source_alphabet(&self) -> &Arc<Alphabet> {
        self.pi.target()
    }
}

fn to_usize(x: &num_bigint::BigInt, what: &str) -> Result<usize> {
    x.to_usize()
        .ok_or_else(|| Error::ContractViolation(format!("{what} {x} does not fit in memory")))
}

/// Builds `(φ̄, π)` from the factor set `W` and power `n`; `k` must be the
/// eigenvalue of `(|φ^n(w)|)_w` for `M_τ`.
pub fn build_presentation(
    phi: &Substitution,
    set: FactorSet<'_>,
    n: u32,
    k: u64,
) -> Result<ConstantLengthPresentation> {
    if k < 2 {
        return Err(Error::InvalidRoot(k));
    }
    let (words, tau, seed_word): (Vec<Word>, &Substitution, usize) = match set {
        FactorSet::Letters { seed } => {
            if seed >= phi.size() || phi.image(seed)[0] != seed {
                return Err(Error::SeedUnavailable(format!(
                    "letter {seed} does not start its own image"
                )));
            }
            ((0..phi.size()).map(|b| Word(vec![b])).collect(), phi, seed)
        }
        FactorSet::ReturnWords(rs) => {
            if &rs.base != phi {
                return Err(Error::AlphabetMismatch(
                    "return system was computed for a different substitution".into(),
                ));
            }
            (rs.words.clone(), &rs.tau, 0)
        }
    };

    let m_tau = tau.incidence_matrix();
    let base_lengths =
        RowVector::from_ints(&words.iter().map(|w| w.len() as u64).collect::<Vec<_>>());
    let mut lengths = base_lengths;
    for _ in 0..n {
        lengths = lengths.mul_matrix(&m_tau)?;
    }
    match left_eigenvector_test(&lengths, &m_tau)? {
        Some(lambda) if lambda == num_rational::BigRational::from_integer(k.into()) => {}
        other => {
            return Err(Error::EigenPrecondition(format!(
                "{lengths} has eigenvalue {other:?}, expected {k}"
            )))
        }
    }
    let n_w: Vec<usize> = lengths
        .entries()
        .iter()
        .map(|x| to_usize(x, "block length"))
        .collect::<Result<_>>()?;
    let mut start = Vec::with_capacity(n_w.len());
    let mut total = 0usize;
    for &len in &n_w {
        start.push(total);
        total = total
            .checked_add(len)
            .ok_or_else(|| Error::ContractViolation("alphabet size overflows".into()))?;
    }

    let k = k as usize;
    let mut letters = Vec::with_capacity(total);
    let mut images = Vec::with_capacity(total);
    let mut pi = Vec::with_capacity(total);
    for (w, word) in words.iter().enumerate() {
        let mut expanded = word.clone();
        for _ in 0..n {
            expanded = phi.apply(&expanded)?;
        }
        let relabelled: Vec<Letter> = tau
            .image(w)
            .iter()
            .flat_map(|&j| start[j]..start[j] + n_w[j])
            .collect();
        if relabelled.len() != k * n_w[w] {
            return Err(Error::ContractViolation(format!(
                "relabelled image of word {w} has length {}, expected {}",
                relabelled.len(),
                k * n_w[w]
            )));
        }
        for (i, block) in relabelled.chunks(k).enumerate() {
            letters.push((w, i));
            images.push(Word(block.to_vec()));
            pi.push(expanded[i]);
        }
    }

    let alphabet = Arc::new(Alphabet::indexed(total)?);
    let phi_bar = Substitution::new(alphabet.clone(), images)?;
    let pi = coding_into(alphabet, phi.alphabet().clone(), &pi)?;
    let seed = start[seed_word];
    if phi_bar.image(seed)[0] != seed {
        return Err(Error::ContractViolation(
            "φ̄(seed) does not start with the seed".into(),
        ));
    }
    Ok(ConstantLengthPresentation {
        letters,
        k,
        phi_bar,
        pi,
        seed,
    })
}

fn coding_into(source: Arc<Alphabet>, target: Arc<Alphabet>, map: &[Letter]) -> Result<Coding> {
    let images = map.iter().map(|&l| Word(vec![l])).collect();
    Coding::new(crate::words::Morphism::new(source, target, images)?)
}

/// Repeatedly identifies letters with the same `π`-output and the same
/// `φ̄`-image (read through the current identification) until nothing changes.
/// Each class is represented by its smallest letter; survivors are renumbered
/// densely in increasing order.
pub fn merge_letters(p: &ConstantLengthPresentation) -> Result<ConstantLengthPresentation> {
    let n = p.len();
    let mut class: Vec<usize> = (0..n).collect();
    loop {
        let mut by_key: BTreeMap<(Letter, Vec<usize>), usize> = BTreeMap::new();
        let mut changed = false;
        let reps: Vec<usize> = (0..n).filter(|&b| class[b] == b).collect();
        let mut new_rep: HashMap<usize, usize> = HashMap::new();
        for &b in &reps {
            let key = (
                p.pi.map(b),
                p.phi_bar
                    .image(b)
                    .iter()
                    .map(|&c| class[c])
                    .collect::<Vec<_>>(),
            );
            match by_key.get(&key) {
                Some(&r) => {
                    new_rep.insert(b, r);
                    changed = true;
                }
                None => {
                    by_key.insert(key, b);
                }
            }
        }
        if !changed {
            break;
        }
        for c in class.iter_mut() {
            if let Some(&r) = new_rep.get(c) {
                *c = r;
            }
        }
    }

    let reps: Vec<usize> = (0..n).filter(|&b| class[b] == b).collect();
    let dense: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let alphabet = Arc::new(Alphabet::indexed(reps.len())?);
    let images = reps
        .iter()
        .map(|&r| {
            p.phi_bar
                .image(r)
                .iter()
                .map(|&c| dense[&class[c]])
                .collect()
        })
        .collect();
    let phi_bar = Substitution::new(alphabet.clone(), images)?;
    let pi_map: Vec<Letter> = reps.iter().map(|&r| p.pi.map(r)).collect();
    let pi = coding_into(alphabet, p.source_alphabet().clone(), &pi_map)?;
    Ok(ConstantLengthPresentation {
        letters: reps.iter().map(|&r| p.letters[r]).collect(),
        k: p.k,
        phi_bar,
        pi,
        seed: dense[&class[p.seed]],
    })
}

/// A deterministic finite automaton with output reading base-`k` digits,
/// most significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    pub k: usize,
    pub start: usize,
    /// `transitions[state][digit]`.
    pub transitions: Vec<Vec<usize>>,
    pub outputs: Vec<String>,
}

/// The automaton `δ(β, d) = φ̄(β)_d`, outputting `π(β)` (then `coding`, if given).
pub fn to_dfao(p: &ConstantLengthPresentation, coding: Option<&Coding>) -> Dfao {
    let outputs = (0..p.len())
        .map(|b| {
            let l = p.pi.map(b);
            match coding {
                Some(c) => c.output_token(l).to_string(),
                None => p.source_alphabet().token(l).to_string(),
            }
        })
        .collect();
    Dfao {
        k: p.k,
        start: p.seed,
        transitions: (0..p.len()).map(|b| p.phi_bar.image(b).to_vec()).collect(),
        outputs,
    }
}

impl Dfao {
    pub fn states(&self) -> usize {
        self.transitions.len()
    }

    /// Output after reading the base-`k` digits of `index`.
    pub fn evaluate(&self, index: &BigUint) -> &str {
        let mut state = self.start;
        if !index.is_zero() {
            for d in index.to_radix_be(self.k as u32) {
                state = self.transitions[state][d as usize];
            }
        }
        &self.outputs[state]
    }

    pub fn evaluate_u64(&self, index: u64) -> &str {
        let mut digits = Vec::new();
        let mut m = index;
        while m > 0 {
            digits.push((m % self.k as u64) as usize);
            m /= self.k as u64;
        }
        let state = digits
            .iter()
            .rev()
            .fold(self.start, |s, &d| self.transitions[s][d]);
        &self.outputs[state]
    }

    /// Plain-text table: a `k=.. states=.. start=..` header, then one line
    /// per state with its output token and `k` successor ids.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "k={} states={} start={}\n",
            self.k,
            self.states(),
            self.start
        );
        for (id, row) in self.transitions.iter().enumerate() {
            let _ = write!(out, "{id} {}", self.outputs[id]);
            for t in row {
                let _ = write!(out, " {t}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_table(text: &str) -> Result<Dfao> {
        let bad = |msg: &str| Error::ContractViolation(format!("malformed DFAO table: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("missing header"))?;
        let mut fields = HashMap::new();
        for part in header.split_whitespace() {
            let (key, value) = part.split_once('=').ok_or_else(|| bad(part))?;
            let value: usize = value.parse().map_err(|_| bad(part))?;
            fields.insert(key, value);
        }
        let get = |key: &str| fields.get(key).copied().ok_or_else(|| bad(key));
        let (k, states, start) = (get("k")?, get("states")?, get("start")?);
        let mut transitions = Vec::with_capacity(states);
        let mut outputs = Vec::with_capacity(states);
        for (expected, line) in lines.enumerate() {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != k + 2 || parts[0].parse::<usize>().ok() != Some(expected) {
                return Err(bad(line));
            }
            outputs.push(parts[1].to_string());
            let row = parts[2..]
                .iter()
                .map(|t| {
                    t.parse::<usize>()
                        .ok()
                        .filter(|&t| t < states)
                        .ok_or_else(|| bad(line))
                })
                .collect::<Result<Vec<_>>>()?;
            transitions.push(row);
        }
        if transitions.len() != states || start >= states {
            return Err(bad("state count"));
        }
        Ok(Dfao {
            k,
            start,
            transitions,
            outputs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::returns::compute_return_system;

    fn return_example() -> Substitution {
        Substitution::from_rules(&[("a", "aca"), ("b", "bca"), ("c", "cbcac")]).unwrap()
    }

    fn rendered_images(
        p: &ConstantLengthPresentation,
        label: impl Fn(usize) -> usize,
    ) -> Vec<String> {
        (0..p.len())
            .map(|b| {
                p.phi_bar
                    .image(b)
                    .iter()
                    .map(|&c| label(c).to_string())
                    .collect()
            })
            .collect()
    }

    fn return_presentation() -> ConstantLengthPresentation {
        let phi = return_example();
        let rs = compute_return_system(&phi, &FixedPointSeed::one_sided(0, 1)).unwrap();
        build_presentation(&phi, FactorSet::ReturnWords(&rs), 0, 4).unwrap()
    }

    #[test]
    fn return_example_presentation() {
        let p = return_presentation();
        assert_eq!(p.len(), 6);
        assert_eq!(p.k, 4);
        assert_eq!(
            rendered_images(&p, |c| c + 1),
            ["1234", "5612", "1234", "5634", "5634", "5612"]
        );
        let pi: String = (0..6)
            .map(|b| p.source_alphabet().token(p.pi.map(b)).to_string())
            .collect();
        assert_eq!(pi, "acacbc");
        assert_eq!(
            p.letters,
            vec![(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (1, 3)]
        );
        assert_eq!(p.seed, 0);
    }

    #[test]
    fn return_example_merge() {
        let merged = merge_letters(&return_presentation()).unwrap();
        assert_eq!(merged.len(), 4);
        // Survivors are the original letters 1, 2, 4, 5.
        let original = [1, 2, 4, 5];
        assert_eq!(
            rendered_images(&merged, |c| original[c]),
            ["1214", "5212", "5214", "5214"]
        );
        let pi: String = (0..4)
            .map(|b| merged.source_alphabet().token(merged.pi.map(b)).to_string())
            .collect();
        assert_eq!(pi, "accb");
        assert_eq!(merge_letters(&merged).unwrap(), merged);
    }

    #[test]
    fn constant_length_input_is_its_own_presentation() {
        let tm = Substitution::from_rules(&[("a", "ab"), ("b", "ba")]).unwrap();
        let p = build_presentation(&tm, FactorSet::Letters { seed: 0 }, 0, 2).unwrap();
        assert_eq!(p.phi_bar.images(), tm.images());
        assert_eq!(merge_letters(&p).unwrap(), p);
    }

    #[test]
    fn precondition_is_checked() {
        let phi = return_example();
        let rs = compute_return_system(&phi, &FixedPointSeed::one_sided(0, 1)).unwrap();
        assert!(matches!(
            build_presentation(&phi, FactorSet::ReturnWords(&rs), 0, 3),
            Err(Error::EigenPrecondition(_))
        ));
        assert_eq!(
            build_presentation(&phi, FactorSet::ReturnWords(&rs), 0, 1),
            Err(Error::InvalidRoot(1))
        );
    }

    #[test]
    fn dfao_reads_the_fixed_point() {
        let merged = merge_letters(&return_presentation()).unwrap();
        let dfao = to_dfao(&merged, None);
        let first: String = (0..5).map(|i| dfao.evaluate_u64(i).to_string()).collect();
        assert_eq!(first, "acacb");
        assert_eq!(dfao.evaluate(&BigUint::zero()), "a");
        assert_eq!(dfao.transitions[dfao.start][0], dfao.start);
        assert_eq!(Dfao::from_table(&dfao.to_table()).unwrap(), dfao);
    }

    #[test]
    fn dfao_table_format() {
        let dfao = to_dfao(&merge_letters(&return_presentation()).unwrap(), None);
        assert_eq!(
            dfao.to_table(),
            "k=4 states=4 start=0\n0 a 0 1 0 2\n1 c 3 1 0 1\n2 c 3 1 0 2\n3 b 3 1 0 2\n"
        );
    }
}
