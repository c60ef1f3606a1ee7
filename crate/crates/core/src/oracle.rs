//! Brute-force oracles for cross-checking the engine.
//!
//! These deliberately avoid the engine's own algorithms: prefixes are grown by
//! plain iteration of the images, factors are counted by sliding windows, and
//! eigenvector checks use cross-multiplication. Kernel censuses are heuristic
//! evidence and never feed into a verdict.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, RowVector};
use crate::words::{Coding, Letter, Substitution, Word};

/// Segments from one occurrence of `a` to just before the next, in order of
/// first appearance; the trailing incomplete segment is dropped.
pub fn naive_return_words(prefix: &[Letter], a: Letter) -> Result<Vec<Word>> {
    let positions: Vec<usize> = prefix
        .iter()
        .enumerate()
        .filter(|&(_, &l)| l == a)
        .map(|(i, _)| i)
        .collect();
    if positions.len() < 2 {
        return Err(Error::ContractViolation(format!(
            "prefix has {} occurrences of the letter, need at least 2",
            positions.len()
        )));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for pair in positions.windows(2) {
        let seg = &prefix[pair[0]..pair[1]];
        if seen.insert(seg.to_vec()) {
            out.push(Word(seg.to_vec()));
        }
    }
    Ok(out)
}

/// Prefix of `lim φ^{power·j}(letter)` by repeated expansion of the whole word.
pub fn naive_fixed_point_prefix(
    phi: &Substitution,
    letter: Letter,
    power: u32,
    len: usize,
) -> Word {
    let mut w = vec![letter];
    while w.len() < len {
        for _ in 0..power.max(1) {
            let mut next = Vec::new();
            for &l in &w {
                next.extend(phi.image(l).iter().copied());
            }
            w = next;
        }
    }
    w.truncate(len);
    Word(w)
}

/// Number of distinct length-`n` windows of `prefix`, for `n = 1..=n_max`.
pub fn factor_complexity_curve(prefix: &[Letter], n_max: usize) -> Result<Vec<usize>> {
    if n_max >= prefix.len() {
        return Err(Error::ContractViolation(format!(
            "window length {n_max} needs a prefix longer than {}",
            prefix.len()
        )));
    }
    Ok((1..=n_max)
        .map(|n| prefix.windows(n).collect::<HashSet<_>>().len())
        .collect())
}

/// Distinct truncated `k`-kernel rows of a sequence prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelCensus {
    pub k: usize,
    pub depth: u32,
    pub prefix_length: usize,
    /// `counts[e]`: distinct rows `n ↦ y(k^{e'} n + r)`, `e' ≤ e`, each cut to
    /// `prefix_length` terms.
    pub counts: Vec<usize>,
}

impl KernelCensus {
    /// The count did not change at the final depth.
    pub fn stabilised(&self) -> bool {
        matches!(self.counts.as_slice(), [.., a, b] if a == b)
    }

    pub fn strictly_growing(&self) -> bool {
        self.counts.windows(2).all(|w| w[0] < w[1])
    }
}

/// Counts truncated kernel rows of the coded fixed point. Heuristic only.
pub fn kernel_census(
    phi: &Substitution,
    seed_letter: Letter,
    seed_power: u32,
    coding: Option<&Coding>,
    k: usize,
    depth: u32,
    prefix_length: usize,
) -> KernelCensus {
    let needed = k.pow(depth) * prefix_length;
    let x = naive_fixed_point_prefix(phi, seed_letter, seed_power, needed);
    let y: Vec<Letter> = match coding {
        Some(c) => x.iter().map(|&l| c.map(l)).collect(),
        None => x.into_inner(),
    };
    let mut rows: BTreeSet<Vec<Letter>> = BTreeSet::new();
    let mut counts = Vec::with_capacity(depth as usize + 1);
    for e in 0..=depth {
        let stride = k.pow(e);
        for r in 0..stride {
            let row: Vec<Letter> = (0..prefix_length).map(|n| y[stride * n + r]).collect();
            rows.insert(row);
        }
        counts.push(rows.len());
    }
    KernelCensus {
        k,
        depth,
        prefix_length,
        counts,
    }
}

fn times(v: &[BigInt], m: &IntMatrix) -> Vec<BigInt> {
    (0..m.cols())
        .map(|j| v.iter().enumerate().map(|(i, x)| x * &m[(i, j)]).sum())
        .collect()
}

/// Smallest `n ≤ n_max` for which `v0·M^n` is a left eigenvector, with its eigenvalue.
pub fn brute_eigen_scan(
    v0: &RowVector,
    m: &IntMatrix,
    n_max: usize,
) -> Option<(usize, BigRational)> {
    let mut v = v0.entries().to_vec();
    for n in 0..=n_max {
        let w = times(&v, m);
        if let Some(i) = v.iter().position(|x| !x.is_zero()) {
            let proportional = (0..v.len()).all(|j| &w[j] * &v[i] == &w[i] * &v[j]);
            if proportional {
                return Some((n, BigRational::new(w[i].clone(), v[i].clone())));
            }
        }
        v = w;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn return_example() -> Substitution {
        Substitution::from_rules(&[("a", "aca"), ("b", "bca"), ("c", "cbcac")]).unwrap()
    }

    #[test]
    fn naive_return_word_examples() {
        let phi = return_example();
        let prefix = phi.alphabet().parse_word("acacbcac").unwrap();
        let words = naive_return_words(&prefix, 0).unwrap();
        let rendered: Vec<String> = words.iter().map(|w| phi.alphabet().render(w)).collect();
        assert_eq!(rendered, ["ac", "acbc"]);
        assert_eq!(
            naive_return_words(&[0, 0, 0], 0).unwrap(),
            vec![Word(vec![0])]
        );
        assert!(naive_return_words(&[0, 1], 0).is_err());
    }

    #[test]
    fn complexity_of_a_periodic_word() {
        let abab: Vec<Letter> = (0..20).map(|i| i % 2).collect();
        assert_eq!(factor_complexity_curve(&abab, 4).unwrap(), vec![2, 2, 2, 2]);
        assert!(factor_complexity_curve(&abab, 20).is_err());
    }

    #[test]
    fn eigen_scan_examples() {
        let opt = IntMatrix::from_rows(&[vec![4, 3, 1], vec![4, 1, 3], vec![4, 1, 3]]).unwrap();
        assert_eq!(
            brute_eigen_scan(&RowVector::ones(3), &opt, 6),
            Some((2, BigRational::from_integer(8.into())))
        );
        let m_tau = IntMatrix::from_rows(&[vec![2, 2], vec![1, 3]]).unwrap();
        assert_eq!(
            brute_eigen_scan(&RowVector::from_ints(&[2, 4]), &m_tau, 6),
            Some((0, BigRational::from_integer(4.into())))
        );
        let gaps = IntMatrix::from_rows(&[
            vec![1, 1, 1, 1],
            vec![1, 1, 1, 1],
            vec![1, 1, 2, 0],
            vec![1, 1, 1, 1],
        ])
        .unwrap();
        assert_eq!(
            brute_eigen_scan(&RowVector::from_ints(&[4, 4, 5, 3]), &gaps, 6),
            None
        );
    }

    #[test]
    fn naive_prefix_matches_hand_expansion() {
        let phi = return_example();
        let x = naive_fixed_point_prefix(&phi, 0, 1, 11);
        assert_eq!(phi.alphabet().render(&x), "acacbcacaca");
    }
}
