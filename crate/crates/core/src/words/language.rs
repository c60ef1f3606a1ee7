//! Fixed points, prefix expansion and factor languages of primitive substitutions.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{Coding, Letter, Substitution, Word};
use crate::error::{Error, Result};

/// Default bound `N` for the Morse–Hedlund periodicity probe.
pub const DEFAULT_PERIODICITY_BOUND: usize = 64;

/// Where the analysed fixed point starts: `φ^power(letter)` begins with `letter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedPointSeed {
    pub letter: Letter,
    pub power: u32,
    /// Left letter `b` of an admissible two-sided seed `b.a`.
    pub two_sided_left: Option<Letter>,
}

impl FixedPointSeed {
    pub fn one_sided(letter: Letter, power: u32) -> Self {
        FixedPointSeed {
            letter,
            power,
            two_sided_left: None,
        }
    }
}

/// Follows `b ↦ pick(φ(b))` `e` times without expanding images.
fn iterate_letter(
    phi: &Substitution,
    start: Letter,
    e: u32,
    pick: impl Fn(&Word) -> Letter,
) -> Letter {
    (0..e).fold(start, |b, _| pick(phi.image(b)))
}

/// Image lengths of `φ^e`, saturating.
fn image_lengths_at_power(phi: &Substitution, e: u32) -> Vec<usize> {
    let mut lengths = vec![1usize; phi.size()];
    for _ in 0..e {
        lengths = phi
            .images()
            .iter()
            .map(|img| {
                img.iter()
                    .fold(0usize, |acc, &l| acc.saturating_add(lengths[l]))
            })
            .collect();
    }
    lengths
}

fn seed_candidates(phi: &Substitution, preferred: Option<Letter>) -> Result<Vec<Letter>> {
    match preferred {
        Some(l) if l >= phi.size() => Err(Error::LetterOutOfRange {
            index: l,
            size: phi.size(),
        }),
        Some(l) => Ok(vec![l]),
        None => Ok((0..phi.size()).collect()),
    }
}

/// Tries to build a seed at exactly power `e`.
pub fn seed_at_power(
    phi: &Substitution,
    preferred: Option<Letter>,
    two_sided: bool,
    e: u32,
) -> Result<Option<FixedPointSeed>> {
    if !phi.is_growing() {
        return Err(Error::FiniteSystem);
    }
    if e == 0 {
        return Err(Error::SeedUnavailable(
            "seed power must be at least 1".into(),
        ));
    }
    let lengths = image_lengths_at_power(phi, e);
    for a in seed_candidates(phi, preferred)? {
        if iterate_letter(phi, a, e, |w| w[0]) != a || lengths[a] < 2 {
            continue;
        }
        let seed = FixedPointSeed::one_sided(a, e);
        if !two_sided {
            return Ok(Some(seed));
        }
        let pairs = two_factor_language(phi, &seed)?;
        let left = (0..phi.size()).find(|&b| {
            iterate_letter(phi, b, e, |w| w[w.len() - 1]) == b && pairs.contains(&Word(vec![b, a]))
        });
        if let Some(b) = left {
            return Ok(Some(FixedPointSeed {
                two_sided_left: Some(b),
                ..seed
            }));
        }
    }
    Ok(None)
}

/// Finds a seed with minimal power `e < d²` (ties broken by smallest letter).
pub fn find_fixed_point_seed(
    phi: &Substitution,
    preferred: Option<Letter>,
    two_sided: bool,
) -> Result<FixedPointSeed> {
    let d = phi.size() as u32;
    let max_power = (d * d).saturating_sub(1).max(1);
    for e in 1..=max_power {
        if let Some(seed) = seed_at_power(phi, preferred, two_sided, e)? {
            return Ok(seed);
        }
    }
    Err(Error::SeedUnavailable(format!(
        "no {} fixed point below power {}",
        if two_sided {
            "admissible two-sided"
        } else {
            "one-sided"
        },
        max_power + 1
    )))
}

fn check_seed(phi: &Substitution, seed: &FixedPointSeed) -> Result<()> {
    if seed.letter >= phi.size() {
        return Err(Error::LetterOutOfRange {
            index: seed.letter,
            size: phi.size(),
        });
    }
    if seed.power == 0
        || iterate_letter(phi, seed.letter, seed.power, |w| w[0]) != seed.letter
        || image_lengths_at_power(phi, seed.power)[seed.letter] < 2
    {
        return Err(Error::SeedUnavailable(format!(
            "φ^{} of `{}` does not start a fixed point",
            seed.power,
            phi.alphabet().token(seed.letter)
        )));
    }
    Ok(())
}

/// Length-`len` prefix of the one-sided fixed point of `φ^e` starting at the seed.
pub fn expand_prefix(phi: &Substitution, seed: &FixedPointSeed, len: usize) -> Result<Word> {
    check_seed(phi, seed)?;
    if len == 0 {
        return Ok(Word::empty());
    }
    let psi = phi.power(seed.power);
    let mut out: Vec<Letter> = psi.image(seed.letter).to_vec();
    // x = ψ(x): letter i of the prefix contributes ψ(x_i) further along.
    let mut i = 1;
    while out.len() < len {
        let l = out[i];
        out.extend_from_slice(psi.image(l));
        i += 1;
    }
    out.truncate(len);
    Ok(Word(out))
}

/// Letter at position `index` of the fixed point, found by descending
/// through `ψ^m(a)` with exact block lengths; works for any index size.
pub fn letter_at(phi: &Substitution, seed: &FixedPointSeed, index: &BigUint) -> Result<Letter> {
    check_seed(phi, seed)?;
    let psi = phi.power(seed.power);
    // levels[j][b] = |ψ^j(b)|
    let mut levels: Vec<Vec<BigUint>> = vec![vec![BigUint::one(); psi.size()]];
    while levels.last().is_none_or(|l| &l[seed.letter] <= index) {
        let prev = levels.last().expect("nonempty");
        let next = psi
            .images()
            .iter()
            .map(|img| img.iter().map(|&c| &prev[c]).sum())
            .collect();
        levels.push(next);
    }
    let mut letter = seed.letter;
    let mut offset = index.clone();
    for j in (0..levels.len() - 1).rev() {
        let mut found = None;
        for &c in psi.image(letter).iter() {
            let len = &levels[j][c];
            if &offset < len {
                found = Some(c);
                break;
            }
            offset -= len;
        }
        letter = found.ok_or_else(|| Error::ContractViolation("index escaped its block".into()))?;
    }
    debug_assert!(offset.is_zero());
    Ok(letter)
}

/// The set of length-2 factors of the fixed point, as the least set containing
/// the 2-letter prefix and closed under taking 2-factors of `φ(de)`.
pub fn two_factor_language(phi: &Substitution, seed: &FixedPointSeed) -> Result<BTreeSet<Word>> {
    let start = expand_prefix(phi, seed, 2)?;
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(pair) = queue.pop_front() {
        let img = phi.apply(&pair)?;
        for win in img.windows(2) {
            let w = Word(win.to_vec());
            if seen.insert(w.clone()) {
                queue.push_back(w);
            }
        }
    }
    Ok(seen)
}

/// All factors of length `n` of the fixed point.
///
/// With `m` minimal such that every `φ^m(b)` has length at least `n`, each
/// length-`n` window of the fixed point lies inside `φ^m(de)` for some
/// 2-factor `de`.
pub fn factors_of_length(
    phi: &Substitution,
    seed: &FixedPointSeed,
    n: usize,
) -> Result<BTreeSet<Word>> {
    if !phi.is_growing() {
        return Err(Error::FiniteSystem);
    }
    if n == 0 {
        return Ok(BTreeSet::from([Word::empty()]));
    }
    let pairs = two_factor_language(phi, seed)?;
    let mut m = 0;
    while image_lengths_at_power(phi, m)
        .into_iter()
        .min()
        .unwrap_or(0)
        < n
    {
        m += 1;
        if m > 64 * phi.size() as u32 {
            return Err(Error::ContractViolation("letters do not grow".into()));
        }
    }
    let mut factors = BTreeSet::new();
    for pair in &pairs {
        let mut w = pair.clone();
        for _ in 0..m {
            w = phi.apply(&w)?;
        }
        for win in w.windows(n) {
            factors.insert(Word(win.to_vec()));
        }
    }
    Ok(factors)
}

/// Outcome of the bounded periodicity test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeriodicityReport {
    /// `p(certified_at) ≤ certified_at`: periodic by Morse–Hedlund.
    Periodic {
        certified_at: usize,
        complexity: Vec<usize>,
    },
    /// `p(n) ≥ n + 1` for all `n ≤ bound`. Evidence only, not a certificate.
    NonPeriodicEvidence {
        bound: usize,
        complexity: Vec<usize>,
    },
}

impl PeriodicityReport {
    pub fn is_periodic(&self) -> bool {
        matches!(self, PeriodicityReport::Periodic { .. })
    }

    /// `p(1), p(2), ...` as computed.
    pub fn complexity(&self) -> &[usize] {
        match self {
            PeriodicityReport::Periodic { complexity, .. }
            | PeriodicityReport::NonPeriodicEvidence { complexity, .. } => complexity,
        }
    }
}

/// Computes the factor complexity of the (optionally coded) fixed point for
/// `n = 1..=bound` and applies the Morse–Hedlund criterion.
pub fn periodicity_probe(
    phi: &Substitution,
    seed: &FixedPointSeed,
    coding: Option<&Coding>,
    bound: usize,
) -> Result<PeriodicityReport> {
    let bound = bound.max(1);
    if !phi.is_growing() {
        // Primitive with all images of length 1: a single letter repeated.
        return Ok(PeriodicityReport::Periodic {
            certified_at: 1,
            complexity: vec![1; bound],
        });
    }
    let longest = factors_of_length(phi, seed, bound)?;
    let coded: BTreeSet<Vec<Letter>> = longest
        .iter()
        .map(|w| match coding {
            Some(c) => c.apply(w).into_inner(),
            None => w.to_vec(),
        })
        .collect();
    // Every factor extends to the right, so length-n factors are exactly the
    // length-n prefixes of the length-`bound` ones.
    let complexity: Vec<usize> = (1..=bound)
        .map(|n| coded.iter().map(|w| &w[..n]).collect::<BTreeSet<_>>().len())
        .collect();
    match complexity.iter().enumerate().find(|&(i, &p)| p <= i + 1) {
        Some((i, _)) => Ok(PeriodicityReport::Periodic {
            certified_at: i + 1,
            complexity,
        }),
        None => Ok(PeriodicityReport::NonPeriodicEvidence { bound, complexity }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;
    use std::sync::Arc;

    fn return_example() -> Substitution {
        Substitution::from_rules(&[("a", "aca"), ("b", "bca"), ("c", "cbcac")]).unwrap()
    }

    fn gaps() -> Substitution {
        let alphabet = Arc::new(Alphabet::new(["a", "abar", "b", "c"]).unwrap());
        let images = ["a abar b c", "a abar c b", "a abar b c b", "a abar c"]
            .iter()
            .map(|s| alphabet.parse_word(s).unwrap())
            .collect();
        Substitution::new(alphabet, images).unwrap()
    }

    fn optimal() -> Substitution {
        Substitution::from_rules(&[("a", "aaaabbbbcccc"), ("b", "abcaa"), ("c", "abbbccc")])
            .unwrap()
    }

    fn kolam() -> Substitution {
        Substitution::from_rules(&[("G", "GDD"), ("D", "G")]).unwrap()
    }

    fn render(phi: &Substitution, w: &Word) -> String {
        phi.alphabet().render(w)
    }

    #[test]
    fn seed_examples() {
        assert_eq!(
            find_fixed_point_seed(&return_example(), Some(0), false).unwrap(),
            FixedPointSeed::one_sided(0, 1)
        );
        assert_eq!(
            find_fixed_point_seed(&gaps(), None, false).unwrap(),
            FixedPointSeed::one_sided(0, 1)
        );
        let swap = Substitution::from_rules(&[("a", "ba"), ("b", "ab")]).unwrap();
        assert_eq!(seed_at_power(&swap, None, false, 1).unwrap(), None);
        assert_eq!(
            find_fixed_point_seed(&swap, None, false).unwrap(),
            FixedPointSeed::one_sided(0, 2)
        );
    }

    #[test]
    fn finite_system_has_no_seed() {
        let one = Substitution::from_rules(&[("a", "a")]).unwrap();
        assert_eq!(
            find_fixed_point_seed(&one, None, false),
            Err(Error::FiniteSystem)
        );
    }

    #[test]
    fn two_sided_seed_is_admissible() {
        let seed = find_fixed_point_seed(&return_example(), Some(0), true).unwrap();
        // φ(a) = aca ends with a, and aa is not a factor; c ends φ(c) and ca is a factor.
        assert_eq!(seed.two_sided_left, Some(2));
        let thue_morse = Substitution::from_rules(&[("a", "ab"), ("b", "ba")]).unwrap();
        let seed = find_fixed_point_seed(&thue_morse, None, true).unwrap();
        assert_eq!(seed.power, 2);
        assert_eq!(seed.letter, 0);
        assert_eq!(seed.two_sided_left, Some(0));
    }

    #[test]
    fn expand_examples() {
        let phi = return_example();
        let seed = FixedPointSeed::one_sided(0, 1);
        assert_eq!(
            render(&phi, &expand_prefix(&phi, &seed, 5).unwrap()),
            "acacb"
        );
        let opt = optimal();
        assert_eq!(
            render(&opt, &expand_prefix(&opt, &seed, 5).unwrap()),
            "aaaab"
        );
        assert!(expand_prefix(&phi, &seed, 0).unwrap().is_empty());
        assert!(expand_prefix(&opt, &FixedPointSeed::one_sided(1, 1), 3).is_err());
    }

    #[test]
    fn two_factor_examples() {
        let phi = return_example();
        let seed = FixedPointSeed::one_sided(0, 1);
        let pairs = two_factor_language(&phi, &seed).unwrap();
        for p in ["ac", "ca", "cb", "bc"] {
            assert!(
                pairs.contains(&phi.alphabet().parse_word(p).unwrap()),
                "{p}"
            );
        }
        let single = Substitution::from_rules(&[("a", "aa")]).unwrap();
        assert_eq!(
            two_factor_language(&single, &seed).unwrap(),
            BTreeSet::from([Word(vec![0, 0])])
        );
        let k = kolam();
        let pairs = two_factor_language(&k, &seed).unwrap();
        assert!(pairs.contains(&k.alphabet().parse_word("DG").unwrap()));
    }

    #[test]
    fn factor_examples() {
        let phi = return_example();
        let seed = FixedPointSeed::one_sided(0, 1);
        assert_eq!(factors_of_length(&phi, &seed, 1).unwrap().len(), 3);
        assert_eq!(
            factors_of_length(&phi, &seed, 2).unwrap(),
            two_factor_language(&phi, &seed).unwrap()
        );
    }

    #[test]
    fn periodicity_examples() {
        let phi = return_example();
        let seed = FixedPointSeed::one_sided(0, 1);
        let constant = Coding::constant(phi.alphabet().clone(), "0").unwrap();
        match periodicity_probe(&phi, &seed, Some(&constant), 8).unwrap() {
            PeriodicityReport::Periodic { certified_at, .. } => assert_eq!(certified_at, 1),
            other => panic!("{other:?}"),
        }
        assert!(!periodicity_probe(&phi, &seed, None, 32)
            .unwrap()
            .is_periodic());
        let rho = Coding::from_tokens(gaps().alphabet().clone(), &["3", "3", "4", "2"]).unwrap();
        assert!(!periodicity_probe(&gaps(), &seed, Some(&rho), 32)
            .unwrap()
            .is_periodic());
    }

    #[test]
    fn letter_at_matches_expansion() {
        let swap = Substitution::from_rules(&[("a", "ba"), ("b", "ab")]).unwrap();
        for (phi, seed) in [
            (return_example(), FixedPointSeed::one_sided(0, 1)),
            (kolam(), FixedPointSeed::one_sided(0, 1)),
            (swap, FixedPointSeed::one_sided(0, 2)),
        ] {
            let x = expand_prefix(&phi, &seed, 3000).unwrap();
            for (i, &l) in x.iter().enumerate() {
                assert_eq!(letter_at(&phi, &seed, &BigUint::from(i)).unwrap(), l);
            }
        }
        let huge = BigUint::from(10u32).pow(40);
        assert!(letter_at(&return_example(), &FixedPointSeed::one_sided(0, 1), &huge).is_ok());
    }
}
