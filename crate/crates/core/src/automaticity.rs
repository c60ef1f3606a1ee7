//! The automaticity decision procedure and its certificates.
//!
//! For a primitive substitution `φ` with fixed point `x` starting at `a`, and a
//! coding `y` of `x` that is not periodic, `y` is automatic exactly when the
//! vector `(|φ^s(w)|)` over the return words `w ∈ R_a` is a left eigenvector
//! of the return-substitution matrix `M_τ`, where `s` is the size of the
//! largest Jordan block of `M_τ` for eigenvalue 0. For left-proper `φ` the
//! same test can be run on `M_φ` with the letters themselves.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::linalg::{eigen_index_reduce, rank, EigenReduction, IntMatrix, RowVector};
use crate::returns::{compute_return_system, ReturnSystem};
use crate::words::{
    find_fixed_point_seed, periodicity_probe, seed_at_power, Coding, FixedPointSeed, Letter,
    PeriodicityReport, Primitivity, Substitution, DEFAULT_PERIODICITY_BOUND,
};

/// Which criterion produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecisionPath {
    /// Return words and `M_τ`.
    General,
    /// Letters and `M_φ` (left-proper input).
    LeftProper,
    /// Left-proper with nonsingular `M_φ`: automatic iff constant length.
    Nonsingular,
}

/// What the verdict assumes about nonperiodicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nonperiodicity {
    /// `p(n) ≥ n + 1` was checked for all `n ≤ bound`.
    Evidence { bound: usize },
    /// The caller asserted nonperiodicity; no probe ran.
    Assumed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Automatic {
        /// Eigenvalue found for the analysed power `φ^seed_power`.
        k: u64,
        minimal_root: u64,
        s: usize,
        eigenvector: RowVector,
        path: DecisionPath,
        seed_power: u32,
        nonperiodicity: Nonperiodicity,
    },
    NotAutomatic {
        s: usize,
        v_s: RowVector,
        v_s_times_m: RowVector,
        /// `(v_s·M)_i / (v_s)_i` at the first nonzero coordinate; `ratio·v_s`
        /// differs from `v_s·M` somewhere.
        ratio: Option<BigRational>,
        path: DecisionPath,
        nonperiodicity: Nonperiodicity,
    },
    /// The coded sequence is periodic (automatic for every base).
    Periodic { certified_at: usize },
    /// The bounded probe could not certify either way and strict mode was requested.
    UnresolvedPeriodicity { bound: usize },
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Automatic { .. } => "Automatic",
            Verdict::NotAutomatic { .. } => "NotAutomatic",
            Verdict::Periodic { .. } => "Periodic",
            Verdict::UnresolvedPeriodicity { .. } => "UnresolvedPeriodicity",
        }
    }

    pub fn is_automatic(&self) -> bool {
        matches!(self, Verdict::Automatic { .. })
    }

    pub fn minimal_root(&self) -> Option<u64> {
        match self {
            Verdict::Automatic { minimal_root, .. } => Some(*minimal_root),
            _ => None,
        }
    }
}

/// Path selection for [`analyze`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathChoice {
    /// Left-proper inputs use `M_φ`, everything else uses return words.
    #[default]
    Auto,
    General,
    LeftProper,
}

#[derive(Debug, Clone)]
pub struct DecideOptions {
    pub coding: Option<Coding>,
    pub seed_hint: Option<Letter>,
    /// Force this seed power instead of searching for the least one.
    pub seed_power: Option<u32>,
    pub two_sided: bool,
    pub periodicity_bound: usize,
    /// Skip the periodicity probe entirely.
    pub assume_nonperiodic: bool,
    /// Report [`Verdict::UnresolvedPeriodicity`] instead of relying on evidence.
    pub strict: bool,
    pub path: PathChoice,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            coding: None,
            seed_hint: None,
            seed_power: None,
            two_sided: false,
            periodicity_bound: DEFAULT_PERIODICITY_BOUND,
            assume_nonperiodic: false,
            strict: false,
            path: PathChoice::Auto,
        }
    }
}

impl DecideOptions {
    pub fn with_coding(coding: Coding) -> Self {
        DecideOptions {
            coding: Some(coding),
            ..Default::default()
        }
    }
}

/// Everything computed on the way to a verdict.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub primitivity: Primitivity,
    pub seed: Option<FixedPointSeed>,
    pub periodicity: Option<PeriodicityReport>,
    pub return_system: Option<ReturnSystem>,
    /// The matrix the eigen test ran on (`M_τ` or `M_φ`).
    pub matrix: Option<IntMatrix>,
    /// The starting vector (`|w|` over return words, or all ones).
    pub start_vector: Option<RowVector>,
    pub reduction: Option<EigenReduction>,
    pub verdict: Verdict,
}

impl Analysis {
    fn early(primitivity: Primitivity, seed: Option<FixedPointSeed>, verdict: Verdict) -> Self {
        Analysis {
            primitivity,
            seed,
            periodicity: None,
            return_system: None,
            matrix: None,
            start_vector: None,
            reduction: None,
            verdict,
        }
    }
}

/// Smallest `m` with `m^j = k` for some `j ≥ 1`.
pub fn minimal_root(k: u64) -> Result<u64> {
    if k < 2 {
        return Err(Error::InvalidRoot(k));
    }
    let max_exp = 63 - k.leading_zeros();
    for j in (2..=max_exp).rev() {
        if let Some(r) = exact_root(k, j) {
            return Ok(r);
        }
    }
    Ok(k)
}

fn exact_root(k: u64, j: u32) -> Option<u64> {
    let (mut lo, mut hi) = (2u64, 1u64 << (64u32.div_ceil(j)).min(63));
    while lo <= hi {
        let mid = lo + (hi - lo) / 2;
        match mid.checked_pow(j) {
            Some(p) if p == k => return Some(mid),
            Some(p) if p < k => lo = mid + 1,
            _ => hi = mid - 1,
        }
    }
    None
}

enum Prelude {
    Done(Box<Analysis>),
    Continue {
        primitivity: Primitivity,
        seed: FixedPointSeed,
        periodicity: Option<PeriodicityReport>,
        nonperiodicity: Nonperiodicity,
    },
}

/// Primitivity, seed selection and the periodicity probe shared by all paths.
fn prelude(
    phi: &Substitution,
    opts: &DecideOptions,
    forced_letter: Option<Letter>,
) -> Result<Prelude> {
    let primitivity = phi.primitivity();
    if !primitivity.primitive {
        return Err(Error::NotPrimitive);
    }
    if let Some(coding) = &opts.coding {
        if coding.source() != phi.alphabet() {
            return Err(Error::AlphabetMismatch(
                "coding source differs from the substitution alphabet".into(),
            ));
        }
    }
    if !phi.is_growing() {
        // A primitive substitution with all images of length 1 is a single fixed letter.
        return Ok(Prelude::Done(Box::new(Analysis::early(
            primitivity,
            None,
            Verdict::Periodic { certified_at: 1 },
        ))));
    }
    let preferred = match (forced_letter, opts.seed_hint) {
        (Some(f), Some(h)) if f != h => {
            return Err(Error::SeedUnavailable(format!(
                "left-proper fixed points start with `{}`",
                phi.alphabet().token(f)
            )))
        }
        (Some(f), _) => Some(f),
        (None, h) => h,
    };
    let seed = match opts.seed_power {
        Some(e) => seed_at_power(phi, preferred, opts.two_sided, e)?
            .ok_or_else(|| Error::SeedUnavailable(format!("no seed at power {e}")))?,
        None => find_fixed_point_seed(phi, preferred, opts.two_sided)?,
    };
    if opts.assume_nonperiodic {
        return Ok(Prelude::Continue {
            primitivity,
            seed,
            periodicity: None,
            nonperiodicity: Nonperiodicity::Assumed,
        });
    }
    let report = periodicity_probe(phi, &seed, opts.coding.as_ref(), opts.periodicity_bound)?;
    match &report {
        PeriodicityReport::Periodic { certified_at, .. } => {
            let mut a = Analysis::early(
                primitivity,
                Some(seed),
                Verdict::Periodic {
                    certified_at: *certified_at,
                },
            );
            a.periodicity = Some(report);
            Ok(Prelude::Done(Box::new(a)))
        }
        PeriodicityReport::NonPeriodicEvidence { bound, .. } => {
            let bound = *bound;
            if opts.strict {
                let mut a = Analysis::early(
                    primitivity,
                    Some(seed),
                    Verdict::UnresolvedPeriodicity { bound },
                );
                a.periodicity = Some(report);
                return Ok(Prelude::Done(Box::new(a)));
            }
            Ok(Prelude::Continue {
                primitivity,
                seed,
                periodicity: Some(report),
                nonperiodicity: Nonperiodicity::Evidence { bound },
            })
        }
    }
}

fn verdict_from_reduction(
    reduction: &EigenReduction,
    path: DecisionPath,
    seed_power: u32,
    nonperiodicity: Nonperiodicity,
) -> Result<Verdict> {
    match &reduction.eigen {
        Some(lambda) => {
            if !lambda.is_integer() {
                return Err(Error::ContractViolation(format!(
                    "eigenvalue {lambda} of a positive length vector is not an integer"
                )));
            }
            let k = lambda
                .to_integer()
                .to_u64()
                .filter(|&k| k >= 2)
                .ok_or_else(|| {
                    Error::ContractViolation(format!("eigenvalue {lambda} is not an integer >= 2"))
                })?;
            Ok(Verdict::Automatic {
                k,
                minimal_root: minimal_root(k)?,
                s: reduction.s,
                eigenvector: reduction.v_s.clone(),
                path,
                seed_power,
                nonperiodicity,
            })
        }
        None => {
            let ratio = reduction
                .v_s
                .0
                .iter()
                .position(|x| x != &BigInt::from(0))
                .map(|i| {
                    BigRational::new(reduction.v_s_image.0[i].clone(), reduction.v_s.0[i].clone())
                });
            Ok(Verdict::NotAutomatic {
                s: reduction.s,
                v_s: reduction.v_s.clone(),
                v_s_times_m: reduction.v_s_image.clone(),
                ratio,
                path,
                nonperiodicity,
            })
        }
    }
}

/// The general criterion via return words to the seed letter.
pub fn analyze_general(phi: &Substitution, opts: &DecideOptions) -> Result<Analysis> {
    let (primitivity, seed, periodicity, nonperiodicity) = match prelude(phi, opts, None)? {
        Prelude::Done(a) => return Ok(*a),
        Prelude::Continue {
            primitivity,
            seed,
            periodicity,
            nonperiodicity,
        } => (primitivity, seed, periodicity, nonperiodicity),
    };
    let rs = compute_return_system(phi, &seed)?;
    let reduction = eigen_index_reduce(&rs.lengths, &rs.m_tau)?;
    let verdict = verdict_from_reduction(
        &reduction,
        DecisionPath::General,
        seed.power,
        nonperiodicity,
    )?;
    Ok(Analysis {
        primitivity,
        seed: Some(seed),
        periodicity,
        matrix: Some(rs.m_tau.clone()),
        start_vector: Some(rs.lengths.clone()),
        return_system: Some(rs),
        reduction: Some(reduction),
        verdict,
    })
}

/// The left-proper criterion on `M_φ` with `v_s = (|φ^s(b)|)_b`.
pub fn analyze_left_proper(phi: &Substitution, opts: &DecideOptions) -> Result<Analysis> {
    if !phi.is_left_proper() {
        return Err(Error::NotLeftProper);
    }
    let first = phi.image(0)[0];
    let (primitivity, seed, periodicity, nonperiodicity) = match prelude(phi, opts, Some(first))? {
        Prelude::Done(a) => return Ok(*a),
        Prelude::Continue {
            primitivity,
            seed,
            periodicity,
            nonperiodicity,
        } => (primitivity, seed, periodicity, nonperiodicity),
    };
    let m = phi.incidence_matrix();
    let ones = RowVector::ones(phi.size());
    let reduction = eigen_index_reduce(&ones, &m)?;
    let path = if rank(&m) == phi.size() {
        DecisionPath::Nonsingular
    } else {
        DecisionPath::LeftProper
    };
    let verdict = verdict_from_reduction(&reduction, path, 1, nonperiodicity)?;
    Ok(Analysis {
        primitivity,
        seed: Some(seed),
        periodicity,
        return_system: None,
        matrix: Some(m),
        start_vector: Some(ones),
        reduction: Some(reduction),
        verdict,
    })
}

/// Runs the path selected by `opts.path`.
pub fn analyze(phi: &Substitution, opts: &DecideOptions) -> Result<Analysis> {
    match opts.path {
        PathChoice::General => analyze_general(phi, opts),
        PathChoice::LeftProper => analyze_left_proper(phi, opts),
        PathChoice::Auto if phi.is_left_proper() => analyze_left_proper(phi, opts),
        PathChoice::Auto => analyze_general(phi, opts),
    }
}

/// Verdict of the general return-word criterion.
pub fn decide(phi: &Substitution, opts: &DecideOptions) -> Result<Verdict> {
    Ok(analyze_general(phi, opts)?.verdict)
}

/// Verdict of the left-proper criterion.
pub fn decide_left_proper(phi: &Substitution, opts: &DecideOptions) -> Result<Verdict> {
    Ok(analyze_left_proper(phi, opts)?.verdict)
}

/// For a primitive left-proper `φ` with nonsingular `M_φ` and nonperiodic
/// fixed point: automatic iff `φ` has constant length. `None` when any
/// precondition fails.
pub fn nonsingular_shortcut(
    phi: &Substitution,
    periodicity_bound: usize,
) -> Result<Option<Verdict>> {
    if !phi.is_left_proper() || !phi.is_growing() || !phi.is_primitive() {
        return Ok(None);
    }
    let m = phi.incidence_matrix();
    if rank(&m) < phi.size() {
        return Ok(None);
    }
    let seed = FixedPointSeed::one_sided(phi.image(0)[0], 1);
    let bound = match periodicity_probe(phi, &seed, None, periodicity_bound)? {
        PeriodicityReport::Periodic { .. } => return Ok(None),
        PeriodicityReport::NonPeriodicEvidence { bound, .. } => bound,
    };
    let ones = RowVector::ones(phi.size());
    let nonperiodicity = Nonperiodicity::Evidence { bound };
    let verdict = match phi.constant_length() {
        Some(k) => Verdict::Automatic {
            k: k as u64,
            minimal_root: minimal_root(k as u64)?,
            s: 0,
            eigenvector: ones,
            path: DecisionPath::Nonsingular,
            seed_power: 1,
            nonperiodicity,
        },
        None => {
            let lengths = ones.mul_matrix(&m)?;
            let ratio = Some(BigRational::new(lengths.0[0].clone(), BigInt::one()));
            Verdict::NotAutomatic {
                s: 0,
                v_s: ones,
                v_s_times_m: lengths,
                ratio,
                path: DecisionPath::Nonsingular,
                nonperiodicity,
            }
        }
    };
    Ok(Some(verdict))
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

    fn kolam() -> Substitution {
        Substitution::from_rules(&[("G", "GDD"), ("D", "G")]).unwrap()
    }

    #[test]
    fn minimal_root_examples() {
        assert_eq!(minimal_root(4).unwrap(), 2);
        assert_eq!(minimal_root(8).unwrap(), 2);
        assert_eq!(minimal_root(6).unwrap(), 6);
        assert_eq!(minimal_root(36).unwrap(), 6);
        assert_eq!(minimal_root(1 << 62).unwrap(), 2);
        assert_eq!(minimal_root(3u64.pow(40)).unwrap(), 3);
        assert_eq!(minimal_root(1), Err(Error::InvalidRoot(1)));
    }

    #[test]
    fn return_example_is_four_automatic() {
        let v = decide(&return_example(), &DecideOptions::default()).unwrap();
        assert_eq!(
            v,
            Verdict::Automatic {
                k: 4,
                minimal_root: 2,
                s: 0,
                eigenvector: RowVector::from_ints(&[2, 4]),
                path: DecisionPath::General,
                seed_power: 1,
                nonperiodicity: Nonperiodicity::Evidence { bound: 64 },
            }
        );
    }

    #[test]
    fn gaps_is_not_automatic() {
        let g = gaps();
        let rho = Coding::from_tokens(g.alphabet().clone(), &["3", "3", "4", "2"]).unwrap();
        let opts = DecideOptions::with_coding(rho);
        match decide_left_proper(&g, &opts).unwrap() {
            Verdict::NotAutomatic {
                s,
                v_s,
                v_s_times_m,
                ratio,
                path,
                ..
            } => {
                assert_eq!(s, 1);
                assert_eq!(v_s, RowVector::from_ints(&[4, 4, 5, 3]));
                assert_eq!(v_s_times_m, RowVector::from_ints(&[16, 16, 21, 11]));
                let r = ratio.unwrap();
                assert_eq!(
                    v_s.scale(&r.to_integer()),
                    RowVector::from_ints(&[16, 16, 20, 12])
                );
                assert_eq!(path, DecisionPath::LeftProper);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(decide(&g, &opts).unwrap().kind(), "NotAutomatic");
    }

    #[test]
    fn matrix_example_differs_from_return_example() {
        let prime =
            Substitution::from_rules(&[("a", "aca"), ("b", "acb"), ("c", "abccc")]).unwrap();
        assert_eq!(
            prime.incidence_matrix(),
            return_example().incidence_matrix()
        );
        assert_eq!(
            decide(&prime, &DecideOptions::default()).unwrap().kind(),
            "NotAutomatic"
        );
        assert!(decide(&return_example(), &DecideOptions::default())
            .unwrap()
            .is_automatic());
    }

    #[test]
    fn left_proper_requires_left_proper_input() {
        assert_eq!(
            decide_left_proper(&return_example(), &DecideOptions::default()),
            Err(Error::NotLeftProper)
        );
    }

    #[test]
    fn shortcut_examples() {
        let v = nonsingular_shortcut(&kolam(), 64).unwrap().unwrap();
        assert_eq!(v.kind(), "NotAutomatic");
        let constant = Substitution::from_rules(&[("0", "010"), ("1", "001")]).unwrap();
        // Singular matrix: the shortcut does not apply.
        assert_eq!(nonsingular_shortcut(&constant, 64).unwrap(), None);
        let nonsingular = Substitution::from_rules(&[("0", "001"), ("1", "011")]).unwrap();
        match nonsingular_shortcut(&nonsingular, 64).unwrap().unwrap() {
            Verdict::Automatic { k, .. } => assert_eq!(k, 3),
            other => panic!("{other:?}"),
        }
        assert_eq!(nonsingular_shortcut(&return_example(), 64).unwrap(), None);
    }

    #[test]
    fn non_primitive_is_an_error() {
        let s = Substitution::from_rules(&[("a", "ab"), ("b", "b")]).unwrap();
        assert_eq!(
            decide(&s, &DecideOptions::default()),
            Err(Error::NotPrimitive)
        );
    }

    #[test]
    fn strict_mode_reports_unresolved() {
        let opts = DecideOptions {
            strict: true,
            periodicity_bound: 8,
            ..Default::default()
        };
        assert_eq!(
            decide(&return_example(), &opts).unwrap(),
            Verdict::UnresolvedPeriodicity { bound: 8 }
        );
        let opts = DecideOptions {
            strict: true,
            assume_nonperiodic: true,
            ..Default::default()
        };
        assert!(decide(&return_example(), &opts).unwrap().is_automatic());
    }

    #[test]
    fn periodic_coding_short_circuits() {
        let phi = return_example();
        let opts =
            DecideOptions::with_coding(Coding::constant(phi.alphabet().clone(), "x").unwrap());
        assert_eq!(
            decide(&phi, &opts).unwrap(),
            Verdict::Periodic { certified_at: 1 }
        );
    }
}
