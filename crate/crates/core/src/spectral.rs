//! Rational dynamical eigenvalues of primitive substitution systems.
//!
//! `e^{2πip/q}` is an eigenvalue iff `q` divides every `|φ^n(b)|` for some
//! `n ≥ 0`, i.e. iff the orbit of the all-ones vector under `M_φ` reaches zero
//! modulo `q`. Irrational eigenvalues are not examined.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{modular_zero_orbit, OrbitOutcome, RowVector};
use crate::words::Substitution;

pub const DEFAULT_PRIME_BOUND: u64 = 50;
pub const DEFAULT_EXPONENT_BOUND: u32 = 6;

/// States stored while looking for a cycle certificate; past this the
/// kernel-chain bound is reported instead.
const CYCLE_CERTIFICATE_CAP: usize = 1 << 14;

/// Reports cover roots of unity only.
pub const SCOPE_NOTE: &str = "rational eigenvalues only; irrational eigenvalues are not examined";

/// Why a modulus does or does not give an eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenWitness {
    /// `q` divides every `|φ^n(b)|` at this (least) `n`.
    Hit { n: usize },
    /// The orbit modulo `q` cycles without reaching zero.
    Cycle { tail: usize, period: usize },
    /// Zero is absorbing and the kernels of `M^n mod q` stabilise after
    /// `d·Ω(q)` steps; the orbit stayed nonzero through that index.
    ChainBound { checked_through: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenvalueTest {
    pub q: u64,
    pub is_eigenvalue: bool,
    pub witness: EigenWitness,
}

/// Number of prime factors of `q` counted with multiplicity.
fn big_omega(mut q: u64) -> usize {
    let mut count = 0;
    let mut p = 2;
    while p * p <= q {
        while q.is_multiple_of(p) {
            q /= p;
            count += 1;
        }
        p += 1;
    }
    if q > 1 {
        count += 1;
    }
    count
}

/// Tests whether `e^{2πi/q}` is a dynamical eigenvalue.
pub fn rational_eigenvalue(phi: &Substitution, q: u64) -> Result<EigenvalueTest> {
    if q < 2 {
        return Err(Error::InvalidModulus(q));
    }
    if !phi.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let m = phi.incidence_matrix();
    let modulus = BigInt::from(q);
    let horizon = phi.size() * big_omega(q);
    let mut v = RowVector::ones(phi.size());
    for n in 0..=horizon {
        if v.entries().iter().all(|x| x.mod_floor(&modulus).is_zero()) {
            return Ok(EigenvalueTest {
                q,
                is_eigenvalue: true,
                witness: EigenWitness::Hit { n },
            });
        }
        v = RowVector(
            v.mul_matrix(&m)?
                .0
                .iter()
                .map(|x| x.mod_floor(&modulus))
                .collect(),
        );
    }
    let witness =
        match modular_zero_orbit(&RowVector::ones(phi.size()), &m, q, CYCLE_CERTIFICATE_CAP) {
            Ok(OrbitOutcome::Misses { tail, period }) => EigenWitness::Cycle { tail, period },
            Ok(OrbitOutcome::Hits { n }) => {
                return Err(Error::ContractViolation(format!(
                    "orbit modulo {q} reached zero at {n}, beyond the kernel-chain bound {horizon}"
                )))
            }
            Err(Error::OrbitCapExceeded { .. }) => EigenWitness::ChainBound {
                checked_through: horizon,
            },
            Err(e) => return Err(e),
        };
    Ok(EigenvalueTest {
        q,
        is_eigenvalue: false,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralReport {
    pub prime_bound: u64,
    pub exponent_bound: u32,
    pub tested: Vec<EigenvalueTest>,
    /// Per prime, the largest `(m, p^m)` that passed, if any.
    pub maximal_prime_power: BTreeMap<u64, Option<(u32, u64)>>,
}

impl SpectralReport {
    pub fn passing(&self) -> Vec<u64> {
        self.tested
            .iter()
            .filter(|t| t.is_eigenvalue)
            .map(|t| t.q)
            .collect()
    }

    pub fn failing(&self) -> Vec<u64> {
        self.tested
            .iter()
            .filter(|t| !t.is_eigenvalue)
            .map(|t| t.q)
            .collect()
    }
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound)
        .filter(|&n| (2..).take_while(|p| p * p <= n).all(|p| n % p != 0))
        .collect()
}

/// Tests `q = p^m` for every prime `p ≤ prime_bound` and `1 ≤ m ≤ exponent_bound`.
pub fn spectral_scan(
    phi: &Substitution,
    prime_bound: u64,
    exponent_bound: u32,
) -> Result<SpectralReport> {
    let mut tested = Vec::new();
    let mut maximal = BTreeMap::new();
    for p in primes_up_to(prime_bound) {
        let mut best = None;
        for m in 1..=exponent_bound {
            let Some(q) = p.checked_pow(m) else { break };
            let t = rational_eigenvalue(phi, q)?;
            if t.is_eigenvalue {
                best = Some((m, q));
            }
            tested.push(t);
        }
        maximal.insert(p, best);
    }
    Ok(SpectralReport {
        prime_bound,
        exponent_bound,
        tested,
        maximal_prime_power: maximal,
    })
}
