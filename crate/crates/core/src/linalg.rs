//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Everything here is exact: rank uses fraction-free (Bareiss) elimination,
//! eigenvalue checks are done with rationals, and modular orbits are tracked
//! state by state.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Default hard cap on the number of stored states in [`modular_zero_orbit`].
pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

/// A dense matrix of arbitrary-precision integers, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must share the same length.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().cloned().map(Into::into))
            .collect();
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column_sums(&self) -> Vec<BigInt> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| &self[(i, j)]).sum())
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(l, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "power of a non-square matrix".into(),
            ));
        }
        let mut result = IntMatrix::identity(self.rows);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Determinant by Bareiss elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "determinant of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// A row vector of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RowVector(pub Vec<BigInt>);

impl RowVector {
    pub fn ones(dim: usize) -> Self {
        RowVector(vec![BigInt::one(); dim])
    }

    pub fn from_ints<T: Into<BigInt> + Clone>(entries: &[T]) -> Self {
        RowVector(entries.iter().cloned().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    /// Computes `self · m`.
    pub fn mul_matrix(&self, m: &IntMatrix) -> Result<RowVector> {
        if self.len() != m.rows() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} times {}x{} matrix",
                self.len(),
                m.rows(),
                m.cols()
            )));
        }
        let mut out = vec![BigInt::zero(); m.cols()];
        for (i, v) in self.0.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += v * &m[(i, j)];
            }
        }
        Ok(RowVector(out))
    }

    pub fn scale(&self, c: &BigInt) -> RowVector {
        RowVector(self.0.iter().map(|x| x * c).collect())
    }
}

impl fmt::Debug for RowVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RowVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Rank over the rationals, computed by fraction-free elimination.
pub fn rank(m: &IntMatrix) -> usize {
    let mut a = m.to_rows();
    let (rows, cols) = (m.rows(), m.cols());
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                // Bareiss: the division is exact.
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Size of the largest Jordan block for eigenvalue 0: the least `s` with
/// `rank(M^s) = rank(M^{s+1})`.
pub fn nilpotency_index(m: &IntMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "nilpotency index of a non-square matrix".into(),
        ));
    }
    let mut power = IntMatrix::identity(m.rows());
    let mut current = m.rows();
    for s in 0..=m.rows() {
        let next_power = power.mul(m)?;
        let next = rank(&next_power);
        if next == current {
            return Ok(s);
        }
        current = next;
        power = next_power;
    }
    // Rank sequence strictly decreases at most `dim` times.
    Err(Error::ContractViolation(
        "rank sequence did not stabilise".into(),
    ))
}

/// Returns `λ` if `v·M = λ·v`; `None` otherwise.
pub fn left_eigenvector_test(v: &RowVector, m: &IntMatrix) -> Result<Option<BigRational>> {
    let image = v.mul_matrix(m)?;
    eigenvalue_of_pair(v, &image)
}

/// Checks whether `image` is a scalar multiple of `v` and returns the scalar.
pub fn eigenvalue_of_pair(v: &RowVector, image: &RowVector) -> Result<Option<BigRational>> {
    if v.len() != image.len() {
        return Err(Error::DimensionMismatch("vector lengths differ".into()));
    }
    let Some(i) = v.0.iter().position(|x| !x.is_zero()) else {
        return Err(Error::ZeroVector);
    };
    let lambda = BigRational::new(image.0[i].clone(), v.0[i].clone());
    let consistent =
        v.0.iter()
            .zip(&image.0)
            .all(|(x, y)| y * lambda.denom() == x * lambda.numer());
    Ok(consistent.then_some(lambda))
}

/// Result of reducing a vector to the stable range of `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenReduction {
    /// Nilpotency index of `M`.
    pub s: usize,
    /// `v0 · M^s`.
    pub v_s: RowVector,
    /// `v_s · M`.
    pub v_s_image: RowVector,
    /// Present iff `v_s` is a left eigenvector of `M`.
    pub eigen: Option<BigRational>,
}

/// Pushes `v0` forward by `M^s`, `s` the nilpotency index, and tests the
/// result. If any `v0·M^n` is a left eigenvector, so is `v0·M^s`.
pub fn eigen_index_reduce(v0: &RowVector, m: &IntMatrix) -> Result<EigenReduction> {
    if v0.is_zero() {
        return Err(Error::ZeroVector);
    }
    let s = nilpotency_index(m)?;
    let mut v_s = v0.clone();
    for _ in 0..s {
        v_s = v_s.mul_matrix(m)?;
    }
    let v_s_image = v_s.mul_matrix(m)?;
    let eigen = if v_s.is_zero() {
        None
    } else {
        eigenvalue_of_pair(&v_s, &v_s_image)?
    };
    Ok(EigenReduction {
        s,
        v_s,
        v_s_image,
        eigen,
    })
}

/// Outcome of following `v·M^n mod q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitOutcome {
    /// `v·M^n ≡ 0 (mod q)` with `n` minimal.
    Hits { n: usize },
    /// The orbit entered a cycle without visiting zero: states `tail..tail+period`
    /// repeat forever.
    Misses { tail: usize, period: usize },
}

impl OrbitOutcome {
    pub fn hits(&self) -> bool {
        matches!(self, OrbitOutcome::Hits { .. })
    }
}

/// Decides whether the zero vector occurs in the orbit `{v·M^n mod q}`.
///
/// The orbit is eventually periodic; states are stored until a repeat is
/// seen, with at most `cap` stored states.
pub fn modular_zero_orbit(
    v: &RowVector,
    m: &IntMatrix,
    q: u64,
    cap: usize,
) -> Result<OrbitOutcome> {
    if q < 2 {
        return Err(Error::InvalidModulus(q));
    }
    if !m.is_square() || v.len() != m.rows() {
        return Err(Error::DimensionMismatch("orbit vector and matrix".into()));
    }
    let modulus = BigInt::from(q);
    let reduce = |x: &BigInt| -> u64 {
        let r = x.mod_floor(&modulus);
        u64::try_from(r).expect("residue fits in u64")
    };
    let reduced: Vec<Vec<u64>> = m
        .to_rows()
        .iter()
        .map(|row| row.iter().map(reduce).collect())
        .collect();
    let mut state: Vec<u64> = v.0.iter().map(reduce).collect();
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let dim = m.rows();
    for n in 0.. {
        if state.iter().all(|&x| x == 0) {
            return Ok(OrbitOutcome::Hits { n });
        }
        if let Some(&first) = seen.get(&state) {
            return Ok(OrbitOutcome::Misses {
                tail: first,
                period: n - first,
            });
        }
        if seen.len() >= cap {
            return Err(Error::OrbitCapExceeded { cap });
        }
        seen.insert(state.clone(), n);
        let mut next = vec![0u64; dim];
        for (i, &x) in state.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, slot) in next.iter_mut().enumerate() {
                let prod = (x as u128 * reduced[i][j] as u128) % q as u128;
                *slot = ((*slot as u128 + prod) % q as u128) as u64;
            }
        }
        state = next;
    }
    unreachable!()
}

/// Integer value of a rational, if it is one.
pub fn as_integer(r: &BigRational) -> Option<BigInt> {
    r.is_integer().then(|| r.numer().clone())
}

/// True if every entry of the vector is positive.
pub fn is_positive(v: &RowVector) -> bool {
    v.0.iter().all(Signed::is_positive)
}
