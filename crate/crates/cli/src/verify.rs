//! Re-checks a JSON certificate using only the numbers it contains.
//!
//! Nothing here calls into the analysis engine: words are rebuilt from the
//! echoed rules, matrices are multiplied and ranked locally.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("certificate check failed: {0}")]
pub struct VerifyError(pub String);

type Check<T> = Result<T, VerifyError>;

fn fail<T>(msg: impl Into<String>) -> Check<T> {
    Err(VerifyError(msg.into()))
}

fn field<'a>(v: &'a Value, key: &str) -> Check<&'a Value> {
    v.get(key)
        .ok_or_else(|| VerifyError(format!("missing `{key}`")))
}

fn string(v: &Value) -> Check<&str> {
    v.as_str()
        .ok_or_else(|| VerifyError(format!("expected a string, found {v}")))
}

fn integer(v: &Value) -> Check<BigInt> {
    string(v)?
        .parse()
        .map_err(|_| VerifyError(format!("not a decimal integer: {v}")))
}

fn array(v: &Value) -> Check<&Vec<Value>> {
    v.as_array()
        .ok_or_else(|| VerifyError(format!("expected an array, found {v}")))
}

fn usize_of(v: &Value) -> Check<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| VerifyError(format!("expected an index, found {v}")))
}

fn vector(v: &Value) -> Check<Vec<BigInt>> {
    array(v)?.iter().map(integer).collect()
}

fn matrix(v: &Value) -> Check<Vec<Vec<BigInt>>> {
    array(v)?.iter().map(vector).collect()
}

fn tokens(v: &Value) -> Check<Vec<String>> {
    array(v)?
        .iter()
        .map(|t| string(t).map(str::to_string))
        .collect()
}

fn times(v: &[BigInt], m: &[Vec<BigInt>]) -> Check<Vec<BigInt>> {
    if m.len() != v.len() || m.iter().any(|row| row.len() != v.len()) {
        return fail("matrix and vector dimensions differ");
    }
    Ok((0..v.len())
        .map(|j| v.iter().zip(m).map(|(x, row)| x * &row[j]).sum())
        .collect())
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| row.iter().zip(b).map(|(x, r)| x * &r[j]).sum())
                .collect()
        })
        .collect()
}

/// Rank by division-free elimination.
fn rank(m: &[Vec<BigInt>]) -> usize {
    let mut a = m.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let (x, y) = (a[r][c].clone(), a[i][c].clone());
            let pivot = a[r].clone();
            for (e, p) in a[i].iter_mut().zip(&pivot) {
                *e = &*e * &x - p * &y;
            }
        }
        r += 1;
    }
    r
}

fn proportional(v: &[BigInt], w: &[BigInt]) -> bool {
    match v.iter().position(|x| !x.is_zero()) {
        None => false,
        Some(i) => (0..v.len()).all(|j| &w[j] * &v[i] == &w[i] * &v[j]),
    }
}

/// Parses a rational written as `p` or `p/q`.
fn rational(s: &str) -> Check<(BigInt, BigInt)> {
    let bad = || VerifyError(format!("not a rational: {s}"));
    match s.split_once('/') {
        Some((p, q)) => Ok((p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?)),
        None => Ok((s.parse().map_err(|_| bad())?, BigInt::one())),
    }
}

struct Rules {
    letters: Vec<String>,
    images: HashMap<String, Vec<String>>,
}

impl Rules {
    fn new(input: &Value) -> Check<Self> {
        let letters = tokens(field(input, "letters")?)?;
        let mut images = HashMap::new();
        for r in array(field(input, "rules")?)? {
            images.insert(
                string(field(r, "letter")?)?.to_string(),
                tokens(field(r, "image")?)?,
            );
        }
        if letters.iter().any(|l| !images.contains_key(l)) {
            return fail("a declared letter has no rule");
        }
        Ok(Rules { letters, images })
    }

    fn apply(&self, w: &[String], times: u32) -> Check<Vec<String>> {
        let mut w = w.to_vec();
        for _ in 0..times {
            let mut next = Vec::new();
            for t in &w {
                next.extend(
                    self.images
                        .get(t)
                        .ok_or_else(|| VerifyError(format!("unknown token {t}")))?
                        .iter()
                        .cloned(),
                );
            }
            w = next;
        }
        Ok(w)
    }

    fn incidence(&self) -> Vec<Vec<BigInt>> {
        let d = self.letters.len();
        let mut m = vec![vec![BigInt::zero(); d]; d];
        for (b, lb) in self.letters.iter().enumerate() {
            for t in &self.images[lb] {
                let a = self.letters.iter().position(|l| l == t).expect("validated");
                m[a][b] += 1;
            }
        }
        m
    }
}

/// Checks the return system against the echoed rules; returns `M_tau` and the length vector.
fn check_return_system(rules: &Rules, rs: &Value) -> Check<(Vec<Vec<BigInt>>, Vec<BigInt>)> {
    let power = u32::try_from(usize_of(field(rs, "base_power")?)?)
        .map_err(|_| VerifyError("power".into()))?;
    let a = string(field(rs, "seed_letter")?)?;
    let words: Vec<Vec<String>> = array(field(rs, "words")?)?
        .iter()
        .map(tokens)
        .collect::<Check<_>>()?;
    let tau: Vec<Vec<usize>> = array(field(rs, "tau")?)?
        .iter()
        .map(|r| array(r)?.iter().map(usize_of).collect())
        .collect::<Check<_>>()?;
    if tau.len() != words.len() {
        return fail("tau and return words differ in size");
    }
    for w in &words {
        if w.first().map(String::as_str) != Some(a) || w.iter().filter(|t| *t == a).count() != 1 {
            return fail(format!("{w:?} is not a return word to {a}"));
        }
    }
    for (i, rule) in tau.iter().enumerate() {
        let mut rebuilt = Vec::new();
        for &j in rule {
            rebuilt.extend(
                words
                    .get(j)
                    .ok_or_else(|| VerifyError("tau index out of range".into()))?
                    .iter()
                    .cloned(),
            );
        }
        if rebuilt != rules.apply(&words[i], power)? {
            return fail(format!(
                "tau rule {i} does not factorise the image of return word {i}"
            ));
        }
    }
    let n = words.len();
    let mut m_tau = vec![vec![BigInt::zero(); n]; n];
    for (i, rule) in tau.iter().enumerate() {
        for &j in rule {
            m_tau[j][i] += 1;
        }
    }
    if matrix(field(rs, "m_tau")?)? != m_tau {
        return fail("m_tau does not count tau");
    }
    let lengths: Vec<BigInt> = words.iter().map(|w| BigInt::from(w.len())).collect();
    if vector(field(rs, "lengths")?)? != lengths {
        return fail("lengths do not match the return words");
    }
    Ok((m_tau, lengths))
}

fn is_perfect_power(r: u64) -> bool {
    (2..64u32).any(|j| {
        let root = (r as f64).powf(1.0 / j as f64).round() as u64;
        (root.saturating_sub(1)..=root + 1).any(|c| c >= 2 && c.checked_pow(j) == Some(r))
    })
}

/// Re-validates a certificate; returns the list of checks that passed.
pub fn verify_certificate(json: &str) -> Result<Vec<String>, VerifyError> {
    let doc: Value =
        serde_json::from_str(json).map_err(|e| VerifyError(format!("invalid JSON: {e}")))?;
    let mut passed = Vec::new();
    let rules = Rules::new(field(&doc, "input")?)?;
    let verdict = field(&doc, "verdict")?;
    let kind = string(field(verdict, "kind")?)?;

    if kind == "Periodic" {
        if let Some(p) = doc.get("periodicity").filter(|p| !p.is_null()) {
            let at = usize_of(field(verdict, "certified_at")?)?;
            let complexity: Vec<usize> = array(field(p, "complexity")?)?
                .iter()
                .map(usize_of)
                .collect::<Check<_>>()?;
            match complexity.get(at.wrapping_sub(1)) {
                Some(&c) if c <= at => passed.push(format!("p({at}) = {c} <= {at}")),
                _ => return fail("complexity does not certify periodicity"),
            }
        }
        return Ok(passed);
    }
    if kind != "Automatic" && kind != "NotAutomatic" {
        return Ok(passed);
    }

    let path = string(field(verdict, "path")?)?;
    let m = matrix(field(&doc, "matrix")?)?;
    let start = vector(field(&doc, "start_vector")?)?;
    match path {
        "general" => {
            let (m_tau, lengths) = check_return_system(&rules, field(&doc, "return_system")?)?;
            if m != m_tau || start != lengths {
                return fail("matrix or start vector differ from the return system");
            }
            passed.push("return system factorises the images of its words".into());
        }
        "left-proper" | "nonsingular" => {
            let firsts: Vec<&String> = rules.letters.iter().map(|l| &rules.images[l][0]).collect();
            if firsts.windows(2).any(|w| w[0] != w[1]) {
                return fail("left-proper path on a substitution that is not left-proper");
            }
            if m != rules.incidence() || start.iter().any(|x| !x.is_one()) {
                return fail("matrix is not the incidence matrix or start vector is not all ones");
            }
            if (path == "nonsingular") != (rank(&m) == m.len()) {
                return fail("nonsingular path label disagrees with the rank");
            }
            passed.push("matrix is the incidence matrix of a left-proper substitution".into());
        }
        other => return fail(format!("unknown path {other}")),
    }

    let s = usize_of(field(&doc, "s")?)?;
    let mut power = (0..m.len())
        .map(|i| {
            (0..m.len())
                .map(|j| BigInt::from(u8::from(i == j)))
                .collect()
        })
        .collect::<Vec<Vec<BigInt>>>();
    let mut ranks = vec![rank(&power)];
    for _ in 0..=s {
        power = mat_mul(&power, &m);
        ranks.push(rank(&power));
    }
    if ranks[s] != ranks[s + 1] || (s > 0 && ranks[s - 1] == ranks[s]) {
        return fail(format!(
            "s = {s} is not the first index where rank(M^s) stabilises"
        ));
    }
    passed.push(format!("rank(M^s) stabilises first at s = {s}"));

    let mut v_s = start.clone();
    for _ in 0..s {
        v_s = times(&v_s, &m)?;
    }
    if vector(field(&doc, "v_s")?)? != v_s {
        return fail("v_s is not start_vector * M^s");
    }
    let image = times(&v_s, &m)?;
    if vector(field(&doc, "v_s_times_m")?)? != image {
        return fail("v_s_times_m is not v_s * M");
    }

    if kind == "Automatic" {
        let k = integer(field(verdict, "k")?)?;
        if k < BigInt::from(2) || v_s.iter().any(|x| !x.is_positive()) {
            return fail("eigenvalue below 2 or non-positive eigenvector");
        }
        if v_s.iter().zip(&image).any(|(x, y)| &k * x != *y) {
            return fail("v_s * M != k * v_s");
        }
        passed.push(format!("v_s * M = {k} * v_s"));
        let root: u64 = string(field(verdict, "minimal_root")?)?
            .parse()
            .map_err(|_| VerifyError("minimal_root".into()))?;
        let k64: u64 = k
            .to_string()
            .parse()
            .map_err(|_| VerifyError("k too large".into()))?;
        let mut p = root;
        while p < k64 {
            p = p
                .checked_mul(root)
                .ok_or_else(|| VerifyError("minimal root overflow".into()))?;
        }
        if p != k64 || is_perfect_power(root) {
            return fail(format!("{root} is not the minimal root of {k64}"));
        }
        passed.push(format!("{root} is the minimal root of {k64}"));
    } else {
        if proportional(&v_s, &image) {
            return fail("v_s is an eigenvector but the verdict is NotAutomatic");
        }
        if let Some(r) = verdict.get("ratio").and_then(Value::as_str) {
            let (p, q) = rational(r)?;
            if v_s.iter().zip(&image).all(|(x, y)| x * &p == y * &q) {
                return fail("ratio * v_s equals v_s * M");
            }
        }
        passed.push("v_s * M is not a multiple of v_s".into());
    }
    Ok(passed)
}
