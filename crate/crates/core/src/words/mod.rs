//! Alphabets, words, morphisms and substitutions.

mod language;

pub use language::{
    expand_prefix, factors_of_length, find_fixed_point_seed, letter_at, periodicity_probe,
    seed_at_power, two_factor_language, FixedPointSeed, PeriodicityReport,
    DEFAULT_PERIODICITY_BOUND,
};

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

/// Index of a letter in its alphabet.
pub type Letter = usize;

/// An ordered list of distinct opaque tokens; a letter is its position.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    tokens: Vec<String>,
    index: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Result<Self> {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::DuplicateLetter(t.clone()));
            }
        }
        Ok(Alphabet { tokens, index })
    }

    /// Alphabet `0, 1, ..., n-1` (tokens are the decimal indices).
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    /// Alphabet of single characters, in order of appearance.
    pub fn from_chars(s: &str) -> Result<Self> {
        Self::new(s.chars().map(String::from))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, letter: Letter) -> &str {
        &self.tokens[letter]
    }

    pub fn letter(&self, token: &str) -> Option<Letter> {
        self.index.get(token).copied()
    }

    pub fn single_char_tokens(&self) -> bool {
        self.tokens.iter().all(|t| t.chars().count() == 1)
    }

    /// Parses a word, either whitespace-separated tokens or, for single-char
    /// alphabets, a run of characters.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let pieces: Vec<String> = if s.split_whitespace().count() == 1 && self.single_char_tokens()
        {
            s.trim().chars().map(String::from).collect()
        } else {
            s.split_whitespace().map(String::from).collect()
        };
        pieces
            .iter()
            .map(|p| {
                self.letter(p)
                    .ok_or_else(|| Error::AlphabetMismatch(format!("unknown token `{p}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Renders a word: concatenated for single-char alphabets, space-separated otherwise.
    pub fn render(&self, w: &[Letter]) -> String {
        let sep = if self.single_char_tokens() { "" } else { " " };
        w.iter()
            .map(|&l| self.token(l))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.tokens).finish()
    }
}

/// A finite word over some alphabet, stored as letter indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn into_inner(self) -> Vec<Letter> {
        self.0
    }
}

impl Deref for Word {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl std::borrow::Borrow<[Letter]> for Word {
    fn borrow(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// A nonerasing morphism between two alphabets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    source: Arc<Alphabet>,
    target: Arc<Alphabet>,
    images: Vec<Word>,
}

impl Morphism {
    pub fn new(source: Arc<Alphabet>, target: Arc<Alphabet>, images: Vec<Word>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::ImageCount {
                expected: source.len(),
                actual: images.len(),
            });
        }
        for (b, img) in images.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::EmptyImage(source.token(b).to_string()));
            }
            if let Some(&bad) = img.iter().find(|&&l| l >= target.len()) {
                return Err(Error::LetterOutOfRange {
                    index: bad,
                    size: target.len(),
                });
            }
        }
        Ok(Morphism {
            source,
            target,
            images,
        })
    }

    pub fn identity(alphabet: Arc<Alphabet>) -> Self {
        let images = (0..alphabet.len()).map(|b| Word(vec![b])).collect();
        Morphism {
            source: alphabet.clone(),
            target: alphabet,
            images,
        }
    }

    pub fn source(&self) -> &Arc<Alphabet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Alphabet> {
        &self.target
    }

    pub fn image(&self, letter: Letter) -> &Word {
        &self.images[letter]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image_lengths(&self) -> Vec<usize> {
        self.images.iter().map(|w| w.len()).collect()
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Constant image length, if all images share one.
    pub fn constant_length(&self) -> Option<usize> {
        let first = self.images[0].len();
        self.images
            .iter()
            .all(|w| w.len() == first)
            .then_some(first)
    }

    pub fn is_coding(&self) -> bool {
        self.constant_length() == Some(1)
    }

    pub fn apply(&self, w: &[Letter]) -> Result<Word> {
        let mut out = Vec::with_capacity(w.len() * self.max_image_len());
        for &l in w {
            let img = self.images.get(l).ok_or(Error::LetterOutOfRange {
                index: l,
                size: self.source.len(),
            })?;
            out.extend_from_slice(img);
        }
        Ok(Word(out))
    }

    /// `outer ∘ inner`: first apply `inner`, then `outer`.
    pub fn compose(outer: &Morphism, inner: &Morphism) -> Result<Morphism> {
        if inner.target != outer.source {
            return Err(Error::AlphabetMismatch(
                "inner target differs from outer source".into(),
            ));
        }
        let images = inner
            .images
            .iter()
            .map(|w| outer.apply(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Morphism {
            source: inner.source.clone(),
            target: outer.target.clone(),
            images,
        })
    }

    /// Entry `(a, b)` counts occurrences of target letter `a` in the image of `b`.
    pub fn incidence_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.target.len(), self.source.len());
        for (b, img) in self.images.iter().enumerate() {
            for &a in img.iter() {
                m[(a, b)] += 1;
            }
        }
        m
    }
}

/// A morphism from an alphabet to itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    morphism: Morphism,
}

impl Substitution {
    pub fn new(alphabet: Arc<Alphabet>, images: Vec<Word>) -> Result<Self> {
        Ok(Substitution {
            morphism: Morphism::new(alphabet.clone(), alphabet, images)?,
        })
    }

    /// Builds a substitution over single-character letters from rules like
    /// `[("a", "aca"), ("b", "bca")]`; the alphabet follows rule order.
    pub fn from_rules(rules: &[(&str, &str)]) -> Result<Self> {
        let alphabet = Arc::new(Alphabet::new(rules.iter().map(|(l, _)| *l))?);
        let images = rules
            .iter()
            .map(|(_, body)| alphabet.parse_word(body))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, images)
    }

    pub fn from_morphism(morphism: Morphism) -> Result<Self> {
        if morphism.source != morphism.target {
            return Err(Error::AlphabetMismatch(
                "substitution needs source = target".into(),
            ));
        }
        Ok(Substitution { morphism })
    }

    pub fn identity(alphabet: Arc<Alphabet>) -> Self {
        Substitution {
            morphism: Morphism::identity(alphabet),
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.morphism.source()
    }

    pub fn size(&self) -> usize {
        self.alphabet().len()
    }

    pub fn as_morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn image(&self, letter: Letter) -> &Word {
        self.morphism.image(letter)
    }

    pub fn images(&self) -> &[Word] {
        self.morphism.images()
    }

    pub fn apply(&self, w: &[Letter]) -> Result<Word> {
        self.morphism.apply(w)
    }

    pub fn compose(&self, inner: &Substitution) -> Result<Substitution> {
        Ok(Substitution {
            morphism: Morphism::compose(&self.morphism, &inner.morphism)?,
        })
    }

    /// `φ^n`; `φ^0` is the identity.
    pub fn power(&self, n: u32) -> Substitution {
        let mut result = Substitution::identity(self.alphabet().clone());
        for _ in 0..n {
            result = self.compose(&result).expect("same alphabet");
        }
        result
    }

    pub fn constant_length(&self) -> Option<usize> {
        self.morphism.constant_length()
    }

    pub fn max_image_len(&self) -> usize {
        self.morphism.max_image_len()
    }

    /// All images share their first letter.
    pub fn is_left_proper(&self) -> bool {
        let first = self.images()[0][0];
        self.images().iter().all(|w| w[0] == first)
    }

    /// Some image has length at least 2.
    pub fn is_growing(&self) -> bool {
        self.max_image_len() >= 2
    }

    pub fn incidence_matrix(&self) -> IntMatrix {
        self.morphism.incidence_matrix()
    }

    /// Checks primitivity within the Wielandt bound `(d-1)^2 + 1` and returns
    /// the least power whose incidence matrix is strictly positive.
    pub fn primitivity(&self) -> Primitivity {
        let d = self.size();
        let base: Vec<Vec<bool>> = {
            let mut b = vec![vec![false; d]; d];
            for (col, img) in self.images().iter().enumerate() {
                for &row in img.iter() {
                    b[row][col] = true;
                }
            }
            b
        };
        let bound = (d - 1) * (d - 1) + 1;
        let mut current = base.clone();
        for n in 1..=bound {
            if current.iter().all(|r| r.iter().all(|&x| x)) {
                return Primitivity {
                    primitive: true,
                    witness_power: Some(n),
                };
            }
            current = bool_mul(&current, &base);
        }
        Primitivity {
            primitive: false,
            witness_power: None,
        }
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity().primitive
    }

    pub fn render_image(&self, letter: Letter) -> String {
        self.alphabet().render(self.image(letter))
    }
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let d = a.len();
    let mut out = vec![vec![false; d]; d];
    for i in 0..d {
        for l in 0..d {
            if a[i][l] {
                for j in 0..d {
                    out[i][j] |= b[l][j];
                }
            }
        }
    }
    out
}

/// Result of the primitivity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Primitivity {
    pub primitive: bool,
    /// Least `n` with `M^n > 0`.
    pub witness_power: Option<usize>,
}

/// A letter-to-letter map applied pointwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coding {
    morphism: Morphism,
}

impl Coding {
    pub fn new(morphism: Morphism) -> Result<Self> {
        if !morphism.is_coding() {
            return Err(Error::AlphabetMismatch(
                "coding images must have length 1".into(),
            ));
        }
        Ok(Coding { morphism })
    }

    /// Builds a coding from per-letter output tokens; the output alphabet is
    /// the distinct tokens in order of first appearance.
    pub fn from_tokens(source: Arc<Alphabet>, outputs: &[&str]) -> Result<Self> {
        let mut distinct: Vec<&str> = Vec::new();
        for o in outputs {
            if !distinct.contains(o) {
                distinct.push(o);
            }
        }
        let target = Arc::new(Alphabet::new(distinct.iter().copied())?);
        let images = outputs
            .iter()
            .map(|o| Word(vec![target.letter(o).expect("collected above")]))
            .collect();
        Self::new(Morphism::new(source, target, images)?)
    }

    pub fn constant(source: Arc<Alphabet>, token: &str) -> Result<Self> {
        let outputs = vec![token; source.len()];
        Self::from_tokens(source, &outputs)
    }

    pub fn source(&self) -> &Arc<Alphabet> {
        self.morphism.source()
    }

    pub fn target(&self) -> &Arc<Alphabet> {
        self.morphism.target()
    }

    pub fn map(&self, letter: Letter) -> Letter {
        self.morphism.image(letter)[0]
    }

    pub fn output_token(&self, letter: Letter) -> &str {
        self.target().token(self.map(letter))
    }

    pub fn apply(&self, w: &[Letter]) -> Word {
        w.iter().map(|&l| self.map(l)).collect()
    }

    pub fn as_morphism(&self) -> &Morphism {
        &self.morphism
    }
}
