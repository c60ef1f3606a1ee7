//! The line-oriented substitution file format.
//!
//! ```text
//! # comment
//! letters = a b c
//! seed = a
//! a -> a c a
//! b -> bca          # single-character form, only for single-character alphabets
//! c -> c b c a c
//! [coding]
//! a -> 0
//! ```

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use morphic_core::words::{Alphabet, Coding, Letter, Substitution, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("missing `letters = ...` declaration")]
    MissingLetters,
    #[error("`letters` declared twice")]
    DuplicateDeclaration,
    #[error("letter `{0}` declared twice")]
    DuplicateLetter(String),
    #[error("undeclared token `{0}`")]
    UndeclaredToken(String),
    #[error("duplicate rule for `{0}`")]
    DuplicateRule(String),
    #[error("empty image for `{0}`")]
    EmptyImage(String),
    #[error("no rule for letter `{0}`")]
    MissingRule(String),
    #[error("coding has no output for letter `{0}`")]
    MissingCoding(String),
    #[error("coding output for `{0}` must be a single token")]
    CodingArity(String),
    #[error("unknown section `{0}`")]
    UnknownSection(String),
    #[error("`{0}` given twice")]
    DuplicateSetting(String),
    #[error("cannot parse line: {0}")]
    Syntax(String),
}

/// Parse failure at a 1-based line and column (column 0 when the error is about the whole file).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

/// A parsed and normalised input file. Rules and coding entries are stored in
/// the order of the letter declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputDocument {
    pub letters: Vec<String>,
    pub rules: Vec<Vec<String>>,
    pub coding: Option<Vec<String>>,
    pub seed: Option<String>,
    pub two_sided: Option<String>,
}

struct Line<'a> {
    number: usize,
    raw: &'a str,
}

impl Line<'_> {
    fn error(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.number,
            column,
            kind,
        }
    }

    /// 1-based character column of a subslice of this line.
    fn column_of(&self, part: &str) -> usize {
        let byte = part.as_ptr() as usize - self.raw.as_ptr() as usize;
        self.raw[..byte].chars().count() + 1
    }
}

#[derive(PartialEq)]
enum Section {
    Rules,
    Coding,
}

pub fn parse_input(text: &str) -> Result<InputDocument, ParseError> {
    let mut letters: Option<Vec<String>> = None;
    let mut rules: Vec<Option<Vec<String>>> = Vec::new();
    let mut coding: Vec<Option<String>> = Vec::new();
    let mut seed: Option<String> = None;
    let mut two_sided: Option<String> = None;
    let mut section = Section::Rules;
    let mut any_coding = false;

    for (i, raw) in text.lines().enumerate() {
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let line = Line { number: i + 1, raw };

        if let Some(name) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            if name.trim() != "coding" {
                return Err(line.error(
                    line.column_of(text),
                    ParseErrorKind::UnknownSection(name.trim().into()),
                ));
            }
            if letters.is_none() {
                return Err(line.error(line.column_of(text), ParseErrorKind::MissingLetters));
            }
            section = Section::Coding;
            any_coding = true;
            continue;
        }

        let setting = text
            .split_once('=')
            .filter(|(key, _)| matches!(key.trim(), "letters" | "seed" | "two-sided"));
        if let Some((key, value)) = setting {
            let key = key.trim();
            match key {
                "letters" => {
                    if letters.is_some() {
                        return Err(
                            line.error(line.column_of(text), ParseErrorKind::DuplicateDeclaration)
                        );
                    }
                    let mut seen = HashSet::new();
                    let mut tokens = Vec::new();
                    for tok in value.split_whitespace() {
                        if tok == "->" || !seen.insert(tok) {
                            return Err(line.error(
                                line.column_of(tok),
                                ParseErrorKind::DuplicateLetter(tok.into()),
                            ));
                        }
                        tokens.push(tok.to_string());
                    }
                    if tokens.is_empty() {
                        return Err(
                            line.error(line.column_of(text), ParseErrorKind::MissingLetters)
                        );
                    }
                    rules = vec![None; tokens.len()];
                    coding = vec![None; tokens.len()];
                    letters = Some(tokens);
                }
                "seed" | "two-sided" => {
                    let declared = letters.as_ref().ok_or_else(|| {
                        line.error(line.column_of(text), ParseErrorKind::MissingLetters)
                    })?;
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    let [tok] = parts.as_slice() else {
                        return Err(
                            line.error(line.column_of(text), ParseErrorKind::Syntax(text.into()))
                        );
                    };
                    if !declared.iter().any(|l| l == tok) {
                        return Err(line.error(
                            line.column_of(tok),
                            ParseErrorKind::UndeclaredToken((*tok).into()),
                        ));
                    }
                    let slot = if key == "seed" {
                        &mut seed
                    } else {
                        &mut two_sided
                    };
                    if slot.is_some() {
                        return Err(line.error(
                            line.column_of(text),
                            ParseErrorKind::DuplicateSetting(key.into()),
                        ));
                    }
                    *slot = Some(tok.to_string());
                }
                _ => unreachable!("filtered above"),
            }
            continue;
        }

        let Some((lhs, rhs)) = text.split_once("->") else {
            return Err(line.error(line.column_of(text), ParseErrorKind::Syntax(text.into())));
        };
        let declared = letters
            .as_ref()
            .ok_or_else(|| line.error(line.column_of(text), ParseErrorKind::MissingLetters))?;
        let lhs = lhs.trim();
        let index = declared.iter().position(|l| l == lhs).ok_or_else(|| {
            line.error(
                line.column_of(lhs),
                ParseErrorKind::UndeclaredToken(lhs.into()),
            )
        })?;
        let body: Vec<&str> = rhs.split_whitespace().collect();

        match section {
            Section::Rules => {
                if rules[index].is_some() {
                    return Err(line.error(
                        line.column_of(lhs),
                        ParseErrorKind::DuplicateRule(lhs.into()),
                    ));
                }
                if body.is_empty() {
                    return Err(
                        line.error(line.column_of(lhs), ParseErrorKind::EmptyImage(lhs.into()))
                    );
                }
                rules[index] = Some(parse_body(&line, declared, &body)?);
            }
            Section::Coding => {
                if coding[index].is_some() {
                    return Err(line.error(
                        line.column_of(lhs),
                        ParseErrorKind::DuplicateRule(lhs.into()),
                    ));
                }
                match body.as_slice() {
                    [] => {
                        return Err(
                            line.error(line.column_of(lhs), ParseErrorKind::EmptyImage(lhs.into()))
                        )
                    }
                    [out] => coding[index] = Some(out.to_string()),
                    [_, extra, ..] => {
                        return Err(line.error(
                            line.column_of(extra),
                            ParseErrorKind::CodingArity(lhs.into()),
                        ))
                    }
                }
            }
        }
    }

    let letters = letters.ok_or(ParseError {
        line: 0,
        column: 0,
        kind: ParseErrorKind::MissingLetters,
    })?;
    let at_end = |kind| ParseError {
        line: text.lines().count(),
        column: 0,
        kind,
    };
    let rules = rules
        .into_iter()
        .zip(&letters)
        .map(|(r, l)| r.ok_or_else(|| at_end(ParseErrorKind::MissingRule(l.clone()))))
        .collect::<Result<Vec<_>, _>>()?;
    let coding = if any_coding {
        Some(
            coding
                .into_iter()
                .zip(&letters)
                .map(|(c, l)| c.ok_or_else(|| at_end(ParseErrorKind::MissingCoding(l.clone()))))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        None
    };
    Ok(InputDocument {
        letters,
        rules,
        coding,
        seed,
        two_sided,
    })
}

/// Splits a rule body into declared tokens. A lone body token over a
/// single-character alphabet is read character by character.
fn parse_body(
    line: &Line<'_>,
    declared: &[String],
    body: &[&str],
) -> Result<Vec<String>, ParseError> {
    let single_chars = declared.iter().all(|l| l.chars().count() == 1);
    if let [word] = body {
        if single_chars && word.chars().count() > 1 {
            let start = line.column_of(word);
            return word
                .chars()
                .enumerate()
                .map(|(i, c)| {
                    let tok = c.to_string();
                    if declared.contains(&tok) {
                        Ok(tok)
                    } else {
                        Err(line.error(start + i, ParseErrorKind::UndeclaredToken(tok)))
                    }
                })
                .collect();
        }
    }
    body.iter()
        .map(|tok| {
            if declared.iter().any(|l| l == tok) {
                Ok(tok.to_string())
            } else {
                Err(line.error(
                    line.column_of(tok),
                    ParseErrorKind::UndeclaredToken((*tok).into()),
                ))
            }
        })
        .collect()
}

impl fmt::Display for InputDocument {
    /// The normalised form: whitespace-separated rule bodies in declaration order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "letters = {}", self.letters.join(" "))?;
        if let Some(s) = &self.seed {
            writeln!(f, "seed = {s}")?;
        }
        if let Some(t) = &self.two_sided {
            writeln!(f, "two-sided = {t}")?;
        }
        for (l, body) in self.letters.iter().zip(&self.rules) {
            writeln!(f, "{l} -> {}", body.join(" "))?;
        }
        if let Some(coding) = &self.coding {
            writeln!(f, "[coding]")?;
            for (l, out) in self.letters.iter().zip(coding) {
                writeln!(f, "{l} -> {out}")?;
            }
        }
        Ok(())
    }
}

impl InputDocument {
    pub fn print(&self) -> String {
        self.to_string()
    }

    pub fn alphabet(&self) -> Arc<Alphabet> {
        Arc::new(
            Alphabet::new(self.letters.iter().cloned()).expect("letters validated by the parser"),
        )
    }

    pub fn substitution(&self) -> Substitution {
        let alphabet = self.alphabet();
        let images = self
            .rules
            .iter()
            .map(|body| body.iter().map(|t| self.letter(t)).collect::<Word>())
            .collect();
        Substitution::new(alphabet, images).expect("rules validated by the parser")
    }

    /// The coding over the substitution's alphabet, if one was given.
    pub fn coding(&self, phi: &Substitution) -> Option<Coding> {
        self.coding.as_ref().map(|outs| {
            let outs: Vec<&str> = outs.iter().map(String::as_str).collect();
            Coding::from_tokens(phi.alphabet().clone(), &outs)
                .expect("coding validated by the parser")
        })
    }

    pub fn letter(&self, token: &str) -> Letter {
        self.letters
            .iter()
            .position(|l| l == token)
            .expect("declared token")
    }
}
