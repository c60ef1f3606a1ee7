//! Argument parsing, command dispatch and exit codes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use morphic_core::automaticity::{analyze, Analysis, DecideOptions, PathChoice, Verdict};
use morphic_core::dekking::{
    build_presentation, merge_letters, to_dfao, ConstantLengthPresentation, FactorSet,
};
use morphic_core::returns::compute_return_system;
use morphic_core::spectral::spectral_scan;
use morphic_core::words::{
    expand_prefix, find_fixed_point_seed, letter_at, periodicity_probe, seed_at_power,
    two_factor_language, Coding, FixedPointSeed, PeriodicityReport, Substitution, Word,
    DEFAULT_PERIODICITY_BOUND,
};
use morphic_core::Error;

use crate::certificate::{
    matrix_json, path_name, CertificateDocument, InputJson, PresentationJson, ReturnSystemJson,
    SeedJson, SpectralJson,
};
use crate::input::{parse_input, InputDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_PRIMITIVE: i32 = 3;
pub const EXIT_UNRESOLVED: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "morphic-gate",
    version,
    about = "Decide automaticity of substitutive sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Start the fixed point at this letter.
    #[arg(long, global = true, value_name = "LETTER")]
    pub seed: Option<String>,
    /// Use this power of the substitution for the fixed point.
    #[arg(long, global = true, value_name = "E")]
    pub power: Option<u32>,
    /// Largest n checked by the factor-complexity probe.
    #[arg(
        long,
        global = true,
        value_name = "N",
        env = "MORPHIC_GATE_PERIODICITY_BOUND",
        default_value_t = DEFAULT_PERIODICITY_BOUND
    )]
    pub periodicity_bound: usize,
    /// Skip the periodicity probe and assume the sequence is not periodic.
    #[arg(long, global = true)]
    pub assume_nonperiodic: bool,
    /// Refuse to rely on probe evidence for nonperiodicity (exit 4).
    #[arg(long, global = true)]
    pub strict: bool,
    /// Which criterion to run.
    #[arg(long, global = true, value_enum, default_value_t = PathArg::Auto)]
    pub path: PathArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Auto,
    General,
    LeftProper,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full decision procedure and print a certificate.
    Analyze { file: PathBuf },
    /// Print the return words to the seed letter and the return substitution.
    ReturnWords { file: PathBuf },
    /// Compile an automatic input into a constant-length substitution and a DFAO.
    Dekking {
        file: PathBuf,
        /// Write the DFAO table to this file.
        #[arg(long, value_name = "PATH")]
        dfao_out: Option<PathBuf>,
        /// Keep the presentation before letter merging.
        #[arg(long)]
        no_merge: bool,
    },
    /// Value of the coded sequence at an index.
    Eval {
        file: PathBuf,
        #[arg(long, value_name = "N")]
        index: BigUint,
    },
    /// Prefix of the coded sequence.
    Expand {
        file: PathBuf,
        #[arg(long, value_name = "L")]
        length: usize,
    },
    /// Rational dynamical eigenvalues e^(2 pi i / q) for prime powers q.
    Spectral {
        file: PathBuf,
        #[arg(long, value_name = "P", default_value_t = morphic_core::spectral::DEFAULT_PRIME_BOUND)]
        prime_bound: u64,
        #[arg(long, value_name = "M", default_value_t = morphic_core::spectral::DEFAULT_EXPONENT_BOUND)]
        exponent_bound: u32,
    },
    /// Factor complexity p(1..n) of the coded sequence.
    Complexity {
        file: PathBuf,
        #[arg(long, value_name = "N")]
        max: usize,
    },
}

impl Command {
    fn file(&self) -> &PathBuf {
        match self {
            Command::Analyze { file }
            | Command::ReturnWords { file }
            | Command::Dekking { file, .. }
            | Command::Eval { file, .. }
            | Command::Expand { file, .. }
            | Command::Spectral { file, .. }
            | Command::Complexity { file, .. } => file,
        }
    }
}

/// What a run produced; `main` prints it and exits with `code`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(code: i32, msg: impl std::fmt::Display) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

/// Exit code for an engine error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotPrimitive => EXIT_NOT_PRIMITIVE,
        Error::SeedUnavailable(_)
        | Error::LetterOutOfRange { .. }
        | Error::NotLeftProper
        | Error::FiniteSystem
        | Error::InvalidModulus(_) => EXIT_PARSE,
        _ => EXIT_INTERNAL,
    }
}

/// Parses arguments, reads the input file (`-` for stdin) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_PARSE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    let path = cli.command.file();
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        match std::io::Read::read_to_string(&mut std::io::stdin(), &mut buf) {
            Ok(_) => buf,
            Err(e) => return Outcome::error(EXIT_IO, format!("reading stdin: {e}")),
        }
    } else {
        match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return Outcome::error(EXIT_IO, format!("reading {}: {e}", path.display())),
        }
    };
    execute(&cli, &text)
}

/// Runs a parsed command on the given file contents.
pub fn execute(cli: &Cli, text: &str) -> Outcome {
    let doc = match parse_input(text) {
        Ok(d) => d,
        Err(e) => return Outcome::error(EXIT_PARSE, e),
    };
    let ctx = match Context::new(cli, doc) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let result = match &cli.command {
        Command::Analyze { .. } => ctx.analyze_cmd(),
        Command::ReturnWords { .. } => ctx.return_words_cmd(),
        Command::Dekking {
            dfao_out, no_merge, ..
        } => ctx.dekking_cmd(dfao_out.as_ref(), !no_merge),
        Command::Eval { index, .. } => ctx.eval_cmd(index),
        Command::Expand { length, .. } => ctx.expand_cmd(*length),
        Command::Spectral {
            prime_bound,
            exponent_bound,
            ..
        } => ctx.spectral_cmd(*prime_bound, *exponent_bound),
        Command::Complexity { max, .. } => ctx.complexity_cmd(*max),
    };
    result.unwrap_or_else(|e| Outcome::error(exit_code(&e), e))
}

struct Context<'a> {
    cli: &'a Cli,
    doc: InputDocument,
    phi: Substitution,
    coding: Option<Coding>,
    seed_hint: Option<usize>,
    two_sided_left: Option<usize>,
}

impl<'a> Context<'a> {
    fn new(cli: &'a Cli, doc: InputDocument) -> Result<Self, Outcome> {
        let phi = doc.substitution();
        let coding = doc.coding(&phi);
        let seed_token = cli.seed.as_ref().or(doc.seed.as_ref());
        let seed_hint = match seed_token {
            Some(t) => Some(phi.alphabet().letter(t).ok_or_else(|| {
                Outcome::error(EXIT_PARSE, format!("--seed: undeclared letter `{t}`"))
            })?),
            None => None,
        };
        let two_sided_left = doc.two_sided.as_ref().map(|t| doc.letter(t));
        Ok(Context {
            cli,
            doc,
            phi,
            coding,
            seed_hint,
            two_sided_left,
        })
    }

    fn options(&self) -> DecideOptions {
        DecideOptions {
            coding: self.coding.clone(),
            seed_hint: self.seed_hint,
            seed_power: self.cli.power,
            two_sided: self.two_sided_left.is_some(),
            periodicity_bound: self.cli.periodicity_bound,
            assume_nonperiodic: self.cli.assume_nonperiodic,
            strict: self.cli.strict,
            path: match self.cli.path {
                PathArg::Auto => PathChoice::Auto,
                PathArg::General => PathChoice::General,
                PathArg::LeftProper => PathChoice::LeftProper,
            },
        }
    }

    fn require_primitive(&self) -> Result<(), Error> {
        if self.phi.is_primitive() {
            Ok(())
        } else {
            Err(Error::NotPrimitive)
        }
    }

    /// Pins the left letter of a two-sided seed to the one named in the file.
    fn fix_two_sided(&self, mut seed: FixedPointSeed) -> Result<FixedPointSeed, Error> {
        let Some(b) = self.two_sided_left else {
            return Ok(seed);
        };
        let psi = self.phi.power(seed.power);
        let pairs = two_factor_language(&self.phi, &seed)?;
        let ends_with_b = psi.image(b).last() == Some(&b);
        if !ends_with_b || !pairs.contains(&Word(vec![b, seed.letter])) {
            return Err(Error::SeedUnavailable(format!(
                "`{}.{}` is not an admissible two-sided seed at power {}",
                self.phi.alphabet().token(b),
                self.phi.alphabet().token(seed.letter),
                seed.power
            )));
        }
        seed.two_sided_left = Some(b);
        Ok(seed)
    }

    fn seed(&self) -> Result<FixedPointSeed, Error> {
        self.require_primitive()?;
        let two_sided = self.two_sided_left.is_some();
        let seed = match self.cli.power {
            Some(e) => seed_at_power(&self.phi, self.seed_hint, two_sided, e)?
                .ok_or_else(|| Error::SeedUnavailable(format!("no fixed point of power {e}")))?,
            None => find_fixed_point_seed(&self.phi, self.seed_hint, two_sided)?,
        };
        self.fix_two_sided(seed)
    }

    fn analysis(&self) -> Result<Analysis, Error> {
        let mut a = analyze(&self.phi, &self.options())?;
        if let Some(seed) = a.seed {
            a.seed = Some(self.fix_two_sided(seed)?);
        }
        Ok(a)
    }

    fn verdict_code(&self, v: &Verdict) -> i32 {
        match v {
            Verdict::UnresolvedPeriodicity { .. } => EXIT_UNRESOLVED,
            _ => EXIT_OK,
        }
    }

    fn coded_tokens(&self, w: &[usize]) -> Vec<String> {
        w.iter()
            .map(|&l| match &self.coding {
                Some(c) => c.output_token(l).to_string(),
                None => self.phi.alphabet().token(l).to_string(),
            })
            .collect()
    }

    fn output_alphabet_single_chars(&self) -> bool {
        match &self.coding {
            Some(c) => c.target().single_char_tokens(),
            None => self.phi.alphabet().single_char_tokens(),
        }
    }

    fn analyze_cmd(&self) -> Result<Outcome, Error> {
        let analysis = self.analysis()?;
        let cert = CertificateDocument::new(&self.doc, &self.phi, &analysis);
        let stdout = if self.cli.json {
            cert.to_json() + "\n"
        } else {
            self.render_analysis(&analysis)
        };
        Ok(Outcome {
            code: self.verdict_code(&analysis.verdict),
            stdout,
            stderr: String::new(),
        })
    }

    fn render_analysis(&self, a: &Analysis) -> String {
        let mut out = String::new();
        let alphabet = self.phi.alphabet();
        let _ = writeln!(
            out,
            "substitution: {} letters, primitive (M^{} > 0)",
            self.phi.size(),
            a.primitivity.witness_power.unwrap_or(0)
        );
        if let Some(seed) = &a.seed {
            let _ = write!(
                out,
                "seed: {} (power {})",
                alphabet.token(seed.letter),
                seed.power
            );
            if let Some(b) = seed.two_sided_left {
                let _ = write!(
                    out,
                    ", two-sided {}.{}",
                    alphabet.token(b),
                    alphabet.token(seed.letter)
                );
            }
            out.push('\n');
        }
        match &a.periodicity {
            Some(PeriodicityReport::Periodic { certified_at, .. }) => {
                let _ = writeln!(
                    out,
                    "periodicity: periodic, p({certified_at}) <= {certified_at}"
                );
            }
            Some(PeriodicityReport::NonPeriodicEvidence { bound, .. }) => {
                let _ = writeln!(
                    out,
                    "periodicity: p(n) >= n + 1 for n <= {bound} (evidence, not proof)"
                );
            }
            None if a.reduction.is_some() => {
                let _ = writeln!(out, "periodicity: assumed nonperiodic");
            }
            None => {}
        }
        if let Some(rs) = &a.return_system {
            let words: Vec<String> = (0..rs.len())
                .map(|i| format!("{i}:{}", rs.render_word(i)))
                .collect();
            let _ = writeln!(out, "return words: {}", words.join(" "));
            let tau: Vec<String> = (0..rs.len())
                .map(|i| {
                    let img: Vec<String> =
                        rs.tau.image(i).iter().map(ToString::to_string).collect();
                    format!("{i} -> {}", img.join(" "))
                })
                .collect();
            let _ = writeln!(out, "tau: {}", tau.join(", "));
        }
        if let Some(m) = &a.matrix {
            let rows: Vec<String> = matrix_json(m)
                .iter()
                .map(|r| format!("[{}]", r.join(",")))
                .collect();
            let _ = writeln!(out, "matrix: [{}]", rows.join(","));
        }
        if let Some(r) = &a.reduction {
            let _ = writeln!(out, "s = {}", r.s);
            let _ = writeln!(out, "v_s = {}", r.v_s);
            let _ = writeln!(out, "v_s * M = {}", r.v_s_image);
        }
        match &a.verdict {
            Verdict::Automatic {
                k,
                minimal_root,
                path,
                ..
            } => {
                let _ = writeln!(
                    out,
                    "verdict: Automatic (k = {k}, minimal root = {minimal_root}, path = {})",
                    path_name(*path)
                );
            }
            Verdict::NotAutomatic {
                v_s, ratio, path, ..
            } => {
                match ratio {
                    Some(r) => {
                        let scaled: Vec<String> = v_s
                            .0
                            .iter()
                            .map(|x| {
                                (r * num_rational::BigRational::from_integer(x.clone())).to_string()
                            })
                            .collect();
                        let _ = writeln!(
                            out,
                            "{r} * v_s = ({}) differs from v_s * M",
                            scaled.join(",")
                        );
                    }
                    None => {
                        let _ = writeln!(out, "v_s is zero");
                    }
                }
                let _ = writeln!(out, "verdict: NotAutomatic (path = {})", path_name(*path));
            }
            Verdict::Periodic { certified_at } => {
                let _ = writeln!(out, "verdict: Periodic (certified at n = {certified_at})");
            }
            Verdict::UnresolvedPeriodicity { bound } => {
                let _ = writeln!(
                    out,
                    "verdict: UnresolvedPeriodicity (no certificate up to n = {bound})"
                );
            }
        }
        out
    }

    fn return_words_cmd(&self) -> Result<Outcome, Error> {
        let seed = self.seed()?;
        let rs = compute_return_system(&self.phi, &seed)?;
        if self.cli.json {
            #[derive(Serialize)]
            struct Out {
                input: InputJson,
                seed: SeedJson,
                return_system: ReturnSystemJson,
            }
            let out = Out {
                input: InputJson::new(&self.doc),
                seed: SeedJson::new(&self.phi, &seed),
                return_system: ReturnSystemJson::new(&rs, seed.power),
            };
            return Ok(Outcome::ok(
                serde_json::to_string_pretty(&out).expect("serialises") + "\n",
            ));
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "return words to {} (power {}):",
            self.phi.alphabet().token(seed.letter),
            seed.power
        );
        for i in 0..rs.len() {
            let img: Vec<String> = rs.tau.image(i).iter().map(ToString::to_string).collect();
            let _ = writeln!(
                out,
                "{i}: {}  tau: {i} -> {}",
                rs.render_word(i),
                img.join(" ")
            );
        }
        let rows: Vec<String> = matrix_json(&rs.m_tau)
            .iter()
            .map(|r| format!("[{}]", r.join(",")))
            .collect();
        let _ = writeln!(out, "M_tau = [{}]", rows.join(","));
        let _ = writeln!(out, "lengths = {}", rs.lengths);
        Ok(Outcome::ok(out))
    }

    /// Builds the presentation for an automatic verdict.
    fn presentation(
        &self,
        a: &Analysis,
        merge: bool,
    ) -> Result<Option<(ConstantLengthPresentation, PresentationJson)>, Error> {
        let Verdict::Automatic { k, s, path, .. } = &a.verdict else {
            return Ok(None);
        };
        let n = u32::try_from(*s).map_err(|_| Error::ContractViolation("s too large".into()))?;
        let (full, set_name) = match (path, &a.return_system) {
            (morphic_core::automaticity::DecisionPath::General, Some(rs)) => (
                build_presentation(&rs.base, FactorSet::ReturnWords(rs), n, *k)?,
                "return-words",
            ),
            (_, _) => {
                let seed = a.seed.ok_or_else(|| {
                    Error::ContractViolation("automatic verdict without seed".into())
                })?;
                (
                    build_presentation(&self.phi, FactorSet::Letters { seed: seed.letter }, n, *k)?,
                    "letters",
                )
            }
        };
        let p = if merge { merge_letters(&full)? } else { full };
        let json = PresentationJson::new(&p, merge, set_name, n);
        Ok(Some((p, json)))
    }

    fn dekking_cmd(&self, dfao_out: Option<&PathBuf>, merge: bool) -> Result<Outcome, Error> {
        let analysis = self.analysis()?;
        let code = self.verdict_code(&analysis.verdict);
        let mut cert = CertificateDocument::new(&self.doc, &self.phi, &analysis);
        let Some((p, json)) = self.presentation(&analysis, merge)? else {
            let msg = format!(
                "no constant-length presentation: verdict is {}",
                analysis.verdict.kind()
            );
            cert.notes.push(msg.clone());
            let stdout = if self.cli.json {
                cert.to_json() + "\n"
            } else {
                self.render_analysis(&analysis) + &msg + "\n"
            };
            return Ok(Outcome {
                code,
                stdout,
                stderr: String::new(),
            });
        };
        let dfao = to_dfao(&p, self.coding.as_ref());
        if let Some(path) = dfao_out {
            if let Err(e) = std::fs::write(path, dfao.to_table()) {
                return Ok(Outcome::error(
                    EXIT_IO,
                    format!("writing {}: {e}", path.display()),
                ));
            }
        }
        let stdout = if self.cli.json {
            cert = cert.with_presentation(json, &dfao);
            cert.to_json() + "\n"
        } else {
            let mut out = self.render_analysis(&analysis);
            let _ = writeln!(
                out,
                "presentation: {} letters, constant length {}{}",
                p.len(),
                p.k,
                if merge { " (merged)" } else { "" }
            );
            for b in 0..p.len() {
                let img: Vec<String> = p.phi_bar.image(b).iter().map(ToString::to_string).collect();
                let _ = writeln!(
                    out,
                    "{b} -> {}  pi({b}) = {}",
                    img.join(" "),
                    p.pi.output_token(b)
                );
            }
            out.push_str("dfao:\n");
            out.push_str(&dfao.to_table());
            out
        };
        Ok(Outcome {
            code,
            stdout,
            stderr: String::new(),
        })
    }

    fn eval_cmd(&self, index: &BigUint) -> Result<Outcome, Error> {
        let seed = self.seed()?;
        let letter = letter_at(&self.phi, &seed, index)?;
        let output = self.coded_tokens(&[letter]).remove(0);
        let stdout = if self.cli.json {
            let v = serde_json::json!({
                "index": index.to_string(),
                "letter": self.phi.alphabet().token(letter),
                "output": output,
            });
            serde_json::to_string_pretty(&v).expect("serialises") + "\n"
        } else {
            output + "\n"
        };
        Ok(Outcome::ok(stdout))
    }

    fn expand_cmd(&self, length: usize) -> Result<Outcome, Error> {
        let seed = self.seed()?;
        let prefix = expand_prefix(&self.phi, &seed, length)?;
        let tokens = self.coded_tokens(&prefix);
        let stdout = if self.cli.json {
            let v = serde_json::json!({ "length": length, "prefix": tokens });
            serde_json::to_string_pretty(&v).expect("serialises") + "\n"
        } else if self.output_alphabet_single_chars() {
            tokens.concat() + "\n"
        } else {
            tokens.join(" ") + "\n"
        };
        Ok(Outcome::ok(stdout))
    }

    fn spectral_cmd(&self, prime_bound: u64, exponent_bound: u32) -> Result<Outcome, Error> {
        self.require_primitive()?;
        let report = spectral_scan(&self.phi, prime_bound, exponent_bound)?;
        let stdout = if self.cli.json {
            serde_json::to_string_pretty(&SpectralJson::new(&report)).expect("serialises") + "\n"
        } else {
            let mut out = String::new();
            let join = |v: Vec<u64>| {
                v.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(out, "eigenvalues at q: {}", join(report.passing()));
            let _ = writeln!(out, "not eigenvalues at q: {}", join(report.failing()));
            for (p, best) in &report.maximal_prime_power {
                if let Some((m, q)) = best {
                    let _ = writeln!(out, "prime {p}: maximal power {p}^{m} = {q}");
                }
            }
            let _ = writeln!(out, "note: {}", morphic_core::spectral::SCOPE_NOTE);
            out
        };
        Ok(Outcome::ok(stdout))
    }

    fn complexity_cmd(&self, max: usize) -> Result<Outcome, Error> {
        let seed = self.seed()?;
        let report = periodicity_probe(&self.phi, &seed, self.coding.as_ref(), max)?;
        let stdout = if self.cli.json {
            let (status, at) = match &report {
                PeriodicityReport::Periodic { certified_at, .. } => {
                    ("periodic", Some(*certified_at))
                }
                PeriodicityReport::NonPeriodicEvidence { .. } => ("evidence", None),
            };
            let v = serde_json::json!({
                "complexity": report.complexity(),
                "status": status,
                "certified_at": at,
            });
            serde_json::to_string_pretty(&v).expect("serialises") + "\n"
        } else {
            let mut out = String::new();
            for (i, p) in report.complexity().iter().enumerate() {
                let _ = writeln!(out, "p({}) = {p}", i + 1);
            }
            match &report {
                PeriodicityReport::Periodic { certified_at, .. } => {
                    let _ = writeln!(out, "periodic: p({certified_at}) <= {certified_at}");
                }
                PeriodicityReport::NonPeriodicEvidence { bound, .. } => {
                    let _ = writeln!(out, "p(n) >= n + 1 for all n <= {bound}");
                }
            }
            out
        };
        Ok(Outcome::ok(stdout))
    }
}
