//! Machine-readable certificates. Every big integer is a decimal string and
//! every collection has a fixed order, so output is byte-stable.

use serde::Serialize;

use morphic_core::automaticity::{Analysis, DecisionPath, Nonperiodicity, Verdict};
use morphic_core::dekking::{ConstantLengthPresentation, Dfao};
use morphic_core::linalg::{IntMatrix, RowVector};
use morphic_core::returns::ReturnSystem;
use morphic_core::spectral::{EigenWitness, SpectralReport, SCOPE_NOTE};
use morphic_core::words::{FixedPointSeed, PeriodicityReport, Substitution};

use crate::input::InputDocument;

pub const FORMAT: &str = "morphic-gate-certificate/1";

#[derive(Debug, Clone, Serialize)]
pub struct RuleJson {
    pub letter: String,
    pub image: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CodingJson {
    pub letter: String,
    pub output: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputJson {
    pub letters: Vec<String>,
    pub rules: Vec<RuleJson>,
    pub coding: Option<Vec<CodingJson>>,
    pub seed: Option<String>,
    pub two_sided: Option<String>,
    pub normalized: String,
}

impl InputJson {
    pub fn new(doc: &InputDocument) -> Self {
        InputJson {
            letters: doc.letters.clone(),
            rules: doc
                .letters
                .iter()
                .zip(&doc.rules)
                .map(|(l, body)| RuleJson {
                    letter: l.clone(),
                    image: body.clone(),
                })
                .collect(),
            coding: doc.coding.as_ref().map(|outs| {
                doc.letters
                    .iter()
                    .zip(outs)
                    .map(|(l, o)| CodingJson {
                        letter: l.clone(),
                        output: o.clone(),
                    })
                    .collect()
            }),
            seed: doc.seed.clone(),
            two_sided: doc.two_sided.clone(),
            normalized: doc.print(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimitivityJson {
    pub primitive: bool,
    /// Least `n` with every entry of `M^n` positive.
    pub witness_power: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedJson {
    pub letter: String,
    pub power: u32,
    pub two_sided_left: Option<String>,
}

impl SeedJson {
    pub fn new(phi: &Substitution, seed: &FixedPointSeed) -> Self {
        SeedJson {
            letter: phi.alphabet().token(seed.letter).to_string(),
            power: seed.power,
            two_sided_left: seed
                .two_sided_left
                .map(|b| phi.alphabet().token(b).to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicityJson {
    /// `periodic`, `evidence` or `assumed`.
    pub status: &'static str,
    pub bound: Option<usize>,
    pub certified_at: Option<usize>,
    pub complexity: Vec<usize>,
}

impl PeriodicityJson {
    fn from_report(report: Option<&PeriodicityReport>) -> Option<Self> {
        Some(match report? {
            PeriodicityReport::Periodic {
                certified_at,
                complexity,
            } => PeriodicityJson {
                status: "periodic",
                bound: Some(complexity.len()),
                certified_at: Some(*certified_at),
                complexity: complexity.clone(),
            },
            PeriodicityReport::NonPeriodicEvidence { bound, complexity } => PeriodicityJson {
                status: "evidence",
                bound: Some(*bound),
                certified_at: None,
                complexity: complexity.clone(),
            },
        })
    }

    fn assumed() -> Self {
        PeriodicityJson {
            status: "assumed",
            bound: None,
            certified_at: None,
            complexity: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReturnSystemJson {
    /// Return words are taken for `φ^base_power`.
    pub base_power: u32,
    pub seed_letter: String,
    pub words: Vec<Vec<String>>,
    /// `tau[i]` lists the return-word indices of `φ^base_power(words[i])`.
    pub tau: Vec<Vec<usize>>,
    pub m_tau: Vec<Vec<String>>,
    pub lengths: Vec<String>,
}

impl ReturnSystemJson {
    pub fn new(rs: &ReturnSystem, power: u32) -> Self {
        let alphabet = rs.base.alphabet();
        ReturnSystemJson {
            base_power: power,
            seed_letter: alphabet.token(rs.seed_letter).to_string(),
            words: rs
                .words
                .iter()
                .map(|w| w.iter().map(|&l| alphabet.token(l).to_string()).collect())
                .collect(),
            tau: rs.tau.images().iter().map(|w| w.to_vec()).collect(),
            m_tau: matrix_json(&rs.m_tau),
            lengths: vector_json(&rs.lengths),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictJson {
    pub kind: &'static str,
    pub path: Option<&'static str>,
    pub k: Option<String>,
    pub minimal_root: Option<String>,
    pub seed_power: Option<u32>,
    /// `evidence` or `assumed`.
    pub nonperiodicity: Option<&'static str>,
    pub ratio: Option<String>,
    pub ratio_times_v_s: Option<Vec<String>>,
    pub certified_at: Option<usize>,
    pub bound: Option<usize>,
}

pub fn path_name(path: DecisionPath) -> &'static str {
    match path {
        DecisionPath::General => "general",
        DecisionPath::LeftProper => "left-proper",
        DecisionPath::Nonsingular => "nonsingular",
    }
}

fn nonperiodicity_name(n: &Nonperiodicity) -> &'static str {
    match n {
        Nonperiodicity::Evidence { .. } => "evidence",
        Nonperiodicity::Assumed => "assumed",
    }
}

impl VerdictJson {
    fn new(v: &Verdict) -> Self {
        let empty = VerdictJson {
            kind: v.kind(),
            path: None,
            k: None,
            minimal_root: None,
            seed_power: None,
            nonperiodicity: None,
            ratio: None,
            ratio_times_v_s: None,
            certified_at: None,
            bound: None,
        };
        match v {
            Verdict::Automatic {
                k,
                minimal_root,
                path,
                seed_power,
                nonperiodicity,
                ..
            } => VerdictJson {
                path: Some(path_name(*path)),
                k: Some(k.to_string()),
                minimal_root: Some(minimal_root.to_string()),
                seed_power: Some(*seed_power),
                nonperiodicity: Some(nonperiodicity_name(nonperiodicity)),
                ..empty
            },
            Verdict::NotAutomatic {
                v_s,
                ratio,
                path,
                nonperiodicity,
                ..
            } => VerdictJson {
                path: Some(path_name(*path)),
                nonperiodicity: Some(nonperiodicity_name(nonperiodicity)),
                ratio: ratio.as_ref().map(ToString::to_string),
                ratio_times_v_s: ratio.as_ref().map(|r| {
                    v_s.0
                        .iter()
                        .map(|x| {
                            (r * num_rational::BigRational::from_integer(x.clone())).to_string()
                        })
                        .collect()
                }),
                ..empty
            },
            Verdict::Periodic { certified_at } => VerdictJson {
                certified_at: Some(*certified_at),
                ..empty
            },
            Verdict::UnresolvedPeriodicity { bound } => VerdictJson {
                bound: Some(*bound),
                ..empty
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PresentationLetterJson {
    pub id: usize,
    /// `(factor index, offset)` the letter was created from.
    pub origin: (usize, usize),
    pub image: Vec<usize>,
    pub output: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PresentationJson {
    pub k: usize,
    pub merged: bool,
    /// `letters` or `return-words`.
    pub factor_set: &'static str,
    pub n: u32,
    pub seed: usize,
    pub letters: Vec<PresentationLetterJson>,
}

impl PresentationJson {
    pub fn new(
        p: &ConstantLengthPresentation,
        merged: bool,
        factor_set: &'static str,
        n: u32,
    ) -> Self {
        PresentationJson {
            k: p.k,
            merged,
            factor_set,
            n,
            seed: p.seed,
            letters: (0..p.len())
                .map(|b| PresentationLetterJson {
                    id: b,
                    origin: p.letters[b],
                    image: p.phi_bar.image(b).to_vec(),
                    output: p.pi.output_token(b).to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessJson {
    /// `hit`, `cycle` or `chain-bound`.
    pub kind: &'static str,
    pub n: Option<usize>,
    pub tail: Option<usize>,
    pub period: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulusJson {
    pub q: String,
    pub eigenvalue: bool,
    pub witness: WitnessJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimePowerJson {
    pub prime: String,
    pub exponent: Option<u32>,
    pub q: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralJson {
    pub scope: &'static str,
    pub prime_bound: String,
    pub exponent_bound: u32,
    pub tested: Vec<ModulusJson>,
    pub maximal_prime_power: Vec<PrimePowerJson>,
}

impl SpectralJson {
    pub fn new(r: &SpectralReport) -> Self {
        SpectralJson {
            scope: SCOPE_NOTE,
            prime_bound: r.prime_bound.to_string(),
            exponent_bound: r.exponent_bound,
            tested: r
                .tested
                .iter()
                .map(|t| ModulusJson {
                    q: t.q.to_string(),
                    eigenvalue: t.is_eigenvalue,
                    witness: match t.witness {
                        EigenWitness::Hit { n } => WitnessJson {
                            kind: "hit",
                            n: Some(n),
                            tail: None,
                            period: None,
                        },
                        EigenWitness::Cycle { tail, period } => WitnessJson {
                            kind: "cycle",
                            n: None,
                            tail: Some(tail),
                            period: Some(period),
                        },
                        EigenWitness::ChainBound { checked_through } => WitnessJson {
                            kind: "chain-bound",
                            n: Some(checked_through),
                            tail: None,
                            period: None,
                        },
                    },
                })
                .collect(),
            maximal_prime_power: r
                .maximal_prime_power
                .iter()
                .map(|(p, best)| PrimePowerJson {
                    prime: p.to_string(),
                    exponent: best.map(|(m, _)| m),
                    q: best.map(|(_, q)| q.to_string()),
                })
                .collect(),
        }
    }
}

/// The full report for one input.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateDocument {
    pub format: &'static str,
    pub input: InputJson,
    pub primitivity: PrimitivityJson,
    pub seed: Option<SeedJson>,
    pub periodicity: Option<PeriodicityJson>,
    pub return_system: Option<ReturnSystemJson>,
    /// The matrix `M` of the eigen test (`M_tau`, or the incidence matrix on the left-proper path).
    pub matrix: Option<Vec<Vec<String>>>,
    pub start_vector: Option<Vec<String>>,
    pub s: Option<usize>,
    pub v_s: Option<Vec<String>>,
    pub v_s_times_m: Option<Vec<String>>,
    pub eigenvalue: Option<String>,
    pub verdict: VerdictJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub presentation: Option<PresentationJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dfao: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralJson>,
    pub notes: Vec<String>,
}

pub fn matrix_json(m: &IntMatrix) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(ToString::to_string).collect())
        .collect()
}

pub fn vector_json(v: &RowVector) -> Vec<String> {
    v.0.iter().map(ToString::to_string).collect()
}

impl CertificateDocument {
    pub fn new(doc: &InputDocument, phi: &Substitution, analysis: &Analysis) -> Self {
        let periodicity = match (&analysis.periodicity, &analysis.verdict) {
            (Some(r), _) => PeriodicityJson::from_report(Some(r)),
            (
                None,
                Verdict::Automatic {
                    nonperiodicity: Nonperiodicity::Assumed,
                    ..
                }
                | Verdict::NotAutomatic {
                    nonperiodicity: Nonperiodicity::Assumed,
                    ..
                },
            ) => Some(PeriodicityJson::assumed()),
            _ => None,
        };
        let mut notes = Vec::new();
        if matches!(periodicity.as_ref().map(|p| p.status), Some("evidence")) {
            notes.push(
                "nonperiodicity rests on the bounded complexity probe: p(n) >= n + 1 for all n up to the bound"
                    .to_string(),
            );
        }
        if let Verdict::Periodic { .. } = analysis.verdict {
            notes.push(
                "the coded sequence is ultimately periodic, hence k-automatic for every k >= 2"
                    .into(),
            );
        }
        let reduction = analysis.reduction.as_ref();
        CertificateDocument {
            format: FORMAT,
            input: InputJson::new(doc),
            primitivity: PrimitivityJson {
                primitive: analysis.primitivity.primitive,
                witness_power: analysis.primitivity.witness_power,
            },
            seed: analysis.seed.as_ref().map(|s| SeedJson::new(phi, s)),
            periodicity,
            return_system: analysis
                .return_system
                .as_ref()
                .map(|rs| ReturnSystemJson::new(rs, analysis.seed.map_or(1, |s| s.power))),
            matrix: analysis.matrix.as_ref().map(matrix_json),
            start_vector: analysis.start_vector.as_ref().map(vector_json),
            s: reduction.map(|r| r.s),
            v_s: reduction.map(|r| vector_json(&r.v_s)),
            v_s_times_m: reduction.map(|r| vector_json(&r.v_s_image)),
            eigenvalue: reduction.and_then(|r| r.eigen.as_ref().map(ToString::to_string)),
            verdict: VerdictJson::new(&analysis.verdict),
            presentation: None,
            dfao: None,
            spectral: None,
            notes,
        }
    }

    pub fn with_presentation(mut self, p: PresentationJson, dfao: &Dfao) -> Self {
        self.presentation = Some(p);
        self.dfao = Some(dfao.to_table());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }
}
