#![allow(dead_code)]

use std::sync::Arc;

use morphic_core::words::{Alphabet, Coding, Substitution};

pub struct Golden {
    pub name: &'static str,
    pub phi: Substitution,
    pub coding: Option<Coding>,
}

pub fn return_example() -> Substitution {
    Substitution::from_rules(&[("a", "aca"), ("b", "bca"), ("c", "cbcac")]).unwrap()
}

pub fn matrix_twin() -> Substitution {
    Substitution::from_rules(&[("a", "aca"), ("b", "acb"), ("c", "abccc")]).unwrap()
}

pub fn gaps() -> Substitution {
    let alphabet = Arc::new(Alphabet::new(["a", "abar", "b", "c"]).unwrap());
    let images = ["a abar b c", "a abar c b", "a abar b c b", "a abar c"]
        .iter()
        .map(|s| alphabet.parse_word(s).unwrap())
        .collect();
    Substitution::new(alphabet, images).unwrap()
}

pub fn gaps_coding() -> Coding {
    Coding::from_tokens(gaps().alphabet().clone(), &["3", "3", "4", "2"]).unwrap()
}

pub fn kolam() -> Substitution {
    Substitution::from_rules(&[("G", "GDD"), ("D", "G")]).unwrap()
}

pub fn optimal() -> Substitution {
    Substitution::from_rules(&[("a", "aaaabbbbcccc"), ("b", "abcaa"), ("c", "abbbccc")]).unwrap()
}

pub fn spectral() -> Substitution {
    Substitution::from_rules(&[("a", "abbbba"), ("b", "aa")]).unwrap()
}

pub fn goldens() -> Vec<Golden> {
    vec![
        Golden {
            name: "return",
            phi: return_example(),
            coding: None,
        },
        Golden {
            name: "gaps",
            phi: gaps(),
            coding: Some(gaps_coding()),
        },
        Golden {
            name: "kolam",
            phi: kolam(),
            coding: None,
        },
        Golden {
            name: "optimal",
            phi: optimal(),
            coding: None,
        },
        Golden {
            name: "matrix",
            phi: matrix_twin(),
            coding: None,
        },
        Golden {
            name: "spectral",
            phi: spectral(),
            coding: None,
        },
    ]
}
