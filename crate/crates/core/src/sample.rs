//! Desk-scale sample data shipped with the crate. Every CLI file argument
//! defaults to one of these.

use crate::grammar::Lexicon;
use crate::lattice::{ConfusionMatrix, PhonemeLattice};
use crate::morph::{load_dictionary, CompiledDictionary};
use crate::parser::RelaxationParams;
use crate::phonology::PhonemeInventory;

pub const INVENTORY: &str = crate::phonology::SAMPLE_INVENTORY;
pub const DICTIONARY: &str = include_str!("../data/dictionary.tsv");
pub const TAGS: &str = include_str!("../data/tags.tsv");
pub const MORPH_MATRIX: &str = include_str!("../data/morph.matrix");
pub const PHON_MATRIX: &str = include_str!("../data/phon.matrix");
pub const CONFUSION: &str = include_str!("../data/confusion.tsv");
pub const EONJEOLS: &str = include_str!("../data/eonjeols.tsv");
pub const CIWUL_LATTICE: &str = include_str!("../data/ciwul.lattice");
pub const LEXICON: &str = include_str!("../data/lexicon.tsv");
pub const PARAMS: &str = include_str!("../data/params.conf");
pub const SENTENCE: &str = include_str!("../data/sentence.txt");

pub fn inventory() -> PhonemeInventory {
    PhonemeInventory::sample()
}

pub fn dictionary() -> CompiledDictionary {
    load_dictionary(
        &inventory(),
        (DICTIONARY, "dictionary.tsv"),
        Some((TAGS, "tags.tsv")),
        (MORPH_MATRIX, "morph.matrix"),
        (PHON_MATRIX, "phon.matrix"),
    )
    .expect("bundled dictionary is valid")
    .dictionary
}

pub fn confusion() -> ConfusionMatrix {
    ConfusionMatrix::parse(CONFUSION, "confusion.tsv").expect("bundled confusion matrix is valid")
}

pub fn ciwul_lattice() -> PhonemeLattice {
    PhonemeLattice::parse(CIWUL_LATTICE, "ciwul.lattice").expect("bundled lattice is valid")
}

pub fn lexicon() -> Lexicon {
    Lexicon::parse(LEXICON, "lexicon.tsv").expect("bundled lexicon is valid")
}

pub fn params() -> RelaxationParams {
    RelaxationParams::parse(PARAMS, "params.conf").expect("bundled params are valid")
}

/// `(surface, expected rendering)` pairs of the Eonjeol corpus.
pub fn eonjeols() -> Vec<(String, String)> {
    crate::error::data_lines(EONJEOLS)
        .filter_map(|(_, line)| {
            let (surface, truth) = line.split_once('\t')?;
            Some((surface.trim().to_string(), truth.trim().to_string()))
        })
        .collect()
}
