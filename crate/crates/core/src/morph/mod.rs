//! Table-driven morphological and phonological analysis of phoneme lattices.
//!
//! Morphemes are found by walking the dictionary trie along every lattice
//! chain at once and are enrolled into a triangular table by phoneme span.
//! Analyses are the tilings of the whole lattice by enrolled morphemes whose
//! junctions pass both connectivity matrices. Phonological alternations are
//! data: a variant pronunciation is its own dictionary entry, licensed at a
//! junction by the phoneme-connectivity matrix.

mod dict;

use std::collections::BTreeSet;
use std::fmt;

pub use dict::{
    build_dictionary, parse_entries, parse_pairs, BuildReport, CompiledDictionary,
    ConnectivityMatrix, Mark, MatrixPair, MorphemeEntry, PosTag, TagSet, Trie, BOS, EOS,
};

use crate::error::Result;
use crate::lattice::PhonemeLattice;
use crate::phonology::{syllabify, PhonemeInventory};
use crate::table::TriangularTable;

pub type MorphTable = TriangularTable<BTreeSet<usize>>;

/// Enrolls every dictionary entry spelled by some chain segment of the
/// lattice. Positions are scanned left to right; each still-live trie node
/// advances on every alternative of the next position, and prefixes with no
/// continuation are dropped.
pub fn enroll(lattice: &PhonemeLattice, dict: &CompiledDictionary) -> MorphTable {
    let n = lattice.len();
    let trie = dict.trie();
    let mut table = MorphTable::new(n);
    // (start position, trie node)
    let mut frontier: Vec<(usize, usize)> = Vec::new();
    for pos in 0..n {
        frontier.push((pos, dict::ROOT));
        let mut next = Vec::with_capacity(frontier.len());
        for &(start, node) in &frontier {
            for alt in lattice.alternatives(pos) {
                if let Some(child) = trie.child(node, alt) {
                    let cell = table.cell_mut(start + 1, pos + 1);
                    cell.extend(trie.entries_at(child).iter().copied());
                    next.push((start, child));
                }
            }
        }
        frontier = next;
    }
    table
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Legal { eojeol_boundary: bool },
    Morphotactic { left_tag: String, right_tag: String },
    Phonological { left: String, right: String },
}

impl Verdict {
    pub fn is_legal(&self) -> bool {
        matches!(self, Verdict::Legal { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Legal {
                eojeol_boundary: false,
            } => f.write_str("legal"),
            Verdict::Legal {
                eojeol_boundary: true,
            } => f.write_str("legal (Eojeol boundary)"),
            Verdict::Morphotactic {
                left_tag,
                right_tag,
            } => write!(f, "morpheme connectivity forbids {left_tag} + {right_tag}"),
            Verdict::Phonological { left, right } => {
                write!(f, "phoneme connectivity forbids {left} + {right}")
            }
        }
    }
}

/// Checks whether `right` may directly follow `left`.
pub fn connect(left: &MorphemeEntry, right: &MorphemeEntry, dict: &CompiledDictionary) -> Verdict {
    let morph = dict.morph_mark(&left.right_tag, &right.left_tag);
    let Some(morph) = morph.filter(|m| m.is_legal()) else {
        return Verdict::Morphotactic {
            left_tag: left.right_tag.clone(),
            right_tag: right.left_tag.clone(),
        };
    };
    if !dict.phon_mark(left, right).is_some_and(Mark::is_legal) {
        return Verdict::Phonological {
            left: left.last_phoneme().to_string(),
            right: right.first_phoneme().to_string(),
        };
    }
    Verdict::Legal {
        eojeol_boundary: morph == Mark::Eojeol,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnalyzedMorpheme {
    pub entry: usize,
    /// 1-based inclusive phoneme span.
    pub span: (usize, usize),
    pub orthographic: String,
    pub gloss: String,
    pub surface: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MorphAnalysis {
    pub morphemes: Vec<AnalyzedMorpheme>,
    /// `eojeol_breaks[k]` marks an Eojeol boundary between morphemes k and k+1.
    pub eojeol_breaks: Vec<bool>,
}

impl MorphAnalysis {
    /// Orthographic morphemes joined by `+`, or by a space where an Eojeol
    /// boundary was crossed.
    pub fn render(&self) -> String {
        self.join(|m| &m.orthographic)
    }

    pub fn gloss(&self) -> String {
        self.join(|m| &m.gloss)
    }

    fn join(&self, field: impl Fn(&AnalyzedMorpheme) -> &str) -> String {
        let mut out = String::new();
        for (k, m) in self.morphemes.iter().enumerate() {
            if k > 0 {
                out.push(if self.eojeol_breaks[k - 1] { ' ' } else { '+' });
            }
            out.push_str(field(m));
        }
        out
    }

    /// The surface phoneme chain this analysis spells.
    pub fn chain(&self) -> Vec<String> {
        self.morphemes
            .iter()
            .flat_map(|m| m.surface.iter().cloned())
            .collect()
    }

    pub fn key(&self) -> Vec<(usize, (usize, usize))> {
        self.morphemes.iter().map(|m| (m.entry, m.span)).collect()
    }

    pub fn spans_text(&self) -> String {
        self.morphemes
            .iter()
            .map(|m| format!("{}-{}", m.span.0, m.span.1))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Per-morpheme syllable spans `(first, last)` over the syllabified
    /// chain, or `None` when the chain has no syllabification.
    pub fn syllable_spans(&self, inventory: &PhonemeInventory) -> Option<Vec<(usize, usize)>> {
        let phonemes = inventory.resolve(&self.chain()).ok()?;
        let syllables = syllabify(&phonemes).ok()?;
        let mut owner = Vec::with_capacity(phonemes.len());
        for (k, s) in syllables.iter().enumerate() {
            owner.extend(std::iter::repeat_n(k + 1, s.len()));
        }
        Some(
            self.morphemes
                .iter()
                .map(|m| (owner[m.span.0 - 1], owner[m.span.1 - 1]))
                .collect(),
        )
    }
}

/// Renders orthographic morphemes the way [`MorphAnalysis::render`] does,
/// without Eojeol breaks.
pub fn render<S: AsRef<str>>(orthographic: &[S]) -> String {
    orthographic
        .iter()
        .map(AsRef::as_ref)
        .collect::<Vec<_>>()
        .join("+")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MorphemeLattice {
    pub analyses: Vec<MorphAnalysis>,
    /// Phoneme positions covered by the lattice that was analyzed.
    pub positions: usize,
    /// Furthest phoneme position reached by a legal partial analysis.
    pub furthest: usize,
}

impl MorphemeLattice {
    pub fn is_empty(&self) -> bool {
        self.analyses.is_empty()
    }

    pub fn len(&self) -> usize {
        self.analyses.len()
    }

    pub fn renderings(&self) -> Vec<String> {
        self.analyses.iter().map(MorphAnalysis::render).collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Item {
    start: usize,
    end: usize,
    entry: usize,
}

/// All legal tilings of the lattice by enrolled morphemes.
pub fn analyze(lattice: &PhonemeLattice, dict: &CompiledDictionary) -> MorphemeLattice {
    let n = lattice.len();
    if n == 0 {
        return MorphemeLattice::default();
    }
    let table = enroll(lattice, dict);

    let mut items: Vec<Item> = Vec::new();
    let mut starting_at: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    let mut ending_at: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for ((i, j), cell) in table.iter() {
        for &entry in cell {
            starting_at[i].push(items.len());
            ending_at[j].push(items.len());
            items.push(Item {
                start: i,
                end: j,
                entry,
            });
        }
    }

    let link = |a: &Item, b: &Item| connect(dict.entry(a.entry), dict.entry(b.entry), dict);

    // viable: the item can be continued to a legal end of the Eonjeol
    let mut viable = vec![false; items.len()];
    for start in (1..=n).rev() {
        for &k in &starting_at[start] {
            let it = items[k];
            viable[k] = if it.end == n {
                dict.ends_eonjeol(dict.entry(it.entry))
            } else {
                starting_at[it.end + 1]
                    .iter()
                    .any(|&m| viable[m] && link(&it, &items[m]).is_legal())
            };
        }
    }

    // reached: some legal prefix from the start ends with this item
    let mut reached = vec![false; items.len()];
    let mut furthest = 0;
    for start in 1..=n {
        for &k in &starting_at[start] {
            let it = items[k];
            reached[k] = if start == 1 {
                dict.starts_eonjeol(dict.entry(it.entry))
            } else {
                ending_at[start - 1]
                    .iter()
                    .any(|&p| reached[p] && link(&items[p], &it).is_legal())
            };
            if reached[k] {
                furthest = furthest.max(it.end);
            }
        }
    }

    let mut analyses = Vec::new();
    let mut path: Vec<(usize, bool)> = Vec::new();
    for &k in &starting_at[1] {
        if viable[k] && reached[k] {
            path.push((k, false));
            extend(
                &items,
                &starting_at,
                &viable,
                n,
                dict,
                &mut path,
                &mut analyses,
            );
            path.pop();
        }
    }

    MorphemeLattice {
        analyses,
        positions: n,
        furthest,
    }
}

fn extend(
    items: &[Item],
    starting_at: &[Vec<usize>],
    viable: &[bool],
    n: usize,
    dict: &CompiledDictionary,
    path: &mut Vec<(usize, bool)>,
    out: &mut Vec<MorphAnalysis>,
) {
    let (last, _) = *path.last().expect("path starts non-empty");
    let it = items[last];
    if it.end == n {
        out.push(materialize(items, path, dict));
        return;
    }
    for &m in &starting_at[it.end + 1] {
        if !viable[m] {
            continue;
        }
        if let Verdict::Legal { eojeol_boundary } =
            connect(dict.entry(it.entry), dict.entry(items[m].entry), dict)
        {
            path.push((m, eojeol_boundary));
            extend(items, starting_at, viable, n, dict, path, out);
            path.pop();
        }
    }
}

fn materialize(items: &[Item], path: &[(usize, bool)], dict: &CompiledDictionary) -> MorphAnalysis {
    let morphemes = path
        .iter()
        .map(|&(k, _)| {
            let it = items[k];
            let e = dict.entry(it.entry);
            AnalyzedMorpheme {
                entry: it.entry,
                span: (it.start, it.end),
                orthographic: e.orthographic.clone(),
                gloss: e.gloss.clone(),
                surface: e.surface.clone(),
            }
        })
        .collect();
    MorphAnalysis {
        morphemes,
        eojeol_breaks: path.iter().skip(1).map(|&(_, b)| b).collect(),
    }
}

/// Loads a dictionary from its text files. Without a tag file the tag set is
/// the flat set of tags used by the entries.
pub fn load_dictionary(
    inventory: &PhonemeInventory,
    dict_text: (&str, &str),
    tags_text: Option<(&str, &str)>,
    morph_text: (&str, &str),
    phon_text: (&str, &str),
) -> Result<BuildReport> {
    let entries = parse_entries(dict_text.0, dict_text.1, inventory)?;
    let tags = match tags_text {
        Some((text, name)) => TagSet::parse(text, name)?,
        None => TagSet::flat(
            entries
                .iter()
                .flat_map(|e| [e.left_tag.as_str(), e.right_tag.as_str()]),
        ),
    };
    let morph = parse_pairs(morph_text.0, morph_text.1)?;
    let phon = parse_pairs(phon_text.0, phon_text.1)?;
    build_dictionary(entries, tags, &morph, &phon)
}
