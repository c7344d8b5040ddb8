use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{data_lines, Error, Result};
use crate::phonology::PhonemeInventory;

/// Reserved left-hand name for the start of an Eonjeol in the morpheme matrix.
pub const BOS: &str = "BOS";
/// Reserved right-hand name for the end of an Eonjeol.
pub const EOS: &str = "EOS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosTag {
    pub name: String,
    pub parent: Option<String>,
}

/// Hierarchical part-of-speech tags. A matrix pair declared on a tag also
/// covers its descendants unless a more specific pair overrides it.
#[derive(Debug, Clone, Default)]
pub struct TagSet {
    tags: Vec<PosTag>,
    index: HashMap<String, usize>,
}

impl TagSet {
    pub fn new(tags: Vec<PosTag>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, t) in tags.iter().enumerate() {
            if t.name == BOS || t.name == EOS {
                return Err(Error::Dictionary(format!("{} is a reserved name", t.name)));
            }
            if index.insert(t.name.clone(), i).is_some() {
                return Err(Error::Dictionary(format!(
                    "tag {:?} declared twice",
                    t.name
                )));
            }
        }
        for t in &tags {
            if let Some(p) = &t.parent {
                if !index.contains_key(p) {
                    return Err(Error::Undeclared {
                        kind: "parent tag",
                        name: p.clone(),
                    });
                }
            }
        }
        let set = TagSet { tags, index };
        for t in &set.tags {
            // a chain longer than the tag count must revisit a tag
            if set.ancestors(&t.name).nth(set.tags.len()).is_some() {
                return Err(Error::Dictionary(format!(
                    "tag hierarchy has a cycle through {:?}",
                    t.name
                )));
            }
        }
        Ok(set)
    }

    /// Flat tag set with no hierarchy.
    pub fn flat<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Self {
        let mut seen = HashSet::new();
        let tags = names
            .into_iter()
            .filter(|n| seen.insert(n.as_ref().to_string()))
            .map(|n| PosTag {
                name: n.as_ref().to_string(),
                parent: None,
            })
            .collect();
        TagSet::new(tags).expect("flat tag set of distinct names")
    }

    /// Reads `name[<TAB>parent]` lines.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut tags = Vec::new();
        for (line_no, line) in data_lines(text) {
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let tag = match cols.as_slice() {
                [name] | [name, ""] => PosTag {
                    name: name.to_string(),
                    parent: None,
                },
                [name, parent] => PosTag {
                    name: name.to_string(),
                    parent: Some(parent.to_string()),
                },
                _ => {
                    return Err(Error::at_line(
                        source_name,
                        line_no,
                        "expected name[<TAB>parent]",
                    ))
                }
            };
            tags.push(tag);
        }
        TagSet::new(tags).map_err(|e| Error::at_line(source_name, 0, e))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn tags(&self) -> &[PosTag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// The tag itself, then its parent, grandparent and so on. Unknown names
    /// yield only themselves.
    pub fn ancestors<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        std::iter::successors(Some(name), move |n| {
            self.index
                .get(*n)
                .and_then(|&i| self.tags[i].parent.as_deref())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MorphemeEntry {
    /// Phonetic transcription, the trie key.
    pub surface: Vec<String>,
    /// Underlying form in Yale text, `-` between syllables.
    pub orthographic: String,
    pub gloss: String,
    pub left_tag: String,
    pub right_tag: String,
    /// Connectivity class of the first surface phoneme.
    pub left_phon: String,
    /// Connectivity class of the last surface phoneme.
    pub right_phon: String,
}

impl MorphemeEntry {
    pub fn first_phoneme(&self) -> &str {
        &self.surface[0]
    }

    pub fn last_phoneme(&self) -> &str {
        &self.surface[self.surface.len() - 1]
    }

    /// Idiomatic entries span several morphemes and carry distinct tags.
    pub fn is_idiom(&self) -> bool {
        self.left_tag != self.right_tag
    }
}

/// Reads `surface<TAB>orthographic<TAB>gloss<TAB>left_tag<TAB>right_tag<TAB>left_phon<TAB>right_phon`.
pub fn parse_entries(
    text: &str,
    source_name: &str,
    inventory: &PhonemeInventory,
) -> Result<Vec<MorphemeEntry>> {
    let mut out = Vec::new();
    for (line_no, line) in data_lines(text) {
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        let [surface, ortho, gloss, lt, rt, lp, rp] = cols.as_slice() else {
            return Err(Error::at_line(
                source_name,
                line_no,
                format!("expected 7 TAB-separated columns, found {}", cols.len()),
            ));
        };
        let surface = inventory
            .symbols(surface)
            .map_err(|e| Error::at_line(source_name, line_no, e))?;
        inventory
            .parse_yale(ortho)
            .map_err(|e| Error::at_line(source_name, line_no, e))?;
        if surface.is_empty() {
            return Err(Error::at_line(source_name, line_no, "empty surface"));
        }
        out.push(MorphemeEntry {
            surface,
            orthographic: ortho.to_string(),
            gloss: gloss.to_string(),
            left_tag: lt.to_string(),
            right_tag: rt.to_string(),
            left_phon: lp.to_string(),
            right_phon: rp.to_string(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mark {
    Legal,
    Illegal,
    /// Legal, and the junction is an Eojeol (written-word) boundary.
    Eojeol,
}

impl Mark {
    pub fn is_legal(self) -> bool {
        self != Mark::Illegal
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixPair {
    pub left: String,
    pub right: String,
    pub mark: Mark,
}

impl MatrixPair {
    pub fn legal(left: impl Into<String>, right: impl Into<String>) -> Self {
        MatrixPair {
            left: left.into(),
            right: right.into(),
            mark: Mark::Legal,
        }
    }

    pub fn with(left: impl Into<String>, right: impl Into<String>, mark: Mark) -> Self {
        MatrixPair {
            left: left.into(),
            right: right.into(),
            mark,
        }
    }
}

/// Reads `left<TAB>right[<TAB>legal|illegal|eojeol]` lines.
pub fn parse_pairs(text: &str, source_name: &str) -> Result<Vec<MatrixPair>> {
    let mut out = Vec::new();
    for (line_no, line) in data_lines(text) {
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        let (left, right, mark) = match cols.as_slice() {
            [l, r] => (l, r, Mark::Legal),
            [l, r, m] => {
                let mark = match *m {
                    "" | "legal" | "1" => Mark::Legal,
                    "illegal" | "0" => Mark::Illegal,
                    "eojeol" => Mark::Eojeol,
                    other => {
                        return Err(Error::at_line(
                            source_name,
                            line_no,
                            format!("unknown mark {other:?}"),
                        ))
                    }
                };
                (l, r, mark)
            }
            _ => {
                return Err(Error::at_line(
                    source_name,
                    line_no,
                    "expected left<TAB>right[<TAB>mark]",
                ))
            }
        };
        out.push(MatrixPair::with(*left, *right, mark));
    }
    Ok(out)
}

/// Declared pairs only; an absent pair is illegal.
#[derive(Debug, Clone, Default)]
pub struct ConnectivityMatrix {
    pairs: HashMap<(String, String), Mark>,
}

impl ConnectivityMatrix {
    pub fn get(&self, left: &str, right: &str) -> Option<Mark> {
        self.pairs
            .get(&(left.to_string(), right.to_string()))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub const ROOT: usize = 0;

#[derive(Debug, Clone, Default)]
struct TrieNode {
    children: BTreeMap<String, usize>,
    entries: Vec<usize>,
}

/// Prefix tree over surface phoneme sequences.
#[derive(Debug, Clone)]
pub struct Trie {
    nodes: Vec<TrieNode>,
}

impl Default for Trie {
    fn default() -> Self {
        Trie {
            nodes: vec![TrieNode::default()],
        }
    }
}

impl Trie {
    fn insert(&mut self, key: &[String], entry: usize) {
        let mut node = ROOT;
        for sym in key {
            node = match self.nodes[node].children.get(sym) {
                Some(&c) => c,
                None => {
                    self.nodes.push(TrieNode::default());
                    let c = self.nodes.len() - 1;
                    self.nodes[node].children.insert(sym.clone(), c);
                    c
                }
            };
        }
        self.nodes[node].entries.push(entry);
    }

    pub fn child(&self, node: usize, symbol: &str) -> Option<usize> {
        self.nodes[node].children.get(symbol).copied()
    }

    pub fn entries_at(&self, node: usize) -> &[usize] {
        &self.nodes[node].entries
    }

    pub fn lookup<S: AsRef<str>>(&self, key: &[S]) -> &[usize] {
        let mut node = ROOT;
        for s in key {
            match self.child(node, s.as_ref()) {
                Some(c) => node = c,
                None => return &[],
            }
        }
        self.entries_at(node)
    }

    /// Number of distinct surface paths that end in at least one entry.
    pub fn path_count(&self) -> usize {
        self.nodes.iter().filter(|n| !n.entries.is_empty()).count()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// The morpheme-level phonetic dictionary with its connectivity matrices.
#[derive(Debug, Clone)]
pub struct CompiledDictionary {
    entries: Vec<MorphemeEntry>,
    trie: Trie,
    tags: TagSet,
    morph: ConnectivityMatrix,
    phon: ConnectivityMatrix,
}

#[derive(Debug, Clone)]
pub struct BuildReport {
    pub dictionary: CompiledDictionary,
    pub warnings: Vec<String>,
}

pub fn build_dictionary(
    entries: Vec<MorphemeEntry>,
    tags: TagSet,
    morph_pairs: &[MatrixPair],
    phon_pairs: &[MatrixPair],
) -> Result<BuildReport> {
    let mut warnings = Vec::new();
    let mut kept = Vec::with_capacity(entries.len());
    let mut seen = HashSet::new();
    let mut phon_keys: HashSet<String> = HashSet::new();
    for e in entries {
        if e.surface.is_empty() {
            return Err(Error::Dictionary(format!(
                "entry {:?} has an empty surface",
                e.orthographic
            )));
        }
        for tag in [&e.left_tag, &e.right_tag] {
            if !tags.contains(tag) {
                return Err(Error::Undeclared {
                    kind: "POS tag",
                    name: tag.clone(),
                });
            }
        }
        let key = (e.surface.clone(), e.left_tag.clone(), e.right_tag.clone());
        if !seen.insert(key) {
            warnings.push(format!(
                "duplicate entry {} {}/{} ignored",
                e.surface.join(" "),
                e.left_tag,
                e.right_tag
            ));
            continue;
        }
        phon_keys.insert(e.left_phon.clone());
        phon_keys.insert(e.right_phon.clone());
        phon_keys.insert(e.first_phoneme().to_string());
        phon_keys.insert(e.last_phoneme().to_string());
        kept.push(e);
    }

    let mut morph = ConnectivityMatrix::default();
    for p in morph_pairs {
        if p.left != BOS && !tags.contains(&p.left) {
            return Err(Error::Undeclared {
                kind: "POS tag",
                name: p.left.clone(),
            });
        }
        if p.right != EOS && !tags.contains(&p.right) {
            return Err(Error::Undeclared {
                kind: "POS tag",
                name: p.right.clone(),
            });
        }
        morph
            .pairs
            .insert((p.left.clone(), p.right.clone()), p.mark);
    }

    let mut phon = ConnectivityMatrix::default();
    for p in phon_pairs {
        for side in [&p.left, &p.right] {
            if !phon_keys.contains(side) {
                return Err(Error::Undeclared {
                    kind: "phoneme or phonemic class",
                    name: side.clone(),
                });
            }
        }
        phon.pairs.insert((p.left.clone(), p.right.clone()), p.mark);
    }

    let mut trie = Trie::default();
    for (i, e) in kept.iter().enumerate() {
        trie.insert(&e.surface, i);
    }
    Ok(BuildReport {
        dictionary: CompiledDictionary {
            entries: kept,
            trie,
            tags,
            morph,
            phon,
        },
        warnings,
    })
}

impl CompiledDictionary {
    pub fn entries(&self) -> &[MorphemeEntry] {
        &self.entries
    }

    pub fn entry(&self, id: usize) -> &MorphemeEntry {
        &self.entries[id]
    }

    pub fn trie(&self) -> &Trie {
        &self.trie
    }

    pub fn tags(&self) -> &TagSet {
        &self.tags
    }

    pub fn morph_matrix(&self) -> &ConnectivityMatrix {
        &self.morph
    }

    pub fn phon_matrix(&self) -> &ConnectivityMatrix {
        &self.phon
    }

    /// Morphotactic mark for `left` followed by `right`, trying the most
    /// specific tags first. Either side may be [`BOS`] / [`EOS`].
    pub fn morph_mark(&self, left: &str, right: &str) -> Option<Mark> {
        for l in self.tags.ancestors(left) {
            for r in self.tags.ancestors(right) {
                if let Some(m) = self.morph.get(l, r) {
                    return Some(m);
                }
            }
        }
        None
    }

    /// Phonological mark for the junction between two entries. Concrete
    /// phoneme keys take precedence over class keys.
    pub fn phon_mark(&self, left: &MorphemeEntry, right: &MorphemeEntry) -> Option<Mark> {
        let (lc, lk) = (left.last_phoneme(), left.right_phon.as_str());
        let (rc, rk) = (right.first_phoneme(), right.left_phon.as_str());
        [(lc, rc), (lc, rk), (lk, rc), (lk, rk)]
            .into_iter()
            .find_map(|(l, r)| self.phon.get(l, r))
    }

    pub fn starts_eonjeol(&self, e: &MorphemeEntry) -> bool {
        self.morph_mark(BOS, &e.left_tag)
            .is_some_and(Mark::is_legal)
    }

    pub fn ends_eonjeol(&self, e: &MorphemeEntry) -> bool {
        self.morph_mark(&e.right_tag, EOS)
            .is_some_and(Mark::is_legal)
    }
}
