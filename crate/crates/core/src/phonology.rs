//! Phoneme inventory, Yale tokenization, syllable structure and the diphone
//! inventory.
//!
//! The inventory is data. The shipped sample (`data/inventory.tsv`) covers a
//! desk-scale Korean phoneme set in Yale romanization, with the glides `w`
//! and `y` treated as syllable-initial consonants.

use std::collections::HashMap;
use std::fmt;

use crate::error::{data_lines, Error, Result};

pub const SAMPLE_INVENTORY: &str = include_str!("../data/inventory.tsv");

/// Label of the diphone group that holds the consonant-consonant diphones.
pub const CONSONANT_GROUP: &str = "cc";

/// Separator between syllables in Yale text.
pub const SYLLABLE_SEPARATOR: char = '-';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhonemeKind {
    Consonant,
    Vowel,
}

/// Positions a consonant may occupy inside a syllable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Roles {
    pub first: bool,
    pub last: bool,
}

impl Roles {
    pub const NONE: Roles = Roles {
        first: false,
        last: false,
    };
    pub const FIRST: Roles = Roles {
        first: true,
        last: false,
    };
    pub const FINAL: Roles = Roles {
        first: false,
        last: true,
    };
    pub const BOTH: Roles = Roles {
        first: true,
        last: true,
    };
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Phoneme {
    symbol: String,
    kind: PhonemeKind,
    roles: Roles,
}

impl Phoneme {
    pub fn vowel(symbol: impl Into<String>) -> Self {
        Phoneme {
            symbol: symbol.into(),
            kind: PhonemeKind::Vowel,
            roles: Roles::NONE,
        }
    }

    pub fn consonant(symbol: impl Into<String>, roles: Roles) -> Self {
        Phoneme {
            symbol: symbol.into(),
            kind: PhonemeKind::Consonant,
            roles,
        }
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn kind(&self) -> PhonemeKind {
        self.kind
    }

    pub fn roles(&self) -> Roles {
        self.roles
    }

    pub fn is_vowel(&self) -> bool {
        self.kind == PhonemeKind::Vowel
    }

    /// Consonant that may open a syllable (C1).
    pub fn can_open(&self) -> bool {
        self.kind == PhonemeKind::Consonant && self.roles.first
    }

    /// Consonant that may close a syllable (C2).
    pub fn can_close(&self) -> bool {
        self.kind == PhonemeKind::Consonant && self.roles.last
    }

    fn validate(&self) -> Result<()> {
        if self.symbol.is_empty() {
            return Err(Error::Inventory("empty phoneme symbol".into()));
        }
        if self.symbol.contains(SYLLABLE_SEPARATOR) || self.symbol.contains(char::is_whitespace) {
            return Err(Error::Inventory(format!(
                "symbol {:?} contains a separator",
                self.symbol
            )));
        }
        match self.kind {
            PhonemeKind::Vowel if self.roles != Roles::NONE => Err(Error::Inventory(format!(
                "vowel {:?} carries consonant roles",
                self.symbol
            ))),
            PhonemeKind::Consonant if self.roles == Roles::NONE => Err(Error::Inventory(format!(
                "consonant {:?} has no syllable role",
                self.symbol
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Phoneme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)
    }
}

/// An ordered, validated phoneme set with symbol lookup.
#[derive(Debug, Clone)]
pub struct PhonemeInventory {
    phonemes: Vec<Phoneme>,
    lookup: HashMap<String, usize>,
    longest: usize,
}

impl PhonemeInventory {
    pub fn new(phonemes: Vec<Phoneme>) -> Result<Self> {
        let mut lookup = HashMap::with_capacity(phonemes.len());
        for (idx, p) in phonemes.iter().enumerate() {
            p.validate()?;
            if lookup.insert(p.symbol.clone(), idx).is_some() {
                return Err(Error::Inventory(format!("duplicate symbol {:?}", p.symbol)));
            }
        }
        let longest = phonemes
            .iter()
            .map(|p| p.symbol.chars().count())
            .max()
            .unwrap_or(0);
        Ok(PhonemeInventory {
            phonemes,
            lookup,
            longest,
        })
    }

    /// Reads `symbol<TAB>kind<TAB>roles` lines.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut phonemes = Vec::new();
        for (line_no, line) in data_lines(text) {
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let phoneme = match cols.as_slice() {
                [symbol, "vowel"] | [symbol, "vowel", ""] => Phoneme::vowel(*symbol),
                [symbol, "consonant", roles] => {
                    let mut r = Roles::NONE;
                    for role in roles.split(',').map(str::trim) {
                        match role {
                            "first" => r.first = true,
                            "final" => r.last = true,
                            other => {
                                return Err(Error::at_line(
                                    source_name,
                                    line_no,
                                    format!("unknown role {other:?}"),
                                ))
                            }
                        }
                    }
                    Phoneme::consonant(*symbol, r)
                }
                [_, kind, ..] => {
                    return Err(Error::at_line(
                        source_name,
                        line_no,
                        format!("unknown phoneme kind {kind:?}"),
                    ))
                }
                _ => {
                    return Err(Error::at_line(
                        source_name,
                        line_no,
                        "expected symbol<TAB>kind<TAB>roles",
                    ))
                }
            };
            phonemes.push(phoneme);
        }
        PhonemeInventory::new(phonemes).map_err(|e| Error::at_line(source_name, 0, e))
    }

    pub fn sample() -> Self {
        PhonemeInventory::parse(SAMPLE_INVENTORY, "inventory.tsv")
            .expect("bundled inventory is valid")
    }

    pub fn phonemes(&self) -> &[Phoneme] {
        &self.phonemes
    }

    pub fn len(&self) -> usize {
        self.phonemes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phonemes.is_empty()
    }

    pub fn get(&self, symbol: &str) -> Option<&Phoneme> {
        self.lookup.get(symbol).map(|&i| &self.phonemes[i])
    }

    pub fn position(&self, symbol: &str) -> Option<usize> {
        self.lookup.get(symbol).copied()
    }

    pub fn require(&self, symbol: &str) -> Result<&Phoneme> {
        self.get(symbol).ok_or_else(|| Error::UnknownSymbol {
            text: symbol.to_string(),
            position: 0,
        })
    }

    /// Tokenizes Yale text by longest match, skipping `-` separators.
    pub fn parse_yale(&self, text: &str) -> Result<Vec<Phoneme>> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut at = 0;
        let mut buf = String::new();
        while at < chars.len() {
            if chars[at] == SYLLABLE_SEPARATOR {
                at += 1;
                continue;
            }
            let mut matched = None;
            let max = self.longest.min(chars.len() - at);
            for len in (1..=max).rev() {
                buf.clear();
                buf.extend(&chars[at..at + len]);
                if let Some(&idx) = self.lookup.get(buf.as_str()) {
                    matched = Some((idx, len));
                    break;
                }
            }
            match matched {
                Some((idx, len)) => {
                    out.push(self.phonemes[idx].clone());
                    at += len;
                }
                None => {
                    return Err(Error::UnknownSymbol {
                        text: text.to_string(),
                        position: at,
                    })
                }
            }
        }
        Ok(out)
    }

    /// Same as [`parse_yale`](Self::parse_yale), returning bare symbols.
    pub fn symbols(&self, text: &str) -> Result<Vec<String>> {
        Ok(self
            .parse_yale(text)?
            .into_iter()
            .map(|p| p.symbol)
            .collect())
    }

    /// Resolves already-tokenized symbols against the inventory.
    pub fn resolve<S: AsRef<str>>(&self, symbols: &[S]) -> Result<Vec<Phoneme>> {
        symbols
            .iter()
            .enumerate()
            .map(|(i, s)| {
                self.get(s.as_ref())
                    .cloned()
                    .ok_or_else(|| Error::UnknownSymbol {
                        text: s.as_ref().to_string(),
                        position: i,
                    })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyllableShape {
    CV,
    VC,
    V,
    CVC,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syllable {
    pub onset: Option<Phoneme>,
    pub nucleus: Phoneme,
    pub coda: Option<Phoneme>,
}

impl Syllable {
    pub fn shape(&self) -> SyllableShape {
        match (&self.onset, &self.coda) {
            (Some(_), None) => SyllableShape::CV,
            (None, Some(_)) => SyllableShape::VC,
            (None, None) => SyllableShape::V,
            (Some(_), Some(_)) => SyllableShape::CVC,
        }
    }

    pub fn len(&self) -> usize {
        1 + self.onset.is_some() as usize + self.coda.is_some() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn phonemes(&self) -> impl Iterator<Item = &Phoneme> {
        self.onset
            .iter()
            .chain(std::iter::once(&self.nucleus))
            .chain(self.coda.iter())
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}(", self.shape())?;
        for (i, p) in self.phonemes().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// Splits a phoneme sequence into syllables, attaching a lone intervocalic
/// consonant to the following syllable.
pub fn syllabify(phonemes: &[Phoneme]) -> Result<Vec<Syllable>> {
    let fail = || {
        Error::Syllabify(
            phonemes
                .iter()
                .map(Phoneme::symbol)
                .collect::<Vec<_>>()
                .join(" "),
        )
    };
    let nuclei: Vec<usize> = phonemes
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_vowel())
        .map(|(i, _)| i)
        .collect();
    if nuclei.is_empty() {
        return Err(fail());
    }

    // onset[k] / coda[k] for the syllable around nuclei[k]
    let mut onsets: Vec<Option<usize>> = vec![None; nuclei.len()];
    let mut codas: Vec<Option<usize>> = vec![None; nuclei.len()];

    match nuclei[0] {
        0 => {}
        1 if phonemes[0].can_open() => onsets[0] = Some(0),
        _ => return Err(fail()),
    }
    let last = *nuclei.last().unwrap();
    match phonemes.len() - 1 - last {
        0 => {}
        1 if phonemes[last + 1].can_close() => codas[nuclei.len() - 1] = Some(last + 1),
        _ => return Err(fail()),
    }
    for k in 1..nuclei.len() {
        let (prev, next) = (nuclei[k - 1], nuclei[k]);
        match next - prev - 1 {
            0 => {}
            1 => {
                let c = prev + 1;
                if phonemes[c].can_open() {
                    onsets[k] = Some(c);
                } else if phonemes[c].can_close() {
                    codas[k - 1] = Some(c);
                } else {
                    return Err(fail());
                }
            }
            2 if phonemes[prev + 1].can_close() && phonemes[prev + 2].can_open() => {
                codas[k - 1] = Some(prev + 1);
                onsets[k] = Some(prev + 2);
            }
            _ => return Err(fail()),
        }
    }

    Ok(nuclei
        .iter()
        .enumerate()
        .map(|(k, &v)| Syllable {
            onset: onsets[k].map(|i| phonemes[i].clone()),
            nucleus: phonemes[v].clone(),
            coda: codas[k].map(|i| phonemes[i].clone()),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiphoneType {
    C1V,
    VC2,
    VV,
    C2C1,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diphone {
    pub first: Phoneme,
    pub second: Phoneme,
    pub dtype: DiphoneType,
}

impl Diphone {
    /// Vowel group this diphone belongs to; consonant pairs go to
    /// [`CONSONANT_GROUP`], vowel pairs to the group of their first vowel.
    pub fn group(&self) -> &str {
        match self.dtype {
            DiphoneType::C1V => self.second.symbol(),
            DiphoneType::VC2 | DiphoneType::VV => self.first.symbol(),
            DiphoneType::C2C1 => CONSONANT_GROUP,
        }
    }
}

impl fmt::Display for Diphone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first, self.second)
    }
}

pub fn classify_diphone(first: &Phoneme, second: &Phoneme) -> Result<Diphone> {
    let dtype = if first.is_vowel() && second.is_vowel() {
        Some(DiphoneType::VV)
    } else if first.can_open() && second.is_vowel() {
        Some(DiphoneType::C1V)
    } else if first.is_vowel() && second.can_close() {
        Some(DiphoneType::VC2)
    } else if first.can_close() && second.can_open() {
        Some(DiphoneType::C2C1)
    } else {
        None
    };
    match dtype {
        Some(dtype) => Ok(Diphone {
            first: first.clone(),
            second: second.clone(),
            dtype,
        }),
        None => Err(Error::NotADiphone {
            first: first.symbol.clone(),
            second: second.symbol.clone(),
        }),
    }
}

#[derive(Debug, Clone)]
pub struct DiphoneGroup {
    pub label: String,
    pub members: Vec<usize>,
}

/// Every legal diphone over an inventory, partitioned into vowel groups plus
/// the consonant-only group.
#[derive(Debug, Clone)]
pub struct DiphoneInventory {
    diphones: Vec<Diphone>,
    groups: Vec<DiphoneGroup>,
}

impl DiphoneInventory {
    pub fn diphones(&self) -> &[Diphone] {
        &self.diphones
    }

    pub fn groups(&self) -> &[DiphoneGroup] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.diphones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diphones.is_empty()
    }

    pub fn group(&self, label: &str) -> Option<impl Iterator<Item = &Diphone>> {
        self.groups
            .iter()
            .find(|g| g.label == label)
            .map(|g| g.members.iter().map(|&i| &self.diphones[i]))
    }

    pub fn count_by_type(&self, dtype: DiphoneType) -> usize {
        self.diphones.iter().filter(|d| d.dtype == dtype).count()
    }
}

pub fn enumerate_diphones(inventory: &PhonemeInventory) -> DiphoneInventory {
    let mut groups: Vec<DiphoneGroup> = inventory
        .phonemes()
        .iter()
        .filter(|p| p.is_vowel())
        .map(|p| DiphoneGroup {
            label: p.symbol().to_string(),
            members: Vec::new(),
        })
        .chain(std::iter::once(DiphoneGroup {
            label: CONSONANT_GROUP.to_string(),
            members: Vec::new(),
        }))
        .collect();
    let slot: HashMap<String, usize> = groups
        .iter()
        .enumerate()
        .map(|(i, g)| (g.label.clone(), i))
        .collect();

    let mut diphones = Vec::new();
    for first in inventory.phonemes() {
        for second in inventory.phonemes() {
            if let Ok(d) = classify_diphone(first, second) {
                groups[slot[d.group()]].members.push(diphones.len());
                diphones.push(d);
            }
        }
    }
    DiphoneInventory { diphones, groups }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv() -> PhonemeInventory {
        PhonemeInventory::sample()
    }

    fn seq(inv: &PhonemeInventory, syms: &[&str]) -> Vec<Phoneme> {
        inv.resolve(syms).unwrap()
    }

    fn syms(ps: &[Phoneme]) -> Vec<&str> {
        ps.iter().map(Phoneme::symbol).collect()
    }

    /// Every way of cutting `text` into inventory symbols.
    fn all_tokenizations(inv: &PhonemeInventory, text: &str) -> Vec<Vec<String>> {
        if text.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in inv.phonemes() {
            if let Some(rest) = text.strip_prefix(p.symbol()) {
                for mut tail in all_tokenizations(inv, rest) {
                    tail.insert(0, p.symbol().to_string());
                    out.push(tail);
                }
            }
        }
        out
    }

    #[test]
    fn yale_examples() {
        let inv = inv();
        assert_eq!(
            syms(&inv.parse_yale("ci-wu").unwrap()),
            ["c", "i", "w", "u"]
        );
        assert!(inv.parse_yale("").unwrap().is_empty());
        assert_eq!(syms(&inv.parse_yale("sswu").unwrap()), ["ss", "w", "u"]);
    }

    #[test]
    fn sswu_longest_match_is_one_of_the_brute_force_readings() {
        let inv = inv();
        let all = all_tokenizations(&inv, "sswu");
        assert!(all.contains(&vec!["s".into(), "s".into(), "w".into(), "u".into()]));
        let longest = all
            .iter()
            .min_by_key(|t| t.len())
            .unwrap()
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>();
        assert_eq!(longest, ["ss", "w", "u"]);
    }

    #[test]
    fn unknown_symbol_names_position() {
        match inv().parse_yale("ka-qa") {
            Err(Error::UnknownSymbol { position, .. }) => assert_eq!(position, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syllabify_examples() {
        let inv = inv();
        let s = syllabify(&seq(&inv, &["k", "a"])).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].to_string(), "CV(k,a)");

        let s = syllabify(&seq(&inv, &["c", "i", "w", "u", "l"])).unwrap();
        let rendered: Vec<String> = s.iter().map(ToString::to_string).collect();
        assert_eq!(rendered, ["CV(c,i)", "CVC(w,u,l)"]);

        assert!(syllabify(&seq(&inv, &["k", "k", "a"])).is_err());
        assert!(syllabify(&seq(&inv, &["a", "k", "t", "p", "a"])).is_err());
        assert!(syllabify(&[]).is_err());
        // glides are consonants, so ss+w is a two-consonant onset
        assert!(syllabify(&inv.parse_yale("ci-wul-sswu").unwrap()).is_err());
    }

    /// All segmentations into well-formed syllables.
    fn brute_syllabifications(ps: &[Phoneme]) -> Vec<Vec<usize>> {
        fn ok(piece: &[Phoneme]) -> bool {
            match piece {
                [v] => v.is_vowel(),
                [c, v] => (c.can_open() && v.is_vowel()) || (c.is_vowel() && v.can_close()),
                [c, v, d] => c.can_open() && v.is_vowel() && d.can_close(),
                _ => false,
            }
        }
        fn go(ps: &[Phoneme], at: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if at == ps.len() {
                out.push(cur.clone());
                return;
            }
            for len in 1..=3.min(ps.len() - at) {
                if ok(&ps[at..at + len]) {
                    cur.push(len);
                    go(ps, at + len, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(ps, 0, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn syllabify_agrees_with_brute_force_on_sample_words() {
        let inv = inv();
        for word in [
            "ci-wul-su",
            "phai-l-tul-ul",
            "ti-lek-thoe-li",
            "ka",
            "a",
            "an",
            "i-tong",
            "mong-nok",
            "a-i",
            "kan-ta",
            "al-ta",
        ] {
            let ps = inv.parse_yale(word).unwrap();
            let all = brute_syllabifications(&ps);
            let got: Vec<usize> = syllabify(&ps).unwrap().iter().map(Syllable::len).collect();
            assert!(all.contains(&got), "{word}: {got:?} not in {all:?}");
            // onset-maximal: lexicographically smallest length vector
            assert_eq!(&got, all.iter().min().unwrap(), "{word}");
        }
    }

    #[test]
    fn diphone_examples() {
        let inv = inv();
        let p = |s| inv.get(s).unwrap();
        assert_eq!(
            classify_diphone(p("k"), p("a")).unwrap().dtype,
            DiphoneType::C1V
        );
        assert_eq!(
            classify_diphone(p("a"), p("e")).unwrap().dtype,
            DiphoneType::VV
        );
        assert_eq!(
            classify_diphone(p("l"), p("s")).unwrap().dtype,
            DiphoneType::C2C1
        );
        assert_eq!(
            classify_diphone(p("a"), p("l")).unwrap().dtype,
            DiphoneType::VC2
        );
        // s never closes a syllable
        assert!(classify_diphone(p("a"), p("s")).is_err());
        assert!(classify_diphone(p("k"), p("ng")).is_err());
    }

    #[test]
    fn minimal_inventories() {
        let inv = PhonemeInventory::new(vec![
            Phoneme::vowel("a"),
            Phoneme::consonant("n", Roles::BOTH),
        ])
        .unwrap();
        let d = enumerate_diphones(&inv);
        assert_eq!(d.len(), 4);
        for t in [
            DiphoneType::C1V,
            DiphoneType::VC2,
            DiphoneType::VV,
            DiphoneType::C2C1,
        ] {
            assert_eq!(d.count_by_type(t), 1);
        }

        let inv = PhonemeInventory::new(vec![Phoneme::vowel("a"), Phoneme::vowel("o")]).unwrap();
        let d = enumerate_diphones(&inv);
        assert_eq!(d.len(), d.count_by_type(DiphoneType::VV));
        assert_eq!(d.group(CONSONANT_GROUP).unwrap().count(), 0);
    }

    #[test]
    fn sample_inventory_counts() {
        let d = enumerate_diphones(&inv());
        // 9 vowels, 20 onset-capable and 7 coda-capable consonants
        assert_eq!(d.count_by_type(DiphoneType::C1V), 180);
        assert_eq!(d.count_by_type(DiphoneType::VC2), 63);
        assert_eq!(d.count_by_type(DiphoneType::VV), 81);
        assert_eq!(d.count_by_type(DiphoneType::C2C1), 140);
        assert_eq!(d.len(), 464);
        assert_eq!(d.groups().len(), 10);
        let cc: Vec<_> = d.group(CONSONANT_GROUP).unwrap().collect();
        assert!(cc.iter().all(|x| x.dtype == DiphoneType::C2C1));
        assert_eq!(cc.len(), 140);
    }

    #[test]
    fn inventory_rejects_bad_rows() {
        assert!(PhonemeInventory::parse("a\tvowel\nk\tconsonant\n", "t").is_err());
        assert!(PhonemeInventory::parse("a\tvowel\na\tvowel\n", "t").is_err());
        assert!(PhonemeInventory::parse("k\tconsonant\tmiddle\n", "t").is_err());
        assert!(PhonemeInventory::new(vec![Phoneme {
            symbol: "a".into(),
            kind: PhonemeKind::Vowel,
            roles: Roles::FIRST
        }])
        .is_err());
    }
}
