//! Sausage-shaped phoneme lattices and the confusion-matrix mutation used to
//! build artificial recognition lattices from a correct phoneme sequence.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{data_lines, Error, Result};
use crate::phonology::PhonemeInventory;

/// Per-position alternative phoneme sets. Alternatives keep their insertion
/// order; when the truth is known it comes first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhonemeLattice {
    positions: Vec<Vec<String>>,
}

impl PhonemeLattice {
    pub fn new(positions: Vec<Vec<String>>) -> Result<Self> {
        for (i, alts) in positions.iter().enumerate() {
            if alts.is_empty() {
                return Err(Error::Lattice(format!("position {} is empty", i + 1)));
            }
            let mut seen = HashSet::new();
            for a in alts {
                if !seen.insert(a) {
                    return Err(Error::Lattice(format!(
                        "position {} repeats alternative {a:?}",
                        i + 1
                    )));
                }
            }
        }
        Ok(PhonemeLattice { positions })
    }

    /// Single-alternative lattice spelling exactly `phonemes`.
    pub fn from_sequence<S: Into<String>>(phonemes: impl IntoIterator<Item = S>) -> Self {
        PhonemeLattice {
            positions: phonemes.into_iter().map(|p| vec![p.into()]).collect(),
        }
    }

    pub fn positions(&self) -> &[Vec<String>] {
        &self.positions
    }

    pub fn alternatives(&self, position: usize) -> &[String] {
        &self.positions[position]
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// The chain of first alternatives.
    pub fn best_chain(&self) -> Vec<String> {
        self.positions.iter().map(|a| a[0].clone()).collect()
    }

    pub fn contains_chain<S: AsRef<str>>(&self, chain: &[S]) -> bool {
        chain.len() == self.positions.len()
            && chain
                .iter()
                .zip(&self.positions)
                .all(|(p, alts)| alts.iter().any(|a| a == p.as_ref()))
    }

    pub fn validate(&self, inventory: &PhonemeInventory) -> Result<()> {
        for (i, alts) in self.positions.iter().enumerate() {
            for a in alts {
                if inventory.get(a).is_none() {
                    return Err(Error::Lattice(format!(
                        "position {} holds unknown phoneme {a:?}",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Mean alternative-set size; 0 for an empty lattice.
    pub fn mean_alternatives(&self) -> f64 {
        if self.positions.is_empty() {
            return 0.0;
        }
        self.total_alternatives() as f64 / self.positions.len() as f64
    }

    pub fn total_alternatives(&self) -> usize {
        self.positions.iter().map(Vec::len).sum()
    }

    /// Number of distinct phoneme chains, saturating at `u128::MAX`.
    pub fn chain_count(&self) -> u128 {
        self.positions
            .iter()
            .try_fold(1u128, |acc, alts| acc.checked_mul(alts.len() as u128))
            .unwrap_or(u128::MAX)
    }

    /// Chains in odometer order over each position's alternatives, stopping
    /// after `limit`.
    pub fn enumerate_chains(&self, limit: usize) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        if limit == 0 {
            return out;
        }
        let mut digits = vec![0usize; self.positions.len()];
        loop {
            out.push(
                digits
                    .iter()
                    .zip(&self.positions)
                    .map(|(&d, alts)| alts[d].clone())
                    .collect(),
            );
            if out.len() >= limit {
                return out;
            }
            let mut carry = self.positions.len();
            loop {
                if carry == 0 {
                    return out;
                }
                carry -= 1;
                digits[carry] += 1;
                if digits[carry] < self.positions[carry].len() {
                    break;
                }
                digits[carry] = 0;
            }
        }
    }

    /// Reads one position per line, alternatives separated by spaces.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let positions = data_lines(text)
            .map(|(_, l)| l.split_whitespace().map(str::to_string).collect())
            .collect();
        PhonemeLattice::new(positions).map_err(|e| Error::at_line(source_name, 0, e))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for alts in &self.positions {
            out.push_str(&alts.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for PhonemeLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, alts) in self.positions.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if alts.len() == 1 {
                f.write_str(&alts[0])?;
            } else {
                write!(f, "{{{}}}", alts.join(","))?;
            }
        }
        Ok(())
    }
}

/// Reads several lattices separated by blank lines.
pub fn parse_lattices(text: &str, source_name: &str) -> Result<Vec<PhonemeLattice>> {
    let mut out = Vec::new();
    let mut current: Vec<Vec<String>> = Vec::new();
    let mut start_line = 1;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if !current.is_empty() {
                out.push(
                    PhonemeLattice::new(std::mem::take(&mut current))
                        .map_err(|e| Error::at_line(source_name, start_line, e))?,
                );
            }
            continue;
        }
        if current.is_empty() {
            start_line = n + 1;
        }
        current.push(line.split_whitespace().map(str::to_string).collect());
    }
    if !current.is_empty() {
        out.push(
            PhonemeLattice::new(current).map_err(|e| Error::at_line(source_name, start_line, e))?,
        );
    }
    Ok(out)
}

pub fn format_lattices(lattices: &[PhonemeLattice]) -> String {
    lattices
        .iter()
        .map(PhonemeLattice::to_text)
        .collect::<Vec<_>>()
        .join("\n")
}

/// P(recognized | true) rows. Row order and within-row order follow the
/// declaration order, which breaks probability ties.
#[derive(Debug, Clone)]
pub struct ConfusionMatrix {
    rows: Vec<(String, Vec<(String, f64)>)>,
    index: HashMap<String, usize>,
}

impl ConfusionMatrix {
    pub fn new(rows: Vec<(String, Vec<(String, f64)>)>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, (truth, row)) in rows.iter().enumerate() {
            if index.insert(truth.clone(), i).is_some() {
                return Err(Error::Confusion(format!("row {truth:?} declared twice")));
            }
            let mut seen = HashSet::new();
            let mut sum = 0.0;
            for (rec, p) in row {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::Confusion(format!(
                        "P({rec}|{truth}) = {p} outside [0,1]"
                    )));
                }
                if !seen.insert(rec) {
                    return Err(Error::Confusion(format!("P({rec}|{truth}) declared twice")));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Confusion(format!(
                    "row {truth:?} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(ConfusionMatrix { rows, index })
    }

    pub fn identity<S: AsRef<str>>(symbols: &[S]) -> Self {
        let rows = symbols
            .iter()
            .map(|s| (s.as_ref().to_string(), vec![(s.as_ref().to_string(), 1.0)]))
            .collect();
        ConfusionMatrix::new(rows).expect("identity rows sum to one")
    }

    /// Reads `true<TAB>recognized<TAB>prob` lines.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut rows: Vec<(String, Vec<(String, f64)>)> = Vec::new();
        let mut slot: HashMap<String, usize> = HashMap::new();
        for (line_no, line) in data_lines(text) {
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [truth, rec, p] = cols.as_slice() else {
                return Err(Error::at_line(
                    source_name,
                    line_no,
                    "expected true<TAB>recognized<TAB>prob",
                ));
            };
            let p: f64 = p.parse().map_err(|_| {
                Error::at_line(source_name, line_no, format!("bad probability {p:?}"))
            })?;
            let i = *slot.entry(truth.to_string()).or_insert_with(|| {
                rows.push((truth.to_string(), Vec::new()));
                rows.len() - 1
            });
            rows[i].1.push((rec.to_string(), p));
        }
        ConfusionMatrix::new(rows).map_err(|e| Error::at_line(source_name, 0, e))
    }

    pub fn row(&self, truth: &str) -> Option<&[(String, f64)]> {
        self.index.get(truth).map(|&i| self.rows[i].1.as_slice())
    }

    pub fn validate(&self, inventory: &PhonemeInventory) -> Result<()> {
        for (truth, row) in &self.rows {
            for s in std::iter::once(truth).chain(row.iter().map(|(r, _)| r)) {
                if inventory.get(s).is_none() {
                    return Err(Error::Confusion(format!("unknown phoneme {s:?}")));
                }
            }
        }
        Ok(())
    }

    /// Recognitions other than the truth with nonzero mass, most probable
    /// first.
    pub fn confusables(&self, truth: &str) -> Option<Vec<&str>> {
        let row = self.row(truth)?;
        let mut c: Vec<(&str, f64)> = row
            .iter()
            .filter(|(r, p)| r != truth && *p > 0.0)
            .map(|(r, p)| (r.as_str(), *p))
            .collect();
        // stable: ties keep declaration order
        c.sort_by(|a, b| b.1.total_cmp(&a.1));
        Some(c.into_iter().map(|(r, _)| r).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Expected alternatives per position, truth included.
    pub target_alternatives: f64,
    pub max_alternatives: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            target_alternatives: 2.3,
            max_alternatives: 4,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_alternatives >= 1.0
            && self.target_alternatives <= self.max_alternatives as f64)
        {
            return Err(Error::SimConfig(format!(
                "need 1 <= target_alternatives ({}) <= max_alternatives ({})",
                self.target_alternatives, self.max_alternatives
            )));
        }
        Ok(())
    }
}

/// Builds a lattice around `truth` by adding, at each position, the most
/// confusable recognitions. The number of extra alternatives at a position
/// is the number of successes in `k` Bernoulli draws, where `k` is the room
/// left under `max_alternatives` (bounded by the confusables available) and
/// the success rate is `(target - 1) / k`, capped at 1.
pub fn simulate<S: AsRef<str>>(
    truth: &[S],
    cm: &ConfusionMatrix,
    cfg: &SimConfig,
) -> Result<PhonemeLattice> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let wanted = cfg.target_alternatives - 1.0;
    let mut positions = Vec::with_capacity(truth.len());
    for t in truth {
        let t = t.as_ref();
        let candidates = cm
            .confusables(t)
            .ok_or_else(|| Error::MissingConfusionRow(t.to_string()))?;
        let room = candidates.len().min(cfg.max_alternatives - 1);
        let mut alts = vec![t.to_string()];
        if room > 0 {
            let rate = (wanted / room as f64).min(1.0);
            let extra = (0..room).filter(|_| rng.random::<f64>() < rate).count();
            alts.extend(candidates[..extra].iter().map(|s| s.to_string()));
        }
        positions.push(alts);
    }
    PhonemeLattice::new(positions)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(rows: &[&[&str]]) -> PhonemeLattice {
        PhonemeLattice::new(
            rows.iter()
                .map(|r| r.iter().map(|s| s.to_string()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn chain_counts() {
        assert_eq!(
            lat(&[&["a", "b"], &["c"], &["d", "e", "f"]]).chain_count(),
            6
        );
        let wide = PhonemeLattice::new(vec![vec!["a".into(), "b".into()]; 31]).unwrap();
        assert_eq!(wide.chain_count(), 1u128 << 31);
        assert_eq!(PhonemeLattice::default().chain_count(), 1);
        let huge =
            PhonemeLattice::new(vec![vec!["a".into(), "b".into(), "c".into()]; 100]).unwrap();
        assert_eq!(huge.chain_count(), u128::MAX);
    }

    #[test]
    fn chain_enumeration() {
        assert_eq!(lat(&[&["a"], &["b"]]).enumerate_chains(10), [["a", "b"]]);
        assert_eq!(
            lat(&[&["a", "b"], &["c"]]).enumerate_chains(10),
            [["a", "c"], ["b", "c"]]
        );
        assert_eq!(
            lat(&[&["a", "b"], &["c", "d"]]).enumerate_chains(1).len(),
            1
        );
        let l = lat(&[&["a", "b"], &["c", "d", "e"], &["f", "g"]]);
        let all = l.enumerate_chains(usize::MAX);
        assert_eq!(all.len() as u128, l.chain_count());
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), all.len());
        assert_eq!(
            PhonemeLattice::default().enumerate_chains(5),
            [Vec::<String>::new()]
        );
    }

    #[test]
    fn lattice_invariants() {
        assert!(PhonemeLattice::new(vec![vec![]]).is_err());
        assert!(PhonemeLattice::new(vec![vec!["a".into(), "a".into()]]).is_err());
        let inv = PhonemeInventory::sample();
        assert!(lat(&[&["a", "k"]]).validate(&inv).is_ok());
        assert!(lat(&[&["a", "q"]]).validate(&inv).is_err());
    }

    #[test]
    fn lattice_files() {
        let l = lat(&[&["c"], &["i", "e"], &["s", "ss"]]);
        assert_eq!(PhonemeLattice::parse(&l.to_text(), "l").unwrap(), l);
        let two = format_lattices(&[l.clone(), lat(&[&["a"]])]);
        assert_eq!(parse_lattices(&two, "l").unwrap(), vec![l, lat(&[&["a"]])]);
    }

    #[test]
    fn identity_matrix_keeps_truth() {
        let truth = ["c", "i", "w", "u"];
        let cm = ConfusionMatrix::identity(&truth);
        for seed in 0..20 {
            let cfg = SimConfig {
                seed,
                ..Default::default()
            };
            let l = simulate(&truth, &cm, &cfg).unwrap();
            assert_eq!(l, PhonemeLattice::from_sequence(truth));
        }
    }

    #[test]
    fn single_confusable() {
        let cm = ConfusionMatrix::parse("s\ts\t0.6\ns\tss\t0.4\n", "cm").unwrap();
        let cfg = SimConfig {
            target_alternatives: 2.0,
            max_alternatives: 2,
            seed: 3,
        };
        assert_eq!(simulate(&["s"], &cm, &cfg).unwrap(), lat(&[&["s", "ss"]]));
    }

    #[test]
    fn errors() {
        let cm = ConfusionMatrix::identity(&["a"]);
        assert!(matches!(
            simulate(&["b"], &cm, &SimConfig::default()),
            Err(Error::MissingConfusionRow(_))
        ));
        let bad = SimConfig {
            target_alternatives: 3.0,
            max_alternatives: 2,
            seed: 0,
        };
        assert!(simulate(&["a"], &cm, &bad).is_err());
        assert!(ConfusionMatrix::parse("a\ta\t0.5\n", "cm").is_err());
        assert!(ConfusionMatrix::parse("a\ta\t0.5\na\tb\t0.5\n", "cm").is_ok());
        assert!(ConfusionMatrix::parse("a\ta\t1.5\na\tb\t-0.5\n", "cm").is_err());
    }

    #[test]
    fn confusables_sorted_with_stable_ties() {
        let cm = ConfusionMatrix::parse(
            "k\tk\t0.5\nk\tkh\t0.1\nk\tkk\t0.2\nk\tg\t0.1\nk\tt\t0.1\n",
            "cm",
        )
        .unwrap();
        assert_eq!(cm.confusables("k").unwrap(), ["kk", "kh", "g", "t"]);
    }

    #[test]
    fn seeds_reproduce() {
        let truth: Vec<String> = ["k", "a", "s"].iter().map(|s| s.to_string()).collect();
        let cm = ConfusionMatrix::parse(
            "k\tk\t0.7\nk\tkk\t0.1\nk\tkh\t0.1\nk\tt\t0.1\n\
             a\ta\t0.7\na\te\t0.1\na\tay\t0.1\na\to\t0.1\n\
             s\ts\t0.7\ns\tss\t0.1\ns\tc\t0.1\ns\th\t0.1\n",
            "cm",
        )
        .unwrap();
        let cfg = SimConfig {
            seed: 11,
            ..Default::default()
        };
        let a = simulate(&truth, &cm, &cfg).unwrap();
        assert_eq!(a, simulate(&truth, &cm, &cfg).unwrap());
        assert!(a.contains_chain(&truth));
    }
}
