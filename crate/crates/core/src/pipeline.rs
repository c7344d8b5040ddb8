//! The stages composed over a sentence of space-separated Eonjeols, and the
//! TAB-separated reports that carry results from one stage to the next.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grammar::Lexicon;
use crate::lattice::{simulate, ConfusionMatrix, PhonemeLattice, SimConfig};
use crate::morph::{analyze, CompiledDictionary, MorphemeLattice};
use crate::parser::{parse, Morpheme, ParseInput, ParseOptions, ParseOutcome, RelaxationParams};
use crate::phonology::PhonemeInventory;

/// Tokenizes each whitespace-separated Eonjeol of Yale text.
pub fn read_sentence(text: &str, inventory: &PhonemeInventory) -> Result<Vec<Vec<String>>> {
    text.split_whitespace()
        .map(|w| inventory.symbols(w))
        .collect()
}

/// Seed for the `k`-th Eonjeol (0-based) of a sentence simulated under `seed`.
pub fn eonjeol_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add(k as u64)
}

/// One simulated lattice per Eonjeol.
pub fn simulate_sentence(
    sentence: &[Vec<String>],
    confusion: &ConfusionMatrix,
    cfg: &SimConfig,
) -> Result<Vec<PhonemeLattice>> {
    sentence
        .iter()
        .enumerate()
        .map(|(k, truth)| {
            let cfg = SimConfig {
                seed: eonjeol_seed(cfg.seed, k),
                ..*cfg
            };
            simulate(truth, confusion, &cfg)
        })
        .collect()
}

pub fn analyze_sentence(
    lattices: &[PhonemeLattice],
    dict: &CompiledDictionary,
) -> Vec<MorphemeLattice> {
    lattices.iter().map(|l| analyze(l, dict)).collect()
}

/// Concatenates per-Eonjeol inputs, shifting spans past the preceding
/// Eonjeols.
pub fn join_inputs(parts: &[ParseInput]) -> ParseInput {
    let mut morphemes = Vec::new();
    let mut offset = 0;
    for p in parts {
        morphemes.extend(p.morphemes.iter().map(|m| Morpheme {
            form: m.form.clone(),
            span: (m.span.0 + offset, m.span.1 + offset),
        }));
        offset += p.positions;
    }
    ParseInput {
        morphemes,
        positions: offset,
    }
}

pub fn sentence_input(analyses: &[MorphemeLattice]) -> ParseInput {
    join_inputs(
        &analyses
            .iter()
            .map(ParseInput::from_lattice)
            .collect::<Vec<_>>(),
    )
}

/// Renderings one per line, Eonjeols separated by a blank line.
pub fn morph_plain(analyses: &[MorphemeLattice]) -> String {
    analyses
        .iter()
        .map(|a| {
            a.renderings()
                .iter()
                .map(|r| format!("{r}\n"))
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// A `sentence` summary line, then per Eonjeol an `eonjeol` line followed
/// by one `analysis` line per analysis:
///
/// ```text
/// sentence  eonjeols N  positions P  chains C  analyses A
/// eonjeol   k  positions n  alternatives x  chains c  analyses m  furthest f
/// analysis  k  rendering  gloss  phoneme-spans  syllable-spans
/// ```
pub fn morph_report(
    lattices: &[PhonemeLattice],
    analyses: &[MorphemeLattice],
    inventory: &PhonemeInventory,
) -> String {
    let mut out = String::new();
    let chains = lattices
        .iter()
        .try_fold(1u128, |acc, l| acc.checked_mul(l.chain_count()));
    let _ = writeln!(
        out,
        "sentence\teonjeols\t{}\tpositions\t{}\tchains\t{}\tanalyses\t{}",
        lattices.len(),
        lattices.iter().map(PhonemeLattice::len).sum::<usize>(),
        chains.map_or("overflow".to_string(), |c| c.to_string()),
        analyses.iter().map(MorphemeLattice::len).sum::<usize>(),
    );
    for (k, (l, a)) in lattices.iter().zip(analyses).enumerate() {
        let _ = writeln!(
            out,
            "eonjeol\t{}\tpositions\t{}\talternatives\t{:.4}\tchains\t{}\tanalyses\t{}\tfurthest\t{}",
            k + 1,
            l.len(),
            l.mean_alternatives(),
            l.chain_count(),
            a.len(),
            a.furthest,
        );
        for an in &a.analyses {
            let syllables = match an.syllable_spans(inventory) {
                Some(s) => s
                    .iter()
                    .map(|(i, j)| format!("{i}-{j}"))
                    .collect::<Vec<_>>()
                    .join(","),
                None => "-".into(),
            };
            let _ = writeln!(
                out,
                "analysis\t{}\t{}\t{}\t{}\t{}",
                k + 1,
                an.render(),
                an.gloss(),
                an.spans_text(),
                syllables
            );
        }
    }
    out
}

/// Reads a morph report back into one parse input per Eonjeol, with the
/// same morphemes [`ParseInput::from_lattice`] would collect.
pub fn read_morph_report(text: &str, source_name: &str) -> Result<Vec<ParseInput>> {
    let mut blocks: Vec<(usize, BTreeSet<Morpheme>)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |m: String| Error::at_line(source_name, line_no, m);
        let cols: Vec<&str> = line.split('\t').collect();
        match cols[0] {
            "" | "sentence" => {}
            "eonjeol" => {
                let positions = cols
                    .get(3)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| err("eonjeol line without a position count".into()))?;
                blocks.push((positions, BTreeSet::new()));
            }
            "analysis" => {
                let [_, _, rendering, _, spans, ..] = cols.as_slice() else {
                    return Err(err(
                        "expected analysis<TAB>k<TAB>rendering<TAB>gloss<TAB>spans".into(),
                    ));
                };
                let Some((positions, set)) = blocks.last_mut() else {
                    return Err(err("analysis before any eonjeol line".into()));
                };
                let forms: Vec<&str> = rendering.split(['+', ' ']).collect();
                let spans = spans
                    .split(',')
                    .map(|s| {
                        let (i, j) = s.split_once('-')?;
                        Some((i.parse().ok()?, j.parse().ok()?))
                    })
                    .collect::<Option<Vec<(usize, usize)>>>()
                    .ok_or_else(|| err(format!("bad spans {spans:?}")))?;
                if forms.len() != spans.len() {
                    return Err(err(format!(
                        "{} morphemes but {} spans",
                        forms.len(),
                        spans.len()
                    )));
                }
                for (form, span) in forms.into_iter().zip(spans) {
                    if !(1 <= span.0 && span.0 <= span.1 && span.1 <= *positions) {
                        return Err(err(format!("span {}-{} out of range", span.0, span.1)));
                    }
                    set.insert(Morpheme {
                        form: form.to_string(),
                        span,
                    });
                }
            }
            other => return Err(err(format!("unknown record {other:?}"))),
        }
    }
    Ok(blocks
        .into_iter()
        .map(|(positions, set)| ParseInput {
            morphemes: set.into_iter().collect(),
            positions,
        })
        .collect())
}

/// The `n_best` best trees in bracketed form, one per line.
pub fn parse_plain(outcome: &ParseOutcome, n_best: usize) -> String {
    outcome
        .trees
        .iter()
        .take(n_best)
        .map(|t| format!("{t}\n"))
        .collect()
}

/// ```text
/// parse    positions n  morphemes m  stop reason  cycles c  trees t
/// tree     rank  activation  category  bracketed
/// partial  category  (i,j)  activation      only when no tree was found
/// best     category, or -
/// ```
pub fn parse_report(input: &ParseInput, outcome: &ParseOutcome, n_best: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "parse\tpositions\t{}\tmorphemes\t{}\tstop\t{}\tcycles\t{}\ttrees\t{}",
        input.positions,
        input.morphemes.len(),
        outcome.stop,
        outcome.cycles,
        outcome.trees.len()
    );
    for (rank, t) in outcome.trees.iter().take(n_best).enumerate() {
        let _ = writeln!(
            out,
            "tree\t{}\t{:.6}\t{}\t{}",
            rank + 1,
            t.activation,
            t.category,
            t
        );
    }
    if outcome.trees.is_empty() {
        for p in &outcome.partial {
            let _ = writeln!(
                out,
                "partial\t{}\t({},{})\t{:.6}",
                p.category, p.span.0, p.span.1, p.activation
            );
        }
    }
    let _ = writeln!(
        out,
        "best\t{}",
        outcome
            .best()
            .map_or("-".to_string(), |t| t.category.to_string())
    );
    out
}

pub struct PipelineData {
    pub inventory: PhonemeInventory,
    pub dictionary: CompiledDictionary,
    pub confusion: ConfusionMatrix,
    pub lexicon: Lexicon,
}

impl PipelineData {
    pub fn sample() -> Self {
        PipelineData {
            inventory: crate::sample::inventory(),
            dictionary: crate::sample::dictionary(),
            confusion: crate::sample::confusion(),
            lexicon: crate::sample::lexicon(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub sim: SimConfig,
    pub params: RelaxationParams,
    pub options: ParseOptions,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub lattices: Vec<PhonemeLattice>,
    pub analyses: Vec<MorphemeLattice>,
    pub input: ParseInput,
    pub outcome: ParseOutcome,
}

impl PipelineRun {
    /// True when every Eonjeol was analyzed and a full parse was found.
    pub fn succeeded(&self) -> bool {
        self.analyses.iter().all(|a| !a.is_empty()) && !self.outcome.trees.is_empty()
    }

    /// The morph report followed by the parse report.
    pub fn report(&self, inventory: &PhonemeInventory, n_best: usize) -> String {
        morph_report(&self.lattices, &self.analyses, inventory)
            + &parse_report(&self.input, &self.outcome, n_best)
    }
}

/// Simulates, analyzes and parses a tokenized sentence.
pub fn run_pipeline(
    sentence: &[Vec<String>],
    data: &PipelineData,
    cfg: &PipelineConfig,
) -> Result<PipelineRun> {
    let lattices = simulate_sentence(sentence, &data.confusion, &cfg.sim)?;
    let analyses = analyze_sentence(&lattices, &data.dictionary);
    let input = sentence_input(&analyses);
    let outcome = parse(&input, &data.lexicon, &cfg.params, cfg.options)?;
    Ok(PipelineRun {
        lattices,
        analyses,
        input,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn sample_config(seed: u64) -> PipelineConfig {
        PipelineConfig {
            sim: SimConfig {
                seed,
                ..SimConfig::default()
            },
            params: sample::params(),
            options: ParseOptions::default(),
        }
    }

    #[test]
    fn sentence_tokenization() {
        let inv = sample::inventory();
        let s = read_sentence(sample::SENTENCE, &inv).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].join(" "), "ph a i l t u l u l");
        assert_eq!(s[1].join(" "), "c i w u e l a");
        assert!(read_sentence("  \n", &inv).unwrap().is_empty());
        assert!(read_sentence("phai-l qq", &inv).is_err());
    }

    #[test]
    fn join_shifts_spans() {
        let a = ParseInput::sequence(&["x", "y"]);
        let b = ParseInput::sequence(&["z"]);
        let j = join_inputs(&[a, b]);
        assert_eq!(j.positions, 3);
        assert_eq!(j.morphemes[2].span, (3, 3));
        assert_eq!(join_inputs(&[]).positions, 0);
    }

    #[test]
    fn sample_sentence_parses_to_a_command() {
        let data = PipelineData::sample();
        let sentence = read_sentence(sample::SENTENCE, &data.inventory).unwrap();
        let run = run_pipeline(&sentence, &data, &sample_config(7)).unwrap();
        assert!(run.succeeded());
        let truth: Vec<String> = sample::SENTENCE
            .split_whitespace()
            .zip(&run.analyses)
            .map(|(_, a)| a.renderings().join("|"))
            .collect();
        assert!(
            truth[0].split('|').any(|r| r == "phai-l+tul+ul"),
            "{truth:?}"
        );
        assert!(truth[1].split('|').any(|r| r == "ci-wu+ela"), "{truth:?}");
        assert_eq!(
            run.outcome.best().unwrap().category.to_string(),
            "s[command]"
        );
        let report = run.report(&data.inventory, 1);
        assert!(report.ends_with("best\ts[command]\n"), "{report}");
    }

    #[test]
    fn morph_report_round_trips_to_the_parse_input() {
        let data = PipelineData::sample();
        let sentence = read_sentence(sample::SENTENCE, &data.inventory).unwrap();
        let run = run_pipeline(&sentence, &data, &sample_config(3)).unwrap();
        let text = morph_report(&run.lattices, &run.analyses, &data.inventory);
        let parts = read_morph_report(&text, "m").unwrap();
        assert_eq!(join_inputs(&parts), run.input);
    }

    #[test]
    fn malformed_morph_reports() {
        for text in [
            "analysis\t1\ta\tA\t1-1\t-\n",
            "eonjeol\t1\tpositions\n",
            "eonjeol\t1\tpositions\t2\nanalysis\t1\ta+b\tA+B\t1-1\t-\n",
            "eonjeol\t1\tpositions\t2\nanalysis\t1\ta\tA\t1-3\t-\n",
            "eonjeol\t1\tpositions\t2\nanalysis\t1\ta\tA\tx\t-\n",
            "bogus\n",
        ] {
            assert!(read_morph_report(text, "m").is_err(), "{text:?}");
        }
    }

    #[test]
    fn identity_simulation_is_the_truth() {
        let inv = sample::inventory();
        let symbols: Vec<&str> = inv.phonemes().iter().map(|p| p.symbol()).collect();
        let cm = ConfusionMatrix::identity(&symbols);
        let sentence = read_sentence(sample::SENTENCE, &inv).unwrap();
        let lattices = simulate_sentence(&sentence, &cm, &SimConfig::default()).unwrap();
        for (l, truth) in lattices.iter().zip(&sentence) {
            assert_eq!(l.positions().iter().map(|p| p.len()).max(), Some(1));
            assert_eq!(&l.best_chain(), truth);
        }
    }
}
