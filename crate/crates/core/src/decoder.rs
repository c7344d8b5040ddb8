//! Deterministic decoding of a diphone spotting sequence into a phoneme
//! lattice: group equal consecutive labels into runs, drop short runs as
//! insertions, then split diphones into phonemes, merging the phoneme shared
//! by neighbouring diphones.

use std::fmt;

use crate::error::{data_lines, Error, Result};
use crate::lattice::PhonemeLattice;
use crate::phonology::{classify_diphone, Diphone, PhonemeInventory};

#[derive(Debug, Clone, PartialEq)]
pub struct SpottingFrame {
    pub index: u64,
    pub diphone: Diphone,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiphoneRun {
    pub diphone: Diphone,
    pub start_frame: u64,
    pub end_frame: u64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoderConfig {
    /// Runs shorter than this many frames are treated as insertions.
    pub min_count: usize,
    pub frame_shift_ms: u32,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            min_count: 2,
            frame_shift_ms: 30,
        }
    }
}

impl DecoderConfig {
    pub fn with_min_count(min_count: usize) -> Result<Self> {
        if min_count == 0 {
            return Err(Error::Params("min_count must be at least 1".into()));
        }
        Ok(DecoderConfig {
            min_count,
            ..Default::default()
        })
    }
}

/// Two adjacent runs that do not share a phoneme. `before` and `after` are
/// the 1-based lattice positions on either side of the break.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discontinuity {
    pub before: usize,
    pub after: usize,
    pub left: String,
    pub right: String,
}

impl fmt::Display for Discontinuity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "non-chaining diphones {} {} between positions {} and {}",
            self.left, self.right, self.before, self.after
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoding {
    pub lattice: PhonemeLattice,
    pub diagnostics: Vec<Discontinuity>,
}

/// Maximal runs of identical consecutive labels. A gap in frame indices also
/// ends a run so that `count == end_frame - start_frame + 1` holds.
pub fn group_runs(frames: &[SpottingFrame]) -> Vec<DiphoneRun> {
    let mut runs: Vec<DiphoneRun> = Vec::new();
    for frame in frames {
        match runs.last_mut() {
            Some(run) if run.diphone == frame.diphone && run.end_frame + 1 == frame.index => {
                run.end_frame = frame.index;
                run.count += 1;
            }
            _ => runs.push(DiphoneRun {
                diphone: frame.diphone.clone(),
                start_frame: frame.index,
                end_frame: frame.index,
                count: 1,
            }),
        }
    }
    runs
}

pub fn prune_insertions(runs: &[DiphoneRun], config: &DecoderConfig) -> Vec<DiphoneRun> {
    runs.iter()
        .filter(|r| r.count >= config.min_count)
        .cloned()
        .collect()
}

pub fn merge_to_phonemes(runs: &[DiphoneRun]) -> Decoding {
    let mut phonemes: Vec<String> = Vec::new();
    let mut diagnostics = Vec::new();
    let mut previous: Option<&Diphone> = None;
    for run in runs {
        let d = &run.diphone;
        match previous {
            Some(p) if p.second == d.first => {}
            Some(p) => {
                diagnostics.push(Discontinuity {
                    before: phonemes.len(),
                    after: phonemes.len() + 1,
                    left: p.to_string(),
                    right: d.to_string(),
                });
                phonemes.push(d.first.symbol().to_string());
            }
            None => phonemes.push(d.first.symbol().to_string()),
        }
        phonemes.push(d.second.symbol().to_string());
        previous = Some(d);
    }
    Decoding {
        lattice: PhonemeLattice::from_sequence(phonemes),
        diagnostics,
    }
}

pub fn decode(frames: &[SpottingFrame], config: &DecoderConfig) -> Decoding {
    let runs = group_runs(frames);
    merge_to_phonemes(&prune_insertions(&runs, config))
}

/// Reads `index<TAB>first<TAB>second[<TAB>score]` lines.
pub fn parse_frames(
    text: &str,
    source_name: &str,
    inventory: &PhonemeInventory,
) -> Result<Vec<SpottingFrame>> {
    let mut frames: Vec<SpottingFrame> = Vec::new();
    for (line_no, line) in data_lines(text) {
        let err = |m: String| Error::at_line(source_name, line_no, m);
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if !(3..=4).contains(&cols.len()) {
            return Err(err("expected index<TAB>first<TAB>second[<TAB>score]".into()));
        }
        let index: u64 = cols[0]
            .parse()
            .map_err(|_| err(format!("bad frame index {:?}", cols[0])))?;
        if let Some(prev) = frames.last() {
            if index <= prev.index {
                return Err(err(format!(
                    "frame index {index} does not increase (previous {})",
                    prev.index
                )));
            }
        }
        let first = inventory
            .get(cols[1])
            .ok_or_else(|| err(format!("unknown phoneme {:?}", cols[1])))?;
        let second = inventory
            .get(cols[2])
            .ok_or_else(|| err(format!("unknown phoneme {:?}", cols[2])))?;
        let diphone = classify_diphone(first, second).map_err(|e| err(e.to_string()))?;
        let score = match cols.get(3) {
            Some(s) => {
                let v: f64 = s.parse().map_err(|_| err(format!("bad score {s:?}")))?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(err(format!("score {v} outside [0,1]")));
                }
                Some(v)
            }
            None => None,
        };
        frames.push(SpottingFrame {
            index,
            diphone,
            score,
        });
    }
    Ok(frames)
}

pub fn format_frames(frames: &[SpottingFrame]) -> String {
    let mut out = String::new();
    for f in frames {
        out.push_str(&format!(
            "{}\t{}\t{}",
            f.index,
            f.diphone.first.symbol(),
            f.diphone.second.symbol()
        ));
        if let Some(s) = f.score {
            out.push_str(&format!("\t{s}"));
        }
        out.push('\n');
    }
    out
}

/// Frames for consecutive runs, `(first, second, count)` each, numbered from
/// zero without gaps.
pub fn frames_from_runs(
    inventory: &PhonemeInventory,
    runs: &[(&str, &str, usize)],
) -> Result<Vec<SpottingFrame>> {
    let mut frames = Vec::new();
    let mut index = 0;
    for &(a, b, count) in runs {
        let d = classify_diphone(inventory.require(a)?, inventory.require(b)?)?;
        for _ in 0..count {
            frames.push(SpottingFrame {
                index,
                diphone: d.clone(),
                score: None,
            });
            index += 1;
        }
    }
    Ok(frames)
}
