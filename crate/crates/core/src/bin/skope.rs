use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use skope::decoder::{decode, parse_frames, DecoderConfig};
use skope::error::{Error, Result};
use skope::grammar::Lexicon;
use skope::lattice::{format_lattices, parse_lattices, ConfusionMatrix, SimConfig};
use skope::morph::{load_dictionary, CompiledDictionary};
use skope::parser::{parse, ParseInput, ParseOptions, RelaxationParams};
use skope::phonology::PhonemeInventory;
use skope::pipeline::{
    analyze_sentence, join_inputs, morph_plain, morph_report, parse_plain, parse_report,
    read_morph_report, read_sentence, run_pipeline, simulate_sentence, PipelineConfig,
    PipelineData,
};
use skope::sample;

/// Lattice-based spoken language processing: diphone decoding, phoneme
/// lattice simulation, morphological analysis and relaxation parsing.
///
/// Every data file defaults to the bundled sample data. Exit status is 0 on
/// success, 1 when the analysis ran but found nothing, 2 on bad input.
#[derive(Parser)]
#[command(name = "skope", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decode a diphone spotting sequence into a phoneme lattice.
    Decode(DecodeArgs),
    /// Simulate recognition lattices around a truth sentence.
    Simulate(SimulateArgs),
    /// Analyze phoneme lattices into morpheme lattices.
    Morph(MorphArgs),
    /// Parse a morpheme sequence or a morph report.
    Parse(ParseArgs),
    /// Simulate, analyze and parse a truth sentence.
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Report,
}

#[derive(Args)]
struct InventoryArgs {
    /// Phoneme inventory file.
    #[arg(long, value_name = "FILE")]
    inventory: Option<PathBuf>,
}

#[derive(Args)]
struct DictArgs {
    /// Morpheme dictionary file.
    #[arg(long, value_name = "FILE")]
    dict: Option<PathBuf>,
    /// Tag hierarchy file.
    #[arg(long, value_name = "FILE", conflicts_with = "flat_tags")]
    tags: Option<PathBuf>,
    /// Use the flat tag set of the dictionary instead of a hierarchy.
    #[arg(long)]
    flat_tags: bool,
    /// Morpheme connectivity matrix.
    #[arg(long, value_name = "FILE")]
    morph_matrix: Option<PathBuf>,
    /// Phoneme connectivity matrix.
    #[arg(long, value_name = "FILE")]
    phon_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    /// Confusion matrix file.
    #[arg(long, value_name = "FILE")]
    confusion: Option<PathBuf>,
    /// Expected alternatives per position, truth included.
    #[arg(long, default_value_t = 2.3)]
    target_alts: f64,
    /// Most alternatives at one position.
    #[arg(long, default_value_t = 4)]
    max_alts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ParserArgs {
    /// Categorial lexicon file.
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    /// Relaxation parameter file.
    #[arg(long, value_name = "FILE")]
    params: Option<PathBuf>,
    /// Override one parameter, e.g. `--set decay_mode=retention`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Write the relaxation cycles to FILE.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Number of parse trees to print.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    n_best: u64,
}

#[derive(Args)]
struct DecodeArgs {
    /// Spotting frames: `index<TAB>first<TAB>second[<TAB>score]` lines.
    #[arg(long, value_name = "FILE")]
    frames: PathBuf,
    /// Runs shorter than this many frames are dropped as insertions.
    #[arg(long, default_value_t = 2)]
    min_count: usize,
    #[command(flatten)]
    inventory: InventoryArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Truth sentence in Yale romanization, Eonjeols separated by spaces.
    #[arg(long, value_name = "FILE")]
    truth: PathBuf,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    inventory: InventoryArgs,
}

#[derive(Args)]
struct MorphArgs {
    /// Phoneme lattices, one per Eonjeol, separated by blank lines.
    #[arg(long, value_name = "FILE")]
    lattice: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    format: Format,
    #[command(flatten)]
    dict: DictArgs,
    #[command(flatten)]
    inventory: InventoryArgs,
}

#[derive(Args)]
struct ParseArgs {
    /// Space-separated morpheme forms, one position each.
    #[arg(
        long,
        value_name = "FORMS",
        required_unless_present = "analyses",
        conflicts_with = "analyses"
    )]
    morphemes: Option<String>,
    /// Morph report to parse.
    #[arg(long, value_name = "FILE")]
    analyses: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    format: Format,
    #[command(flatten)]
    parser: ParserArgs,
}

#[derive(Args)]
struct PipelineArgs {
    /// Truth sentence in Yale romanization, Eonjeols separated by spaces.
    #[arg(long, value_name = "FILE")]
    truth: PathBuf,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    dict: DictArgs,
    #[command(flatten)]
    parser: ParserArgs,
    #[command(flatten)]
    inventory: InventoryArgs,
}

/// Output and whether the analysis found anything.
struct Done {
    stdout: String,
    found: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decode(a) => run_decode(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Morph(a) => run_morph(a),
        Command::Parse(a) => run_parse(a),
        Command::Pipeline(a) => run_pipeline_cmd(a),
    };
    match result {
        Ok(done) => {
            let mut out = std::io::stdout().lock();
            if out
                .write_all(done.stdout.as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return ExitCode::from(2);
            }
            ExitCode::from(if done.found { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("skope: {e}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn name(path: &Path) -> String {
    path.display().to_string()
}

/// File contents and display name, or the bundled default.
fn text_or(
    path: &Option<PathBuf>,
    default: &'static str,
    default_name: &str,
) -> Result<(String, String)> {
    match path {
        Some(p) => Ok((read(p)?, name(p))),
        None => Ok((default.to_string(), default_name.to_string())),
    }
}

impl InventoryArgs {
    fn load(&self) -> Result<PhonemeInventory> {
        match &self.inventory {
            Some(p) => PhonemeInventory::parse(&read(p)?, &name(p)),
            None => Ok(sample::inventory()),
        }
    }
}

impl DictArgs {
    fn load(&self, inventory: &PhonemeInventory) -> Result<CompiledDictionary> {
        let dict = text_or(&self.dict, sample::DICTIONARY, "dictionary.tsv")?;
        let tags = if self.flat_tags {
            None
        } else {
            Some(text_or(&self.tags, sample::TAGS, "tags.tsv")?)
        };
        let morph = text_or(&self.morph_matrix, sample::MORPH_MATRIX, "morph.matrix")?;
        let phon = text_or(&self.phon_matrix, sample::PHON_MATRIX, "phon.matrix")?;
        let report = load_dictionary(
            inventory,
            (&dict.0, &dict.1),
            tags.as_ref().map(|(t, n)| (t.as_str(), n.as_str())),
            (&morph.0, &morph.1),
            (&phon.0, &phon.1),
        )?;
        for w in &report.warnings {
            eprintln!("skope: warning: {w}");
        }
        Ok(report.dictionary)
    }
}

impl SimArgs {
    fn confusion(&self, inventory: &PhonemeInventory) -> Result<ConfusionMatrix> {
        let cm = match &self.confusion {
            Some(p) => ConfusionMatrix::parse(&read(p)?, &name(p))?,
            None => sample::confusion(),
        };
        cm.validate(inventory)?;
        Ok(cm)
    }

    fn config(&self) -> SimConfig {
        SimConfig {
            target_alternatives: self.target_alts,
            max_alternatives: self.max_alts,
            seed: self.seed,
        }
    }
}

impl ParserArgs {
    fn lexicon(&self) -> Result<Lexicon> {
        match &self.lexicon {
            Some(p) => Lexicon::parse(&read(p)?, &name(p)),
            None => Ok(sample::lexicon()),
        }
    }

    fn params(&self) -> Result<RelaxationParams> {
        let mut p = match &self.params {
            Some(path) => RelaxationParams::parse(&read(path)?, &name(path))?,
            None => sample::params(),
        };
        for o in &self.overrides {
            p.set_line(o)?;
        }
        p.validate()?;
        Ok(p)
    }

    fn options(&self) -> ParseOptions {
        ParseOptions {
            trace: self.trace.is_some(),
            ..ParseOptions::default()
        }
    }

    fn n_best(&self) -> usize {
        self.n_best as usize
    }

    fn write_trace(&self, outcome: &skope::parser::ParseOutcome) -> Result<()> {
        if let (Some(path), Some(trace)) = (&self.trace, &outcome.trace) {
            write(path, &trace.to_text())?;
        }
        Ok(())
    }
}

fn read_truth(path: &Path, inventory: &PhonemeInventory) -> Result<Vec<Vec<String>>> {
    read_sentence(&read(path)?, inventory).map_err(|e| Error::at_line(&name(path), 1, e))
}

fn run_decode(a: DecodeArgs) -> Result<Done> {
    let inventory = a.inventory.load()?;
    let frames = parse_frames(&read(&a.frames)?, &name(&a.frames), &inventory)?;
    let decoding = decode(&frames, &DecoderConfig::with_min_count(a.min_count)?);
    for d in &decoding.diagnostics {
        eprintln!(
            "skope: discontinuity between positions {} and {}: {} then {}",
            d.before, d.after, d.left, d.right
        );
    }
    Ok(Done {
        found: !decoding.lattice.is_empty(),
        stdout: decoding.lattice.to_text(),
    })
}

fn run_simulate(a: SimulateArgs) -> Result<Done> {
    let inventory = a.inventory.load()?;
    let cm = a.sim.confusion(&inventory)?;
    let sentence = read_truth(&a.truth, &inventory)?;
    let lattices = simulate_sentence(&sentence, &cm, &a.sim.config())?;
    Ok(Done {
        found: !lattices.is_empty(),
        stdout: format_lattices(&lattices),
    })
}

fn run_morph(a: MorphArgs) -> Result<Done> {
    let inventory = a.inventory.load()?;
    let dict = a.dict.load(&inventory)?;
    let lattices = parse_lattices(&read(&a.lattice)?, &name(&a.lattice))?;
    for l in &lattices {
        l.validate(&inventory)
            .map_err(|e| Error::at_line(&name(&a.lattice), 0, e))?;
    }
    let analyses = analyze_sentence(&lattices, &dict);
    let stdout = match a.format {
        Format::Plain => morph_plain(&analyses),
        Format::Report => morph_report(&lattices, &analyses, &inventory),
    };
    Ok(Done {
        found: !analyses.is_empty() && analyses.iter().all(|m| !m.is_empty()),
        stdout,
    })
}

fn run_parse(a: ParseArgs) -> Result<Done> {
    let lexicon = a.parser.lexicon()?;
    let params = a.parser.params()?;
    let input = match (&a.morphemes, &a.analyses) {
        (Some(forms), _) => ParseInput::sequence(&forms.split_whitespace().collect::<Vec<_>>()),
        (None, Some(path)) => join_inputs(&read_morph_report(&read(path)?, &name(path))?),
        (None, None) => unreachable!("clap requires one input"),
    };
    let outcome = parse(&input, &lexicon, &params, a.parser.options())?;
    a.parser.write_trace(&outcome)?;
    let stdout = match a.format {
        Format::Plain => parse_plain(&outcome, a.parser.n_best()),
        Format::Report => parse_report(&input, &outcome, a.parser.n_best()),
    };
    Ok(Done {
        found: !outcome.trees.is_empty(),
        stdout,
    })
}

fn run_pipeline_cmd(a: PipelineArgs) -> Result<Done> {
    let inventory = a.inventory.load()?;
    let data = PipelineData {
        dictionary: a.dict.load(&inventory)?,
        confusion: a.sim.confusion(&inventory)?,
        lexicon: a.parser.lexicon()?,
        inventory,
    };
    let sentence = read_truth(&a.truth, &data.inventory)?;
    let cfg = PipelineConfig {
        sim: a.sim.config(),
        params: a.parser.params()?,
        options: a.parser.options(),
    };
    let run = run_pipeline(&sentence, &data, &cfg)?;
    a.parser.write_trace(&run.outcome)?;
    Ok(Done {
        found: run.succeeded(),
        stdout: run.report(&data.inventory, a.parser.n_best()),
    })
}
