use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown phoneme symbol at position {position} of {text:?}")]
    UnknownSymbol { text: String, position: usize },

    #[error("no valid syllabification of {0}")]
    Syllabify(String),

    #[error("{first} {second} fits no diphone type")]
    NotADiphone { first: String, second: String },

    #[error("invalid inventory: {0}")]
    Inventory(String),

    #[error("invalid lattice: {0}")]
    Lattice(String),

    #[error("no confusion row for phoneme {0:?}")]
    MissingConfusionRow(String),

    #[error("invalid confusion matrix: {0}")]
    Confusion(String),

    #[error("invalid simulation config: {0}")]
    SimConfig(String),

    #[error("undeclared {kind} {name:?}")]
    Undeclared { kind: &'static str, name: String },

    #[error("invalid dictionary: {0}")]
    Dictionary(String),

    #[error("invalid category {text:?}: {reason}")]
    Category { text: String, reason: String },

    #[error("invalid lexicon: {0}")]
    Lexicon(String),

    #[error("no lexicon entry for morpheme {0:?}")]
    UnknownMorpheme(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("{source_name}:{line}: {message}")]
    Format {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Attaches a file name and 1-based line number to an error raised while
    /// reading one line of a text format.
    pub fn at_line(source_name: &str, line: usize, err: impl std::fmt::Display) -> Self {
        Error::Format {
            source_name: source_name.to_string(),
            line,
            message: err.to_string(),
        }
    }
}

/// Iterates the meaningful lines of a text file: `#` starts a comment,
/// blank lines are skipped. Yields 1-based line numbers.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(n, raw)| {
        let line = match raw.find('#') {
            Some(at) => &raw[..at],
            None => raw,
        };
        let line = line.trim_end_matches(['\r', ' ']);
        if line.trim().is_empty() {
            None
        } else {
            Some((n + 1, line))
        }
    })
}
