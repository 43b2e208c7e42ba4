//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of an input file could not be parsed.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A span refers to a sentence id that the corpus does not contain.
    #[error("sentence {sentence}: unknown sentence id (corpus has {len} sentences)")]
    UnknownSentence { sentence: usize, len: usize },

    /// A span is empty or extends past the end of its sentence.
    #[error("sentence {sentence}: span [{begin}, {end}) out of bounds for length {len}")]
    SpanOutOfBounds {
        sentence: usize,
        begin: usize,
        end: usize,
        len: usize,
    },

    /// Bracketed output was requested for a sentence whose constituents cross.
    #[error("sentence {sentence}: crossing constituents cannot be rendered as brackets")]
    CrossingConstituents { sentence: usize },

    /// A type label was used that was never issued by the registry.
    #[error("unknown type label {0}")]
    UnknownLabel(u32),

    /// A probability was requested from a scorer over an empty store.
    #[error("scorer was frozen from an empty hypothesis store")]
    EmptyScorer,

    /// The exhaustive selection oracle refuses large inputs.
    #[error("brute-force selection supports at most {max} hypotheses, got {got}")]
    TooManyHypotheses { max: usize, got: usize },

    /// Evaluation inputs disagree on the tokens of a sentence.
    #[error("sentence {sentence}: token sequences of the two corpora differ")]
    TokenMismatch { sentence: usize },

    /// Evaluation inputs disagree on the number of sentences.
    #[error("corpora differ in sentence count: {left} vs {right}")]
    SentenceCountMismatch { left: usize, right: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
