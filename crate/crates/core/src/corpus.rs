//! Core data model: tokens, sentences, spans, corpora and gold treebanks.
//!
//! A plain corpus is an ordered list of sentences with dense ids `0..n`.
//! A `TreeCorpus` additionally carries labelled gold spans per sentence,
//! as read from one bracketed tree per line.

use crate::error::{Error, Result};

/// A single token. Tokens are the atomic unit of comparison everywhere;
/// they are never empty and never contain whitespace.
pub type Token = String;

/// Half-open token range `[begin, end)` within one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub begin: usize,
    pub end: usize,
}

impl Span {
    pub fn new(begin: usize, end: usize) -> Self {
        Span { begin, end }
    }

    pub fn width(&self) -> usize {
        self.end - self.begin
    }

    pub fn is_empty(&self) -> bool {
        self.begin >= self.end
    }

    /// True when `self` contains `other` (not necessarily strictly).
    pub fn contains(&self, other: &Span) -> bool {
        self.begin <= other.begin && other.end <= self.end
    }
}

/// True when the two spans interleave strictly: each one starts inside the
/// other's interior. Nesting and adjacency do not cross; a width-1 span and
/// the full-sentence span can never cross anything.
pub fn crosses(a: Span, b: Span) -> bool {
    (a.begin < b.begin && b.begin < a.end && a.end < b.end)
        || (b.begin < a.begin && a.begin < b.end && b.end < a.end)
}

/// Numeric constituent type. Raw labels are issued by a `TypeRegistry`;
/// labels render as the decimal value of their canonical representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeLabel(pub u32);

impl std::fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A hypothesized constituent: a non-empty span of one sentence plus a type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constituent {
    pub sentence: usize,
    pub span: Span,
    pub label: TypeLabel,
}

/// A tokenized sentence. Ids are dense and equal the line order of the
/// source file after filtering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: usize,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// An ordered, plain (structure-free) corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Tokens covered by `span` in sentence `sid`.
    pub fn yield_of(&self, sid: usize, span: Span) -> Result<&[Token]> {
        let sent = self
            .sentences
            .get(sid)
            .ok_or(Error::UnknownSentence { sentence: sid, len: self.len() })?;
        if span.is_empty() || span.end > sent.len() {
            return Err(Error::SpanOutOfBounds {
                sentence: sid,
                begin: span.begin,
                end: span.end,
                len: sent.len(),
            });
        }
        Ok(&sent.tokens[span.begin..span.end])
    }

    /// Drop sentences shorter than `min` tokens, re-assigning dense ids.
    pub fn filter_min_length(&self, min: usize) -> Corpus {
        let mut out = Corpus::default();
        for sent in &self.sentences {
            if sent.len() >= min {
                out.sentences.push(Sentence { id: out.sentences.len(), tokens: sent.tokens.clone() });
            }
        }
        out
    }
}

/// One labelled gold bracket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldSpan {
    pub span: Span,
    pub label: String,
}

/// A gold sentence: tokens plus the labelled spans of its tree. Spans come
/// from a properly nested tree, so they are pairwise non-crossing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldSentence {
    pub id: usize,
    pub tokens: Vec<Token>,
    pub spans: Vec<GoldSpan>,
}

/// A treebank: sentences with gold constituent structure.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeCorpus {
    pub sentences: Vec<GoldSentence>,
}

impl TreeCorpus {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Drop sentences shorter than `min` tokens, re-assigning dense ids.
    /// Mirrors `Corpus::filter_min_length` so that a filtered plain corpus
    /// and a filtered treebank keep identical sentence ids.
    pub fn filter_min_length(&self, min: usize) -> TreeCorpus {
        let mut out = TreeCorpus::default();
        for sent in &self.sentences {
            if sent.tokens.len() >= min {
                let mut copy = sent.clone();
                copy.id = out.sentences.len();
                out.sentences.push(copy);
            }
        }
        out
    }
}

/// Forget all structure, keeping only the token sequences.
pub fn strip_structure(gold: &TreeCorpus) -> Corpus {
    Corpus {
        sentences: gold
            .sentences
            .iter()
            .enumerate()
            .map(|(id, s)| Sentence { id, tokens: s.tokens.clone() })
            .collect(),
    }
}
