//! Reading corpora and writing learned structure.
//!
//! Three textual formats are supported:
//!
//! * plain corpora — one sentence per line, whitespace-separated tokens;
//! * bracketed treebanks — one tree per line, `(LABEL child child ...)`
//!   with bare tokens as leaves;
//! * span tables — tab-separated `sentence begin end label` rows with a
//!   leading `#`-comment header, the toolkit's own output format.
//!
//! Span tables are written in sorted order with a fixed header, so equal
//! stores always serialize to identical bytes.

use std::io::{BufRead, Write};

use crate::corpus::{Corpus, GoldSentence, GoldSpan, Sentence, Span, Token, TreeCorpus, TypeLabel};
use crate::error::{Error, Result};
use crate::learn::HypothesisStore;

/// Read a plain corpus: one sentence per line, tokens separated by
/// whitespace, blank lines skipped. Sentence ids number the non-blank lines
/// from zero.
pub fn read_plain<R: BufRead>(reader: R) -> Result<Corpus> {
    let mut sentences = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let tokens: Vec<Token> = line.split_whitespace().map(String::from).collect();
        if tokens.is_empty() {
            continue;
        }
        sentences.push(Sentence { id: sentences.len(), tokens });
    }
    Ok(Corpus { sentences })
}

/// Read a bracketed treebank: one tree per line, blank lines skipped.
///
/// Every bracket opens with `(LABEL`, contains one or more children (bare
/// tokens or nested brackets), and must dominate at least one token. The
/// bracket becomes a labelled gold span over the token positions it covers.
pub fn read_bracketed<R: BufRead>(reader: R) -> Result<TreeCorpus> {
    let mut sentences = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let toks = lex_brackets(&line);
        let mut cursor = 0usize;
        let mut tokens = Vec::new();
        let mut spans = Vec::new();
        parse_node(&toks, &mut cursor, line_no, &mut tokens, &mut spans)?;
        if cursor != toks.len() {
            return Err(Error::Parse {
                line: line_no,
                msg: "unexpected material after the closing bracket".into(),
            });
        }
        spans.sort_by_key(|g| (g.span.begin, g.span.end));
        sentences.push(GoldSentence { id: sentences.len(), tokens, spans });
    }
    Ok(TreeCorpus { sentences })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BracketTok<'a> {
    Open,
    Close,
    Word(&'a str),
}

fn lex_brackets(line: &str) -> Vec<BracketTok<'_>> {
    let mut toks = Vec::new();
    let mut word_start = None;
    for (pos, ch) in line.char_indices() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if let Some(start) = word_start.take() {
                toks.push(BracketTok::Word(&line[start..pos]));
            }
            if ch == '(' {
                toks.push(BracketTok::Open);
            } else if ch == ')' {
                toks.push(BracketTok::Close);
            }
        } else if word_start.is_none() {
            word_start = Some(pos);
        }
    }
    if let Some(start) = word_start {
        toks.push(BracketTok::Word(&line[start..]));
    }
    toks
}

fn parse_node(
    toks: &[BracketTok<'_>],
    cursor: &mut usize,
    line_no: usize,
    tokens: &mut Vec<Token>,
    spans: &mut Vec<GoldSpan>,
) -> Result<()> {
    if toks.get(*cursor) != Some(&BracketTok::Open) {
        return Err(Error::Parse { line: line_no, msg: "expected '('".into() });
    }
    *cursor += 1;
    let label = match toks.get(*cursor) {
        Some(BracketTok::Word(w)) => {
            *cursor += 1;
            (*w).to_string()
        }
        _ => {
            return Err(Error::Parse { line: line_no, msg: "expected a label after '('".into() })
        }
    };
    let begin = tokens.len();
    loop {
        match toks.get(*cursor) {
            Some(BracketTok::Close) => {
                *cursor += 1;
                break;
            }
            Some(BracketTok::Open) => {
                parse_node(toks, cursor, line_no, tokens, spans)?;
            }
            Some(BracketTok::Word(w)) => {
                tokens.push((*w).to_string());
                *cursor += 1;
            }
            None => {
                return Err(Error::Parse { line: line_no, msg: "unbalanced '('".into() });
            }
        }
    }
    let end = tokens.len();
    if end == begin {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("bracket '{label}' covers no tokens"),
        });
    }
    spans.push(GoldSpan { span: Span::new(begin, end), label });
    Ok(())
}

/// Read a span table back into a hypothesis store, validating every row
/// against the corpus it describes. Blank lines and `#`-comments are
/// skipped; rows must carry exactly four whitespace-separated fields.
pub fn read_spans<R: BufRead>(reader: R, corpus: &Corpus) -> Result<HypothesisStore> {
    let mut store = HypothesisStore::new(corpus.sentences.len());
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 4 fields (sentence begin end label), got {}", fields.len()),
            });
        }
        let parse_field = |what: &str, field: &str| -> Result<usize> {
            field.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid {what} '{field}'"),
            })
        };
        let sentence = parse_field("sentence id", fields[0])?;
        let begin = parse_field("begin", fields[1])?;
        let end = parse_field("end", fields[2])?;
        let label: u32 = fields[3].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid label '{}'", fields[3]),
        })?;
        if sentence >= corpus.sentences.len() {
            return Err(Error::UnknownSentence { sentence, len: corpus.sentences.len() });
        }
        let sentence_len = corpus.sentences[sentence].tokens.len();
        if begin >= end || end > sentence_len {
            return Err(Error::SpanOutOfBounds { sentence, begin, end, len: sentence_len });
        }
        if !store.insert(sentence, Span::new(begin, end), TypeLabel(label)) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate span {sentence} [{begin};{end})"),
            });
        }
    }
    Ok(store)
}

/// Write a hypothesis store as a span table: a fixed header followed by one
/// row per hypothesis in ascending (sentence, begin, end) order.
pub fn emit_spans<W: Write>(writer: &mut W, store: &HypothesisStore) -> Result<()> {
    writeln!(writer, "#sent\tbegin\tend\tlabel")?;
    for (sentence, span, label) in store.iter_all() {
        writeln!(writer, "{}\t{}\t{}\t{}", sentence, span.begin, span.end, label)?;
    }
    Ok(())
}

/// Write each sentence with its hypotheses as inline brackets, one sentence
/// per line: a span renders as `(its tokens)_label`. Fails if any sentence
/// holds crossing spans, since those admit no bracketing.
pub fn emit_bracketed<W: Write>(
    writer: &mut W,
    store: &HypothesisStore,
    corpus: &Corpus,
) -> Result<()> {
    for sentence in &corpus.sentences {
        let mut spans: Vec<(Span, TypeLabel)> = store.spans(sentence.id).collect();
        for (i, &(a, _)) in spans.iter().enumerate() {
            for &(b, _) in &spans[i + 1..] {
                if crate::corpus::crosses(a, b) {
                    return Err(Error::CrossingConstituents { sentence: sentence.id });
                }
            }
        }
        // Outer spans first, so nesting falls out of a single forward pass.
        spans.sort_by(|a, b| a.0.begin.cmp(&b.0.begin).then(b.0.end.cmp(&a.0.end)));
        let mut parts = Vec::new();
        let mut next = 0usize;
        render_range(
            &sentence.tokens,
            Span::new(0, sentence.tokens.len()),
            &spans,
            &mut next,
            &mut parts,
        );
        writeln!(writer, "{}", parts.join(" "))?;
    }
    Ok(())
}

fn render_range(
    tokens: &[Token],
    range: Span,
    spans: &[(Span, TypeLabel)],
    next: &mut usize,
    parts: &mut Vec<String>,
) {
    let mut pos = range.begin;
    while pos < range.end {
        if *next < spans.len() && spans[*next].0.begin == pos {
            let (span, label) = spans[*next];
            *next += 1;
            let mut inner = Vec::new();
            render_range(tokens, span, spans, next, &mut inner);
            parts.push(format!("({})_{}", inner.join(" "), label));
            pos = span.end;
        } else {
            parts.push(tokens[pos].clone());
            pos += 1;
        }
    }
}
