//! Treebank evaluation and branching baselines.
//!
//! Learned structure is compared against a gold treebank with three scores,
//! all reported as percentages:
//!
//! * non-crossing precision — learned brackets that cross no gold bracket;
//! * non-crossing recall — gold brackets crossed by no learned bracket;
//! * zero-crossing sentences — sentences without any crossing pair.
//!
//! Only brackets that say something about structure are counted: width-one
//! brackets and whole-sentence brackets are compatible with every tree, so
//! they are excluded from both sides. They cannot cross anything, which
//! also means excluding them from the "does it cross" side changes nothing.

use crate::corpus::{crosses, Corpus, Span, TreeCorpus, TypeLabel};
use crate::error::{Error, Result};
use crate::learn::HypothesisStore;

/// Scores of one evaluation run. The percentages are exact ratios; render
/// them with two decimals for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    /// Percentage of counted learned brackets crossing no gold bracket.
    pub ncbp: f64,
    /// Percentage of counted gold brackets crossed by no learned bracket.
    pub ncbr: f64,
    /// Percentage of sentences free of crossing bracket pairs.
    pub zcs: f64,
    pub counted_learned: usize,
    pub counted_gold: usize,
    pub sentences: usize,
}

impl EvalReport {
    /// A score whose denominator was empty is vacuously 100.
    pub fn precision_vacuous(&self) -> bool {
        self.counted_learned == 0
    }

    pub fn recall_vacuous(&self) -> bool {
        self.counted_gold == 0
    }

    /// Human-readable aligned table, denominators included so the scores
    /// can be audited.
    pub fn text_table(&self) -> String {
        format!(
            "NCBP             {:>8.2}\n\
             NCBR             {:>8.2}\n\
             ZCS              {:>8.2}\n\
             counted-learned  {:>8}\n\
             counted-gold     {:>8}\n\
             sentences        {:>8}\n",
            self.ncbp, self.ncbr, self.zcs, self.counted_learned, self.counted_gold, self.sentences
        )
    }

    /// Machine-readable block: one `key=value` line per score, two
    /// decimals.
    pub fn key_values(&self) -> String {
        format!("ncbp={:.2}\nncbr={:.2}\nzcs={:.2}\n", self.ncbp, self.ncbr, self.zcs)
    }
}

/// Whether a bracket counts towards evaluation: at least two tokens wide and
/// not the whole sentence.
fn counted(span: Span, sentence_len: usize) -> bool {
    span.width() >= 2 && !(span.begin == 0 && span.end == sentence_len)
}

fn percent(numerator: usize, denominator: usize) -> f64 {
    if denominator == 0 {
        100.0
    } else {
        100.0 * numerator as f64 / denominator as f64
    }
}

/// Score a hypothesis store against a gold treebank.
///
/// The treebank must describe exactly the evaluated corpus: same sentence
/// count, same tokens per sentence.
pub fn evaluate(
    store: &HypothesisStore,
    corpus: &Corpus,
    gold: &TreeCorpus,
) -> Result<EvalReport> {
    if corpus.sentences.len() != gold.sentences.len() {
        return Err(Error::SentenceCountMismatch {
            left: corpus.sentences.len(),
            right: gold.sentences.len(),
        });
    }
    if store.sentence_count() != corpus.sentences.len() {
        return Err(Error::SentenceCountMismatch {
            left: store.sentence_count(),
            right: corpus.sentences.len(),
        });
    }
    for (sentence, tree) in corpus.sentences.iter().zip(&gold.sentences) {
        if sentence.tokens != tree.tokens {
            return Err(Error::TokenMismatch { sentence: sentence.id });
        }
    }

    let sentences = corpus.sentences.len();
    let mut counted_learned = 0usize;
    let mut non_crossing_learned = 0usize;
    let mut counted_gold = 0usize;
    let mut non_crossing_gold = 0usize;
    let mut clean_sentences = 0usize;

    for sentence in &corpus.sentences {
        let len = sentence.tokens.len();
        let learned: Vec<Span> = store.spans(sentence.id).map(|(span, _)| span).collect();
        let gold_spans: Vec<Span> = gold.sentences[sentence.id].spans.iter().map(|g| g.span).collect();

        let mut clean = true;
        for &span in learned.iter().filter(|s| counted(**s, len)) {
            counted_learned += 1;
            if gold_spans.iter().any(|&g| crosses(span, g)) {
                clean = false;
            } else {
                non_crossing_learned += 1;
            }
        }
        for &span in gold_spans.iter().filter(|s| counted(**s, len)) {
            counted_gold += 1;
            if !learned.iter().any(|&l| crosses(span, l)) {
                non_crossing_gold += 1;
            }
        }
        if clean {
            clean_sentences += 1;
        }
    }

    Ok(EvalReport {
        ncbp: percent(non_crossing_learned, counted_learned),
        ncbr: percent(non_crossing_gold, counted_gold),
        zcs: percent(clean_sentences, sentences),
        counted_learned,
        counted_gold,
        sentences,
    })
}

/// Structure that attaches every next token under the previous ones: all
/// prefixes of each sentence, from width two up to the full sentence.
pub fn left_branching_store(corpus: &Corpus) -> HypothesisStore {
    let mut store = HypothesisStore::new(corpus.sentences.len());
    for sentence in &corpus.sentences {
        let len = sentence.tokens.len();
        for end in 2..=len {
            store.insert(sentence.id, Span::new(0, end), TypeLabel(0));
        }
    }
    store
}

/// Mirror image of [`left_branching_store`]: all suffixes of each sentence,
/// from the full sentence down to width two.
pub fn right_branching_store(corpus: &Corpus) -> HypothesisStore {
    let mut store = HypothesisStore::new(corpus.sentences.len());
    for sentence in &corpus.sentences {
        let len = sentence.tokens.len();
        if len < 2 {
            continue;
        }
        for begin in 0..=len - 2 {
            store.insert(sentence.id, Span::new(begin, len), TypeLabel(0));
        }
    }
    store
}
