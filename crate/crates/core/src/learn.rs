//! Hypothesis storage and the pairwise learning loop.
//!
//! Every sentence pair is aligned; each distinct pair contributes its
//! non-empty sides as constituent hypotheses. Two hypotheses born from the
//! same distinct pair carry the same type, and when a new hypothesis lands on
//! a span that already holds one, the two types are merged. Types therefore
//! form equivalence classes over spans, maintained in a union-find registry.
//!
//! Storage is one map per sentence keyed by span, so a sentence never holds
//! two hypotheses for the same span: the first one wins and later arrivals
//! only contribute their type evidence.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::align::{hypothesize, CostConfig};
use crate::corpus::{Corpus, Span, TypeLabel};
use crate::error::{Error, Result};

/// Union-find over type labels. Merging never reuses labels; the canonical
/// representative of a class is its smallest member, which keeps reported
/// labels stable regardless of merge order.
#[derive(Debug, Clone, Default)]
pub struct TypeRegistry {
    parent: Vec<u32>,
}

impl TypeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of labels ever issued (not the number of classes).
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Issue a brand-new type label in its own class.
    pub fn fresh(&mut self) -> TypeLabel {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        TypeLabel(id)
    }

    fn root(&mut self, mut a: u32) -> Result<u32> {
        if a as usize >= self.parent.len() {
            return Err(Error::UnknownLabel(a));
        }
        while self.parent[a as usize] != a {
            let grandparent = self.parent[self.parent[a as usize] as usize];
            self.parent[a as usize] = grandparent;
            a = grandparent;
        }
        Ok(a)
    }

    /// Canonical representative of the label's class.
    pub fn canonical(&mut self, label: TypeLabel) -> Result<TypeLabel> {
        Ok(TypeLabel(self.root(label.0)?))
    }

    /// Merge two classes and return the canonical label of the union.
    pub fn merge(&mut self, a: TypeLabel, b: TypeLabel) -> Result<TypeLabel> {
        let ra = self.root(a.0)?;
        let rb = self.root(b.0)?;
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi as usize] = lo;
        Ok(TypeLabel(lo))
    }

    /// Whether two labels belong to the same class.
    pub fn same(&mut self, a: TypeLabel, b: TypeLabel) -> Result<bool> {
        Ok(self.root(a.0)? == self.root(b.0)?)
    }
}

/// Constituent hypotheses, one sorted span map per sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisStore {
    sentences: Vec<BTreeMap<Span, TypeLabel>>,
}

impl HypothesisStore {
    pub fn new(sentence_count: usize) -> Self {
        HypothesisStore { sentences: vec![BTreeMap::new(); sentence_count] }
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    /// Total number of stored hypotheses across all sentences.
    pub fn total(&self) -> usize {
        self.sentences.iter().map(BTreeMap::len).sum()
    }

    pub fn get(&self, sentence: usize, span: Span) -> Option<TypeLabel> {
        self.sentences[sentence].get(&span).copied()
    }

    /// Store a hypothesis unless the span is already taken; returns whether
    /// it was inserted.
    pub fn insert(&mut self, sentence: usize, span: Span, label: TypeLabel) -> bool {
        match self.sentences[sentence].entry(span) {
            Entry::Occupied(_) => false,
            Entry::Vacant(slot) => {
                slot.insert(label);
                true
            }
        }
    }

    /// Whether the span crosses any hypothesis already stored for the
    /// sentence (containment and equality do not cross).
    pub fn crosses_any(&self, sentence: usize, span: Span) -> bool {
        self.sentences[sentence]
            .keys()
            .any(|stored| crate::corpus::crosses(span, *stored))
    }

    /// Spans of one sentence in ascending order.
    pub fn spans(&self, sentence: usize) -> impl Iterator<Item = (Span, TypeLabel)> + '_ {
        self.sentences[sentence].iter().map(|(s, l)| (*s, *l))
    }

    /// All hypotheses in (sentence, span) order.
    pub fn iter_all(&self) -> impl Iterator<Item = (usize, Span, TypeLabel)> + '_ {
        self.sentences
            .iter()
            .enumerate()
            .flat_map(|(sid, map)| map.iter().map(move |(s, l)| (sid, *s, *l)))
    }

    /// Replace the hypothesis set of one sentence.
    pub fn replace_sentence(&mut self, sentence: usize, spans: BTreeMap<Span, TypeLabel>) {
        self.sentences[sentence] = spans;
    }

    /// Rewrite every stored label as its canonical class representative.
    /// Run this once after learning so downstream consumers never need the
    /// registry to compare types.
    pub fn canonicalize(&mut self, registry: &mut TypeRegistry) -> Result<()> {
        for map in &mut self.sentences {
            for label in map.values_mut() {
                *label = registry.canonical(*label)?;
            }
        }
        Ok(())
    }
}

/// How hypotheses are admitted during learning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnMode {
    /// Keep every hypothesis, including mutually crossing ones; a
    /// probabilistic selection pass untangles them later.
    All,
    /// Incremental filtering: a new hypothesis that would cross one already
    /// stored for its sentence is discarded on the spot.
    Incr,
}

/// Settings for a learning run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnConfig {
    pub mode: LearnMode,
    /// When set, the sentence-pair order is shuffled with this seed. Stored
    /// hypotheses depend on pair order under `LearnMode::Incr` (first one in
    /// wins); under `LearnMode::All` only label numbering does.
    pub order_seed: Option<u64>,
    pub cost: CostConfig,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig { mode: LearnMode::All, order_seed: None, cost: CostConfig::default() }
    }
}

/// Counters reported after a learning run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LearnStats {
    pub sentences: usize,
    pub pairs_processed: usize,
    pub hypotheses_stored: usize,
    /// Hypotheses dropped by `LearnMode::Incr` for crossing a stored one.
    pub incr_discards: usize,
    pub type_merges: usize,
}

/// Record the distinct pairs of one aligned sentence pair as hypotheses.
///
/// Each distinct pair is handled independently: empty sides are dropped,
/// then (under `LearnMode::Incr`) sides that would newly cross stored
/// hypotheses are discarded. Types flow between the surviving sides — both
/// already typed merges the two classes, one typed extends its class to the
/// other side, neither typed mints a fresh label. A pair whose sides were all
/// dropped mints nothing.
pub fn attach_hypotheses(
    store: &mut HypothesisStore,
    registry: &mut TypeRegistry,
    s1: usize,
    s2: usize,
    pairs: &[(Span, Span)],
    mode: LearnMode,
    stats: &mut LearnStats,
) -> Result<()> {
    for &(span1, span2) in pairs {
        let mut sides: Vec<(usize, Span)> = Vec::with_capacity(2);
        if !span1.is_empty() {
            sides.push((s1, span1));
        }
        if !span2.is_empty() {
            sides.push((s2, span2));
        }
        if mode == LearnMode::Incr {
            sides.retain(|&(sid, span)| {
                if store.get(sid, span).is_some() || !store.crosses_any(sid, span) {
                    true
                } else {
                    stats.incr_discards += 1;
                    false
                }
            });
        }
        if sides.is_empty() {
            continue;
        }
        let existing: Vec<TypeLabel> =
            sides.iter().filter_map(|&(sid, span)| store.get(sid, span)).collect();
        let label = match existing.as_slice() {
            [] => registry.fresh(),
            [one] => registry.canonical(*one)?,
            [a, b] => {
                if !registry.same(*a, *b)? {
                    stats.type_merges += 1;
                }
                registry.merge(*a, *b)?
            }
            _ => unreachable!("a distinct pair has at most two sides"),
        };
        for &(sid, span) in &sides {
            if store.insert(sid, span, label) {
                stats.hypotheses_stored += 1;
            }
        }
    }
    Ok(())
}

/// Align every sentence pair of the corpus and collect hypotheses.
///
/// Pairs are visited in ascending `(i, j)` order, or in a seeded shuffle of
/// that order when `config.order_seed` is set. Stored labels are rewritten to
/// their canonical representatives before returning.
pub fn alignment_learning(
    corpus: &Corpus,
    config: &LearnConfig,
) -> Result<(HypothesisStore, TypeRegistry, LearnStats)> {
    let n = corpus.sentences.len();
    let mut store = HypothesisStore::new(n);
    let mut registry = TypeRegistry::new();
    let mut stats = LearnStats { sentences: n, ..LearnStats::default() };

    let mut order: Vec<(usize, usize)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            order.push((i, j));
        }
    }
    if let Some(seed) = config.order_seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
    }

    for (i, j) in order {
        stats.pairs_processed += 1;
        let pairs = hypothesize(&corpus.sentences[i].tokens, &corpus.sentences[j].tokens, &config.cost);
        attach_hypotheses(&mut store, &mut registry, i, j, &pairs, config.mode, &mut stats)?;
    }

    store.canonicalize(&mut registry)?;
    Ok((store, registry, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentence;

    fn corpus(lines: &[&str]) -> Corpus {
        Corpus {
            sentences: lines
                .iter()
                .enumerate()
                .map(|(id, line)| Sentence {
                    id,
                    tokens: line.split_whitespace().map(String::from).collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn registry_merges_toward_smallest_label() {
        let mut reg = TypeRegistry::new();
        let a = reg.fresh();
        let b = reg.fresh();
        let c = reg.fresh();
        assert_eq!((a, b, c), (TypeLabel(0), TypeLabel(1), TypeLabel(2)));
        assert_eq!(reg.merge(b, c).unwrap(), TypeLabel(1));
        assert_eq!(reg.canonical(c).unwrap(), TypeLabel(1));
        assert_eq!(reg.merge(c, a).unwrap(), TypeLabel(0));
        assert_eq!(reg.canonical(b).unwrap(), TypeLabel(0));
        assert!(reg.same(a, c).unwrap());
        // A fresh label after merging is still brand new.
        assert_eq!(reg.fresh(), TypeLabel(3));
        assert!(!reg.same(TypeLabel(3), a).unwrap());
    }

    #[test]
    fn registry_rejects_labels_it_never_issued() {
        let mut reg = TypeRegistry::new();
        reg.fresh();
        assert!(matches!(reg.canonical(TypeLabel(9)), Err(Error::UnknownLabel(9))));
    }

    #[test]
    fn shared_contexts_propagate_types_across_sentences() {
        let corpus = corpus(&["a X b", "a Y b", "c X d"]);
        let (store, _, stats) = alignment_learning(&corpus, &LearnConfig::default()).unwrap();
        // Pair (0,1) makes X and Y the same type; pair (0,2) carves "a" and
        // "b" out of sentence 0 and "c" and "d" out of sentence 2; pair (1,2)
        // shares no token and contributes nothing.
        let s0: Vec<_> = store.spans(0).collect();
        assert_eq!(
            s0,
            vec![
                (Span::new(0, 1), TypeLabel(1)),
                (Span::new(1, 2), TypeLabel(0)),
                (Span::new(2, 3), TypeLabel(2)),
            ]
        );
        assert_eq!(store.spans(1).collect::<Vec<_>>(), vec![(Span::new(1, 2), TypeLabel(0))]);
        assert_eq!(
            store.spans(2).collect::<Vec<_>>(),
            vec![(Span::new(0, 1), TypeLabel(1)), (Span::new(2, 3), TypeLabel(2))]
        );
        assert_eq!(stats.pairs_processed, 3);
        assert_eq!(stats.hypotheses_stored, 6);
        assert_eq!(stats.type_merges, 0);
        assert_eq!(stats.incr_discards, 0);
    }

    #[test]
    fn landing_on_two_typed_spans_merges_their_classes() {
        let mut store = HypothesisStore::new(2);
        let mut reg = TypeRegistry::new();
        let a = reg.fresh();
        let b = reg.fresh();
        store.insert(0, Span::new(0, 2), a);
        store.insert(1, Span::new(1, 3), b);
        let mut stats = LearnStats::default();
        attach_hypotheses(
            &mut store,
            &mut reg,
            0,
            1,
            &[(Span::new(0, 2), Span::new(1, 3))],
            LearnMode::All,
            &mut stats,
        )
        .unwrap();
        assert!(reg.same(a, b).unwrap());
        assert_eq!(stats.type_merges, 1);
        assert_eq!(stats.hypotheses_stored, 0);
    }

    #[test]
    fn one_typed_side_extends_its_class_to_the_other() {
        let mut store = HypothesisStore::new(2);
        let mut reg = TypeRegistry::new();
        let a = reg.fresh();
        let b = reg.fresh();
        reg.merge(a, b).unwrap();
        store.insert(0, Span::new(0, 2), b);
        let mut stats = LearnStats::default();
        attach_hypotheses(
            &mut store,
            &mut reg,
            0,
            1,
            &[(Span::new(0, 2), Span::new(2, 4))],
            LearnMode::All,
            &mut stats,
        )
        .unwrap();
        // The new side receives the canonical representative, not the raw
        // stored label.
        assert_eq!(store.get(1, Span::new(2, 4)), Some(a));
        assert_eq!(stats.hypotheses_stored, 1);
        assert_eq!(stats.type_merges, 0);
    }

    #[test]
    fn incr_mode_discards_new_crossing_hypotheses() {
        let mut store = HypothesisStore::new(2);
        let mut reg = TypeRegistry::new();
        let a = reg.fresh();
        store.insert(0, Span::new(0, 2), a);
        let mut stats = LearnStats::default();
        // Side one crosses the stored [0,2); side two is clean.
        let pairs = [(Span::new(1, 3), Span::new(0, 1))];
        attach_hypotheses(&mut store, &mut reg, 0, 1, &pairs, LearnMode::Incr, &mut stats)
            .unwrap();
        assert_eq!(store.get(0, Span::new(1, 3)), None);
        assert!(store.get(1, Span::new(0, 1)).is_some());
        assert_eq!(stats.incr_discards, 1);
        assert_eq!(stats.hypotheses_stored, 1);

        // Under LearnMode::All the same pair stores both sides.
        let mut store = HypothesisStore::new(2);
        store.insert(0, Span::new(0, 2), reg.fresh());
        let mut stats = LearnStats::default();
        attach_hypotheses(&mut store, &mut reg, 0, 1, &pairs, LearnMode::All, &mut stats)
            .unwrap();
        assert!(store.get(0, Span::new(1, 3)).is_some());
        assert_eq!(stats.incr_discards, 0);
        assert_eq!(stats.hypotheses_stored, 2);
    }

    #[test]
    fn discarding_every_side_mints_no_label() {
        let mut store = HypothesisStore::new(2);
        let mut reg = TypeRegistry::new();
        let a = reg.fresh();
        store.insert(0, Span::new(0, 2), a);
        store.insert(1, Span::new(0, 2), a);
        let mut stats = LearnStats::default();
        let pairs = [(Span::new(1, 3), Span::new(1, 3))];
        attach_hypotheses(&mut store, &mut reg, 0, 1, &pairs, LearnMode::Incr, &mut stats)
            .unwrap();
        assert_eq!(reg.len(), 1);
        assert_eq!(stats.incr_discards, 2);
        assert_eq!(stats.hypotheses_stored, 0);
    }

    #[test]
    fn canonicalize_rewrites_stored_labels_to_roots() {
        let corpus = corpus(&["u v w x", "u v y x", "z v w q"]);
        let (store, mut reg, _) = alignment_learning(&corpus, &LearnConfig::default()).unwrap();
        for (_, _, label) in store.iter_all() {
            assert_eq!(reg.canonical(label).unwrap(), label);
        }
    }
}
