//! Probabilistic selection of a non-crossing constituent set per sentence.
//!
//! Learning with [`crate::learn::LearnMode::All`] stores every hypothesis,
//! including mutually crossing ones. Selection resolves each sentence to the
//! best *maximal* non-crossing subset: no further stored hypothesis could be
//! added without a crossing. Subsets are compared by the geometric mean of
//! their members' probabilities, and means tied within a small tolerance are
//! broken by a seeded uniform draw, so runs are reproducible.
//!
//! Probabilities come from a [`Scorer`] whose counts are frozen once over
//! the full hypothesis store before any selection happens.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{crosses, Corpus, Span, Token, TypeLabel};
use crate::error::{Error, Result};
use crate::learn::HypothesisStore;

/// Two log-space subset scores this close count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// Largest candidate count [`brute_force_select`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Which probability model scores a candidate constituent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScorerKind {
    /// Relative frequency of the candidate's token yield among all stored
    /// hypotheses.
    Leaf,
    /// Relative frequency of the candidate's yield among stored hypotheses
    /// of the same type.
    Branch,
}

/// Frozen occurrence counts for scoring candidates.
///
/// Counts are taken over every hypothesis in the store exactly once;
/// scoring afterwards never mutates them, so selection in one sentence
/// cannot influence probabilities in another.
#[derive(Debug, Clone)]
pub struct Scorer {
    kind: ScorerKind,
    total: usize,
    yield_counts: HashMap<Vec<Token>, usize>,
    label_counts: HashMap<TypeLabel, usize>,
    label_yield_counts: HashMap<TypeLabel, HashMap<Vec<Token>, usize>>,
}

impl Scorer {
    /// Count every stored hypothesis. Fails on an empty store, which admits
    /// no probability estimates.
    pub fn freeze(kind: ScorerKind, store: &HypothesisStore, corpus: &Corpus) -> Result<Scorer> {
        let mut scorer = Scorer {
            kind,
            total: 0,
            yield_counts: HashMap::new(),
            label_counts: HashMap::new(),
            label_yield_counts: HashMap::new(),
        };
        for (sentence, span, label) in store.iter_all() {
            let tokens = corpus.yield_of(sentence, span)?.to_vec();
            scorer.total += 1;
            *scorer.yield_counts.entry(tokens.clone()).or_insert(0) += 1;
            *scorer.label_counts.entry(label).or_insert(0) += 1;
            *scorer
                .label_yield_counts
                .entry(label)
                .or_default()
                .entry(tokens)
                .or_insert(0) += 1;
        }
        if scorer.total == 0 {
            return Err(Error::EmptyScorer);
        }
        Ok(scorer)
    }

    pub fn kind(&self) -> ScorerKind {
        self.kind
    }

    /// Probability of one candidate constituent. Yields or labels never
    /// counted during `freeze` score zero.
    pub fn probability(
        &self,
        corpus: &Corpus,
        sentence: usize,
        span: Span,
        label: TypeLabel,
    ) -> Result<f64> {
        let tokens = corpus.yield_of(sentence, span)?;
        let p = match self.kind {
            ScorerKind::Leaf => {
                *self.yield_counts.get(tokens).unwrap_or(&0) as f64 / self.total as f64
            }
            ScorerKind::Branch => {
                let label_total = *self.label_counts.get(&label).unwrap_or(&0);
                if label_total == 0 {
                    0.0
                } else {
                    let joint = self
                        .label_yield_counts
                        .get(&label)
                        .and_then(|m| m.get(tokens))
                        .copied()
                        .unwrap_or(0);
                    joint as f64 / label_total as f64
                }
            }
        };
        Ok(p)
    }
}

/// Geometric mean of a probability list, computed in log space. The empty
/// list yields the neutral 1.0.
pub fn geometric_mean(probs: &[f64]) -> f64 {
    if probs.is_empty() {
        return 1.0;
    }
    let log_sum: f64 = probs.iter().map(|p| p.ln()).sum();
    (log_sum / probs.len() as f64).exp()
}

/// Pick the best maximal non-crossing subset of `candidates` and return its
/// ascending indices.
///
/// All maximal subsets are enumerated; each is scored by the mean of its
/// members' log probabilities. Scores within [`TIE_TOLERANCE`] of the best
/// tie, and the winner among tied subsets is drawn uniformly with a
/// `seed`-keyed generator. Candidates crossing nothing appear in every
/// maximal subset and are always selected.
pub fn select_best(candidates: &[(Span, f64)], seed: u64) -> Vec<usize> {
    let n = candidates.len();
    if n == 0 {
        return Vec::new();
    }
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if crosses(candidates[i].0, candidates[j].0) {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|&v| adjacency[v].is_empty()).collect();
    let conflicted: Vec<usize> = (0..n).filter(|&v| !adjacency[v].is_empty()).collect();

    // Conflict graph restricted to conflicted vertices, with local indices.
    let local_of: HashMap<usize, usize> =
        conflicted.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let local_adj: Vec<Vec<usize>> = conflicted
        .iter()
        .map(|&v| adjacency[v].iter().map(|w| local_of[w]).collect())
        .collect();

    let mut picks: Vec<Vec<usize>> = Vec::new();
    let mut state = vec![VertexState::Undecided; conflicted.len()];
    enumerate_maximal(&local_adj, &mut state, 0, &mut picks);

    let log_p: Vec<f64> = candidates.iter().map(|c| c.1.ln()).collect();
    let scored: Vec<(Vec<usize>, f64)> = picks
        .into_iter()
        .map(|local| {
            let mut indices: Vec<usize> = local.into_iter().map(|k| conflicted[k]).collect();
            indices.extend_from_slice(&free);
            indices.sort_unstable();
            let mean = mean_log(&indices, &log_p);
            (indices, mean)
        })
        .collect();
    draw_winner(scored, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VertexState {
    Undecided,
    In,
    /// Excluded and adjacent to a selected vertex, so exclusion is justified.
    OutDominated,
    /// Excluded with no selected neighbour yet; a maximal set must still
    /// dominate it.
    OutPending,
}

/// Enumerate every maximal independent set of the conflict graph by
/// including or excluding one vertex at a time. Excluded vertices must end
/// up adjacent to an included one, otherwise the set could be extended and
/// is not maximal.
fn enumerate_maximal(
    adj: &[Vec<usize>],
    state: &mut [VertexState],
    from: usize,
    out: &mut Vec<Vec<usize>>,
) {
    let mut v = from;
    while v < state.len() && state[v] != VertexState::Undecided {
        v += 1;
    }
    if v == state.len() {
        if state.iter().all(|s| *s != VertexState::OutPending) {
            out.push(
                state
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| **s == VertexState::In)
                    .map(|(k, _)| k)
                    .collect(),
            );
        }
        return;
    }

    // Include v: neighbours are excluded and thereby dominated.
    let mut touched = vec![(v, state[v])];
    state[v] = VertexState::In;
    for &w in &adj[v] {
        if matches!(state[w], VertexState::Undecided | VertexState::OutPending) {
            touched.push((w, state[w]));
            state[w] = VertexState::OutDominated;
        }
    }
    enumerate_maximal(adj, state, v + 1, out);
    for &(w, prev) in touched.iter().rev() {
        state[w] = prev;
    }

    // Exclude v: only viable if some undecided neighbour can still dominate
    // it (an already-included neighbour would have excluded v above).
    if adj[v].iter().any(|&w| state[w] == VertexState::Undecided) {
        state[v] = VertexState::OutPending;
        enumerate_maximal(adj, state, v + 1, out);
        state[v] = VertexState::Undecided;
    }
}

/// Mean of log probabilities, summed in ascending index order so equal sets
/// always produce bit-identical scores.
fn mean_log(indices: &[usize], log_p: &[f64]) -> f64 {
    let sum: f64 = indices.iter().map(|&i| log_p[i]).sum();
    sum / indices.len() as f64
}

/// Shared tail of both selection routes: find the best mean, gather every
/// subset tied with it, order them canonically and draw one.
fn draw_winner(scored: Vec<(Vec<usize>, f64)>, seed: u64) -> Vec<usize> {
    let best = scored.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let mut tied: Vec<Vec<usize>> = scored
        .into_iter()
        .filter(|s| s.1 >= best - TIE_TOLERANCE)
        .map(|s| s.0)
        .collect();
    tied.sort_unstable();
    if tied.len() == 1 {
        return tied.pop().unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = rng.gen_range(0..tied.len());
    tied.swap_remove(pick)
}

/// Exhaustive reference implementation of [`select_best`]: test every subset
/// of the candidates for independence and maximality. Refuses more than
/// [`BRUTE_FORCE_LIMIT`] candidates.
pub fn brute_force_select(candidates: &[(Span, f64)], seed: u64) -> Result<Vec<usize>> {
    let n = candidates.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyHypotheses { max: BRUTE_FORCE_LIMIT, got: n });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut cross_mask = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && crosses(candidates[i].0, candidates[j].0) {
                cross_mask[i] |= 1 << j;
            }
        }
    }
    let log_p: Vec<f64> = candidates.iter().map(|c| c.1.ln()).collect();
    let mut scored = Vec::new();
    for mask in 0u32..(1 << n) {
        let independent = (0..n).all(|i| mask & (1 << i) == 0 || cross_mask[i] & mask == 0);
        if !independent {
            continue;
        }
        let maximal = (0..n).all(|i| mask & (1 << i) != 0 || cross_mask[i] & mask != 0);
        if !maximal {
            continue;
        }
        let indices: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let mean = mean_log(&indices, &log_p);
        scored.push((indices, mean));
    }
    Ok(draw_winner(scored, seed))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent per-sentence seed from the run seed.
fn sentence_seed(run_seed: u64, sentence: usize) -> u64 {
    splitmix64(run_seed ^ splitmix64(sentence as u64))
}

/// Run selection over every sentence of a store and return the reduced
/// store. Labels of surviving hypotheses are kept as stored.
pub fn apply_selection(
    store: &HypothesisStore,
    scorer: &Scorer,
    corpus: &Corpus,
    seed: u64,
) -> Result<HypothesisStore> {
    let mut out = HypothesisStore::new(store.sentence_count());
    for sentence in 0..store.sentence_count() {
        let candidates: Vec<(Span, TypeLabel)> = store.spans(sentence).collect();
        if candidates.is_empty() {
            continue;
        }
        let mut weighted = Vec::with_capacity(candidates.len());
        for &(span, label) in &candidates {
            weighted.push((span, scorer.probability(corpus, sentence, span, label)?));
        }
        let chosen = select_best(&weighted, sentence_seed(seed, sentence));
        let mut map = BTreeMap::new();
        for index in chosen {
            let (span, label) = candidates[index];
            map.insert(span, label);
        }
        out.replace_sentence(sentence, map);
    }
    Ok(out)
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
    fn geometric_mean_matches_closed_form() {
        assert!((geometric_mean(&[0.5, 0.125]) - 0.25).abs() < 1e-12);
        assert!((geometric_mean(&[0.3]) - 0.3).abs() < 1e-12);
        assert_eq!(geometric_mean(&[]), 1.0);
        assert_eq!(geometric_mean(&[0.4, 0.0]), 0.0);
    }

    #[test]
    fn selection_prefers_the_stronger_crossing_candidate() {
        let candidates = [
            (Span::new(0, 2), 0.8),
            (Span::new(1, 3), 0.2),
            (Span::new(3, 5), 0.5),
        ];
        // Maximal non-crossing subsets: {0,2} (gm ~0.632) and {1,2}
        // (gm ~0.316).
        for seed in [0, 1, 42, u64::MAX] {
            assert_eq!(select_best(&candidates, seed), vec![0, 2]);
            assert_eq!(brute_force_select(&candidates, seed).unwrap(), vec![0, 2]);
        }
    }

    #[test]
    fn non_crossing_candidates_are_all_kept() {
        let candidates = [
            (Span::new(0, 2), 0.01),
            (Span::new(2, 4), 0.02),
            (Span::new(0, 4), 0.03),
        ];
        assert_eq!(select_best(&candidates, 5), vec![0, 1, 2]);
        assert_eq!(brute_force_select(&candidates, 5).unwrap(), vec![0, 1, 2]);
        assert_eq!(select_best(&[], 5), Vec::<usize>::new());
    }

    #[test]
    fn tied_subsets_are_drawn_by_seed() {
        let candidates = [(Span::new(0, 2), 0.4), (Span::new(1, 3), 0.4)];
        let mut seen = std::collections::HashSet::new();
        for seed in 0..32 {
            let fast = select_best(&candidates, seed);
            let slow = brute_force_select(&candidates, seed).unwrap();
            assert_eq!(fast, slow);
            assert!(fast == vec![0] || fast == vec![1]);
            seen.insert(fast);
        }
        // Both tied subsets actually occur across seeds.
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn brute_force_refuses_oversized_inputs() {
        let candidates: Vec<(Span, f64)> =
            (0..21).map(|i| (Span::new(i, i + 2), 0.5)).collect();
        assert!(matches!(
            brute_force_select(&candidates, 0),
            Err(Error::TooManyHypotheses { max: 20, got: 21 })
        ));
    }

    #[test]
    fn leaf_and_branch_probabilities_are_relative_frequencies() {
        let corpus = corpus(&["a b", "c b", "a b"]);
        let mut store = HypothesisStore::new(3);
        store.insert(0, Span::new(0, 1), TypeLabel(0));
        store.insert(1, Span::new(0, 1), TypeLabel(0));
        store.insert(2, Span::new(0, 1), TypeLabel(1));
        store.insert(0, Span::new(1, 2), TypeLabel(1));

        let leaf = Scorer::freeze(ScorerKind::Leaf, &store, &corpus).unwrap();
        // Yield "a" occurs twice among four hypotheses.
        let p = leaf.probability(&corpus, 0, Span::new(0, 1), TypeLabel(0)).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let p = leaf.probability(&corpus, 1, Span::new(0, 1), TypeLabel(0)).unwrap();
        assert!((p - 0.25).abs() < 1e-12);

        let branch = Scorer::freeze(ScorerKind::Branch, &store, &corpus).unwrap();
        // Type 1 has two hypotheses, one of which yields "a".
        let p = branch.probability(&corpus, 2, Span::new(0, 1), TypeLabel(1)).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        // Type 0 yields "a" once and "c" once.
        let p = branch.probability(&corpus, 0, Span::new(0, 1), TypeLabel(0)).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        // Unseen combinations score zero.
        let p = branch.probability(&corpus, 1, Span::new(1, 2), TypeLabel(0)).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn freezing_an_empty_store_fails() {
        let corpus = corpus(&["a b"]);
        let store = HypothesisStore::new(1);
        assert!(matches!(
            Scorer::freeze(ScorerKind::Leaf, &store, &corpus),
            Err(Error::EmptyScorer)
        ));
    }

    #[test]
    fn apply_selection_outputs_maximal_non_crossing_sentences() {
        let corpus = corpus(&["a b c d", "a b c d"]);
        let mut store = HypothesisStore::new(2);
        store.insert(0, Span::new(0, 2), TypeLabel(0));
        store.insert(0, Span::new(1, 3), TypeLabel(1));
        store.insert(0, Span::new(3, 4), TypeLabel(2));
        store.insert(1, Span::new(0, 2), TypeLabel(0));
        let scorer = Scorer::freeze(ScorerKind::Leaf, &store, &corpus).unwrap();
        let selected = apply_selection(&store, &scorer, &corpus, 11).unwrap();

        // Same seed, same outcome.
        let again = apply_selection(&store, &scorer, &corpus, 11).unwrap();
        assert_eq!(selected, again);

        for sentence in 0..2 {
            let spans: Vec<(Span, TypeLabel)> = selected.spans(sentence).collect();
            for (i, &(a, _)) in spans.iter().enumerate() {
                for &(b, _) in &spans[i + 1..] {
                    assert!(!crosses(a, b));
                }
            }
        }
        // The untangled sentence keeps its only hypothesis with its label.
        assert_eq!(selected.get(1, Span::new(0, 2)), Some(TypeLabel(0)));
        // "a b" yields twice, "b c" once: the stronger candidate wins and
        // the free vertex is always kept.
        assert_eq!(selected.get(0, Span::new(0, 2)), Some(TypeLabel(0)));
        assert_eq!(selected.get(0, Span::new(3, 4)), Some(TypeLabel(2)));
        assert_eq!(selected.get(0, Span::new(1, 3)), None);
    }
}
