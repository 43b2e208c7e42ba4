//! Sentence-pair alignment.
//!
//! Aligning two sentences yields *links*: order-preserving pairings of equal
//! tokens. Links partition both sentences into identical blocks (maximal runs
//! of consecutive links) and distinct pairs (the gaps in between), and the
//! distinct pairs are what the learner later stores as constituent
//! hypotheses.
//!
//! Equal tokens may occur at several positions, so the link set is ambiguous.
//! `align` scores a candidate link set by the cost of rewriting everything
//! that remains unlinked (substitutions where both sides have material left,
//! insertions or deletions for the length difference) plus a positional bias
//! of `match_bias_weight * |i - j|` per link, and returns a minimum-cost set.
//! The bias prefers links between tokens at similar positions; with a zero
//! weight the alignment degenerates to a longest-common-subsequence match.

use crate::corpus::{Span, Token};

/// Cost model for alignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostConfig {
    pub insert_cost: f64,
    pub delete_cost: f64,
    pub substitute_cost: f64,
    /// Linking equal tokens at positions `(i, j)` costs
    /// `match_bias_weight * |i - j|`.
    pub match_bias_weight: f64,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            insert_cost: 1.0,
            delete_cost: 1.0,
            substitute_cost: 1.0,
            match_bias_weight: 0.5,
        }
    }
}

impl CostConfig {
    /// Cost saved by linking one more token pair instead of leaving both
    /// tokens unmatched: a link removes either one substitution or one
    /// insertion-deletion pair from the cheapest rewrite of the remainder.
    fn link_gain(&self) -> f64 {
        self.substitute_cost.min(self.insert_cost + self.delete_cost)
    }

    fn link_reward(&self, i: usize, j: usize) -> f64 {
        self.link_gain() - self.match_bias_weight * (i as f64 - j as f64).abs()
    }
}

/// One link: `s1[s1_pos] == s2[s2_pos]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub s1_pos: usize,
    pub s2_pos: usize,
}

/// Links plus the block/gap structure they induce. Blocks and distinct pairs
/// alternate and jointly tile both sentences; a distinct pair may have one
/// empty side but never two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentResult {
    pub links: Vec<Link>,
    pub identical_blocks: Vec<(Span, Span)>,
    pub distinct_pairs: Vec<(Span, Span)>,
}

/// Compute a minimum-cost link set between two sentences.
///
/// The search space is every order-preserving set of equal-token links. Ties
/// are resolved during backtracking in a fixed order: take a link, else
/// advance in `s1`, else advance in `s2`, which makes the result
/// deterministic.
pub fn align(s1: &[Token], s2: &[Token], cost: &CostConfig) -> Vec<Link> {
    let n = s1.len();
    let m = s2.len();
    // r[i][j]: best total link reward over the prefixes s1[..i], s2[..j].
    // Maximizing reward is equivalent to minimizing rewrite cost plus bias,
    // because every link replaces one unit of unmatched-token cost.
    let mut r = vec![vec![0f64; m + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=m {
            let mut best = r[i - 1][j].max(r[i][j - 1]);
            if s1[i - 1] == s2[j - 1] {
                best = best.max(r[i - 1][j - 1] + cost.link_reward(i - 1, j - 1));
            }
            r[i][j] = best;
        }
    }
    let mut links = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && s1[i - 1] == s2[j - 1] {
            let with_link = r[i - 1][j - 1] + cost.link_reward(i - 1, j - 1);
            if r[i][j] == with_link {
                links.push(Link { s1_pos: i - 1, s2_pos: j - 1 });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && r[i][j] == r[i - 1][j] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    links.reverse();
    links
}

/// Minimum edit-script cost between two sentences: insertions, deletions and
/// substitutions at their configured costs, with equal tokens matched on the
/// diagonal at the positional bias `match_bias_weight * |i - j|`. With a zero
/// bias and unit costs this is the classic edit distance with substitution.
pub fn edit_cost(s1: &[Token], s2: &[Token], cost: &CostConfig) -> f64 {
    let n = s1.len();
    let m = s2.len();
    let mut prev: Vec<f64> = (0..=m).map(|j| j as f64 * cost.insert_cost).collect();
    let mut cur = vec![0f64; m + 1];
    for i in 1..=n {
        cur[0] = i as f64 * cost.delete_cost;
        for j in 1..=m {
            let diag = if s1[i - 1] == s2[j - 1] {
                cost.match_bias_weight * (i as f64 - j as f64).abs()
            } else {
                cost.substitute_cost
            };
            cur[j] = (prev[j] + cost.delete_cost)
                .min(cur[j - 1] + cost.insert_cost)
                .min(prev[j - 1] + diag);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Partition both sentences into identical blocks and distinct pairs induced
/// by a link set. Links must be strictly increasing in both positions and
/// connect equal tokens.
pub fn group(s1: &[Token], s2: &[Token], links: &[Link]) -> AlignmentResult {
    debug_assert!(links
        .windows(2)
        .all(|w| w[0].s1_pos < w[1].s1_pos && w[0].s2_pos < w[1].s2_pos));
    debug_assert!(links.iter().all(|l| s1[l.s1_pos] == s2[l.s2_pos]));

    let mut blocks = Vec::new();
    let mut pairs = Vec::new();
    let (mut done1, mut done2) = (0usize, 0usize);
    let mut k = 0;
    while k < links.len() {
        let start = k;
        while k + 1 < links.len()
            && links[k + 1].s1_pos == links[k].s1_pos + 1
            && links[k + 1].s2_pos == links[k].s2_pos + 1
        {
            k += 1;
        }
        let (b1, b2) = (links[start].s1_pos, links[start].s2_pos);
        let (e1, e2) = (links[k].s1_pos + 1, links[k].s2_pos + 1);
        push_gap(&mut pairs, done1, b1, done2, b2);
        blocks.push((Span::new(b1, e1), Span::new(b2, e2)));
        done1 = e1;
        done2 = e2;
        k += 1;
    }
    push_gap(&mut pairs, done1, s1.len(), done2, s2.len());
    AlignmentResult { links: links.to_vec(), identical_blocks: blocks, distinct_pairs: pairs }
}

/// A gap with both sides empty is not a distinct pair.
fn push_gap(pairs: &mut Vec<(Span, Span)>, b1: usize, e1: usize, b2: usize, e2: usize) {
    if b1 < e1 || b2 < e2 {
        pairs.push((Span::new(b1, e1), Span::new(b2, e2)));
    }
}

/// Align two sentences and return their distinct pairs. An empty link set
/// yields nothing: without at least one shared anchor the sentences provide
/// no evidence for constituents.
pub fn hypothesize(s1: &[Token], s2: &[Token], cost: &CostConfig) -> Vec<(Span, Span)> {
    let links = align(s1, s2, cost);
    if links.is_empty() {
        return Vec::new();
    }
    group(s1, s2, &links).distinct_pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Token> {
        s.split_whitespace().map(String::from).collect()
    }

    fn link_positions(links: &[Link]) -> Vec<(usize, usize)> {
        links.iter().map(|l| (l.s1_pos, l.s2_pos)).collect()
    }

    #[test]
    fn shared_prefix_links_only_the_prefix() {
        let s1 = toks("What is a family fare");
        let s2 = toks("What is the payload of an African Swallow");
        let links = align(&s1, &s2, &CostConfig::default());
        assert_eq!(link_positions(&links), vec![(0, 0), (1, 1)]);
        let result = group(&s1, &s2, &links);
        assert_eq!(result.identical_blocks, vec![(Span::new(0, 2), Span::new(0, 2))]);
        assert_eq!(result.distinct_pairs, vec![(Span::new(2, 5), Span::new(2, 8))]);
    }

    #[test]
    fn positional_bias_prefers_nearby_links() {
        let s1 = toks("from San Francisco to Dallas");
        let s2 = toks("from Dallas to San Francisco");
        // Default bias: linking "from" and "to" costs less than dragging
        // "San Francisco" across the sentence.
        let links = align(&s1, &s2, &CostConfig::default());
        assert_eq!(link_positions(&links), vec![(0, 0), (3, 2)]);
        // Without the bias the alignment keeps the longest common
        // subsequence "from San Francisco".
        let unbiased = CostConfig { match_bias_weight: 0.0, ..CostConfig::default() };
        let links = align(&s1, &s2, &unbiased);
        assert_eq!(link_positions(&links), vec![(0, 0), (1, 3), (2, 4)]);
    }

    #[test]
    fn distinct_pairs_may_have_one_empty_side() {
        let s1 = toks("from San Francisco to Dallas");
        let s2 = toks("from Dallas to San Francisco");
        let links = vec![
            Link { s1_pos: 0, s2_pos: 0 },
            Link { s1_pos: 1, s2_pos: 3 },
            Link { s1_pos: 2, s2_pos: 4 },
        ];
        let result = group(&s1, &s2, &links);
        assert_eq!(
            result.distinct_pairs,
            vec![
                (Span::new(1, 1), Span::new(1, 3)),
                (Span::new(3, 5), Span::new(5, 5)),
            ]
        );
        assert!(result
            .distinct_pairs
            .iter()
            .all(|(a, b)| !(a.is_empty() && b.is_empty())));
    }

    #[test]
    fn identical_sentences_link_everywhere_at_no_cost() {
        let s = toks("the same sentence twice");
        let links = align(&s, &s, &CostConfig::default());
        assert_eq!(link_positions(&links), vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        assert_eq!(edit_cost(&s, &s, &CostConfig::default()), 0.0);
        let result = group(&s, &s, &links);
        assert_eq!(result.identical_blocks.len(), 1);
        assert!(result.distinct_pairs.is_empty());
    }

    #[test]
    fn disjoint_sentences_produce_nothing() {
        let s1 = toks("a b");
        let s2 = toks("c d");
        assert!(align(&s1, &s2, &CostConfig::default()).is_empty());
        assert!(hypothesize(&s1, &s2, &CostConfig::default()).is_empty());
    }

    #[test]
    fn edit_cost_matches_classic_distance_with_zero_bias() {
        let cfg = CostConfig { match_bias_weight: 0.0, ..CostConfig::default() };
        assert_eq!(edit_cost(&toks("a b c"), &toks("a x c"), &cfg), 1.0);
        assert_eq!(edit_cost(&toks("a b"), &[], &cfg), 2.0);
        assert_eq!(edit_cost(&[], &toks("x y z"), &cfg), 3.0);
    }

    #[test]
    fn hypothesize_on_shared_prefix_pair() {
        let s1 = toks("What is a family fare");
        let s2 = toks("What is the payload of an African Swallow");
        let pairs = hypothesize(&s1, &s2, &CostConfig::default());
        assert_eq!(pairs, vec![(Span::new(2, 5), Span::new(2, 8))]);
    }
}
