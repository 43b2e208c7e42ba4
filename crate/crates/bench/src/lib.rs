//! Benchmark helpers: deterministic synthetic corpora shared by the
//! criterion benchmarks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use aligram_core::{Corpus, Sentence};

/// Build a corpus of `sentences` synthetic sentences drawn from a small
/// frame-and-filler vocabulary, deterministically from `seed`.
pub fn synthetic_corpus(sentences: usize, seed: u64) -> Corpus {
    let frames: &[&[&str]] = &[
        &["show", "me", "*", "flights", "from", "*", "to", "*"],
        &["what", "is", "the", "*", "fare", "to", "*"],
        &["list", "*", "flights", "arriving", "in", "*"],
        &["does", "the", "*", "flight", "serve", "*"],
    ];
    let fillers: &[&[&str]] = &[
        &["morning"],
        &["evening"],
        &["cheapest"],
        &["earliest"],
        &["Boston"],
        &["Dallas"],
        &["San Francisco"],
        &["a", "late", "dinner"],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(sentences);
    for id in 0..sentences {
        let frame = frames[rng.gen_range(0..frames.len())];
        let mut tokens = Vec::new();
        for &slot in frame {
            if slot == "*" {
                let filler = fillers[rng.gen_range(0..fillers.len())];
                for &word in filler {
                    for piece in word.split_whitespace() {
                        tokens.push(piece.to_string());
                    }
                }
            } else {
                tokens.push(slot.to_string());
            }
        }
        out.push(Sentence { id, tokens });
    }
    Corpus { sentences: out }
}
