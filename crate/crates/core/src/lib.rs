//! Grammar induction from raw text by sentence-pair alignment.
//!
//! The toolkit learns labelled constituent structure for a plain corpus in
//! two phases. First, every pair of sentences is aligned: the parts two
//! sentences do not share are recorded as constituent hypotheses of a common
//! type ([`align`], [`learn`]). Second, each sentence's hypotheses are
//! reduced to the most probable maximal non-crossing subset ([`select`]).
//! The result can be serialized as span tables or inline brackets ([`io`])
//! and scored against a gold treebank ([`metrics`]).
//!
//! A minimal end-to-end run:
//!
//! ```
//! use aligram_core::{
//!     alignment_learning, apply_selection, LearnConfig, Scorer, ScorerKind,
//! };
//!
//! let corpus = aligram_core::io::read_plain(std::io::Cursor::new(
//!     "take the red block please\ntake the blue pyramid please\n",
//! ))?;
//! let (store, _registry, _stats) = alignment_learning(&corpus, &LearnConfig::default())?;
//! let scorer = Scorer::freeze(ScorerKind::Leaf, &store, &corpus)?;
//! let parsed = apply_selection(&store, &scorer, &corpus, 0)?;
//! assert_eq!(parsed.sentence_count(), 2);
//! # Ok::<(), aligram_core::Error>(())
//! ```

pub mod align;
pub mod corpus;
pub mod error;
pub mod io;
pub mod learn;
pub mod metrics;
pub mod select;

pub use align::{align, edit_cost, group, hypothesize, AlignmentResult, CostConfig, Link};
pub use corpus::{
    crosses, strip_structure, Constituent, Corpus, GoldSentence, GoldSpan, Sentence, Span, Token,
    TreeCorpus, TypeLabel,
};
pub use error::{Error, Result};
pub use learn::{
    alignment_learning, attach_hypotheses, HypothesisStore, LearnConfig, LearnMode, LearnStats,
    TypeRegistry,
};
pub use metrics::{evaluate, left_branching_store, right_branching_store, EvalReport};
pub use select::{
    apply_selection, brute_force_select, geometric_mean, select_best, Scorer, ScorerKind,
};
