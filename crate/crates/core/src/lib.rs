//! Normalization of Hindi-English code-switched social-media text.
//!
//! Each whitespace token is tagged as English, Devanagari Hindi, Roman
//! Hindi or out-of-vocabulary. Out-of-vocabulary Roman words are moved onto
//! the nearest knowledge-base spelling by Levenshtein similarity, and Roman
//! Hindi is then replaced word by word with its Devanagari form while
//! English is left as written. Spelling variants of the same Hindi word
//! thereby collapse to one token, which the surface-feature classifiers in
//! [`features`] and [`classify`] can measure.
//!
//! ```
//! use moh::kb::KnowledgeBase;
//! use moh::rescue::{best_match, RescueConfig};
//!
//! let kb = KnowledgeBase::from_pairs([("namaste", "नमस्ते")]).unwrap();
//! let hit = best_match("namastey", &kb, &RescueConfig::default()).unwrap();
//! assert_eq!(hit.devanagari, "नमस्ते");
//! assert_eq!(hit.similarity, 0.875);
//! ```

pub mod classify;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod features;
pub mod kb;
pub mod langid;
pub mod levenshtein;
pub mod lexicon;
pub mod metrics;
pub mod pipeline;
pub mod rescue;
pub mod script;
pub mod translit;

pub use error::{Error, Result};
