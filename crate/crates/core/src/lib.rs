//! Model enumeration for DNF formulas.
//!
//! The crate provides several enumerators for the satisfying assignments of
//! a DNF, each exposed through the resumable [`ModelEnumerator`] interface
//! and instrumented with a deterministic step counter so that the delay
//! between consecutive outputs can be measured:
//!
//! | module | enumerator | delay |
//! |---|---|---|
//! | [`graycode`] | models of a single term | constant |
//! | [`classic`] | priority union, ordered merge, counter flashlight | `O(m‖D‖)`, `O(mn)`, `O(‖D‖)` |
//! | [`kdnf`] | budgeted cofactor interleaving for k-DNF | `2^O(k)` |
//! | [`avg`] | trie-maintained flashlight | average `O(n m^(1-log₃2))` |
//! | [`monotone`] | reverse search, trie flashlight, complement tries | `O(n²)`, average `O(n)`, average `O(log(nm))` |
//! | [`setunion`] | distinct unions of a set family | average linear |
//!
//! Runnable examples live in `examples/`; `cargo run --example <name>`.

pub mod avg;
pub mod classic;
pub mod cli;
pub mod dnf;
pub mod format;
pub mod generate;
pub mod graycode;
pub mod kdnf;
pub mod monotone;
pub mod setunion;
pub mod stats;
pub mod term_trie;
pub mod trie;

pub use dnf::{brute_force_models, Assignment, Dnf, Lit, PartialAssignment, Term};
pub use format::{parse_dnf, parse_sets};
pub use stats::{drive, DelayStats, ModelEnumerator, StepCounter};
