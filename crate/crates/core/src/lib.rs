//! Finite-instance toolkit for the Adjacent Hindman's Theorem (AHT) and its
//! neighbours: Ramsey's theorem for pairs (RT²), the increasing polarized
//! Ramsey theorem for pairs (IPT²) and Hilbert's theorem (HIL).
//!
//! * [`bits`]: `lam`/`mu`, apartness and adjacent sums.
//! * [`expr`], [`coloring`]: colorings, the expression DSL and file formats.
//! * [`solvers`]: exhaustive lexicographically-least witness search.
//! * [`reductions`]: the constructive reductions RT² ⇒ AHT ⇒ IPT² and the
//!   word-coloring pipeline.
//! * [`certificate`]: independent verifiers and the certificate text format.

pub mod bits;
pub mod certificate;
pub mod coloring;
pub mod expr;
pub mod reductions;
pub mod solvers;

pub use certificate::{read_certificate, verify_certificate, write_certificate, Certificate, Verdict};
pub use reductions::{
    chain_rt2_to_ipt2, reduce_aht_to_ipt2, reduce_rt2_to_aht, word_highest_letter, AhtSource, Outcome, PipelineOptions,
};
pub use bits::{adjacent_sums, all_adjacent_sums, is_apart, lam, mu, popcount, run_endpoints, ApartSet, BitBudget, PosInt, Run};
pub use coloring::{induced_pair_coloring, projected_point_coloring, word_block_coloring, Coloring, PairColoring, Word};
pub use expr::{parse_expr, Expr, VarSet};
pub use solvers::{solve_aht, solve_hil, solve_ipt2, solve_rt2, Search, SearchBudget};
