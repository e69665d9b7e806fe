//! Random recursive trees and the ways to cut them down.
//!
//! * [`tree`]: uniform random recursive trees, degree tails `Z_{>=d}`,
//!   exhaustive enumeration of increasing trees.
//! * [`cutting`]: targeted (highest degree first) vertex cutting, uniform
//!   edge cutting and the record count.
//! * [`coupling`]: an unconditioned tree paired with one whose root degree is
//!   conditioned into `(1 +- eps) ln n`.
//! * [`stats`]: moment, total variation and growth-exponent estimators, and
//!   the exact root degree law.
//! * [`oracle`]: exact small-`n` laws by enumeration.
//! * [`replicate`]: deterministic replicate scheduling over [`RngStream`]s.

pub mod coupling;
pub mod cutting;
pub mod error;
pub mod oracle;
pub mod replicate;
pub mod rng;
pub mod stats;
pub mod tree;

pub use coupling::{build_coupled_pair, coupling_diagnostics, CoupledSample, WdDiagnostic};
pub use cutting::{record_count, targeted_cut, uniform_edge_cut, y_statistic, CutPolicy, CutResult};
pub use error::{Error, Result};
pub use replicate::MonteCarlo;
pub use rng::{Lane, RngStream};
pub use tree::{enumerate_increasing_trees, RecursiveTree, TailCounts};
