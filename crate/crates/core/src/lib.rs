//! Riemann-Roch divisor theory on finite multigraphs, computed through the
//! generalized cycle-cocycle reversal system for partial orientations.
//!
//! The crate provides:
//!
//! - multigraphs, divisors, firing, and the chi / chi-bar functionals
//!   ([`graph`], [`divisor`]);
//! - the burning algorithm, q-reduced normal forms, linear equivalence, and
//!   the Baker-Norine rank with replayable certificates ([`reduce`],
//!   [`rank`]);
//! - partial orientations and the local moves of the reversal system
//!   ([`orientation`]);
//! - the orientation algorithms: oriented burning, unfurling, construction
//!   of partial orientations, q-connected normalization, and rank via
//!   directed path reversals ([`engine`]);
//! - an integer max-flow engine and its divisor-theoretic applications:
//!   orientability, break divisors, the torsor action, and the max-flow /
//!   min-cut cross-certification ([`flow`]);
//! - brute-force ground truth on tiny instances ([`oracle`]) and the named
//!   verification suites ([`suites`]).
//!
//! Everything is deterministic: ties are broken by lexicographic vertex
//! name, then edge index. With the default `parallel` feature the large
//! enumeration sweeps run on rayon; disabling it falls back to the identical
//! sequential scans.

pub mod caps;
pub mod divisor;
pub mod engine;
pub mod error;
pub mod flow;
pub mod graph;
pub mod oracle;
pub mod orientation;
pub mod rank;
pub mod reduce;
pub mod suites;

pub use caps::Caps;
pub use divisor::{chi_global, chi_report, fire, ChiGlobal, Divisor, SubsetReport};
pub use engine::{construct_orientation, Budget, equivalent, modified_unfurl, oriented_dhar, rank_via_path_reversals, to_q_connected, unfurl, Construction, DichotomyResult, Outcome};
pub use error::{Error, Result};
pub use flow::{break_divisor, is_orientable, is_partially_orientable, max_flow, mfmc_via_orientability, orient_via_flow, torsor_act, FlowNetwork, IntegerFlow, MfmcReport};
pub use graph::{EdgeId, Multigraph, VertexId};
pub use orientation::{apply_move, classify, indegree_divisor, is_q_connected, reachable, replay, EdgeState, Move, MoveCertificate, OrientationFlags, PartialOrientation};
pub use rank::{rank, rr_verify, RankCertificate, RrReport};
pub use reduce::{is_q_reduced, linearly_equivalent, reduce, ReducedForm};
pub use suites::SuiteReport;
