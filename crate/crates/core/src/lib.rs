//! F-moves on uni/trivalent graphs and the reduction of graph automorphisms
//! to elementary switches.
//!
//! Graphs are dart based ([`Graph`]); automorphisms are dart permutations
//! ([`Automorphism`]). The [`fmove`] module applies (simultaneous) tree
//! replacements and transports automorphisms across them, [`oracle`] explores
//! the generated equivalence by brute force, and [`decompose`] builds
//! checkable [`Certificate`]s expressing an automorphism through switches,
//! compositions and transports.

pub mod automorphism;
pub mod canon;
pub mod certificate;
pub mod decompose;
pub mod enumerate;
pub mod error;
pub mod fmove;
pub mod graph;
pub mod oracle;
pub mod paths;
pub mod samples;
pub mod text;

pub use automorphism::{
    automorphism_group, make_switch, orbit_report, primary_decomposition, switch_darts, Automorphism,
    CyclicFactorization, OrbitReport, SwitchKind,
};
pub use canon::{canonical_form, CanonicalCode};
pub use certificate::{format_certificate, parse_certificate, verify_certificate, Certificate, CertificateStats, Node};
pub use decompose::{
    decompose, decompose_with_report, factor_into_involutions, normalize_cycle, normalize_step, reduce_edge_orders,
    reduce_order2, CycleKind, CycleStructure, Reduction, SigmaTier,
};
pub use enumerate::{enumerate_iso_classes, enumerate_iso_classes_capped, DEFAULT_EDGE_CAP};
pub use error::{
    AutError, CertificateError, DecomposeError, GraphError, MoveError, NotInvariant, OracleError, ParseError,
};
pub use fmove::{
    apply_edge_fmove, apply_fmove, edge_fmove, enumerate_invariant_fmoves, transport, Coupling, CouplingTree,
    EdgeCorrespondence, FMoveSpec, Replacement, Subtree,
};
pub use graph::{is_admissible, Dart, EdgeId, EdgeKind, Graph, ValidationReport, VertexId, Violation};
pub use oracle::{closure_e, f_equivalent, move_graph_components, state_key, ClosureReport, Equivalence, StateKey};
