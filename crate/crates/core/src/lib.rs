//! Spin models from formally self-dual distance-regular graphs of q-Racah type.
//!
//! The pipeline runs graph certification, spectral decomposition, q-Racah fitting,
//! the central element `Z`, the Boltzmann pair `(W, W*)` and the counting formulas,
//! and collects every residual into a [`VerificationReport`].

pub mod central;
pub mod check;
pub mod combin;
pub mod dual;
pub mod error;
pub mod formulas;
pub mod graph;
pub mod harness;
pub mod linalg;
pub mod qracah;
pub mod report;
pub mod scan;
pub mod spectral;
pub mod spin;

pub use central::{CentralElement, ZEigen};
pub use check::{Check, CheckSet, Expect, Status};
pub use combin::{verify_counts, CountStats};
pub use dual::{dual_structure, DualStructure};
pub use error::{Error, RegularityWitness, Result};
pub use harness::{evaluate_sample, identity_harness, HarnessReport};
pub use graph::{analyze_drg, cycle_graph, hypercube_graph, load_graph, parse_graph, DRGraph, GraphSummary};
pub use linalg::{CMat, RMat, C64};
pub use qracah::{fit_qracah, scalar_tables, tables_at, AppendixScalars, QRacahParams};
pub use report::{analyze, analyze_input, AnalyzeOptions, ErrorRecord, Verdict, VerificationReport};
pub use scan::{evaluate_candidate, scan, CandidateReport, FamilyTag, FeasibilityCandidate, GridSpec};
pub use spectral::{
    check_self_dual, eigendecompose, find_qpoly_orderings, krein_and_eigenmatrices, spectral_data, QPolyOrdering,
    SpectralData, SpectralSummary,
};
pub use spin::{boltzmann_pair, BoltzmannPair, FMode, SpinVerdict};
