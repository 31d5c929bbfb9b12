//! Exact computational algebra for Chevalley groups over commutative rings.
//!
//! The crate builds the full pipeline from root-system combinatorics to
//! group-level computations:
//!
//! * [`ring`] — finite commutative rings with canonical element forms,
//!   fraction rings, localizations, quotient extensions, idempotents;
//! * [`rootsys`] — root systems of types A–G with integer coordinate
//!   realizations, pairings, reflections;
//! * [`chevbasis`] — integral structure constants, adjoint action, Killing form;
//! * [`reps`] — integral representations, weight diagrams, divided powers;
//! * [`groupcore`] — elementary generators, torus elements, relation checking,
//!   group closure over finite rings;
//! * [`autos`] — standard automorphisms and the decomposition engine;
//! * [`genalg`] — matrix-algebra closure, path certificates, normalization checks.
//!
//! Everything is exact: no floating point anywhere, all arithmetic is over
//! the ring at hand or over the integers.

pub mod autos;
pub mod chevbasis;
pub mod genalg;
pub mod groupcore;
pub mod linalg;
pub mod mat;
pub mod reps;
pub mod ring;
pub mod rootsys;
pub mod weights;

pub use autos::{
    decompose, diagram_symmetries, graph_candidates, presentation_of_tuple, random_standard_tuple,
    AutomorphismPresentation, DecomposeOptions, DecompositionOutcome, DecompositionResult,
    GraphFactor, GraphSymmetry, StandardTuple,
};
pub use chevbasis::ChevalleyBasis;
pub use genalg::{
    AlgebraClosure, ClosureVerdict, MatrixUnit, PathCertificate, RecoveryMode,
};
pub use groupcore::{
    ChevalleyGroup, ClosureOutcome, CommutatorTerm, GroupElement, Membership, RelationReport,
    SamplePolicy, SubgroupKind, TorusCharacter,
};
pub use mat::Mat;
pub use reps::{Representation, WeightDiagram};
pub use ring::{Elem, Ring};
pub use rootsys::{Family, RootSystem};
pub use weights::{LatticeKind, WeightLattice};

/// Crate-wide error type. Variants group errors by the subsystem that
/// detected them; the payload is a human-readable description that also
/// lands in CLI reports.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("ring error: {0}")]
    Ring(String),
    #[error("root system error: {0}")]
    RootSystem(String),
    #[error("basis construction error: {0}")]
    Basis(String),
    #[error("representation error: {0}")]
    Rep(String),
    #[error("group error: {0}")]
    Group(String),
    #[error("automorphism error: {0}")]
    Auto(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("linear algebra error: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, Error>;
