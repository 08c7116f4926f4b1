//! Local symmetries and local transformations of translation-invariant
//! matrix product states.
//!
//! An MPS `Ψ_N(A)` is described by a rank-3 tensor `A` ([`Rank3Tensor`]).
//! Local maps `g₁ ⊗ … ⊗ g_N` between two such states are found as closed
//! walks in a graph of triples `(g, x, y)` acting on the fiducial state
//! ([`CycleCertificate`]); every answer can be checked on dense vectors by
//! the [`oracle`].

pub mod catalog;
pub mod cycles;
pub mod error;
pub mod ghz;
pub mod io;
pub mod linalg;
pub mod mps;
pub mod oracle;
pub mod slocc;
pub mod symmetries;
pub mod transforms;

pub use catalog::{get_tensor, Family, FamilySpec};
pub use cycles::{enumerate_cycles, ConcatMode, CycleCertificate, TripleOperator};
pub use error::{Error, Result};
pub use linalg::{c64, CMatrix, C64};
pub use mps::{build_state, DenseState, NormalityReport, Rank3Tensor, ScalarMode};
pub use oracle::{verify_claim, Claim, ClaimKind, VerificationReport};
pub use slocc::{classify, ExtendedComplex, SloccClass, SloccKind, SymmetryOrder};
pub use symmetries::{family_symmetries, Parametrized, SymmetrySolution};
pub use transforms::{decide_transform, TransformPlan};
