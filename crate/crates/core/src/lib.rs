//! Disjunctive hierarchical secret sharing over prime fields.
//!
//! * [`field`]: exact `F_p` arithmetic, interpolation and a parametric
//!   linear solver.
//! * [`lhr`]: linear homogeneous recurrences with a single repeated root.
//! * [`oneway`]: the public hash family `h_1..h_m`.
//! * [`scheme`]: access structures, the dealer and the combiner.
//! * [`oracle`]: exhaustive perfectness checks for unauthorized views.
//! * [`gpn`]: the two-level GPN scheme and the linear-algebra attack on it.
//! * [`io`]: JSON bulletin and share files.

pub mod field;
pub mod gpn;
pub mod io;
pub mod lhr;
pub mod oneway;
pub mod oracle;
pub mod scheme;

pub use field::{FieldCtx, FieldElement, FieldError, Polynomial};
pub use scheme::{deal, reconstruct, AccessStructure, Bulletin, Quorum, SchemeError, ShareSet};
