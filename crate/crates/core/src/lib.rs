//! Clifford-valued model Hamiltonians on the "real" torus and their
//! KR-theory invariants.
//!
//! - [`clifford`]: matrix representations of `Cliff(a, b)` with grading and
//!   real structure.
//! - [`bloch`]: `φ̃`, `φ`, `β`, `H(k)`, spectral flattening and gaps.
//! - [`invariants`]: the invariant vector by fixed-point enumeration, the
//!   binomial closed forms and stacking pullbacks.
//! - [`oracle`]: mapping degree, winding number, homotopy gap scans and the
//!   determinant detector.
//! - [`symmetry`]: symmetry classes by `j = b − a + 1 mod 8` and transfer to
//!   matrices with explicit symmetry operators.
//! - [`cli`]: the `krphase` command line.

pub mod bloch;
pub mod check;
pub mod cli;
pub mod clifford;
pub mod error;
pub mod invariants;
pub mod oracle;
pub mod symmetry;

pub use bloch::{ModelSpec, TorusPoint};
pub use clifford::{build_rep, AntiUnitary, CMatrix, CliffordRep};
pub use error::{KrError, Result};
pub use invariants::{closed_form, kr_class, KRClassVector};
