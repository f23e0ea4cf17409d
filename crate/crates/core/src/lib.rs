//! Symmetry-reduced tensor-power systems `A_α^{⊗N} x = 0` and their nonnegative solutions.
//!
//! * [`labels`]: ternary/binary indexing and multiset orbits.
//! * [`tensor_system`]: `A_α`, Kronecker powers, `Q_N`, `B_{α,N}` and `C_{α,N}`.
//! * [`symmetry`]: permutation averaging, digit reversal, orbit expansion/reduction.
//! * [`catalog`]: explicit nonnegative solutions for `N ≤ 10` and their verification.
//! * [`feasibility`]: LP witness / Farkas certificate decision and threshold search.
//! * [`channel`]: Choi-Kraus pairs realizing a prescribed product span.
//! * [`cli`]: the experiment runner behind the `tensor-nns` binary.

pub mod catalog;
pub mod channel;
pub mod cli;
pub mod error;
pub mod feasibility;
pub mod labels;
pub mod lp;
pub mod matrix;
pub mod symmetry;
pub mod tensor_system;

pub use error::{Error, Result};
pub use matrix::{ComplexDenseMatrix, C64};
pub use tensor_system::{MatrixForm, PhaseAngle};

/// Crate version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
