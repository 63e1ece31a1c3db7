//! Dense state-space engine: operators, Kraus channels, fixed points, and
//! transfer-map spectra.

mod channel;
mod container;
mod density;
mod krylov;
mod operator;
mod sector;
mod spectrum;

use thiserror::Error;

pub use channel::{iterate_to_fixed_point, FixedPoint, FixedPointOptions, KrausChannel, LocalChannel};
pub use container::{read_container, write_container, ContainerKind};
pub use density::{pauli_left, pauli_right, trace_distance, DensityMatrix};
pub use krylov::{block_krylov, KrylovOptions, RitzPair};
pub use operator::{DenseOperator, LocalOperator, StateVector};
pub use sector::{sector_project, sector_project_state, Symmetry};
pub use spectrum::{build_superoperator, explicit_bytes, leading_spectrum, SpectrumOptions, SpectrumReport, Superoperator};

pub(crate) use operator::{bit_of, ZERO};

/// Explicit superoperators are built only when they fit this many bytes.
pub const EXPLICIT_BUDGET_BYTES: usize = 2 << 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DenseError {
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("expected {expected} qubits, found {found}")]
    QubitCount { expected: usize, found: usize },
    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("a site is listed twice")]
    RepeatedSite,
    #[error("not Hermitian: defect {0:e}")]
    NotHermitian(f64),
    #[error("negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("trace {0} differs from 1")]
    BadTrace(f64),
    #[error("symmetry is not diagonal in the computational basis")]
    NotDiagonal,
    #[error("projection has zero norm")]
    ZeroNorm,
    #[error("eigensolver failed")]
    Eigen,
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("explicit superoperator needs {bytes} bytes, budget is {budget}")]
    TooLarge { bytes: usize, budget: usize },
    #[error("container: {0}")]
    Container(String),
}
