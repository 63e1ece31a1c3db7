//! Sequential circuits that realize repeated channels on a system register, the
//! bulk stabilizer states they grow, and the matching dense channels.

mod appendix;
mod channels;
mod circuit;
mod constructions;
mod flow;
mod lattice;
mod overlap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dense::DenseError;
use crate::pauli::PauliError;

pub use appendix::{verify_appendix, Appendix, AppendixCheck, AppendixReport};
pub use channels::{
    fermionic_one_form_channel, fermionic_steady_group, ising_chain_channel, jordan_wigner_channel, one_form_channel,
    one_form_steady_group, parity_image, subsystem_channel, subsystem_steady_group, zero_form_channel,
    zero_form_steady_group,
};
pub use circuit::{
    disjoint_groups, system_state, AncillaState, Axis, Deformation, SequentialCircuit, Slice, STATEVECTOR_LIMIT,
};
pub use constructions::{
    build_1d_channel_circuit, build_1d_channel_circuit_cut, build_fermionic_circuit, build_one_form_circuit,
    build_subsystem_circuit, build_zero_form_circuit, BoundaryCut, OneFormInput,
};
pub use flow::{
    compress, connecting_string, evolve_initial_stabilizers, extract_boundary_structure, initial_stabilizers, push_through,
    BoundaryStructure,
};
pub use lattice::{wrap, Geometry, Lattice, Link, QubitKind, QubitLabel, Torus};
pub use overlap::{overlap_check, overlap_series, OverlapResult, OVERLAP_QUBIT_LIMIT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HolographyError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("invalid size: {0}")]
    Size(String),
    #[error("circuit carries deformations; stabilizer flow needs p = 1/2 everywhere")]
    Deformed,
    #[error("no group element restricts to {0} on the system")]
    NotConnectable(String),
    #[error("{qubits} qubits exceed the limit of {limit}")]
    TooLarge { qubits: usize, limit: usize },
    #[error("circuit text line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid circuit: {0}")]
    Invalid(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Dense(#[from] DenseError),
}

/// A flip probability and its imaginary-time strength, `e^{2g} p = 1 − p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationParams {
    pub p: f64,
    /// `+∞` at `p = 0`, `−∞` at `p = 1`.
    pub g: f64,
}

impl DeformationParams {
    pub fn from_g(g: f64) -> Self {
        let p = if g == f64::INFINITY {
            0.0
        } else if g == f64::NEG_INFINITY {
            1.0
        } else {
            1.0 / (1.0 + (2.0 * g).exp())
        };
        DeformationParams { p, g }
    }

    /// `tanh(2g)`, the weight per inserted Pauli in the norm expansion.
    pub fn tanh_2g(&self) -> f64 {
        (2.0 * self.g).tanh()
    }

    pub fn is_noiseless(&self) -> bool {
        self.g == f64::INFINITY
    }
}

/// `g = ½ ln((1 − p)/p)`. Probabilities above ½ give negative `g`.
pub fn noise_to_deformation(p: f64) -> Result<DeformationParams, HolographyError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(HolographyError::Probability(p));
    }
    let g = if p == 0.0 {
        f64::INFINITY
    } else if p == 1.0 {
        f64::NEG_INFINITY
    } else {
        0.5 * ((1.0 - p) / p).ln()
    };
    Ok(DeformationParams { p, g })
}
