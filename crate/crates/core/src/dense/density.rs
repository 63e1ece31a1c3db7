//! Validated density matrices.

use num_complex::Complex64 as C64;

use crate::pauli::{PauliOperator, StabilizerGroup};

use super::operator::{DenseOperator, StateVector};
use super::DenseError;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(DenseOperator);

impl DensityMatrix {
    /// Checks all three invariants.
    pub fn new(op: DenseOperator) -> Result<Self, DenseError> {
        let defect = op.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(DenseError::NotHermitian(defect));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(DenseError::BadTrace(tr.re));
        }
        let min = op.hermitian_eigenvalues()?.first().copied().unwrap_or(0.0);
        if min < -POSITIVITY_TOL {
            return Err(DenseError::NotPositive(min));
        }
        Ok(DensityMatrix(op.hermitian_part()))
    }

    /// Hermitize and rescale to unit trace, then validate.
    pub fn normalized(op: &DenseOperator) -> Result<Self, DenseError> {
        let h = op.hermitian_part();
        let tr = h.trace().re;
        if tr.abs() < 1e-300 {
            return Err(DenseError::ZeroNorm);
        }
        Self::new(h.scale(C64::new(1.0 / tr, 0.0)))
    }

    pub fn pure(psi: &StateVector) -> Result<Self, DenseError> {
        Self::normalized(&psi.normalized()?.density())
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = (1usize << n_qubits) as f64;
        DensityMatrix(DenseOperator::identity(n_qubits).scale(C64::new(1.0 / d, 0.0)))
    }

    /// `|+⟩^{⊗n}`
    pub fn plus_product(n_qubits: usize) -> Self {
        DensityMatrix(StateVector::plus_state(n_qubits).density())
    }

    /// `ρ ∝ ∏ (1 + gᵢ)` for a stabilizer group.
    pub fn from_stabilizers(group: &StabilizerGroup) -> Self {
        let n = group.n_qubits();
        let k = group.len();
        let scale = 1.0 / (1u64 << (n - k)) as f64;
        let mut m = DenseOperator::identity(n).scale(C64::new(scale, 0.0));
        for g in group.generators() {
            m = m.add(&pauli_left(g, &m)).scale(C64::new(0.5, 0.0));
        }
        DensityMatrix(m)
    }

    pub fn operator(&self) -> &DenseOperator {
        &self.0
    }

    pub fn into_operator(self) -> DenseOperator {
        self.0
    }

    pub fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    pub fn expectation(&self, p: &PauliOperator) -> C64 {
        self.0.trace_with_pauli(p)
    }

    pub fn partial_trace_keep(&self, keep: &[usize]) -> Result<DensityMatrix, DenseError> {
        Ok(DensityMatrix(self.0.partial_trace_keep(keep)?))
    }

    /// `½ ‖ρ − σ‖₁`
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64, DenseError> {
        trace_distance(&self.0, &other.0)
    }
}

/// `½ ‖a − b‖₁` for Hermitian operators.
pub fn trace_distance(a: &DenseOperator, b: &DenseOperator) -> Result<f64, DenseError> {
    let vals = a.sub(b).hermitian_eigenvalues()?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// `P · M` for a Pauli string `P`, by row permutation.
pub fn pauli_left(p: &PauliOperator, m: &DenseOperator) -> DenseOperator {
    let n = m.n_qubits();
    let d = m.dim();
    let (mut xmask, mut zmask) = (0usize, 0usize);
    for q in 0..n {
        if p.x_bits()[q] {
            xmask |= super::bit_of(n, q);
        }
        if p.z_bits()[q] {
            zmask |= super::bit_of(n, q);
        }
    }
    let y_count = (xmask & zmask).count_ones() as i64;
    let base = crate::pauli::Phase::from_power(p.phase().power() as i64 + y_count).to_complex();
    let src = m.data();
    let mut data = vec![super::ZERO; d * d];
    for b in 0..d {
        let sign = if (zmask & b).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let f = base * sign;
        let row = b ^ xmask;
        for j in 0..d {
            data[row * d + j] = src[b * d + j] * f;
        }
    }
    DenseOperator::from_data(n, data).expect("same shape")
}

/// `M · P` for a Pauli string `P`.
pub fn pauli_right(m: &DenseOperator, p: &PauliOperator) -> DenseOperator {
    // M P = (P† M†)†
    let pd = p.clone().with_phase(crate::pauli::Phase::from_power(-(p.phase().power() as i64)));
    pauli_left(&pd, &m.adjoint()).adjoint()
}
