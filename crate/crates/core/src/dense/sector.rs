//! Symmetry sectors and projections onto them.

use num_complex::Complex64 as C64;

use crate::pauli::{Pauli, PauliOperator};

use super::density::{pauli_left, pauli_right};
use super::operator::{DenseOperator, StateVector};
use super::DenseError;

/// A symmetry whose sectors are labelled by integer charges.
#[derive(Debug, Clone, PartialEq)]
pub enum Symmetry {
    /// Hermitian Pauli string; charges are `+1` and `−1`.
    Pauli(PauliOperator),
    /// Diagonal in the computational basis; `labels[b]` is the charge of basis state `b`.
    Diagonal { n_qubits: usize, labels: Vec<i64> },
}

impl Symmetry {
    /// `∏ Xᵢ`
    pub fn all_x(n_qubits: usize) -> Self {
        Symmetry::Pauli(PauliOperator::on_sites(n_qubits, Pauli::X, &(0..n_qubits).collect::<Vec<_>>()).expect("in range"))
    }

    /// `∏ Zᵢ`
    pub fn all_z(n_qubits: usize) -> Self {
        Symmetry::Pauli(PauliOperator::on_sites(n_qubits, Pauli::Z, &(0..n_qubits).collect::<Vec<_>>()).expect("in range"))
    }

    /// Number of `1`s in the computational basis (U(1) charge).
    pub fn particle_number(n_qubits: usize) -> Self {
        Symmetry::Diagonal {
            n_qubits,
            labels: (0..1usize << n_qubits).map(|b| b.count_ones() as i64).collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            Symmetry::Pauli(p) => p.n_qubits(),
            Symmetry::Diagonal { n_qubits, .. } => *n_qubits,
        }
    }

    /// Charges with a nonzero projector, ascending.
    pub fn charges(&self) -> Vec<i64> {
        match self {
            Symmetry::Pauli(p) if p.is_identity() => {
                if p.phase() == crate::pauli::Phase::ONE {
                    vec![1]
                } else {
                    vec![-1]
                }
            }
            Symmetry::Pauli(_) => vec![-1, 1],
            Symmetry::Diagonal { labels, .. } => {
                let mut c = labels.clone();
                c.sort_unstable();
                c.dedup();
                c
            }
        }
    }

    /// Charge of every computational basis state, when the symmetry is diagonal
    /// in that basis (Z-type Pauli strings and explicit labels).
    pub fn basis_charges(&self) -> Option<Vec<i64>> {
        match self {
            Symmetry::Pauli(p) if p.is_z_type() && p.phase().is_real() => {
                let n = p.n_qubits();
                let sign = if p.phase() == crate::pauli::Phase::ONE { 1 } else { -1 };
                let support = p.support();
                Some(
                    (0..1usize << n)
                        .map(|b| {
                            let ones = support.iter().filter(|&&q| b & super::bit_of(n, q) != 0).count();
                            if ones % 2 == 0 { sign } else { -sign }
                        })
                        .collect(),
                )
            }
            Symmetry::Pauli(_) => None,
            Symmetry::Diagonal { labels, .. } => Some(labels.clone()),
        }
    }

    /// The unitary as a dense matrix; diagonal charges become phases `e^{iθq}`
    /// with an irrational `θ` so distinct charges stay distinct.
    pub fn unitary(&self) -> DenseOperator {
        match self {
            Symmetry::Pauli(p) => DenseOperator::from_pauli(p),
            Symmetry::Diagonal { n_qubits, labels } => {
                let theta = std::f64::consts::SQRT_2;
                let mut m = DenseOperator::zeros(*n_qubits);
                for (b, &q) in labels.iter().enumerate() {
                    m.set(b, b, C64::from_polar(1.0, theta * q as f64));
                }
                m
            }
        }
    }

    pub(crate) fn project_left(&self, charge: i64, m: &DenseOperator) -> DenseOperator {
        match self {
            Symmetry::Pauli(p) => {
                let pm = pauli_left(p, m).scale(C64::new(charge as f64, 0.0));
                m.add(&pm).scale(C64::new(0.5, 0.0))
            }
            Symmetry::Diagonal { labels, .. } => {
                DenseOperator::from_fn(m.n_qubits(), |i, j| if labels[i] == charge { m.get(i, j) } else { C64::new(0.0, 0.0) })
            }
        }
    }

    fn project_right(&self, charge: i64, m: &DenseOperator) -> DenseOperator {
        match self {
            Symmetry::Pauli(p) => {
                let mp = pauli_right(m, p).scale(C64::new(charge as f64, 0.0));
                m.add(&mp).scale(C64::new(0.5, 0.0))
            }
            Symmetry::Diagonal { labels, .. } => {
                DenseOperator::from_fn(m.n_qubits(), |i, j| if labels[j] == charge { m.get(i, j) } else { C64::new(0.0, 0.0) })
            }
        }
    }

    /// `P_q M P_q` without normalization.
    pub fn sandwich(&self, charge: i64, m: &DenseOperator) -> DenseOperator {
        self.project_right(charge, &self.project_left(charge, m))
    }
}

/// `P_q ρ P_q / Tr(P_q ρ)`.
pub fn sector_project(rho: &DenseOperator, symmetry: &Symmetry, charge: i64) -> Result<DenseOperator, DenseError> {
    if rho.n_qubits() != symmetry.n_qubits() {
        return Err(DenseError::QubitCount { expected: symmetry.n_qubits(), found: rho.n_qubits() });
    }
    let m = symmetry.sandwich(charge, rho);
    let tr = m.trace().re;
    if tr.abs() < 1e-14 {
        return Err(DenseError::ZeroNorm);
    }
    Ok(m.scale(C64::new(1.0 / tr, 0.0)))
}

/// `P_q |ψ⟩` normalized.
pub fn sector_project_state(psi: &StateVector, symmetry: &Symmetry, charge: i64) -> Result<StateVector, DenseError> {
    if psi.n_qubits() != symmetry.n_qubits() {
        return Err(DenseError::QubitCount { expected: symmetry.n_qubits(), found: psi.n_qubits() });
    }
    let projected = match symmetry {
        Symmetry::Pauli(p) => {
            let signed = p.clone().with_phase(p.phase().mul(if charge < 0 {
                crate::pauli::Phase::MINUS_ONE
            } else {
                crate::pauli::Phase::ONE
            }));
            psi.project_plus(&signed)
        }
        Symmetry::Diagonal { labels, .. } => {
            let amps = psi
                .amplitudes()
                .iter()
                .zip(labels)
                .map(|(a, &l)| if l == charge { *a } else { C64::new(0.0, 0.0) })
                .collect();
            StateVector::from_amplitudes(psi.n_qubits(), amps)?
        }
    };
    if projected.norm() < 1e-12 {
        return Err(DenseError::ZeroNorm);
    }
    projected.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_from_all_zero() {
        let ghz = sector_project_state(&StateVector::zeros_state(4), &Symmetry::all_x(4), 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ghz.amplitudes()[0].re - h).abs() < 1e-15);
        assert!((ghz.amplitudes()[15].re - h).abs() < 1e-15);
        assert!(ghz.amplitudes()[1..15].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn zero_norm_projection_fails() {
        let psi = StateVector::plus_state(3);
        assert_eq!(sector_project_state(&psi, &Symmetry::all_x(3), -1), Err(DenseError::ZeroNorm));
        let rho = psi.density();
        assert_eq!(sector_project(&rho, &Symmetry::all_x(3), -1), Err(DenseError::ZeroNorm));
    }

    #[test]
    fn number_sectors() {
        let sym = Symmetry::particle_number(3);
        assert_eq!(sym.charges(), vec![0, 1, 2, 3]);
        let rho = StateVector::plus_state(3).density();
        let one = sector_project(&rho, &sym, 1).unwrap();
        // W state: three equal amplitudes
        assert!((one.get(1, 2).re - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(one.get(0, 0).re, 0.0);
    }
}
