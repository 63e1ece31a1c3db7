//! Mixed-state order diagnostics: entropies, CMI, Uhlmann fidelity, the
//! fidelity correlator, two-point functions and strong/weak symmetry tests.

use std::io::Write;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dense::{pauli_left, pauli_right, DenseError, DenseOperator, DensityMatrix};
use crate::partition::Partition;
use crate::pauli::PauliOperator;

/// Eigenvalues above this (in magnitude) below zero are clipped to zero.
pub const CLIP_NEGATIVE: f64 = 1e-10;
/// Eigenvalues below `−INVALID_NEGATIVE` mean the input is not a state.
pub const INVALID_NEGATIVE: f64 = 1e-8;
/// Eigenvalues below this are dropped from matrix square roots.
pub const SQRT_CLIP: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error("eigenvalue {0:e} is too negative for a density matrix")]
    InvalidState(f64),
    #[error("operator is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("partition covers {partition} sites but the state has {state} qubits")]
    PartitionSize { partition: usize, state: usize },
    #[error("CMI {0:e} violates strong subadditivity")]
    NegativeCmi(f64),
    #[error("csv: {0}")]
    Csv(String),
}

/// Entropy in bits of a spectrum, clipping tiny negative tails.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64, DiagnosticsError> {
    let mut s = 0.0;
    for &v in eigenvalues {
        if v < -INVALID_NEGATIVE {
            return Err(DiagnosticsError::InvalidState(v));
        }
        if v > CLIP_NEGATIVE {
            s -= v * v.log2();
        }
    }
    Ok(s)
}

/// `S(ρ_region)` in bits; the whole system when `region` is `None`.
pub fn von_neumann_entropy(rho: &DensityMatrix, region: Option<&[usize]>) -> Result<f64, DiagnosticsError> {
    operator_entropy(rho.operator(), region)
}

/// Same as [`von_neumann_entropy`] for an operator not yet wrapped as a state.
pub fn operator_entropy(rho: &DenseOperator, region: Option<&[usize]>) -> Result<f64, DiagnosticsError> {
    let reduced;
    let op = match region {
        Some(r) if r.len() < rho.n_qubits() => {
            if r.is_empty() {
                return Ok(0.0);
            }
            reduced = rho.partial_trace_keep(r)?;
            &reduced
        }
        _ => rho,
    };
    entropy_of_spectrum(&op.hermitian_part().hermitian_eigenvalues()?)
}

/// `I(A:C|B) = S(AB) + S(BC) − S(B) − S(ABC)` in bits.
pub fn cmi(rho: &DensityMatrix, partition: &Partition) -> Result<f64, DiagnosticsError> {
    if partition.n_sites() != rho.n_qubits() {
        return Err(DiagnosticsError::PartitionSize { partition: partition.n_sites(), state: rho.n_qubits() });
    }
    let s = |r: Vec<usize>| von_neumann_entropy(rho, Some(&r));
    let value = s(partition.union_ab())? + s(partition.union_bc())? - s(partition.b().to_vec())? - s(partition.union_abc())?;
    if value < -INVALID_NEGATIVE {
        return Err(DiagnosticsError::NegativeCmi(value));
    }
    Ok(value)
}

/// Principal square root of a positive operator, dropping eigenvalues below [`SQRT_CLIP`].
pub fn psd_sqrt(m: &DenseOperator) -> Result<DenseOperator, DiagnosticsError> {
    Ok(m.hermitian_part().hermitian_function(|v| if v > SQRT_CLIP { v.sqrt() } else { 0.0 })?)
}

/// `Tr √(√ρ σ √ρ)`, clamped to `[0, 1]`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, DiagnosticsError> {
    operator_fidelity(rho.operator(), sigma.operator())
}

fn operator_fidelity(rho: &DenseOperator, sigma: &DenseOperator) -> Result<f64, DiagnosticsError> {
    if rho.n_qubits() != sigma.n_qubits() {
        return Err(DenseError::QubitCount { expected: rho.n_qubits(), found: sigma.n_qubits() }.into());
    }
    let root = psd_sqrt(rho)?;
    let inner = root.matmul(sigma).matmul(&root).hermitian_part();
    let f: f64 = inner.hermitian_eigenvalues()?.iter().map(|&v| if v > SQRT_CLIP { v.sqrt() } else { 0.0 }).sum();
    Ok(f.clamp(0.0, 1.0))
}

fn unitarity_defect(u: &DenseOperator) -> f64 {
    u.adjoint().matmul(u).sub(&DenseOperator::identity(u.n_qubits())).max_abs()
}

/// `F(ρ, O_i O_j ρ (O_i O_j)†)` for unitary charged operators.
pub fn fidelity_correlator(rho: &DensityMatrix, o_i: &DenseOperator, o_j: &DenseOperator) -> Result<f64, DiagnosticsError> {
    for o in [o_i, o_j] {
        if o.n_qubits() != rho.n_qubits() {
            return Err(DenseError::QubitCount { expected: rho.n_qubits(), found: o.n_qubits() }.into());
        }
        let defect = unitarity_defect(o);
        if defect > UNITARY_TOL {
            return Err(DiagnosticsError::NotUnitary(defect));
        }
    }
    let w = o_i.matmul(o_j);
    operator_fidelity(rho.operator(), &rho.operator().conjugate_by(&w))
}

/// Fidelity correlator for a Pauli string `O_i O_j`, using row/column permutations.
pub fn fidelity_correlator_pauli(rho: &DensityMatrix, string: &PauliOperator) -> Result<f64, DiagnosticsError> {
    let conj = pauli_right(&pauli_left(string, rho.operator()), &adjoint_pauli(string));
    operator_fidelity(rho.operator(), &conj)
}

fn adjoint_pauli(p: &PauliOperator) -> PauliOperator {
    p.clone().with_phase(crate::pauli::Phase::from_power(-(p.phase().power() as i64)))
}

/// `Tr(ρ O_i O_j)`
pub fn two_point(rho: &DensityMatrix, o_i: &DenseOperator, o_j: &DenseOperator) -> Result<C64, DiagnosticsError> {
    if o_i.n_qubits() != rho.n_qubits() || o_j.n_qubits() != rho.n_qubits() {
        return Err(DenseError::QubitCount { expected: rho.n_qubits(), found: o_i.n_qubits().max(o_j.n_qubits()) }.into());
    }
    Ok(rho.operator().trace_with(&o_i.matmul(o_j)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    Strong,
    WeakOnly,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryVerdict {
    pub classification: SymmetryClass,
    /// `min_θ ‖Uρ − e^{iθ}ρ‖₂ / ‖ρ‖₂`
    pub strong_residual: f64,
    /// `‖UρU† − ρ‖₂ / ‖ρ‖₂`
    pub weak_residual: f64,
    /// The optimal `θ`.
    pub phase: f64,
}

/// Classifies `U` as a strong, weak-only, or broken symmetry of `ρ`.
///
/// The optimal phase is that of `Tr(U ρ²)`, which maximizes `Re(e^{−iθ}⟨ρ, Uρ⟩)`.
pub fn symmetry_check(rho: &DensityMatrix, u: &DenseOperator, tol: f64) -> Result<SymmetryVerdict, DiagnosticsError> {
    if u.n_qubits() != rho.n_qubits() {
        return Err(DenseError::QubitCount { expected: rho.n_qubits(), found: u.n_qubits() }.into());
    }
    let defect = unitarity_defect(u);
    if defect > UNITARY_TOL {
        return Err(DiagnosticsError::NotUnitary(defect));
    }
    let r = rho.operator();
    let norm = r.frobenius();
    let ur = u.matmul(r);
    let overlap = r.adjoint().trace_with(&ur);
    let phase = overlap.arg();
    let strong_residual = ur.sub(&r.scale(C64::from_polar(1.0, phase))).frobenius() / norm;
    let weak_residual = ur.matmul(&u.adjoint()).sub(r).frobenius() / norm;
    let classification = if strong_residual < tol && weak_residual < tol {
        SymmetryClass::Strong
    } else if weak_residual < tol {
        SymmetryClass::WeakOnly
    } else {
        SymmetryClass::None
    };
    Ok(SymmetryVerdict { classification, strong_residual, weak_residual, phase })
}

/// `(∏ Xᵢ)(∏ CZ_{i,i+1})` on a periodic ring of `n` qubits.
pub fn czx(n_qubits: usize) -> DenseOperator {
    let d = 1usize << n_qubits;
    let mut m = DenseOperator::zeros(n_qubits);
    let flip = d - 1;
    for b in 0..d {
        // CZ phase from the number of adjacent 1-1 bonds, including the wrap bond.
        let bit = |s: usize| (b >> (n_qubits - 1 - s)) & 1;
        let ones = if n_qubits < 2 { 0 } else { (0..n_qubits).filter(|&q| bit(q) == 1 && bit((q + 1) % n_qubits) == 1).count() };
        let sign = if ones % 2 == 0 { 1.0 } else { -1.0 };
        m.set(b ^ flip, b, C64::new(sign, 0.0));
    }
    m
}

/// One diagnostic value, as written to CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub experiment: String,
    #[serde(rename = "L")]
    pub l: usize,
    pub g_or_p: f64,
    pub depth: Option<usize>,
    pub quantity: String,
    pub value: f64,
    pub tolerance_meta: String,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Writes rows with a header line `experiment,L,g_or_p,depth,quantity,value,tolerance_meta`.
pub fn write_csv(rows: &[DiagnosticRow], out: impl Write) -> Result<(), DiagnosticsError> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| DiagnosticsError::Csv(e.to_string());
    w.write_record(["experiment", "L", "g_or_p", "depth", "quantity", "value", "tolerance_meta"]).map_err(err)?;
    for r in rows {
        let depth = r.depth.map(|d| d.to_string()).unwrap_or_default();
        w.write_record([
            r.experiment.as_str(),
            &r.l.to_string(),
            &format_f64(r.g_or_p),
            &depth,
            r.quantity.as_str(),
            &format_f64(r.value),
            r.tolerance_meta.as_str(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| DiagnosticsError::Csv(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::StateVector;
    use crate::pauli::StabilizerGroup;

    fn cat_mixture(n: usize) -> DensityMatrix {
        let x = PauliOperator::x_on(n, &(0..n).collect::<Vec<_>>()).unwrap();
        DensityMatrix::from_stabilizers(&StabilizerGroup::new(n, vec![x]).unwrap())
    }

    fn z_at(n: usize, q: usize) -> DenseOperator {
        DenseOperator::from_pauli(&PauliOperator::z_on(n, &[q]).unwrap())
    }

    #[test]
    fn entropies() {
        assert!(von_neumann_entropy(&DensityMatrix::plus_product(3), None).unwrap().abs() < 1e-12);
        assert!((von_neumann_entropy(&cat_mixture(6), None).unwrap() - 5.0).abs() < 1e-10);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(4), None).unwrap() - 4.0).abs() < 1e-12);
        assert!(matches!(entropy_of_spectrum(&[1.1, -0.1]), Err(DiagnosticsError::InvalidState(_))));
    }

    #[test]
    fn cmi_of_cat_mixture_on_ten_site_ring() {
        let p = Partition::default_ring(10).unwrap();
        assert!((cmi(&cat_mixture(10), &p).unwrap() - 1.0).abs() < 1e-9);
        assert!(cmi(&DensityMatrix::plus_product(10), &p).unwrap().abs() < 1e-10);
    }

    #[test]
    fn fidelity_examples() {
        let zero = DensityMatrix::pure(&StateVector::zeros_state(1)).unwrap();
        let plus = DensityMatrix::plus_product(1);
        assert!((uhlmann_fidelity(&zero, &plus).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((uhlmann_fidelity(&plus, &plus).unwrap() - 1.0).abs() < 1e-12);
        let m = DensityMatrix::maximally_mixed(1);
        let a = uhlmann_fidelity(&zero, &m).unwrap();
        let b = uhlmann_fidelity(&m, &zero).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn fidelity_correlator_examples() {
        let n = 4;
        let cat = cat_mixture(n);
        assert!((fidelity_correlator(&cat, &z_at(n, 0), &z_at(n, 2)).unwrap() - 1.0).abs() < 1e-9);
        let plus = DensityMatrix::plus_product(n);
        assert!(fidelity_correlator(&plus, &z_at(n, 0), &z_at(n, 2)).unwrap() < 1e-9);
        let zz = PauliOperator::z_on(n, &[0, 2]).unwrap();
        assert!((fidelity_correlator_pauli(&cat, &zz).unwrap() - 1.0).abs() < 1e-9);
        let bad = z_at(n, 0).scale(C64::new(2.0, 0.0));
        assert!(matches!(fidelity_correlator(&cat, &bad, &z_at(n, 1)), Err(DiagnosticsError::NotUnitary(_))));
    }

    #[test]
    fn two_point_examples() {
        let n = 4;
        assert!(two_point(&cat_mixture(n), &z_at(n, 0), &z_at(n, 2)).unwrap().norm() < 1e-12);
        let zero = DensityMatrix::pure(&StateVector::zeros_state(n)).unwrap();
        assert!((two_point(&zero, &z_at(n, 0), &z_at(n, 1)).unwrap().re - 1.0).abs() < 1e-12);
        let ghz = crate::dense::sector_project_state(&StateVector::zeros_state(n), &crate::dense::Symmetry::all_x(n), 1).unwrap();
        let ghz = DensityMatrix::pure(&ghz).unwrap();
        assert!((two_point(&ghz, &z_at(n, 0), &z_at(n, 1)).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetry_verdicts() {
        let n = 4;
        let cat = cat_mixture(n);
        let all_x = DenseOperator::from_pauli(&PauliOperator::x_on(n, &[0, 1, 2, 3]).unwrap());
        assert_eq!(symmetry_check(&cat, &all_x, 1e-9).unwrap().classification, SymmetryClass::Strong);
        let zz = z_at(n, 0).matmul(&z_at(n, 2));
        assert_eq!(symmetry_check(&cat, &zz, 1e-9).unwrap().classification, SymmetryClass::WeakOnly);

        let u = czx(n);
        assert!(unitarity_defect(&u) < 1e-15);
        assert!(u.sub(&u.adjoint()).max_abs() < 1e-15);
        let rho = DensityMatrix::new(DenseOperator::identity(n).add(&u).scale(C64::new(1.0 / 16.0, 0.0))).unwrap();
        assert_eq!(symmetry_check(&rho, &u, 1e-9).unwrap().classification, SymmetryClass::Strong);
        let x0 = DenseOperator::from_pauli(&PauliOperator::x_on(n, &[0]).unwrap());
        assert_eq!(symmetry_check(&rho, &x0, 1e-9).unwrap().classification, SymmetryClass::None);
    }

    #[test]
    fn csv_format_round_trips() {
        let rows = vec![DiagnosticRow {
            experiment: "demo".into(),
            l: 6,
            g_or_p: 0.1,
            depth: None,
            quantity: "cmi".into(),
            value: 1.0 / 3.0,
            tolerance_meta: "eps=1e-9".into(),
        }];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("experiment,L,g_or_p,depth,quantity,value,tolerance_meta\n"));
        let value: f64 = text.lines().nth(1).unwrap().split(',').nth(5).unwrap().parse().unwrap();
        assert_eq!(value, 1.0 / 3.0);
    }
}
