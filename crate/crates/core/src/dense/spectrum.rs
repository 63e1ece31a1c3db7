//! Superoperators of channels and their leading spectra.
//!
//! Operators are vectorized row-major: entry `(a, b)` of a `D×D` matrix sits at
//! index `a·D + b`.

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::channel::KrausChannel;
use super::krylov::{block_krylov, KrylovOptions};
use super::operator::DenseOperator;
use super::sector::Symmetry;
use super::{DenseError, EXPLICIT_BUDGET_BYTES, ZERO};

/// A channel viewed as a linear map on operator space.
#[derive(Debug, Clone)]
pub enum Superoperator {
    Explicit { n_qubits: usize, matrix: Mat<C64> },
    MatrixFree(KrausChannel),
    /// Restriction to operators `|a⟩⟨b|` with `a, b` both in `states`, indexed
    /// `i·s + j` for `a = states[i]`, `b = states[j]`.
    Block { n_qubits: usize, states: Vec<usize>, matrix: Mat<C64> },
}

/// Bytes needed to store the explicit superoperator on `n_qubits`.
pub fn explicit_bytes(n_qubits: usize) -> usize {
    let dim = 1usize << (2 * n_qubits);
    dim.saturating_mul(dim).saturating_mul(std::mem::size_of::<C64>())
}

/// Explicit form when it fits the memory budget, matrix-free otherwise.
pub fn build_superoperator(channel: &KrausChannel) -> Result<Superoperator, DenseError> {
    if explicit_bytes(channel.n_qubits()) <= EXPLICIT_BUDGET_BYTES {
        Superoperator::explicit(channel)
    } else {
        Ok(Superoperator::MatrixFree(channel.clone()))
    }
}

impl Superoperator {
    /// Always explicit; fails beyond the memory budget.
    pub fn explicit(channel: &KrausChannel) -> Result<Self, DenseError> {
        let n = channel.n_qubits();
        let bytes = explicit_bytes(n);
        if bytes > EXPLICIT_BUDGET_BYTES {
            return Err(DenseError::TooLarge { bytes, budget: EXPLICIT_BUDGET_BYTES });
        }
        let d = 1usize << n;
        let dim = d * d;
        let mut matrix = Mat::<C64>::zeros(dim, dim);
        for col in 0..dim {
            let mut e = DenseOperator::zeros(n);
            e.set(col / d, col % d, C64::new(1.0, 0.0));
            let out = channel.apply(&e)?;
            for (row, v) in out.data().iter().enumerate() {
                if *v != ZERO {
                    matrix[(row, col)] = *v;
                }
            }
        }
        Ok(Superoperator::Explicit { n_qubits: n, matrix })
    }

    /// The block of `channel` acting within one charge sector of a symmetry that
    /// is diagonal in the computational basis. The channel must conserve the
    /// charge strongly for the block to capture its spectrum in that sector.
    pub fn sector_block(channel: &KrausChannel, symmetry: &Symmetry, charge: i64) -> Result<Self, DenseError> {
        let n = channel.n_qubits();
        if symmetry.n_qubits() != n {
            return Err(DenseError::QubitCount { expected: n, found: symmetry.n_qubits() });
        }
        let labels = symmetry.basis_charges().ok_or(DenseError::NotDiagonal)?;
        let states: Vec<usize> = (0..labels.len()).filter(|&b| labels[b] == charge).collect();
        if states.is_empty() {
            return Err(DenseError::ZeroNorm);
        }
        let s = states.len();
        let bytes = (s * s).saturating_mul(s * s).saturating_mul(std::mem::size_of::<C64>());
        if bytes > EXPLICIT_BUDGET_BYTES {
            return Err(DenseError::TooLarge { bytes, budget: EXPLICIT_BUDGET_BYTES });
        }
        let mut matrix = Mat::<C64>::zeros(s * s, s * s);
        for (i, &a) in states.iter().enumerate() {
            for (j, &b) in states.iter().enumerate() {
                let mut e = DenseOperator::zeros(n);
                e.set(a, b, C64::new(1.0, 0.0));
                let out = channel.apply(&e)?;
                for (r, &ra) in states.iter().enumerate() {
                    for (c, &cb) in states.iter().enumerate() {
                        matrix[(r * s + c, i * s + j)] = out.get(ra, cb);
                    }
                }
            }
        }
        Ok(Superoperator::Block { n_qubits: n, states, matrix })
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            Superoperator::Explicit { n_qubits, .. } | Superoperator::Block { n_qubits, .. } => *n_qubits,
            Superoperator::MatrixFree(c) => c.n_qubits(),
        }
    }

    /// Dimension of the space acted on: `4^n`, or `s²` for a sector block.
    pub fn dim(&self) -> usize {
        match self {
            Superoperator::Block { states, .. } => states.len() * states.len(),
            _ => 1usize << (2 * self.n_qubits()),
        }
    }

    pub fn is_explicit(&self) -> bool {
        !matches!(self, Superoperator::MatrixFree(_))
    }

    pub fn apply_vec(&self, v: &[C64]) -> Result<Vec<C64>, DenseError> {
        if v.len() != self.dim() {
            return Err(DenseError::Shape { expected: self.dim(), found: v.len() });
        }
        match self {
            Superoperator::Explicit { matrix, .. } | Superoperator::Block { matrix, .. } => {
                let dim = v.len();
                let mut out = vec![ZERO; dim];
                for col in 0..dim {
                    let x = v[col];
                    if x == ZERO {
                        continue;
                    }
                    let c = matrix.col(col);
                    for (o, m) in out.iter_mut().zip(c.iter()) {
                        *o += m * x;
                    }
                }
                Ok(out)
            }
            Superoperator::MatrixFree(channel) => {
                let op = DenseOperator::from_data(channel.n_qubits(), v.to_vec())?;
                Ok(channel.apply(&op)?.into_data())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Number of leading eigenvalues to report.
    pub n_eigs: usize,
    /// Magnitudes within `epsilon_deg` of the leading one count as steady.
    pub epsilon_deg: f64,
    /// Krylov residual tolerance, relative to the leading magnitude.
    pub tol: f64,
    /// Full diagonalization when the operator-space dimension is at most this.
    pub dense_limit: usize,
    pub krylov_block: usize,
    pub seed: u64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { n_eigs: 12, epsilon_deg: 1e-8, tol: 1e-9, dense_limit: 256, krylov_block: 8, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// `|λ|/|λ₀|`, descending.
    pub magnitudes: Vec<f64>,
    /// `|λ₀|`; equals 1 for a channel.
    pub leading_magnitude: f64,
    /// Eigenvalues as `[re, im]`, in the same order.
    pub eigenvalues: Vec<[f64; 2]>,
    pub degeneracy: usize,
    /// `1 − |λ_deg|/|λ₀|`; `None` when every computed value is steady.
    pub gap: Option<f64>,
    pub epsilon_deg: f64,
    /// `‖A v − λ v‖` per eigenpair.
    pub residuals: Vec<f64>,
    /// `"dense"` or `"krylov"`.
    pub method: String,
    /// Left symmetry charge of each eigen-operator, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sectors: Option<Vec<Option<i64>>>,
}

impl SpectrumReport {
    fn from_pairs(mut pairs: Vec<(C64, f64, Vec<C64>)>, opts: &SpectrumOptions, method: &str) -> (Self, Vec<Vec<C64>>) {
        pairs.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()));
        pairs.truncate(opts.n_eigs.max(1));
        let lead = pairs.first().map(|p| p.0.norm()).unwrap_or(0.0);
        let scale = if lead > 0.0 { lead } else { 1.0 };
        let magnitudes: Vec<f64> = pairs.iter().map(|p| p.0.norm() / scale).collect();
        let degeneracy = magnitudes.iter().filter(|&&m| m >= 1.0 - opts.epsilon_deg).count();
        let gap = magnitudes.get(degeneracy).map(|m| 1.0 - m);
        let report = SpectrumReport {
            magnitudes,
            leading_magnitude: lead,
            eigenvalues: pairs.iter().map(|p| [p.0.re, p.0.im]).collect(),
            degeneracy,
            gap,
            epsilon_deg: opts.epsilon_deg,
            residuals: pairs.iter().map(|p| p.1).collect(),
            method: method.into(),
            sectors: None,
        };
        (report, pairs.into_iter().map(|p| p.2).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

fn dense_pairs(sup: &Superoperator) -> Result<Vec<(C64, f64, Vec<C64>)>, DenseError> {
    let dim = sup.dim();
    let owned;
    let matrix = match sup {
        Superoperator::Explicit { matrix, .. } | Superoperator::Block { matrix, .. } => matrix,
        Superoperator::MatrixFree(_) => {
            let mut m = Mat::<C64>::zeros(dim, dim);
            for col in 0..dim {
                let mut e = vec![ZERO; dim];
                e[col] = C64::new(1.0, 0.0);
                for (row, v) in sup.apply_vec(&e)?.into_iter().enumerate() {
                    m[(row, col)] = v;
                }
            }
            owned = m;
            &owned
        }
    };
    let eig = matrix.eigen().map_err(|_| DenseError::Eigen)?;
    let vals = eig.S().column_vector();
    let vecs = eig.U();
    let mut out = Vec::with_capacity(dim);
    for k in 0..dim {
        let v: Vec<C64> = (0..dim).map(|i| vecs[(i, k)]).collect();
        let nv = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = v.iter().map(|x| x / nv).collect();
        let av = sup.apply_vec(&v)?;
        let res = av.iter().zip(&v).map(|(a, x)| (a - vals[k] * x).norm_sqr()).sum::<f64>().sqrt();
        out.push((vals[k], res, v));
    }
    Ok(out)
}

/// Left charge of an eigen-operator: the `q` with `P_q M ≈ M`.
fn left_charge(symmetry: &Symmetry, n_qubits: usize, v: &[C64]) -> Option<i64> {
    let m = DenseOperator::from_data(n_qubits, v.to_vec()).ok()?;
    let total = m.frobenius();
    symmetry.charges().into_iter().find(|&q| {
        let p = symmetry.project_left(q, &m);
        p.sub(&m).frobenius() < 1e-6 * total
    })
}

/// Leading eigenvalues of a superoperator by magnitude.
///
/// Full diagonalization up to `opts.dense_limit`, restarted block Krylov beyond.
pub fn leading_spectrum(
    sup: &Superoperator,
    opts: &SpectrumOptions,
    symmetry: Option<&Symmetry>,
) -> Result<SpectrumReport, DenseError> {
    let dim = sup.dim();
    let (pairs, method) = if dim <= opts.dense_limit {
        (dense_pairs(sup)?, "dense")
    } else {
        let kopts = KrylovOptions {
            block: opts.krylov_block,
            tol: opts.tol,
            seed: opts.seed,
            ..KrylovOptions::new(opts.n_eigs)
        };
        let ritz = block_krylov(dim, |v| sup.apply_vec(v).expect("matching dimension"), kopts)?;
        (ritz.into_iter().map(|p| (p.value, p.residual, p.vector)).collect(), "krylov")
    };
    let (mut report, vectors) = SpectrumReport::from_pairs(pairs, opts, method);
    if let (Some(sym), false) = (symmetry, matches!(sup, Superoperator::Block { .. })) {
        let n = sup.n_qubits();
        report.sectors = Some(vectors.iter().map(|v| left_charge(sym, n, v)).collect());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::channel::LocalChannel;

    fn x_dephasing(p: f64) -> KrausChannel {
        KrausChannel::new(1, "x", vec![LocalChannel::pauli_flip(p, &"X".parse().unwrap(), vec![0]).unwrap()]).unwrap()
    }

    #[test]
    fn single_qubit_dephasing_spectrum() {
        // Pauli basis: I and X survive, Y and Z are killed.
        let sup = build_superoperator(&x_dephasing(0.5)).unwrap();
        assert!(sup.is_explicit());
        let report = leading_spectrum(&sup, &SpectrumOptions { n_eigs: 4, ..Default::default() }, None).unwrap();
        assert_eq!(report.degeneracy, 2);
        assert!(report.magnitudes[2] < 1e-14 && report.magnitudes[3] < 1e-14);
        assert_eq!(report.gap, Some(1.0 - report.magnitudes[2]));
    }

    #[test]
    fn identity_channel_is_identity_matrix() {
        let sup = Superoperator::explicit(&KrausChannel::identity(2)).unwrap();
        let Superoperator::Explicit { matrix, .. } = &sup else { unreachable!() };
        for i in 0..16 {
            for j in 0..16 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(matrix[(i, j)], C64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn budget_enforced() {
        assert!(matches!(Superoperator::explicit(&KrausChannel::identity(7)), Err(DenseError::TooLarge { .. })));
        assert!(!build_superoperator(&KrausChannel::identity(7)).unwrap().is_explicit());
    }

    #[test]
    fn krylov_matches_dense_on_partial_dephasing() {
        let mut steps = Vec::new();
        for q in 0..4 {
            steps.push(LocalChannel::pauli_flip(0.1 + 0.05 * q as f64, &"Z".parse().unwrap(), vec![q]).unwrap());
            steps.push(LocalChannel::pauli_flip(0.02 + 0.03 * q as f64, &"X".parse().unwrap(), vec![q]).unwrap());
        }
        let ch = KrausChannel::new(4, "z", steps).unwrap();
        let sup = build_superoperator(&ch).unwrap();
        let dense = leading_spectrum(&sup, &SpectrumOptions { n_eigs: 6, dense_limit: 256, ..Default::default() }, None).unwrap();
        let krylov = leading_spectrum(&sup, &SpectrumOptions { n_eigs: 6, dense_limit: 0, ..Default::default() }, None).unwrap();
        assert_eq!(dense.method, "dense");
        assert_eq!(krylov.method, "krylov");
        assert_eq!(dense.degeneracy, 1);
        assert_eq!(krylov.degeneracy, 1);
        for (a, b) in dense.magnitudes.iter().zip(&krylov.magnitudes) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn sector_blocks_split_the_spectrum() {
        // ZZ dephasing on a 3-ring; ∏Z is a strong symmetry.
        let steps = (0..3)
            .map(|q| LocalChannel::pauli_flip(0.2, &"ZZ".parse().unwrap(), vec![q, (q + 1) % 3]).unwrap())
            .collect();
        let ch = KrausChannel::new(3, "zz", steps).unwrap();
        let sym = Symmetry::all_z(3);
        let opts = SpectrumOptions { n_eigs: 64, ..Default::default() };
        let full = leading_spectrum(&build_superoperator(&ch).unwrap(), &opts, None).unwrap();
        let even = leading_spectrum(&Superoperator::sector_block(&ch, &sym, 1).unwrap(), &opts, None).unwrap();
        let odd = leading_spectrum(&Superoperator::sector_block(&ch, &sym, -1).unwrap(), &opts, None).unwrap();
        assert_eq!(even.magnitudes.len(), 16);
        // Diagonal operators are untouched, so each block has 4 unit eigenvalues.
        assert_eq!(even.degeneracy, 4);
        assert_eq!(odd.degeneracy, 4);
        assert!(full.degeneracy >= even.degeneracy + odd.degeneracy);
    }

    #[test]
    fn sector_block_needs_diagonal_symmetry() {
        let err = Superoperator::sector_block(&x_dephasing(0.1), &Symmetry::all_x(1), 1).unwrap_err();
        assert!(matches!(err, DenseError::NotDiagonal));
    }

    #[test]
    fn json_has_required_keys() {
        let sup = build_superoperator(&x_dephasing(0.25)).unwrap();
        let report = leading_spectrum(&sup, &SpectrumOptions { n_eigs: 4, ..Default::default() }, None).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        for key in ["magnitudes", "degeneracy", "gap", "epsilon_deg", "residuals"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
