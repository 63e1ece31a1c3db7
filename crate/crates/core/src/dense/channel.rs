//! Kraus channels built from local steps, and fixed-point iteration.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::pauli::PauliOperator;

use super::operator::{DenseOperator, LocalOperator};
use super::DenseError;

/// One local step: `ρ ↦ Σ_k K_k ρ K_k†` with every `K_k` on the same sites.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalChannel {
    sites: Vec<usize>,
    kraus: Vec<LocalOperator>,
}

impl LocalChannel {
    pub fn new(sites: Vec<usize>, matrices: Vec<Vec<C64>>) -> Result<Self, DenseError> {
        let kraus = matrices
            .into_iter()
            .map(|m| LocalOperator::new(sites.clone(), m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LocalChannel { sites, kraus })
    }

    pub fn from_operators(sites: Vec<usize>, ops: &[DenseOperator]) -> Result<Self, DenseError> {
        Self::new(sites, ops.iter().map(|o| o.data().to_vec()).collect())
    }

    /// `(1 − p) ρ + p P ρ P` for a Pauli `P` given on its own support.
    pub fn pauli_flip(p: f64, pauli: &PauliOperator, sites: Vec<usize>) -> Result<Self, DenseError> {
        if pauli.n_qubits() != sites.len() {
            return Err(DenseError::QubitCount { expected: sites.len(), found: pauli.n_qubits() });
        }
        let id = DenseOperator::identity(sites.len()).scale(C64::new((1.0 - p).sqrt(), 0.0));
        let flip = DenseOperator::from_pauli(pauli).scale(C64::new(p.sqrt(), 0.0));
        let ops: Vec<DenseOperator> = if p == 0.0 {
            vec![id]
        } else if p == 1.0 {
            vec![flip]
        } else {
            vec![id, flip]
        };
        Self::from_operators(sites, &ops)
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn kraus(&self) -> &[LocalOperator] {
        &self.kraus
    }

    /// `max |Σ K†K − I|`
    pub fn completeness_defect(&self) -> f64 {
        let k = self.sites.len();
        let mut acc = DenseOperator::zeros(k);
        for op in &self.kraus {
            let m = op.as_dense();
            acc.add_assign(&m.adjoint().matmul(&m));
        }
        acc.sub(&DenseOperator::identity(k)).max_abs()
    }

    pub fn apply(&self, rho: &DenseOperator) -> Result<DenseOperator, DenseError> {
        let terms: Vec<DenseOperator> = self
            .kraus
            .par_iter()
            .map(|k| k.sandwich(rho))
            .collect::<Result<_, _>>()?;
        // Fixed summation order keeps results bitwise reproducible.
        let mut iter = terms.into_iter();
        let mut out = iter.next().unwrap_or_else(|| DenseOperator::zeros(rho.n_qubits()));
        for t in iter {
            out.add_assign(&t);
        }
        Ok(out)
    }

    fn relabeled(&self, map: &[usize]) -> LocalChannel {
        let sites: Vec<usize> = self.sites.iter().map(|&s| map[s]).collect();
        let kraus = self
            .kraus
            .iter()
            .map(|k| LocalOperator::new(sites.clone(), k.matrix().to_vec()).expect("same shape"))
            .collect();
        LocalChannel { sites, kraus }
    }
}

/// A composition of local steps applied in list order.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    n_qubits: usize,
    label: String,
    steps: Vec<LocalChannel>,
    cptp: bool,
}

/// Completeness tolerance for the CPTP flag.
const CPTP_TOL: f64 = 1e-10;

impl KrausChannel {
    pub fn new(n_qubits: usize, label: impl Into<String>, steps: Vec<LocalChannel>) -> Result<Self, DenseError> {
        for step in &steps {
            if let Some(&s) = step.sites.iter().find(|&&s| s >= n_qubits) {
                return Err(DenseError::SiteOutOfRange { site: s, n: n_qubits });
            }
        }
        let cptp = steps.iter().all(|s| s.completeness_defect() < CPTP_TOL);
        Ok(KrausChannel { n_qubits, label: label.into(), steps, cptp })
    }

    pub fn identity(n_qubits: usize) -> Self {
        KrausChannel { n_qubits, label: "identity".into(), steps: Vec::new(), cptp: true }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn steps(&self) -> &[LocalChannel] {
        &self.steps
    }

    pub fn is_cptp(&self) -> bool {
        self.cptp
    }

    pub fn completeness_defect(&self) -> f64 {
        self.steps.iter().map(LocalChannel::completeness_defect).fold(0.0, f64::max)
    }

    /// `other ∘ self`
    pub fn then(&self, other: &KrausChannel) -> Result<KrausChannel, DenseError> {
        if other.n_qubits != self.n_qubits {
            return Err(DenseError::QubitCount { expected: self.n_qubits, found: other.n_qubits });
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Ok(KrausChannel {
            n_qubits: self.n_qubits,
            label: format!("{}; {}", self.label, other.label),
            steps,
            cptp: self.cptp && other.cptp,
        })
    }

    /// `self` applied `depth` times.
    pub fn power(&self, depth: usize) -> KrausChannel {
        let mut steps = Vec::with_capacity(self.steps.len() * depth);
        for _ in 0..depth {
            steps.extend(self.steps.iter().cloned());
        }
        KrausChannel { n_qubits: self.n_qubits, label: format!("({})^{depth}", self.label), steps, cptp: self.cptp }
    }

    /// Same channel on a larger register with site `j` moved to `map[j]`.
    pub fn relabeled(&self, n_qubits: usize, map: &[usize]) -> Result<KrausChannel, DenseError> {
        if map.len() != self.n_qubits {
            return Err(DenseError::QubitCount { expected: self.n_qubits, found: map.len() });
        }
        let steps = self.steps.iter().map(|s| s.relabeled(map)).collect();
        KrausChannel::new(n_qubits, self.label.clone(), steps)
    }

    pub fn apply(&self, rho: &DenseOperator) -> Result<DenseOperator, DenseError> {
        if rho.n_qubits() != self.n_qubits {
            return Err(DenseError::QubitCount { expected: self.n_qubits, found: rho.n_qubits() });
        }
        let mut out = rho.clone();
        for step in &self.steps {
            out = step.apply(&out)?;
        }
        Ok(out)
    }

    /// Largest `|K U − U K|` over all local Kraus operators, each embedded in the
    /// full register.
    pub fn symmetry_commutator(&self, u: &DenseOperator) -> Result<f64, DenseError> {
        let mut worst: f64 = 0.0;
        for step in &self.steps {
            for k in step.kraus() {
                let full = k.embed(self.n_qubits)?;
                let comm = full.matmul(u).sub(&u.matmul(&full));
                worst = worst.max(comm.max_abs());
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Rescale to unit trace and Hermitize after each step (needed when the map
    /// does not preserve trace).
    pub renormalize: bool,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions { tol: 1e-10, max_iter: 1_000_000, renormalize: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub state: DenseOperator,
    pub iterations: usize,
    /// Trace-norm distance between the last two iterates (or an upper bound on it).
    pub residual: f64,
    pub converged: bool,
}

/// `‖m‖₁` for a Hermitian `m`.
fn trace_norm(m: &DenseOperator) -> Result<f64, DenseError> {
    Ok(m.hermitian_part().hermitian_eigenvalues()?.iter().map(|v| v.abs()).sum())
}

/// Repeats the channel until successive iterates differ by less than `tol` in
/// trace norm. Each step checks the cheap bound `‖Δ‖₁ ≤ √D ‖Δ‖_F`; the exact
/// trace norm is computed only at iterations 1, 2, 4, 8, ...
pub fn iterate_to_fixed_point(
    channel: &KrausChannel,
    rho0: &DenseOperator,
    opts: FixedPointOptions,
) -> Result<FixedPoint, DenseError> {
    let renormalize = opts.renormalize || !channel.is_cptp();
    let sqrt_dim = (rho0.dim() as f64).sqrt();
    let mut rho = rho0.clone();
    let mut residual = f64::INFINITY;
    let mut checkpoint = 1;
    for it in 1..=opts.max_iter {
        let mut next = channel.apply(&rho)?;
        if renormalize {
            let tr = next.trace().re;
            if tr.abs() < 1e-300 {
                return Err(DenseError::ZeroNorm);
            }
            next = next.hermitian_part().scale(C64::new(1.0 / tr, 0.0));
        }
        let delta = next.sub(&rho);
        let frob = delta.frobenius();
        rho = next;
        residual = sqrt_dim * frob;
        if it == checkpoint {
            checkpoint *= 2;
            if frob < opts.tol && residual >= opts.tol {
                residual = trace_norm(&delta)?;
            }
        }
        if residual < opts.tol {
            return Ok(FixedPoint { state: rho, iterations: it, residual, converged: true });
        }
    }
    Ok(FixedPoint { state: rho, iterations: opts.max_iter, residual, converged: false })
}
