//! Dense `2ⁿ × 2ⁿ` operators, state vectors, and local (few-site) application.
//!
//! Qubit `q` of an `n`-qubit register is bit `n − 1 − q` of the basis index,
//! so qubit 0 is the leftmost tensor factor.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::pauli::{CliffordGate, ControlBasis, PauliOperator};

use super::DenseError;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
pub(crate) fn bit_of(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// Offsets of the `2^k` local configurations of `sites` inside an `n`-qubit index,
/// with `sites[0]` the most significant local bit.
pub(crate) fn local_offsets(n_qubits: usize, sites: &[usize]) -> Vec<usize> {
    let k = sites.len();
    (0..1usize << k)
        .map(|l| {
            sites
                .iter()
                .enumerate()
                .filter(|(j, _)| l >> (k - 1 - j) & 1 == 1)
                .map(|(_, &s)| bit_of(n_qubits, s))
                .sum()
        })
        .collect()
}

/// Base indices (all listed site bits clear).
pub(crate) fn base_indices(n_qubits: usize, sites: &[usize]) -> Vec<usize> {
    let mask: usize = sites.iter().map(|&s| bit_of(n_qubits, s)).sum();
    (0..1usize << n_qubits).filter(|r| r & mask == 0).collect()
}

/// A small matrix acting on `sites` of a larger register.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    sites: Vec<usize>,
    matrix: Vec<C64>,
}

impl LocalOperator {
    pub fn new(sites: Vec<usize>, matrix: Vec<C64>) -> Result<Self, DenseError> {
        let d = 1usize << sites.len();
        if matrix.len() != d * d {
            return Err(DenseError::Shape { expected: d * d, found: matrix.len() });
        }
        let mut seen = sites.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != sites.len() {
            return Err(DenseError::RepeatedSite);
        }
        Ok(LocalOperator { sites, matrix })
    }

    pub fn from_dense(sites: Vec<usize>, op: &DenseOperator) -> Result<Self, DenseError> {
        if op.n_qubits() != sites.len() {
            return Err(DenseError::QubitCount { expected: sites.len(), found: op.n_qubits() });
        }
        Self::new(sites, op.data().to_vec())
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn matrix(&self) -> &[C64] {
        &self.matrix
    }

    pub fn local_dim(&self) -> usize {
        1 << self.sites.len()
    }

    pub fn as_dense(&self) -> DenseOperator {
        DenseOperator { n_qubits: self.sites.len(), data: self.matrix.clone() }
    }

    pub fn adjoint(&self) -> LocalOperator {
        LocalOperator { sites: self.sites.clone(), matrix: self.as_dense().adjoint().data }
    }

    fn check_range(&self, n_qubits: usize) -> Result<(), DenseError> {
        match self.sites.iter().find(|&&s| s >= n_qubits) {
            Some(&s) => Err(DenseError::SiteOutOfRange { site: s, n: n_qubits }),
            None => Ok(()),
        }
    }

    /// `K · M` where `M` has `2ⁿ` rows and `cols` columns, stored row-major.
    pub fn apply_rows(&self, n_qubits: usize, data: &[C64], cols: usize) -> Result<Vec<C64>, DenseError> {
        self.check_range(n_qubits)?;
        let d = self.local_dim();
        let offsets = local_offsets(n_qubits, &self.sites);
        let mut out = vec![ZERO; data.len()];
        let mut gathered = vec![ZERO; d];
        for r0 in base_indices(n_qubits, &self.sites) {
            for c in 0..cols {
                for (l, &off) in offsets.iter().enumerate() {
                    gathered[l] = data[(r0 + off) * cols + c];
                }
                for (lp, &off) in offsets.iter().enumerate() {
                    let row = &self.matrix[lp * d..(lp + 1) * d];
                    let mut acc = ZERO;
                    for l in 0..d {
                        acc += row[l] * gathered[l];
                    }
                    out[(r0 + off) * cols + c] = acc;
                }
            }
        }
        Ok(out)
    }

    /// `M · K†` where `M` is `rows × 2ⁿ`, stored row-major.
    pub fn apply_cols_adjoint(&self, n_qubits: usize, data: &[C64], rows: usize) -> Result<Vec<C64>, DenseError> {
        self.check_range(n_qubits)?;
        let d = self.local_dim();
        let dim = 1usize << n_qubits;
        let offsets = local_offsets(n_qubits, &self.sites);
        let bases = base_indices(n_qubits, &self.sites);
        let mut out = vec![ZERO; data.len()];
        let mut gathered = vec![ZERO; d];
        for r in 0..rows {
            let row_in = &data[r * dim..(r + 1) * dim];
            let row_out = &mut out[r * dim..(r + 1) * dim];
            for &c0 in &bases {
                for (l, &off) in offsets.iter().enumerate() {
                    gathered[l] = row_in[c0 + off];
                }
                for (lp, &off) in offsets.iter().enumerate() {
                    let krow = &self.matrix[lp * d..(lp + 1) * d];
                    let mut acc = ZERO;
                    for l in 0..d {
                        acc += gathered[l] * krow[l].conj();
                    }
                    row_out[c0 + off] = acc;
                }
            }
        }
        Ok(out)
    }

    /// `K ρ K†` on a full density operator.
    pub fn sandwich(&self, rho: &DenseOperator) -> Result<DenseOperator, DenseError> {
        let n = rho.n_qubits();
        let dim = rho.dim();
        let left = self.apply_rows(n, &rho.data, dim)?;
        let data = self.apply_cols_adjoint(n, &left, dim)?;
        Ok(DenseOperator { n_qubits: n, data })
    }

    /// Embedding into the full `n`-qubit space.
    pub fn embed(&self, n_qubits: usize) -> Result<DenseOperator, DenseError> {
        let eye = DenseOperator::identity(n_qubits);
        let data = self.apply_rows(n_qubits, &eye.data, eye.dim())?;
        Ok(DenseOperator { n_qubits, data })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n_qubits: usize,
    data: Vec<C64>,
}

impl DenseOperator {
    pub fn zeros(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        DenseOperator { n_qubits, data: vec![ZERO; d * d] }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let mut m = Self::zeros(n_qubits);
        for i in 0..m.dim() {
            m.set(i, i, ONE);
        }
        m
    }

    pub fn from_data(n_qubits: usize, data: Vec<C64>) -> Result<Self, DenseError> {
        let d = 1usize << n_qubits;
        if data.len() != d * d {
            return Err(DenseError::Shape { expected: d * d, found: data.len() });
        }
        Ok(DenseOperator { n_qubits, data })
    }

    pub fn from_fn(n_qubits: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let d = 1usize << n_qubits;
        let data = (0..d * d).map(|k| f(k / d, k % d)).collect();
        DenseOperator { n_qubits, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, DenseError> {
        let d = rows.len();
        let n = d.trailing_zeros() as usize;
        if 1 << n != d || rows.iter().any(|r| r.len() != d) {
            return Err(DenseError::Shape { expected: d * d, found: rows.iter().map(|r| r.len()).sum() });
        }
        Ok(Self::from_fn(n, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn from_pauli(p: &PauliOperator) -> Self {
        let n = p.n_qubits();
        let mut xmask = 0usize;
        let mut zmask = 0usize;
        for q in 0..n {
            if p.x_bits()[q] {
                xmask |= bit_of(n, q);
            }
            if p.z_bits()[q] {
                zmask |= bit_of(n, q);
            }
        }
        // Y = iXZ on each site carrying both bits.
        let y_count = (xmask & zmask).count_ones() as i64;
        let base = crate::pauli::Phase::from_power(p.phase().power() as i64 + y_count).to_complex();
        let mut m = Self::zeros(n);
        for b in 0..m.dim() {
            let sign = if (zmask & b).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            m.set(b ^ xmask, b, base * sign);
        }
        m
    }

    pub fn from_clifford(gate: &CliffordGate, n_qubits: usize) -> Self {
        match gate {
            CliffordGate::Hadamard(s) => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let local = LocalOperator::new(
                    vec![*s],
                    vec![C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)],
                )
                .expect("2x2");
                local.embed(n_qubits).expect("site in range")
            }
            CliffordGate::ControlledPauli { control, basis, target } => {
                let letter = match basis {
                    ControlBasis::Z => crate::pauli::Pauli::Z,
                    ControlBasis::X => crate::pauli::Pauli::X,
                };
                let c = Self::from_pauli(&PauliOperator::single(n_qubits, *control, letter).expect("in range"));
                let p = Self::from_pauli(target);
                let eye = Self::identity(n_qubits);
                let p0 = eye.add(&c).scale(C64::new(0.5, 0.0));
                let p1 = eye.sub(&c).scale(C64::new(0.5, 0.0));
                p0.add(&p1.matmul(&p))
            }
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        let d = self.dim();
        self.data[i * d + j] = v;
    }

    pub fn to_faer(&self) -> Mat<C64> {
        let d = self.dim();
        Mat::from_fn(d, d, |i, j| self.data[i * d + j])
    }

    pub fn from_faer(n_qubits: usize, m: &Mat<C64>) -> Self {
        Self::from_fn(n_qubits, |i, j| m[(i, j)])
    }

    pub fn matmul(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n_qubits, other.n_qubits, "matmul size mismatch");
        if self.dim() <= 16 {
            let d = self.dim();
            let mut out = Self::zeros(self.n_qubits);
            for i in 0..d {
                for k in 0..d {
                    let a = self.data[i * d + k];
                    if a == ZERO {
                        continue;
                    }
                    for j in 0..d {
                        out.data[i * d + j] += a * other.data[k * d + j];
                    }
                }
            }
            return out;
        }
        let prod = &self.to_faer() * &other.to_faer();
        Self::from_faer(self.n_qubits, &prod)
    }

    pub fn adjoint(&self) -> DenseOperator {
        let d = self.dim();
        Self::from_fn(self.n_qubits, |i, j| self.data[j * d + i].conj())
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        DenseOperator { n_qubits: self.n_qubits, data }
    }

    pub fn sub(&self, other: &DenseOperator) -> DenseOperator {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        DenseOperator { n_qubits: self.n_qubits, data }
    }

    pub fn scale(&self, s: C64) -> DenseOperator {
        DenseOperator { n_qubits: self.n_qubits, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn add_assign(&mut self, other: &DenseOperator) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(M + M†)/2`
    pub fn hermitian_part(&self) -> DenseOperator {
        self.add(&self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        let db = other.dim();
        let n = self.n_qubits + other.n_qubits;
        Self::from_fn(n, |i, j| self.get(i / db, j / db) * other.get(i % db, j % db))
    }

    /// `Tr(M O)`
    pub fn trace_with(&self, o: &DenseOperator) -> C64 {
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for k in 0..d {
                acc += self.data[i * d + k] * o.data[k * d + i];
            }
        }
        acc
    }

    /// Expectation of a Pauli string without forming its matrix.
    pub fn trace_with_pauli(&self, p: &PauliOperator) -> C64 {
        let n = self.n_qubits;
        let (mut xmask, mut zmask) = (0usize, 0usize);
        for q in 0..n {
            if p.x_bits()[q] {
                xmask |= bit_of(n, q);
            }
            if p.z_bits()[q] {
                zmask |= bit_of(n, q);
            }
        }
        let y_count = (xmask & zmask).count_ones() as i64;
        let base = crate::pauli::Phase::from_power(p.phase().power() as i64 + y_count).to_complex();
        // P|b> = base (-1)^{z.b} |b ^ x>, so Tr(M P) = sum_b M[b, b^x] base (-1)^{z.b}
        let mut acc = ZERO;
        for b in 0..self.dim() {
            let sign = if (zmask & b).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += self.get(b, b ^ xmask) * sign;
        }
        acc * base
    }

    /// `U M U†` for a full-register unitary.
    pub fn conjugate_by(&self, u: &DenseOperator) -> DenseOperator {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Partial trace keeping `keep` (in the given order).
    pub fn partial_trace_keep(&self, keep: &[usize]) -> Result<DenseOperator, DenseError> {
        let n = self.n_qubits;
        for &s in keep {
            if s >= n {
                return Err(DenseError::SiteOutOfRange { site: s, n });
            }
        }
        let traced: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
        let keep_off = local_offsets(n, keep);
        let trace_off = local_offsets(n, &traced);
        let k = keep.len();
        let dk = 1usize << k;
        let d = self.dim();
        let mut out = DenseOperator::zeros(k);
        for a in 0..dk {
            for b in 0..dk {
                let mut acc = ZERO;
                for &t in &trace_off {
                    acc += self.data[(keep_off[a] + t) * d + keep_off[b] + t];
                }
                out.data[a * dk + b] = acc;
            }
        }
        Ok(out)
    }

    /// Hermitian eigenvalues ascending (the matrix is Hermitized first).
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>, DenseError> {
        let h = self.hermitian_part().to_faer();
        h.self_adjoint_eigenvalues(faer::Side::Lower).map_err(|_| DenseError::Eigen)
    }

    /// Hermitian eigendecomposition `(values ascending, column eigenvectors)`.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, Mat<C64>), DenseError> {
        let h = self.hermitian_part().to_faer();
        let e = h.self_adjoint_eigen(faer::Side::Lower).map_err(|_| DenseError::Eigen)?;
        let vals = (0..self.dim()).map(|i| e.S()[i].re).collect();
        Ok((vals, e.U().to_owned()))
    }

    /// `f` applied to the eigenvalues of the Hermitian part.
    pub fn hermitian_function(&self, f: impl Fn(f64) -> f64) -> Result<DenseOperator, DenseError> {
        let (vals, u) = self.hermitian_eigen()?;
        let d = self.dim();
        let mut scaled = u.clone();
        for j in 0..d {
            let fj = f(vals[j]);
            for i in 0..d {
                scaled[(i, j)] *= fj;
            }
        }
        let m = &scaled * u.adjoint();
        Ok(Self::from_faer(self.n_qubits, &m))
    }
}

/// Pure state amplitudes in the same qubit ordering as [`DenseOperator`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        StateVector { n_qubits, amps }
    }

    pub fn zeros_state(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn plus_state(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        StateVector { n_qubits, amps: vec![a; d] }
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self, DenseError> {
        if amps.len() != 1 << n_qubits {
            return Err(DenseError::Shape { expected: 1 << n_qubits, found: amps.len() });
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Product of single-qubit states.
    pub fn product(factors: &[[C64; 2]]) -> Self {
        let n = factors.len();
        let amps = (0..1usize << n)
            .map(|b| (0..n).map(|q| factors[q][(b >> (n - 1 - q)) & 1]).product())
            .collect();
        StateVector { n_qubits: n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self, DenseError> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(DenseError::ZeroNorm);
        }
        Ok(StateVector { n_qubits: self.n_qubits, amps: self.amps.iter().map(|a| a / n).collect() })
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn apply_local(&self, op: &LocalOperator) -> Result<Self, DenseError> {
        let amps = op.apply_rows(self.n_qubits, &self.amps, 1)?;
        Ok(StateVector { n_qubits: self.n_qubits, amps })
    }

    pub fn apply_pauli(&self, p: &PauliOperator) -> StateVector {
        let n = self.n_qubits;
        let (mut xmask, mut zmask) = (0usize, 0usize);
        for q in 0..n {
            if p.x_bits()[q] {
                xmask |= bit_of(n, q);
            }
            if p.z_bits()[q] {
                zmask |= bit_of(n, q);
            }
        }
        let y_count = (xmask & zmask).count_ones() as i64;
        let base = crate::pauli::Phase::from_power(p.phase().power() as i64 + y_count).to_complex();
        let mut amps = vec![ZERO; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let sign = if (zmask & b).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            amps[b ^ xmask] = a * base * sign;
        }
        StateVector { n_qubits: n, amps }
    }

    /// `(1 + P)/2 |ψ⟩` without normalization.
    pub fn project_plus(&self, p: &PauliOperator) -> StateVector {
        let flipped = self.apply_pauli(p);
        let amps = self.amps.iter().zip(&flipped.amps).map(|(a, b)| (a + b) * 0.5).collect();
        StateVector { n_qubits: self.n_qubits, amps }
    }

    pub fn density(&self) -> DenseOperator {
        DenseOperator::from_fn(self.n_qubits, |i, j| self.amps[i] * self.amps[j].conj())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn local_application_matches_embedded_matmul() {
        let k = LocalOperator::new(
            vec![2, 0],
            (0..16).map(|i| C64::new(i as f64 * 0.1, (i % 3) as f64 * 0.2)).collect(),
        )
        .unwrap();
        let full = k.embed(3).unwrap();
        let rho = DenseOperator::from_fn(3, |i, j| C64::new((i * 3 + j) as f64, i as f64 - j as f64));
        let direct = full.matmul(&rho).matmul(&full.adjoint());
        let local = k.sandwich(&rho).unwrap();
        assert!(direct.sub(&local).max_abs() < 1e-10);
    }

    #[test]
    fn embed_orders_sites_as_given() {
        // X on the first listed site only.
        let x = LocalOperator::new(
            vec![1, 0],
            DenseOperator::from_pauli(&"XI".parse().unwrap()).into_data(),
        )
        .unwrap();
        let full = x.embed(2).unwrap();
        assert_eq!(full, DenseOperator::from_pauli(&"IX".parse().unwrap()));
    }

    #[test]
    fn partial_trace_of_product() {
        let a = DenseOperator::from_real_rows(&[&[0.75, 0.25], &[0.25, 0.25]]).unwrap();
        let b = DenseOperator::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.5]]).unwrap();
        let ab = a.kron(&b);
        assert!(ab.partial_trace_keep(&[0]).unwrap().sub(&a).max_abs() < 1e-15);
        assert!(ab.partial_trace_keep(&[1]).unwrap().sub(&b).max_abs() < 1e-15);
        assert!(ab.partial_trace_keep(&[1, 0]).unwrap().sub(&b.kron(&a)).max_abs() < 1e-15);
    }

    #[test]
    fn pauli_expectation_shortcut() {
        let rho = DenseOperator::from_fn(2, |i, j| C64::new((i + 2 * j) as f64, (i as f64) - (j as f64)));
        for s in ["XY", "-ZI", "YY", "IX", "+iZX"] {
            let p: PauliOperator = s.parse().unwrap();
            let direct = rho.trace_with(&DenseOperator::from_pauli(&p));
            assert!((direct - rho.trace_with_pauli(&p)).norm() < 1e-12, "{s}");
        }
    }

    #[test]
    fn product_state_and_projection() {
        let zero = [c(1.0), c(0.0)];
        let psi = StateVector::product(&[zero, zero, zero]);
        let all_x: PauliOperator = "XXX".parse().unwrap();
        let ghz = psi.project_plus(&all_x).normalized().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ghz.amplitudes()[0] - c(h)).norm() < 1e-15);
        assert!((ghz.amplitudes()[7] - c(h)).norm() < 1e-15);
    }

    #[test]
    fn hermitian_function_square_root() {
        let a = DenseOperator::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let r = a.hermitian_function(f64::sqrt).unwrap();
        assert!(r.matmul(&r).sub(&a).max_abs() < 1e-12);
    }
}
