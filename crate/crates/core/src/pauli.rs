//! Binary-symplectic Pauli algebra, stabilizer groups, and Clifford conjugation.
//!
//! A Pauli string is stored as two bit vectors plus a power of `i`. Each site
//! carries one of `I, X, Y, Z` with `Y` encoded as `(x, z) = (1, 1)`, and the
//! single-site product rule is fixed by `X·Z = −iY`.

use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use thiserror::Error;

use crate::gf2;
use crate::partition::Partition;

pub type Bits = BitVec<u64, Lsb0>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("cannot parse Pauli string {0:?}")]
    Parse(String),
    #[error("generator {0} carries an imaginary phase")]
    NonHermitianGenerator(usize),
    #[error("generators {0} and {1} anticommute")]
    Anticommuting(usize, usize),
    #[error("generators are dependent: rank {rank} < {count}")]
    Dependent { rank: usize, count: usize },
    #[error("controlled gate target acts on its own control site {0}")]
    TargetOnControl(usize),
}

/// Global phase `i^k` with `k` taken mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        use num_complex::Complex64 as C;
        match self.0 {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, 1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, -1.0),
        }
    }
}

/// Single-site Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Exponent of `i` picked up when multiplying single-site letters `a·b`.
fn product_exponent(x1: bool, z1: bool, x2: bool, z2: bool) -> i64 {
    let (x2, z2) = (x2 as i64, z2 as i64);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    x_bits: Bits,
    z_bits: Bits,
    phase: Phase,
}

impl PauliOperator {
    pub fn identity(n_qubits: usize) -> Self {
        PauliOperator {
            x_bits: bitvec![u64, Lsb0; 0; n_qubits],
            z_bits: bitvec![u64, Lsb0; 0; n_qubits],
            phase: Phase::ONE,
        }
    }

    pub fn from_bits(x_bits: Bits, z_bits: Bits, phase: Phase) -> Result<Self, PauliError> {
        if x_bits.len() != z_bits.len() {
            return Err(PauliError::SizeMismatch { left: x_bits.len(), right: z_bits.len() });
        }
        Ok(PauliOperator { x_bits, z_bits, phase })
    }

    /// Product of one letter on each listed site, phase +1.
    pub fn on_sites(n_qubits: usize, letter: Pauli, sites: &[usize]) -> Result<Self, PauliError> {
        let mut p = Self::identity(n_qubits);
        for &s in sites {
            if s >= n_qubits {
                return Err(PauliError::SiteOutOfRange { site: s, n: n_qubits });
            }
            let (x, z) = letter.bits();
            let (ox, oz) = (p.x_bits[s], p.z_bits[s]);
            p.x_bits.set(s, ox ^ x);
            p.z_bits.set(s, oz ^ z);
        }
        Ok(p)
    }

    pub fn x_on(n_qubits: usize, sites: &[usize]) -> Result<Self, PauliError> {
        Self::on_sites(n_qubits, Pauli::X, sites)
    }

    pub fn z_on(n_qubits: usize, sites: &[usize]) -> Result<Self, PauliError> {
        Self::on_sites(n_qubits, Pauli::Z, sites)
    }

    pub fn single(n_qubits: usize, site: usize, letter: Pauli) -> Result<Self, PauliError> {
        Self::on_sites(n_qubits, letter, &[site])
    }

    pub fn n_qubits(&self) -> usize {
        self.x_bits.len()
    }

    pub fn x_bits(&self) -> &Bits {
        &self.x_bits
    }

    pub fn z_bits(&self) -> &Bits {
        &self.z_bits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn letter(&self, site: usize) -> Pauli {
        Pauli::from_bits(self.x_bits[site], self.z_bits[site])
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn is_identity(&self) -> bool {
        self.x_bits.not_any() && self.z_bits.not_any()
    }

    pub fn weight(&self) -> usize {
        (self.x_bits.clone() | self.z_bits.as_bitslice()).count_ones()
    }

    /// Sites carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (self.x_bits.clone() | self.z_bits.as_bitslice()).iter_ones().collect()
    }

    /// True when every non-identity letter is `X`.
    pub fn is_x_type(&self) -> bool {
        self.z_bits.not_any()
    }

    pub fn is_z_type(&self) -> bool {
        self.x_bits.not_any()
    }

    fn check_size(&self, other: &PauliOperator) -> Result<(), PauliError> {
        if self.n_qubits() != other.n_qubits() {
            return Err(PauliError::SizeMismatch { left: self.n_qubits(), right: other.n_qubits() });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator, PauliError> {
        self.check_size(other)?;
        let mut k = self.phase.power() as i64 + other.phase.power() as i64;
        for s in 0..self.n_qubits() {
            k += product_exponent(self.x_bits[s], self.z_bits[s], other.x_bits[s], other.z_bits[s]);
        }
        let mut x_bits = self.x_bits.clone();
        x_bits ^= other.x_bits.as_bitslice();
        let mut z_bits = self.z_bits.clone();
        z_bits ^= other.z_bits.as_bitslice();
        Ok(PauliOperator { x_bits, z_bits, phase: Phase::from_power(k) })
    }

    pub fn commutes(&self, other: &PauliOperator) -> Result<bool, PauliError> {
        self.check_size(other)?;
        let a = (self.x_bits.clone() & other.z_bits.as_bitslice()).count_ones();
        let b = (self.z_bits.clone() & other.x_bits.as_bitslice()).count_ones();
        Ok((a + b).is_multiple_of(2))
    }

    /// Restriction to a set of sites; phase is kept, letters elsewhere dropped.
    pub fn restricted_to(&self, sites: &[usize]) -> PauliOperator {
        let mut p = Self::identity(self.n_qubits());
        for &s in sites {
            p.x_bits.set(s, self.x_bits[s]);
            p.z_bits.set(s, self.z_bits[s]);
        }
        p.phase = self.phase;
        p
    }

    /// Embed into a larger register, placing site `j` at `map[j]`.
    pub fn embed(&self, n_qubits: usize, map: &[usize]) -> Result<PauliOperator, PauliError> {
        if map.len() != self.n_qubits() {
            return Err(PauliError::SizeMismatch { left: map.len(), right: self.n_qubits() });
        }
        let mut p = Self::identity(n_qubits);
        for (j, &t) in map.iter().enumerate() {
            if t >= n_qubits {
                return Err(PauliError::SiteOutOfRange { site: t, n: n_qubits });
            }
            p.x_bits.set(t, self.x_bits[j]);
            p.z_bits.set(t, self.z_bits[j]);
        }
        p.phase = self.phase;
        Ok(p)
    }

    /// Symplectic row `(x | z)` used for GF(2) elimination.
    pub fn symplectic_row(&self) -> Bits {
        let mut row = self.x_bits.clone();
        row.extend_from_bitslice(&self.z_bits);
        row
    }

    /// Letters only, no sign.
    pub fn letters(&self) -> String {
        (0..self.n_qubits()).map(|s| self.letter(s).letter()).collect()
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase.power() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{sign}{}", self.letters())
    }
}

impl FromStr for PauliOperator {
    type Err = PauliError;

    /// Accepts an optional sign prefix (`+`, `-`, `+i`, `-i`, `i`) then letters.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (phase, body) = if let Some(r) = t.strip_prefix("+i") {
            (Phase::I, r)
        } else if let Some(r) = t.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (Phase::ONE, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (Phase::I, r)
        } else {
            (Phase::ONE, t)
        };
        let mut p = PauliOperator::identity(body.chars().count());
        for (site, c) in body.chars().enumerate() {
            let letter = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(PauliError::Parse(s.to_string())),
            };
            let (x, z) = letter.bits();
            p.x_bits.set(site, x);
            p.z_bits.set(site, z);
        }
        p.phase = phase;
        Ok(p)
    }
}

/// Which basis the control qubit of a controlled Pauli is read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ControlBasis {
    /// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ P`
    Z,
    /// `|+⟩⟨+| ⊗ I + |−⟩⟨−| ⊗ P`
    X,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliffordGate {
    Hadamard(usize),
    ControlledPauli { control: usize, basis: ControlBasis, target: PauliOperator },
}

impl CliffordGate {
    pub fn controlled(
        control: usize,
        basis: ControlBasis,
        target: PauliOperator,
    ) -> Result<Self, PauliError> {
        if control >= target.n_qubits() {
            return Err(PauliError::SiteOutOfRange { site: control, n: target.n_qubits() });
        }
        if target.letter(control) != Pauli::I {
            return Err(PauliError::TargetOnControl(control));
        }
        if !target.is_hermitian() {
            return Err(PauliError::NonHermitianGenerator(0));
        }
        Ok(CliffordGate::ControlledPauli { control, basis, target })
    }

    /// Sites touched by the gate.
    pub fn sites(&self) -> Vec<usize> {
        match self {
            CliffordGate::Hadamard(s) => vec![*s],
            CliffordGate::ControlledPauli { control, target, .. } => {
                let mut v = vec![*control];
                v.extend(target.support());
                v
            }
        }
    }

    /// `U p U†` as a Pauli with tracked phase.
    pub fn conjugate(&self, p: &PauliOperator) -> Result<PauliOperator, PauliError> {
        match self {
            CliffordGate::Hadamard(s) => {
                if *s >= p.n_qubits() {
                    return Err(PauliError::SiteOutOfRange { site: *s, n: p.n_qubits() });
                }
                let mut out = p.clone();
                let (x, z) = (p.x_bits[*s], p.z_bits[*s]);
                out.x_bits.set(*s, z);
                out.z_bits.set(*s, x);
                if x && z {
                    out.phase = out.phase.mul(Phase::MINUS_ONE);
                }
                Ok(out)
            }
            CliffordGate::ControlledPauli { control, basis, target } => {
                p.check_size(target)?;
                let c = *control;
                let n = p.n_qubits();
                // Letter on the control commuting with the projectors is untouched;
                // the other one picks up the target.
                let (flip_letter, keep_letter) = match basis {
                    ControlBasis::Z => (Pauli::X, Pauli::Z),
                    ControlBasis::X => (Pauli::Z, Pauli::X),
                };
                let on_control = p.restricted_to(&[c]);
                let rest_sites: Vec<usize> = (0..n).filter(|&s| s != c).collect();
                let rest = p.restricted_to(&rest_sites).with_phase(Phase::ONE);
                let control_image = match on_control.letter(c) {
                    Pauli::I => on_control.clone(),
                    l if l == keep_letter => on_control.clone(),
                    l if l == flip_letter => on_control.multiply(target)?,
                    // Y = i X Z; exactly one factor picks up the target, which
                    // commutes with the control letter, so Y -> Y·P.
                    _ => on_control.multiply(target)?,
                };
                let rest_image = if rest.commutes(target)? {
                    rest
                } else {
                    PauliOperator::single(n, c, keep_letter)?.multiply(&rest)?
                };
                control_image.multiply(&rest_image)
            }
        }
    }
}

/// Apply a sequence of gates in order: returns `U_k ⋯ U_1 p U_1† ⋯ U_k†`.
pub fn conjugate_all<'a>(
    gates: impl IntoIterator<Item = &'a CliffordGate>,
    p: &PauliOperator,
) -> Result<PauliOperator, PauliError> {
    let mut out = p.clone();
    for g in gates {
        out = g.conjugate(&out)?;
    }
    Ok(out)
}

/// GF(2) rank of the symplectic matrix of `generators`.
pub fn group_rank(generators: &[PauliOperator]) -> Result<usize, PauliError> {
    if let Some(first) = generators.first() {
        for g in generators {
            first.check_size(g)?;
        }
    }
    Ok(gf2::rank(generators.iter().map(|g| g.symplectic_row()).collect()))
}

/// Independent, pairwise commuting, Hermitian generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerGroup {
    n_qubits: usize,
    generators: Vec<PauliOperator>,
}

impl StabilizerGroup {
    pub fn new(n_qubits: usize, generators: Vec<PauliOperator>) -> Result<Self, PauliError> {
        for (i, g) in generators.iter().enumerate() {
            if g.n_qubits() != n_qubits {
                return Err(PauliError::SizeMismatch { left: n_qubits, right: g.n_qubits() });
            }
            if !g.is_hermitian() {
                return Err(PauliError::NonHermitianGenerator(i));
            }
        }
        for i in 0..generators.len() {
            for j in (i + 1)..generators.len() {
                if !generators[i].commutes(&generators[j])? {
                    return Err(PauliError::Anticommuting(i, j));
                }
            }
        }
        let rank = group_rank(&generators)?;
        if rank != generators.len() {
            return Err(PauliError::Dependent { rank, count: generators.len() });
        }
        Ok(StabilizerGroup { n_qubits, generators })
    }

    /// Keep a maximal independent subset of commuting generators, in order.
    pub fn from_spanning(n_qubits: usize, candidates: Vec<PauliOperator>) -> Result<Self, PauliError> {
        let mut kept: Vec<PauliOperator> = Vec::new();
        for c in candidates {
            if c.is_identity() {
                continue;
            }
            let mut trial = kept.clone();
            trial.push(c.clone());
            if group_rank(&trial)? == trial.len() {
                kept.push(c);
            }
        }
        Self::new(n_qubits, kept)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Express `p` (up to sign) as a product of generators; returns the indices used.
    pub fn decompose(&self, p: &PauliOperator) -> Result<Option<Vec<usize>>, PauliError> {
        if p.n_qubits() != self.n_qubits {
            return Err(PauliError::SizeMismatch { left: self.n_qubits, right: p.n_qubits() });
        }
        let rows: Vec<Bits> = self.generators.iter().map(|g| g.symplectic_row()).collect();
        Ok(gf2::solve(&rows, &p.symplectic_row()))
    }

    /// Product of the listed generators, in index order.
    pub fn product_of(&self, indices: &[usize]) -> PauliOperator {
        let mut acc = PauliOperator::identity(self.n_qubits);
        for &i in indices {
            acc = acc.multiply(&self.generators[i]).expect("sizes checked at construction");
        }
        acc
    }

    /// Whether `p`, including its sign, is an element of the group.
    pub fn contains(&self, p: &PauliOperator) -> Result<bool, PauliError> {
        Ok(match self.decompose(p)? {
            Some(idx) => self.product_of(&idx).phase() == p.phase(),
            None => false,
        })
    }

    /// Letters match some group element, sign ignored.
    pub fn contains_up_to_sign(&self, p: &PauliOperator) -> Result<bool, PauliError> {
        Ok(self.decompose(p)?.is_some())
    }

    /// Dimension over GF(2) of the subgroup supported inside `region`.
    pub fn subgroup_rank_in(&self, region: &[usize]) -> usize {
        let mut inside = vec![false; self.n_qubits];
        for &s in region {
            inside[s] = true;
        }
        let outside: Vec<usize> = (0..self.n_qubits).filter(|&s| !inside[s]).collect();
        let rows: Vec<Bits> = self
            .generators
            .iter()
            .map(|g| {
                let mut row = Bits::with_capacity(2 * outside.len());
                for &s in &outside {
                    row.push(g.x_bits[s]);
                }
                for &s in &outside {
                    row.push(g.z_bits[s]);
                }
                row
            })
            .collect();
        self.generators.len() - gf2::rank(rows)
    }

    /// Line-oriented text form: sign character then one letter per qubit.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in &self.generators {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, PauliError> {
        let gens: Vec<PauliOperator> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                if !(l.starts_with('+') || l.starts_with('-')) {
                    return Err(PauliError::Parse(l.to_string()));
                }
                l.parse()
            })
            .collect::<Result<_, _>>()?;
        let n = gens.first().map(|g| g.n_qubits()).unwrap_or(0);
        Self::new(n, gens)
    }
}

/// `|A| − log₂|G_A|` in bits for `ρ ∝ ∏(1 + gᵢ)`.
pub fn stabilizer_entropy(group: &StabilizerGroup, region: &[usize]) -> f64 {
    let mut r: Vec<usize> = region.to_vec();
    r.sort_unstable();
    r.dedup();
    r.len() as f64 - group.subgroup_rank_in(&r) as f64
}

/// `S(AB) + S(BC) − S(B) − S(ABC)` from stabilizer counting.
pub fn stabilizer_cmi(group: &StabilizerGroup, partition: &Partition) -> f64 {
    let ab = partition.union_ab();
    let bc = partition.union_bc();
    let abc = partition.union_abc();
    stabilizer_entropy(group, &ab) + stabilizer_entropy(group, &bc)
        - stabilizer_entropy(group, partition.b())
        - stabilizer_entropy(group, &abc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseOperator;
    use num_complex::Complex64 as C64;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn close(a: &DenseOperator, b: &DenseOperator) -> bool {
        a.sub(b).max_abs() < 1e-12
    }

    #[test]
    fn xz_convention() {
        let prod = p("X").multiply(&p("Z")).unwrap();
        assert_eq!(prod, p("-iY"));
        assert_eq!(p("X").multiply(&p("X")).unwrap(), p("I"));
        assert_eq!(p("Z").multiply(&p("X")).unwrap(), p("+iY"));
    }

    #[test]
    fn two_site_product_matches_dense() {
        let a = p("XI");
        let b = p("ZZ");
        let prod = a.multiply(&b).unwrap();
        assert_eq!(prod.phase(), Phase::MINUS_I);
        assert_eq!(prod.letters(), "YZ");
        let dense = DenseOperator::from_pauli(&a).matmul(&DenseOperator::from_pauli(&b));
        assert!(close(&dense, &DenseOperator::from_pauli(&prod)));
    }

    #[test]
    fn size_mismatch_is_reported() {
        assert!(matches!(p("X").multiply(&p("XX")), Err(PauliError::SizeMismatch { .. })));
        assert!(p("X").commutes(&p("XX")).is_err());
    }

    #[test]
    fn commutation_basics() {
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("XX").commutes(&p("ZZ")).unwrap());
    }

    #[test]
    fn cnot_rule() {
        let g = CliffordGate::controlled(0, ControlBasis::Z, p("IX")).unwrap();
        assert_eq!(g.conjugate(&p("XI")).unwrap(), p("XX"));
        assert_eq!(g.conjugate(&p("IZ")).unwrap(), p("ZZ"));
        assert_eq!(g.conjugate(&p("ZI")).unwrap(), p("ZI"));
    }

    #[test]
    fn x_basis_controlled_z_matches_dense() {
        // ancilla = qubit 0, system = qubit 1
        let g = CliffordGate::controlled(0, ControlBasis::X, p("IZ")).unwrap();
        assert_eq!(g.conjugate(&p("XI")).unwrap(), p("XI"));
        assert_eq!(g.conjugate(&p("ZI")).unwrap(), p("ZZ"));
        let u = DenseOperator::from_clifford(&g, 2);
        for s in ["XI", "ZI", "YI", "IX", "IY", "IZ", "YX", "ZY", "XX"] {
            let q = p(s);
            let lhs = u.matmul(&DenseOperator::from_pauli(&q)).matmul(&u.adjoint());
            let rhs = DenseOperator::from_pauli(&g.conjugate(&q).unwrap());
            assert!(close(&lhs, &rhs), "{s}");
        }
    }

    #[test]
    fn hadamard_and_controlled_gates_match_dense_on_three_qubits() {
        let gates = [
            CliffordGate::Hadamard(1),
            CliffordGate::controlled(2, ControlBasis::Z, p("-XYI")).unwrap(),
            CliffordGate::controlled(0, ControlBasis::X, p("IZZ")).unwrap(),
        ];
        for g in &gates {
            let u = DenseOperator::from_clifford(g, 3);
            let eye = u.matmul(&u.adjoint());
            assert!(close(&eye, &DenseOperator::identity(3)));
            for a in ["I", "X", "Y", "Z"] {
                for b in ["I", "X", "Y", "Z"] {
                    for c in ["I", "X", "Y", "Z"] {
                        let q = p(&format!("{a}{b}{c}"));
                        let lhs = u.matmul(&DenseOperator::from_pauli(&q)).matmul(&u.adjoint());
                        let rhs = DenseOperator::from_pauli(&g.conjugate(&q).unwrap());
                        assert!(close(&lhs, &rhs), "{g:?} on {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn ranks() {
        assert_eq!(group_rank(&[p("X"), p("X")]).unwrap(), 1);
        assert_eq!(group_rank(&[p("X"), p("Z")]).unwrap(), 2);
    }

    #[test]
    fn dense_pauli_is_hermitian_unitary() {
        let q = p("-XYZ");
        let d = DenseOperator::from_pauli(&q);
        assert!(close(&d, &d.adjoint()));
        assert!(close(&d.matmul(&d), &DenseOperator::identity(3)));
        assert_eq!(d.get(0, 0), C64::new(0.0, 0.0));
    }

    #[test]
    fn text_round_trip() {
        let g = StabilizerGroup::new(4, vec![p("+XXXX"), p("-ZZII"), p("+IZZI")]).unwrap();
        let text = g.to_text();
        assert_eq!(text, "+XXXX\n-ZZII\n+IZZI\n");
        assert_eq!(StabilizerGroup::from_text(&text).unwrap(), g);
        assert!(StabilizerGroup::from_text("XX\n").is_err());
    }

    #[test]
    fn group_rejects_bad_generators() {
        assert!(matches!(
            StabilizerGroup::new(1, vec![p("X"), p("Z")]),
            Err(PauliError::Anticommuting(0, 1))
        ));
        assert!(matches!(
            StabilizerGroup::new(2, vec![p("XX"), p("XX")]),
            Err(PauliError::Dependent { .. })
        ));
        assert!(StabilizerGroup::new(1, vec![p("iX")]).is_err());
    }

    #[test]
    fn membership_tracks_sign() {
        let g = StabilizerGroup::new(3, vec![p("ZZI"), p("IZZ")]).unwrap();
        assert!(g.contains(&p("ZIZ")).unwrap());
        assert!(!g.contains(&p("-ZIZ")).unwrap());
        assert!(g.contains_up_to_sign(&p("-ZIZ")).unwrap());
        assert!(!g.contains_up_to_sign(&p("ZII")).unwrap());
    }

    #[test]
    fn ghz_like_entropies() {
        let all_x = PauliOperator::x_on(8, &(0..8).collect::<Vec<_>>()).unwrap();
        let g = StabilizerGroup::new(8, vec![all_x]).unwrap();
        assert_eq!(stabilizer_entropy(&g, &[0, 1, 2]), 3.0);
        assert_eq!(stabilizer_entropy(&g, &(0..8).collect::<Vec<_>>()), 7.0);
        let part = Partition::ring(8, 3, 1, 0).unwrap();
        assert_eq!(stabilizer_cmi(&g, &part), 1.0);
    }

    #[test]
    fn product_state_has_no_cmi() {
        let gens = (0..6).map(|s| PauliOperator::z_on(6, &[s]).unwrap()).collect();
        let g = StabilizerGroup::new(6, gens).unwrap();
        let part = Partition::ring(6, 2, 1, 0).unwrap();
        assert_eq!(stabilizer_cmi(&g, &part), 0.0);
    }
}
