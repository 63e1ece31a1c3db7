//! The sequential circuits of the 1d, 2d, subsystem and fermionic constructions.

use std::collections::BTreeMap;

use crate::pauli::{CliffordGate, ControlBasis, Pauli, PauliOperator, StabilizerGroup};

use super::circuit::{disjoint_groups, AncillaState, Axis, Deformation, SequentialCircuit, Slice};
use super::lattice::{Geometry, Lattice, Link, QubitKind, QubitLabel, Torus};
use super::{noise_to_deformation, HolographyError};

/// Where the time window of the 1d circuit starts and stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCut {
    /// Slices `0.5, 1, …, N`: each layer is X noise then ZZ noise.
    ZzLast,
    /// Slices `0, 0.5, …, N − 0.5`: each layer is ZZ noise then X noise.
    XLast,
}

/// Input state declared for the 1-form circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OneFormInput {
    /// `|+⟩` on every link; carries every `B_p = +1`.
    Plus,
    /// `|0⟩` on every link; no `B_p` eigenvalue.
    Zero,
}

/// Labels, ancilla preparations and deformations collected before gates are placed.
struct Draft {
    geometry: Geometry,
    labels: Vec<QubitLabel>,
    init: BTreeMap<usize, AncillaState>,
    deformations: BTreeMap<usize, Deformation>,
}

impl Draft {
    fn new(geometry: Geometry, system: Vec<QubitLabel>) -> Self {
        Draft { geometry, labels: system, init: BTreeMap::new(), deformations: BTreeMap::new() }
    }

    /// An ancilla read in `basis`, prepared so that its gate fires with probability `flip`.
    fn ancilla(&mut self, label: QubitLabel, basis: ControlBasis, flip: f64) -> Result<(), HolographyError> {
        let d = noise_to_deformation(flip)?;
        let id = self.labels.len();
        self.labels.push(label);
        let (state, axis) = match basis {
            ControlBasis::Z => (AncillaState::Plus, Axis::Z),
            ControlBasis::X => (AncillaState::Zero, Axis::X),
        };
        self.init.insert(id, state);
        if d.g != 0.0 {
            self.deformations.insert(id, Deformation { axis, g: d.g });
        }
        Ok(())
    }

    fn lattice(&self) -> Result<Lattice, HolographyError> {
        Lattice::new(self.geometry, self.labels.clone())
    }
}

struct SliceList(Vec<Slice>);

impl SliceList {
    fn push(&mut self, time: f64, label: &str, gates: Vec<CliffordGate>) {
        for group in disjoint_groups(gates) {
            self.0.push(Slice { time, label: label.to_string(), gates: group });
        }
    }
}

fn check_sizes(lx: usize, ly: usize) -> Result<Torus, HolographyError> {
    Torus::new(lx, ly)
}

fn controlled(lattice: &Lattice, control: QubitLabel, basis: ControlBasis, letter: Pauli, sites: &[usize]) -> Result<CliffordGate, HolographyError> {
    let n = lattice.n_qubits();
    let target = PauliOperator::on_sites(n, letter, sites)?;
    Ok(CliffordGate::controlled(lattice.id_of(control)?, basis, target)?)
}

fn finish(draft: Draft, lattice: Lattice, n_system: usize, slices: SliceList, input: Vec<PauliOperator>) -> Result<SequentialCircuit, HolographyError> {
    SequentialCircuit::new(lattice, (0..n_system).collect(), slices.0, draft.init, draft.deformations, input)
}

/// Repeated 1d channel `∏ᵢ 𝓔ᶻᵢ 𝓔ˣᵢ` on a ring of `l` sites, `depth` times.
///
/// Y-link ancillas (`|+⟩`-type, Z-basis control) apply `Xᵢ` with probability
/// `p_x`; x-link ancillas (`|0⟩`-type, X-basis control) apply `ZᵢZᵢ₊₁` with
/// probability `p_z`. The declared input is `|+⟩^{⊗l}`.
pub fn build_1d_channel_circuit(l: usize, depth: usize, p_x: f64, p_z: f64) -> Result<SequentialCircuit, HolographyError> {
    build_1d_channel_circuit_cut(l, depth, p_x, p_z, BoundaryCut::ZzLast)
}

pub fn build_1d_channel_circuit_cut(
    l: usize,
    depth: usize,
    p_x: f64,
    p_z: f64,
    cut: BoundaryCut,
) -> Result<SequentialCircuit, HolographyError> {
    if l < 2 {
        return Err(HolographyError::Size(format!("ring needs at least 2 sites, got {l}")));
    }
    let system: Vec<QubitLabel> = (0..l).map(|i| QubitLabel::system(QubitKind::Site, i, 0)).collect();
    let mut draft = Draft::new(Geometry::SquareCylinder { lx: l, ly: depth }, system);
    for k in 1..=depth {
        for i in 0..l {
            draft.ancilla(QubitLabel::ancilla(QubitKind::YLink, i, 0, k), ControlBasis::Z, p_x)?;
        }
        for i in 0..l {
            draft.ancilla(QubitLabel::ancilla(QubitKind::XLink, i, 0, k), ControlBasis::X, p_z)?;
        }
    }
    let lattice = draft.lattice()?;
    let mut slices = SliceList(Vec::new());
    for k in 1..=depth {
        let green = (0..l)
            .map(|i| controlled(&lattice, QubitLabel::ancilla(QubitKind::YLink, i, 0, k), ControlBasis::Z, Pauli::X, &[i]))
            .collect::<Result<Vec<_>, _>>()?;
        let blue = (0..l)
            .map(|i| {
                controlled(&lattice, QubitLabel::ancilla(QubitKind::XLink, i, 0, k), ControlBasis::X, Pauli::Z, &[i, (i + 1) % l])
            })
            .collect::<Result<Vec<_>, _>>()?;
        let t = k as f64;
        match cut {
            BoundaryCut::ZzLast => {
                slices.push(t - 0.5, "x noise", green);
                slices.push(t, "zz noise", blue);
            }
            BoundaryCut::XLast => {
                slices.push(t - 1.0, "zz noise", blue);
                slices.push(t - 0.5, "x noise", green);
            }
        }
    }
    let n = lattice.n_qubits();
    let input = (0..l).map(|i| PauliOperator::single(n, i, Pauli::X)).collect::<Result<Vec<_>, _>>()?;
    finish(draft, lattice, l, slices, input)
}

fn site_id(t: &Torus, (a, b): (usize, usize)) -> usize {
    b * t.lx + a
}

fn site_labels(t: &Torus) -> Vec<QubitLabel> {
    t.vertices().into_iter().map(|(a, b)| QubitLabel::system(QubitKind::Site, a, b)).collect()
}

fn link_label(link: Link, layer: Option<usize>) -> QubitLabel {
    let (kind, a, b) = match link {
        Link::X(a, b) => (QubitKind::XLink, a, b),
        Link::Y(a, b) => (QubitKind::YLink, a, b),
    };
    QubitLabel { kind, x: a, y: b, layer }
}

fn link_labels(t: &Torus) -> Vec<QubitLabel> {
    t.links().into_iter().map(|l| link_label(l, None)).collect()
}

fn all_x_input(n: usize, n_system: usize) -> Result<Vec<PauliOperator>, HolographyError> {
    Ok((0..n_system).map(|i| PauliOperator::single(n, i, Pauli::X)).collect::<Result<Vec<_>, _>>()?)
}

/// Repeated 2d 0-form channel on an `lx × ly` torus of sites: `Xᵢ` noise from
/// z-link ancillas, `ZᵢZⱼ` bond noise from x- and y-link ancillas.
pub fn build_zero_form_circuit(lx: usize, ly: usize, depth: usize, p_x: f64, p_z: f64) -> Result<SequentialCircuit, HolographyError> {
    let t = check_sizes(lx, ly)?;
    let mut draft = Draft::new(Geometry::CubicSlab { lx, ly, lz: depth }, site_labels(&t));
    for k in 1..=depth {
        for (a, b) in t.vertices() {
            draft.ancilla(QubitLabel::ancilla(QubitKind::ZLink, a, b, k), ControlBasis::Z, p_x)?;
        }
        for kind in [QubitKind::XLink, QubitKind::YLink] {
            for (a, b) in t.vertices() {
                draft.ancilla(QubitLabel::ancilla(kind, a, b, k), ControlBasis::X, p_z)?;
            }
        }
    }
    let lattice = draft.lattice()?;
    let mut slices = SliceList(Vec::new());
    for k in 1..=depth {
        let mut green = Vec::new();
        let mut blue = Vec::new();
        for v in t.vertices() {
            let s = site_id(&t, v);
            green.push(controlled(&lattice, QubitLabel::ancilla(QubitKind::ZLink, v.0, v.1, k), ControlBasis::Z, Pauli::X, &[s])?);
        }
        for (kind, (da, db)) in [(QubitKind::XLink, (1, 0)), (QubitKind::YLink, (0, 1))] {
            for v in t.vertices() {
                let pair = [site_id(&t, v), site_id(&t, t.shift(v, da, db))];
                blue.push(controlled(&lattice, QubitLabel::ancilla(kind, v.0, v.1, k), ControlBasis::X, Pauli::Z, &pair)?);
            }
        }
        slices.push(k as f64 - 0.5, "x noise", green);
        slices.push(k as f64, "zz noise", blue);
    }
    let n = lattice.n_qubits();
    let input = all_x_input(n, t.n_vertices())?;
    finish(draft, lattice, t.n_vertices(), slices, input)
}

/// Repeated 1-form channel on the links of an `lx × ly` torus: `X_ℓ` noise from
/// in-plane link ancillas, star noise `A_v = Z⊗4` from vertical z-link ancillas.
pub fn build_one_form_circuit(
    lx: usize,
    ly: usize,
    depth: usize,
    p_x: f64,
    p_z: f64,
    input: OneFormInput,
) -> Result<SequentialCircuit, HolographyError> {
    let t = check_sizes(lx, ly)?;
    let draft = link_ancillas(&t, depth, p_x, p_z)?;
    let lattice = draft.lattice()?;
    let mut slices = SliceList(Vec::new());
    for k in 1..=depth {
        let blue = t
            .links()
            .into_iter()
            .map(|l| controlled(&lattice, link_label(l, Some(k)), ControlBasis::Z, Pauli::X, &[t.link_id(l)]))
            .collect::<Result<Vec<_>, _>>()?;
        slices.push(k as f64 - 0.5, "x noise", blue);
        slices.push(k as f64, "star noise", star_gates(&t, &lattice, k)?);
    }
    let n = lattice.n_qubits();
    let letter = match input {
        OneFormInput::Plus => Pauli::X,
        OneFormInput::Zero => Pauli::Z,
    };
    let stabilizers = (0..t.n_links()).map(|i| PauliOperator::single(n, i, letter)).collect::<Result<Vec<_>, _>>()?;
    finish(draft, lattice, t.n_links(), slices, stabilizers)
}

fn link_ancillas(t: &Torus, depth: usize, p_link: f64, p_vertex: f64) -> Result<Draft, HolographyError> {
    let mut draft = Draft::new(Geometry::CubicSlab { lx: t.lx, ly: t.ly, lz: depth }, link_labels(t));
    for k in 1..=depth {
        for l in t.links() {
            draft.ancilla(link_label(l, Some(k)), ControlBasis::Z, p_link)?;
        }
        for (a, b) in t.vertices() {
            draft.ancilla(QubitLabel::ancilla(QubitKind::ZLink, a, b, k), ControlBasis::X, p_vertex)?;
        }
    }
    Ok(draft)
}

fn star_gates(t: &Torus, lattice: &Lattice, k: usize) -> Result<Vec<CliffordGate>, HolographyError> {
    t.vertices()
        .into_iter()
        .map(|v| controlled(lattice, QubitLabel::ancilla(QubitKind::ZLink, v.0, v.1, k), ControlBasis::X, Pauli::Z, &t.star_ids(v)))
        .collect()
}

/// Repeated fermionic 1-form channel on the links of an `lx × ly` torus.
///
/// Link ancillas apply the hop `X_ℓ Z_{ℓ+x̂/2−ŷ/2}` with probability
/// `flip_link`, all x-links before all y-links; vertex ancillas apply `A_v`
/// with probability `flip_vertex`. The declared input is the toric-code
/// ground state with `A_v = Z⊗4`, `B_p = X⊗4` and both Z-type logicals at +1.
pub fn build_fermionic_circuit(
    lx: usize,
    ly: usize,
    depth: usize,
    flip_link: f64,
    flip_vertex: f64,
) -> Result<SequentialCircuit, HolographyError> {
    let t = check_sizes(lx, ly)?;
    let draft = link_ancillas(&t, depth, flip_link, flip_vertex)?;
    let lattice = draft.lattice()?;
    let n = lattice.n_qubits();
    let hop = |l: Link, k: usize| -> Result<CliffordGate, HolographyError> {
        let x = PauliOperator::single(n, t.link_id(l), Pauli::X)?;
        let z = PauliOperator::single(n, t.link_id(t.fermion_partner(l)), Pauli::Z)?;
        Ok(CliffordGate::controlled(lattice.id_of(link_label(l, Some(k)))?, ControlBasis::Z, x.multiply(&z)?)?)
    };
    let mut slices = SliceList(Vec::new());
    for k in 1..=depth {
        let (xs, ys): (Vec<Link>, Vec<Link>) = t.links().into_iter().partition(|l| matches!(l, Link::X(..)));
        slices.push(k as f64 - 0.5, "x-link hops", xs.into_iter().map(|l| hop(l, k)).collect::<Result<Vec<_>, _>>()?);
        slices.push(k as f64 - 0.5, "y-link hops", ys.into_iter().map(|l| hop(l, k)).collect::<Result<Vec<_>, _>>()?);
        slices.push(k as f64, "star noise", star_gates(&t, &lattice, k)?);
    }
    let mut candidates = Vec::new();
    for v in t.vertices() {
        candidates.push(PauliOperator::on_sites(n, Pauli::Z, &t.star_ids(v))?);
        candidates.push(PauliOperator::on_sites(n, Pauli::X, &t.plaquette_ids(v))?);
    }
    let column: Vec<usize> = (0..ly).map(|b| t.link_id(Link::X(0, b))).collect();
    let row: Vec<usize> = (0..lx).map(|a| t.link_id(Link::Y(a, 0))).collect();
    candidates.push(PauliOperator::on_sites(n, Pauli::Z, &column)?);
    candidates.push(PauliOperator::on_sites(n, Pauli::Z, &row)?);
    let input = StabilizerGroup::from_spanning(n, candidates)?.generators().to_vec();
    finish(draft, lattice, t.n_links(), slices, input)
}

/// Repeated subsystem channel on an `lx × ly` torus of sites: `Xᵢ` noise from
/// z-link ancillas, plaquette-corner `Z⊗4` noise from plaquette ancillas.
pub fn build_subsystem_circuit(lx: usize, ly: usize, depth: usize, p_x: f64, p_z: f64) -> Result<SequentialCircuit, HolographyError> {
    let t = check_sizes(lx, ly)?;
    let mut draft = Draft::new(Geometry::CubicSlab { lx, ly, lz: depth }, site_labels(&t));
    for k in 1..=depth {
        for (a, b) in t.vertices() {
            draft.ancilla(QubitLabel::ancilla(QubitKind::ZLink, a, b, k), ControlBasis::Z, p_x)?;
        }
        for (a, b) in t.vertices() {
            draft.ancilla(QubitLabel::ancilla(QubitKind::Plaquette, a, b, k), ControlBasis::X, p_z)?;
        }
    }
    let lattice = draft.lattice()?;
    let mut slices = SliceList(Vec::new());
    for k in 1..=depth {
        let mut green = Vec::new();
        let mut plaq = Vec::new();
        for v in t.vertices() {
            green.push(controlled(&lattice, QubitLabel::ancilla(QubitKind::ZLink, v.0, v.1, k), ControlBasis::Z, Pauli::X, &[site_id(&t, v)])?);
            let corners: Vec<usize> = [(0, 0), (1, 0), (0, 1), (1, 1)].iter().map(|&(da, db)| site_id(&t, t.shift(v, da, db))).collect();
            plaq.push(controlled(&lattice, QubitLabel::ancilla(QubitKind::Plaquette, v.0, v.1, k), ControlBasis::X, Pauli::Z, &corners)?);
        }
        slices.push(k as f64 - 0.5, "x noise", green);
        slices.push(k as f64, "plaquette noise", plaq);
    }
    let n = lattice.n_qubits();
    let input = all_x_input(n, t.n_vertices())?;
    finish(draft, lattice, t.n_vertices(), slices, input)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_d_layout() {
        let c = build_1d_channel_circuit(4, 3, 0.5, 0.5).unwrap();
        assert_eq!(c.n_qubits(), 4 + 2 * 4 * 3);
        assert_eq!(c.n_system(), 4);
        assert!(!c.is_deformed());
        // Four blue gates on a 4-ring split into two disjoint groups.
        assert_eq!(c.slices().len(), 3 * (1 + 2));
        let top = c.lattice().top();
        assert_eq!(top, vec![0, 1, 2, 3]);
        assert_eq!(c.lattice().bottom().len(), 8);
    }

    #[test]
    fn depth_zero_is_empty() {
        let c = build_1d_channel_circuit(3, 0, 0.3, 0.2).unwrap();
        assert!(c.slices().is_empty());
        assert_eq!(c.n_qubits(), 3);
    }

    #[test]
    fn deformations_recorded_away_from_half() {
        let c = build_1d_channel_circuit(3, 1, 0.2, 0.5).unwrap();
        assert_eq!(c.deformations().len(), 3);
        assert!(c.deformations().values().all(|d| d.axis == Axis::Z && (d.g - std::f64::consts::LN_2).abs() < 1e-12));
    }

    #[test]
    fn invalid_sizes() {
        assert!(build_1d_channel_circuit(1, 2, 0.5, 0.5).is_err());
        assert!(build_zero_form_circuit(1, 3, 1, 0.5, 0.5).is_err());
        assert!(build_1d_channel_circuit(3, 1, 1.2, 0.5).is_err());
    }

    #[test]
    fn fermionic_input_is_full_rank() {
        let c = build_fermionic_circuit(3, 3, 1, 0.5, 0.5).unwrap();
        assert_eq!(c.input_stabilizers().len(), 18);
    }

    #[test]
    fn every_ancilla_in_one_slice() {
        for c in [
            build_zero_form_circuit(2, 3, 2, 0.5, 0.5).unwrap(),
            build_one_form_circuit(2, 2, 2, 0.5, 0.5, OneFormInput::Plus).unwrap(),
            build_fermionic_circuit(2, 2, 2, 0.5, 0.5).unwrap(),
            build_subsystem_circuit(3, 2, 2, 0.5, 0.5).unwrap(),
        ] {
            let mut seen = vec![0; c.n_qubits()];
            for s in c.slices() {
                for g in &s.gates {
                    for q in g.sites() {
                        if q >= c.n_system() {
                            seen[q] += 1;
                        }
                    }
                }
            }
            assert!(seen[c.n_system()..].iter().all(|&k| k == 1));
        }
    }
}
