//! Stabilizer flow through undeformed circuits and the boundary structure of the result.

use crate::gf2;
use crate::pauli::{conjugate_all, Bits, Pauli, PauliOperator, StabilizerGroup};

use super::circuit::{AncillaState, SequentialCircuit};
use super::HolographyError;

/// `U p U†` for the whole circuit `U`.
pub fn push_through(circuit: &SequentialCircuit, p: &PauliOperator) -> Result<PauliOperator, HolographyError> {
    Ok(conjugate_all(circuit.gates(), p)?)
}

/// Stabilizers of the product input: `Z` on `|0⟩` ancillas, `X` on `|+⟩`
/// ancillas, and the declared input stabilizers of the system.
pub fn initial_stabilizers(circuit: &SequentialCircuit) -> Result<Vec<PauliOperator>, HolographyError> {
    let n = circuit.n_qubits();
    let mut out = Vec::with_capacity(n);
    for (&q, state) in circuit.ancilla_init() {
        let letter = match state {
            AncillaState::Zero => Pauli::Z,
            AncillaState::Plus => Pauli::X,
        };
        out.push(PauliOperator::single(n, q, letter)?);
    }
    out.extend(circuit.input_stabilizers().iter().cloned());
    Ok(out)
}

/// Stabilizer group of the output state. Only defined when every ancilla is
/// undeformed, i.e. every gate fires with probability one half.
pub fn evolve_initial_stabilizers(circuit: &SequentialCircuit) -> Result<StabilizerGroup, HolographyError> {
    if circuit.is_deformed() {
        return Err(HolographyError::Deformed);
    }
    let gates: Vec<_> = circuit.gates().collect();
    let evolved = initial_stabilizers(circuit)?
        .iter()
        .map(|p| conjugate_all(gates.iter().copied(), p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StabilizerGroup::new(circuit.n_qubits(), evolved)?)
}

/// Pieces of a bulk stabilizer group relative to its system (top) register.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryStructure {
    /// Independent elements with no support on the system.
    pub bulk: Vec<PauliOperator>,
    /// Elements supported on the system only, written on the system register.
    pub top: StabilizerGroup,
    /// An element whose system part is the requested weak-symmetry image.
    pub string: PauliOperator,
}

/// `p` on the qubits `sites`, renumbered `0..sites.len()`. Letters elsewhere are dropped.
pub fn compress(p: &PauliOperator, sites: &[usize]) -> PauliOperator {
    let mut out = PauliOperator::identity(sites.len());
    for (j, &s) in sites.iter().enumerate() {
        let letter = PauliOperator::single(sites.len(), j, p.letter(s)).expect("site in range");
        out = out.multiply(&letter).expect("same size");
    }
    // Single-site letters multiply without extra phase, so only the sign of `p` remains.
    out.with_phase(p.phase())
}

fn rows_on(group: &StabilizerGroup, sites: &[usize]) -> Vec<Bits> {
    group.generators().iter().map(|g| compress(g, sites).symplectic_row()).collect()
}

fn complement(n: usize, sites: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; n];
    sites.iter().for_each(|&s| inside[s] = true);
    (0..n).filter(|&s| !inside[s]).collect()
}

/// Group element whose restriction to `system` matches `target` letter by letter.
pub fn connecting_string(
    group: &StabilizerGroup,
    system: &[usize],
    target: &PauliOperator,
) -> Result<Option<PauliOperator>, HolographyError> {
    if target.n_qubits() != system.len() {
        return Err(HolographyError::Invalid(format!(
            "target acts on {} qubits, system has {}",
            target.n_qubits(),
            system.len()
        )));
    }
    let rows = rows_on(group, system);
    Ok(gf2::solve(&rows, &target.symplectic_row()).map(|idx| group.product_of(&idx)))
}

/// Split `group` into bulk-only elements, system-only elements and a string
/// ending on `weak_target` (given on the system register).
pub fn extract_boundary_structure(
    group: &StabilizerGroup,
    system: &[usize],
    weak_target: &PauliOperator,
) -> Result<BoundaryStructure, HolographyError> {
    let n = group.n_qubits();
    let rest = complement(n, system);
    let bulk = gf2::left_kernel(&rows_on(group, system)).into_iter().map(|idx| group.product_of(&idx)).collect();
    let top_ops = gf2::left_kernel(&rows_on(group, &rest))
        .into_iter()
        .map(|idx| compress(&group.product_of(&idx), system))
        .collect();
    let top = StabilizerGroup::from_spanning(system.len(), top_ops)?;
    let string = connecting_string(group, system, weak_target)?
        .ok_or_else(|| HolographyError::NotConnectable(weak_target.to_string()))?;
    Ok(BoundaryStructure { bulk, top, string })
}
