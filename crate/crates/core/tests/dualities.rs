//! Cross-module checks: circuits against their channels, and transfer maps against their symmetries.

use swssb::dense::{build_superoperator, leading_spectrum, trace_distance, DensityMatrix, FixedPointOptions, SpectrumOptions, StateVector};
use swssb::diagnostics::{cmi, symmetry_check, SymmetryClass};
use swssb::holography::{
    build_1d_channel_circuit, build_zero_form_circuit, evolve_initial_stabilizers, extract_boundary_structure,
    ising_chain_channel, system_state, zero_form_steady_group,
};
use swssb::isotns::{boundary_rdm, deformed_tc_transfer, ring_transfer_channel, WTensor};
use swssb::partition::Partition;
use swssb::pauli::{stabilizer_cmi, PauliOperator};

#[test]
fn circuit_output_matches_channel() {
    for (p_x, p_z) in [(0.5, 0.5), (0.1, 0.4), (0.3, 0.0)] {
        let circuit = build_1d_channel_circuit(3, 1, p_x, p_z).unwrap();
        let psi = circuit.simulate_statevector(&StateVector::plus_state(3)).unwrap();
        let from_circuit = DensityMatrix::normalized(&system_state(&psi, 3)).unwrap();
        let direct = ising_chain_channel(3, p_x, p_z).unwrap().apply(&StateVector::plus_state(3).density()).unwrap();
        assert!(trace_distance(from_circuit.operator(), &direct).unwrap() < 1e-10, "p_x={p_x} p_z={p_z}");
    }
}

#[test]
fn boundary_cmi_of_bulk_state_is_one_bit() {
    let circuit = build_1d_channel_circuit(6, 3, 0.5, 0.5).unwrap();
    let group = evolve_initial_stabilizers(&circuit).unwrap();
    let target = zero_form_steady_group(6).unwrap().generators()[0].clone();
    let parts = extract_boundary_structure(&group, circuit.system(), &target).unwrap();
    assert_eq!(stabilizer_cmi(&parts.top, &Partition::default_ring(6).unwrap()), 1.0);
}

#[test]
fn zero_form_top_is_global_x() {
    let circuit = build_zero_form_circuit(2, 2, 2, 0.5, 0.5).unwrap();
    let group = evolve_initial_stabilizers(&circuit).unwrap();
    let all_x = zero_form_steady_group(4).unwrap().generators()[0].clone();
    let parts = extract_boundary_structure(&group, circuit.system(), &all_x).unwrap();
    assert_eq!(parts.top.len(), 1);
    assert!(parts.top.contains(&all_x).unwrap());
}

#[test]
fn w_channel_is_trace_preserving_with_parity() {
    for g in [-0.7, 0.0, 0.4, 1.0] {
        let t = ring_transfer_channel(&WTensor::new(g).unwrap(), 4).unwrap();
        assert!(t.is_cptp());
        let parity = swssb::dense::DenseOperator::from_pauli(&PauliOperator::z_on(4, &[0, 1, 2, 3]).unwrap());
        let comm = t.channel().symmetry_commutator(&parity).unwrap();
        assert_eq!(comm < 1e-10, g >= 0.0, "g={g} commutator {comm}");
    }
}

#[test]
fn w_steady_states_by_sign_of_g() {
    let opts = SpectrumOptions { n_eigs: 8, ..SpectrumOptions::default() };
    for (g, expected) in [(0.5, 2), (-0.5, 1), (0.0, 5)] {
        let t = ring_transfer_channel(&WTensor::new(g).unwrap(), 4).unwrap();
        let r = leading_spectrum(&build_superoperator(t.channel()).unwrap(), &opts, None).unwrap();
        assert_eq!(r.degeneracy, expected, "g={g}");
    }
}

#[test]
fn boundary_state_symmetry_class() {
    let l = 4;
    let parity = swssb::dense::DenseOperator::from_pauli(&PauliOperator::z_on(l, &[0, 1, 2, 3]).unwrap());
    let t = ring_transfer_channel(&WTensor::new(0.8).unwrap(), l).unwrap();
    let rho = boundary_rdm(&t, Some(1), FixedPointOptions::default()).unwrap();
    assert_eq!(symmetry_check(&rho, &parity, 1e-8).unwrap().classification, SymmetryClass::Strong);
    let deformed = deformed_tc_transfer(0.99, l).unwrap();
    let rho = boundary_rdm(&deformed, Some(1), FixedPointOptions::default()).unwrap();
    assert!((cmi(&rho, &Partition::default_ring(l).unwrap()).unwrap() - 1.0).abs() < 0.05);
}
