//! Build the 1d sequential circuit, push its input stabilizers through, and split the
//! bulk group into bulk, top and string pieces.

use swssb::holography::{
    build_1d_channel_circuit, evolve_initial_stabilizers, extract_boundary_structure, system_state,
    zero_form_steady_group, BoundaryCut,
};
use swssb::dense::{trace_distance, StateVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (l, depth) = (4, 2);
    let circuit = build_1d_channel_circuit(l, depth, 0.5, 0.5)?;
    println!("{} qubits, {} slices, cut {:?}", circuit.n_qubits(), circuit.slices().len(), BoundaryCut::ZzLast);

    let group = evolve_initial_stabilizers(&circuit)?;
    let all_x = zero_form_steady_group(l)?;
    let parts = extract_boundary_structure(&group, circuit.system(), &all_x.generators()[0])?;
    println!("bulk-only generators: {}", parts.bulk.len());
    println!("top generators: {:?}", parts.top.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>());
    println!("string reaching ∏X: weight {}", parts.string.weight());

    // A deformed three-site circuit, simulated as a state vector, against its channel.
    let small = build_1d_channel_circuit(3, 1, 0.2, 0.35)?;
    let psi = small.simulate_statevector(&StateVector::plus_state(3))?;
    let via_circuit = system_state(&psi, small.n_system());
    let channel = small.system_channel()?;
    let direct = channel.apply(&StateVector::plus_state(3).density())?;
    let td = trace_distance(&via_circuit.scale(num_complex::Complex64::new(1.0 / via_circuit.trace().re, 0.0)), &direct)?;
    println!("deformed circuit vs channel, trace distance {td:.2e}");
    Ok(())
}
