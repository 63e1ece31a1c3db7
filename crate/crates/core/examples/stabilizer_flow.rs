//! Conjugating Paulis through controlled-Pauli gates and reading entropies off a stabilizer group.

use swssb::partition::Partition;
use swssb::pauli::{conjugate_all, stabilizer_cmi, stabilizer_entropy, CliffordGate, ControlBasis, PauliOperator, StabilizerGroup};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Ancilla 0 in |+⟩ controls X on sites 1 and 2.
    let gate = CliffordGate::controlled(0, ControlBasis::Z, PauliOperator::x_on(3, &[1, 2])?)?;
    let z1: PauliOperator = "IZI".parse()?;
    let pushed = conjugate_all([&gate], &z1)?;
    println!("Z_1 -> {pushed}");

    // GHZ-like group on a ring of 6: every ZZ bond plus the global X.
    let n = 6;
    let mut gens: Vec<PauliOperator> = (0..n - 1).map(|i| PauliOperator::z_on(n, &[i, i + 1])).collect::<Result<_, _>>()?;
    gens.push(PauliOperator::x_on(n, &(0..n).collect::<Vec<_>>())?);
    let ghz = StabilizerGroup::new(n, gens)?;
    for k in 1..=3 {
        let region: Vec<usize> = (0..k).collect();
        println!("S({region:?}) = {} bits", stabilizer_entropy(&ghz, &region));
    }

    let steady = StabilizerGroup::new(n, vec![PauliOperator::x_on(n, &(0..n).collect::<Vec<_>>())?])?;
    let ring = Partition::default_ring(n)?;
    println!("I(A:C|B) of (1 + ∏X)/2^{n}: {} bits", stabilizer_cmi(&steady, &ring));
    Ok(())
}
