//! Boundary states of the W channel: CMI, fidelity correlator and symmetry class.

use swssb::dense::{DenseOperator, FixedPointOptions};
use swssb::diagnostics::{cmi, fidelity_correlator_pauli, symmetry_check};
use swssb::isotns::{boundary_rdm, ring_transfer_channel, WTensor};
use swssb::partition::Partition;
use swssb::pauli::PauliOperator;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let l = 6;
    let ring = Partition::default_ring(l)?;
    let parity = DenseOperator::from_pauli(&PauliOperator::z_on(l, &(0..l).collect::<Vec<_>>())?);
    for g in [-1.0, -0.5, 0.5, 1.0] {
        let t = ring_transfer_channel(&WTensor::new(g)?, l)?;
        let sector = if g < 0.0 { None } else { Some(1) };
        let rho = boundary_rdm(&t, sector, FixedPointOptions::default())?;
        let xx = PauliOperator::x_on(l, &[0, l / 2])?;
        let verdict = symmetry_check(&rho, &parity, 1e-8)?;
        println!(
            "g={g:+.1}: CMI {:.4} bits, F(X_0 X_{}) {:.4}, ∏Z {:?}",
            cmi(&rho, &ring)?,
            l / 2,
            fidelity_correlator_pauli(&rho, &xx)?,
            verdict.classification
        );
    }
    Ok(())
}
