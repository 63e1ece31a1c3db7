//! Iterate the 1d Ising channel to its steady state and look at the leading spectrum.

use swssb::dense::{
    build_superoperator, iterate_to_fixed_point, leading_spectrum, trace_distance, DensityMatrix, FixedPointOptions,
    SpectrumOptions,
};
use swssb::holography::{ising_chain_channel, zero_form_steady_group};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let l = 6;
    for (p_x, p_z) in [(0.5, 0.5), (0.2, 0.3)] {
        let channel = ising_chain_channel(l, p_x, p_z)?;
        let fp = iterate_to_fixed_point(&channel, DensityMatrix::plus_product(l).operator(), FixedPointOptions::default())?;
        let target = DensityMatrix::from_stabilizers(&zero_form_steady_group(l)?);
        println!(
            "p_x={p_x} p_z={p_z}: {} iterations, distance to (1+∏X)/2^L = {:.2e}",
            fp.iterations,
            trace_distance(&fp.state, target.operator())?
        );
    }

    let channel = ising_chain_channel(4, 0.2, 0.3)?;
    let report = leading_spectrum(&build_superoperator(&channel)?, &SpectrumOptions { n_eigs: 6, ..SpectrumOptions::default() }, None)?;
    println!("L=4 magnitudes {:?}", report.magnitudes);
    println!("steady states {}, gap {:?}", report.degeneracy, report.gap);
    Ok(())
}
