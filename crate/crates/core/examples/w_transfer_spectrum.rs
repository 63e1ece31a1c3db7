//! Degeneracy and gap of the W-tensor ring transfer channel across g.

use swssb::dense::{build_superoperator, leading_spectrum, SpectrumOptions};
use swssb::isotns::{plumb, ring_transfer_channel, WTensor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let l: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    println!("isometry defect at g=0.3: {:.1e}", plumb(&WTensor::new(0.3)?)?.isometry_defect());
    for g in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let t = ring_transfer_channel(&WTensor::new(g)?, l)?;
        let sup = build_superoperator(t.channel())?;
        let r = leading_spectrum(&sup, &SpectrumOptions { n_eigs: l + 4, ..SpectrumOptions::default() }, None)?;
        println!("L={l} g={g:+.2}: degeneracy {}, gap {:.4}", r.degeneracy, r.gap.unwrap_or(f64::NAN));
    }
    Ok(())
}
