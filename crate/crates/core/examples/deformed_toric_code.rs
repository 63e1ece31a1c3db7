//! Deformed toric code: norm against the loop series, and the boundary gap across g.

use swssb::holography::{overlap_check, overlap_series};
use swssb::runner::{deformed_tc_critical_g, deformed_tc_even_gap};

fn main() -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    for ly in 2..=4 {
        let r = overlap_check(0.3, 0.3, 3, ly)?;
        println!("3x{ly}: overlap {:.6}, series {:.6}, deviation {:.4}", r.overlap, overlap_series(0.3, 0.3, 3, ly), r.deviation);
    }
    println!("self-dual point g = {:.4}", deformed_tc_critical_g());
    for k in [10, 14, 16, 18, 22] {
        let g = k as f64 / 25.0;
        println!("L=4 g={g:.2}: even-sector gap {:.4}", deformed_tc_even_gap(g, 4)?);
    }
    Ok(())
}
