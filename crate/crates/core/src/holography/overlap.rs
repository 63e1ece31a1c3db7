//! Norm of the deformed toric-code state on a small torus, built as a dense real vector.

use serde::{Deserialize, Serialize};

use super::lattice::{Link, Torus};
use super::HolographyError;

pub const OVERLAP_QUBIT_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapResult {
    /// `⟨Ψ|Ψ⟩ / ∏ cosh(2g)`, equal to one when no closed string contributes.
    pub overlap: f64,
    /// `|overlap − 1|`
    pub deviation: f64,
    /// Closed-form loop sum for the same torus.
    pub series: f64,
}

/// `(1 + tanh(2g_z)^{ly})^{lx} (1 + tanh(2g_x)^{ly})^{lx}`: only the
/// non-contractible columns survive the expansion.
pub fn overlap_series(g_x: f64, g_z: f64, lx: usize, ly: usize) -> f64 {
    let col = |g: f64| (1.0 + (2.0 * g).tanh().powi(ly as i32)).powi(lx as i32);
    col(g_z) * col(g_x)
}

struct RealState {
    amps: Vec<f64>,
}

impl RealState {
    fn zeros(n: usize) -> Self {
        let mut amps = vec![0.0; 1 << n];
        amps[0] = 1.0;
        RealState { amps }
    }

    fn mask(sites: &[usize]) -> usize {
        sites.iter().fold(0, |m, &s| m | (1 << s))
    }

    /// `(1 + X_S)/2`
    fn project_x(&mut self, sites: &[usize]) {
        let m = Self::mask(sites);
        let low = 1 << sites.iter().copied().min().unwrap_or(0);
        for i in 0..self.amps.len() {
            if i & low == 0 {
                let j = i ^ m;
                let avg = 0.5 * (self.amps[i] + self.amps[j]);
                self.amps[i] = avg;
                self.amps[j] = avg;
            }
        }
    }

    /// `1 + t X_q`
    fn dress_x(&mut self, q: usize, t: f64) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = a + t * b;
                self.amps[i | bit] = b + t * a;
            }
        }
    }

    /// `1 + t Z_q`
    fn dress_z(&mut self, q: usize, t: f64) {
        let bit = 1 << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & bit == 0 { 1.0 + t } else { 1.0 - t };
        }
    }

    fn dot(&self, other: &RealState) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a * b).sum()
    }
}

/// Norm of `∏_{x-links} e^{g_z Z} ∏_{y-links} e^{g_x X} |TC⟩` on an `lx × ly`
/// torus, divided by `∏ cosh(2g)`. `|TC⟩` has `A_v = Z⊗4`, `B_p = X⊗4`, the
/// Z column on x-links and the X column on y-links all at +1.
pub fn overlap_check(g_x: f64, g_z: f64, lx: usize, ly: usize) -> Result<OverlapResult, HolographyError> {
    let torus = Torus::new(lx, ly)?;
    let n = torus.n_links();
    if n > OVERLAP_QUBIT_LIMIT {
        return Err(HolographyError::TooLarge { qubits: n, limit: OVERLAP_QUBIT_LIMIT });
    }
    // |0…0⟩ already carries every star and the Z column.
    let mut tc = RealState::zeros(n);
    for v in torus.vertices() {
        tc.project_x(&torus.plaquette_ids(v));
    }
    let column: Vec<usize> = (0..ly).map(|b| torus.link_id(Link::Y(0, b))).collect();
    tc.project_x(&column);
    let norm = tc.dot(&tc);
    let (t_x, t_z) = ((2.0 * g_x).tanh(), (2.0 * g_z).tanh());
    let mut dressed = RealState { amps: tc.amps.clone() };
    for link in torus.links() {
        match link {
            Link::X(..) => dressed.dress_z(torus.link_id(link), t_z),
            Link::Y(..) => dressed.dress_x(torus.link_id(link), t_x),
        }
    }
    let overlap = tc.dot(&dressed) / norm;
    Ok(OverlapResult { overlap, deviation: (overlap - 1.0).abs(), series: overlap_series(g_x, g_z, lx, ly) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn undeformed_is_one() {
        let r = overlap_check(0.0, 0.0, 2, 3).unwrap();
        assert!((r.overlap - 1.0).abs() < 1e-14);
        assert_eq!(r.deviation, r.deviation.abs());
    }

    #[test]
    fn dense_matches_series() {
        for (gx, gz, lx, ly) in [(0.3, 0.3, 2, 2), (0.0, 0.3, 3, 2), (0.2, 0.5, 2, 3), (-0.4, 0.1, 3, 3)] {
            let r = overlap_check(gx, gz, lx, ly).unwrap();
            assert!((r.overlap - r.series).abs() < 1e-10, "{gx} {gz} {lx} {ly}: {r:?}");
        }
    }

    #[test]
    fn too_large() {
        assert_eq!(overlap_check(0.1, 0.1, 4, 4).unwrap_err(), HolographyError::TooLarge { qubits: 32, limit: 24 });
        assert!(overlap_check(0.1, 0.1, 1, 4).is_err());
    }

    proptest! {
        #[test]
        fn series_deviation_monotone_in_g_z(a in 0.0f64..1.0, b in 0.0f64..1.0, ly in 2usize..6) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(overlap_series(0.0, lo, 3, ly) <= overlap_series(0.0, hi, 3, ly) + 1e-15);
        }
    }
}
