//! The W-tensor family, its plumbed isoTNS tensor, and the ring transfer maps
//! built from it (a CPTP channel, and a non-CPTP string-tension deformation).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dense::{
    iterate_to_fixed_point, sector_project, DenseError, DenseOperator, DensityMatrix, FixedPointOptions, KrausChannel,
    LocalChannel, StateVector, Symmetry,
};

const ISOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsoTnsError {
    #[error("g = {0} is outside the allowed range")]
    CouplingOutOfRange(f64),
    #[error("ring needs at least 2 sites, got {0}")]
    RingTooSmall(usize),
    #[error("isometry violated by {0:e}")]
    Isometry(f64),
    #[error("leading steady space is degenerate; pass a symmetry sector")]
    AmbiguousSector,
    #[error("fixed-point iteration stopped after {iterations} steps at residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error("json: {0}")]
    Json(String),
}

/// `√((1+g²)/2)`, the weight of the particle-hopping entries.
fn hopping(g: f64) -> f64 {
    ((1.0 + g * g) / 2.0).sqrt()
}

/// Off-diagonal weight: zero for `g ≥ 0`, `|g|` below.
fn off_parity(g: f64) -> f64 {
    if g >= 0.0 {
        0.0
    } else {
        g.abs()
    }
}

/// Row normalization making every row a unit vector.
pub fn w_normalization(g: f64) -> f64 {
    if g >= 0.0 {
        (1.0 + g * g).powf(-0.5)
    } else {
        (1.0 + 3.0 * g * g).powf(-0.5)
    }
}

/// The normalized 4×4 W-tensor; rows are `(i, j)`, columns `(m, n)`, both as `2·first + second`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WTensor {
    g: f64,
    /// Row-major, 16 entries.
    entries: Vec<f64>,
    normalization: f64,
}

impl WTensor {
    pub fn new(g: f64) -> Result<Self, IsoTnsError> {
        if !(-1.0..=1.0).contains(&g) {
            return Err(IsoTnsError::CouplingOutOfRange(g));
        }
        let (f, s, a) = (off_parity(g), hopping(g), g.abs());
        let raw = [
            [1.0, f, f, a],
            [f, s, s, f],
            [f, s, s, f],
            [a, f, f, 1.0],
        ];
        let normalization = w_normalization(g);
        let entries = raw.iter().flatten().map(|x| x * normalization).collect();
        Ok(WTensor { g, entries, normalization })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// `W_{ijmn}`
    pub fn entry(&self, i: usize, j: usize, m: usize, n: usize) -> f64 {
        self.entries[(2 * i + j) * 4 + 2 * m + n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `max_{ij} |Σ_{mn} W²_{ijmn} − 1|`
    pub fn row_norm_defect(&self) -> f64 {
        self.entries.chunks(4).map(|row| (row.iter().map(|x| x * x).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self, IsoTnsError> {
        let w: WTensor = serde_json::from_str(text).map_err(|e| IsoTnsError::Json(e.to_string()))?;
        if w.entries.len() != 16 {
            return Err(IsoTnsError::Json(format!("expected 16 entries, found {}", w.entries.len())));
        }
        Ok(w)
    }
}

/// `T^{σγ}_{ijmn} = δ_{γi} δ_{σj} W_{ijmn}`: the physical legs copy the incoming virtual legs.
#[derive(Debug, Clone, PartialEq)]
pub struct PlumbedTensor {
    w: WTensor,
}

impl PlumbedTensor {
    pub fn w(&self) -> &WTensor {
        &self.w
    }

    /// `T^{σγ}_{ijmn}`
    pub fn entry(&self, sigma: usize, gamma: usize, i: usize, j: usize, m: usize, n: usize) -> f64 {
        if gamma == i && sigma == j {
            self.w.entry(i, j, m, n)
        } else {
            0.0
        }
    }

    /// `max |Σ_{σγmn} T*_{ijmn} T_{i'j'mn} − δ_{ii'}δ_{jj'}|`
    pub fn isometry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, j, ip, jp) in leg_configs() {
            let mut acc = 0.0;
            for sigma in 0..2 {
                for gamma in 0..2 {
                    for m in 0..2 {
                        for n in 0..2 {
                            acc += self.entry(sigma, gamma, i, j, m, n) * self.entry(sigma, gamma, ip, jp, m, n);
                        }
                    }
                }
            }
            let target = if i == ip && j == jp { 1.0 } else { 0.0 };
            worst = worst.max((acc - target).abs());
        }
        worst
    }

    /// Kraus matrices `T^{σγ}` as 4×4 maps `(i, j) → (m, n)`, ordered by `(σ, γ)`.
    pub fn kraus(&self) -> Vec<Vec<C64>> {
        let mut out = Vec::with_capacity(4);
        for sigma in 0..2 {
            for gamma in 0..2 {
                let mut k = vec![C64::new(0.0, 0.0); 16];
                for (i, j, m, n) in leg_configs() {
                    k[(2 * m + n) * 4 + 2 * i + j] = C64::new(self.entry(sigma, gamma, i, j, m, n), 0.0);
                }
                out.push(k);
            }
        }
        out
    }
}

fn leg_configs() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|b| (b >> 3 & 1, b >> 2 & 1, b >> 1 & 1, b & 1))
}

/// Plumbs `w` and checks the isometry condition.
pub fn plumb(w: &WTensor) -> Result<PlumbedTensor, IsoTnsError> {
    let t = PlumbedTensor { w: w.clone() };
    let defect = t.isometry_defect();
    if defect > ISOMETRY_TOL {
        return Err(IsoTnsError::Isometry(defect));
    }
    Ok(t)
}

/// Symmetry carried by a transfer map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VirtualSymmetry {
    None,
    /// `∏ Zᵢ`
    Parity,
    /// `∏ Zᵢ` and total particle number.
    ParityAndNumber,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferMetadata {
    #[serde(rename = "L")]
    pub l: usize,
    pub g: f64,
    pub cptp: bool,
    pub ordering: String,
    /// String tension, `−ln g`, for the deformed map.
    pub beta: Option<f64>,
}

/// An `L`-site ring map built as a staircase of two-site steps
/// `(0,1), (1,2), …, (L−1,0)`.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    meta: TransferMetadata,
    channel: KrausChannel,
    symmetry: VirtualSymmetry,
}

impl TransferOperator {
    pub fn metadata(&self) -> &TransferMetadata {
        &self.meta
    }

    pub fn metadata_json(&self) -> String {
        serde_json::to_string(&self.meta).expect("plain data")
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }

    pub fn n_sites(&self) -> usize {
        self.meta.l
    }

    pub fn is_cptp(&self) -> bool {
        self.meta.cptp
    }

    pub fn symmetry(&self) -> VirtualSymmetry {
        self.symmetry
    }

    /// The strong symmetries of the map, as sector-labelled unitaries.
    pub fn symmetries(&self) -> Vec<Symmetry> {
        let l = self.meta.l;
        match self.symmetry {
            VirtualSymmetry::None => Vec::new(),
            VirtualSymmetry::Parity => vec![Symmetry::all_z(l)],
            VirtualSymmetry::ParityAndNumber => vec![Symmetry::all_z(l), Symmetry::particle_number(l)],
        }
    }
}

fn staircase(l: usize, kraus: &[Vec<C64>], label: String) -> Result<KrausChannel, IsoTnsError> {
    let steps = (0..l)
        .map(|k| LocalChannel::new(vec![k, (k + 1) % l], kraus.to_vec()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(KrausChannel::new(l, label, steps)?)
}

/// The CPTP transfer channel of the plumbed W-tensor on an `L`-site ring.
pub fn ring_transfer_channel(w: &WTensor, l: usize) -> Result<TransferOperator, IsoTnsError> {
    if l < 2 {
        return Err(IsoTnsError::RingTooSmall(l));
    }
    let t = plumb(w)?;
    let channel = staircase(l, &t.kraus(), format!("W(g={})", w.g()))?;
    let symmetry = if w.g() == 0.0 {
        VirtualSymmetry::ParityAndNumber
    } else if w.g() > 0.0 {
        VirtualSymmetry::Parity
    } else {
        VirtualSymmetry::None
    };
    let meta = TransferMetadata { l, g: w.g(), cptp: channel.is_cptp(), ordering: "staircase".into(), beta: None };
    Ok(TransferOperator { meta, channel, symmetry })
}

/// The row transfer map of `∏ e^{βZ}|TC⟩` with `β = −ln g`.
///
/// Each Kraus operator `T^{σγ}` of the `g = 1` tensor is scaled by
/// `(w_σ w_γ)^{1/2}`, `w_σ = e^{β(−1)^σ}`, so the map itself carries `w_σ w_γ`
/// once. A closed loop of occupied links then has weight `g²` per link in the
/// norm, the low-temperature expansion of the Ising model at `e^{−2K} = g²`.
pub fn deformed_tc_transfer(g: f64, l: usize) -> Result<TransferOperator, IsoTnsError> {
    if !(g > 0.0 && g <= 1.0) {
        return Err(IsoTnsError::CouplingOutOfRange(g));
    }
    if l < 2 {
        return Err(IsoTnsError::RingTooSmall(l));
    }
    let beta = -g.ln();
    let t = plumb(&WTensor::new(1.0)?)?;
    let weight = |s: usize| (beta * if s == 0 { 1.0 } else { -1.0 }).exp();
    let mut kraus = t.kraus();
    for (idx, k) in kraus.iter_mut().enumerate() {
        let (sigma, gamma) = (idx >> 1, idx & 1);
        let scale = (weight(sigma) * weight(gamma)).sqrt();
        k.iter_mut().for_each(|x| *x *= scale);
    }
    let channel = staircase(l, &kraus, format!("deformed TC (g={g})"))?;
    let meta = TransferMetadata { l, g, cptp: channel.is_cptp(), ordering: "staircase".into(), beta: Some(beta) };
    Ok(TransferOperator { meta, channel, symmetry: VirtualSymmetry::Parity })
}

/// `|+⟩^{⊗L}` projected onto the `∏Z = sector` subspace.
pub fn symmetric_input(l: usize, sector: Option<i64>) -> Result<DenseOperator, IsoTnsError> {
    let plus = StateVector::plus_state(l).density();
    match sector {
        None => Ok(plus),
        Some(q) => Ok(sector_project(&plus, &Symmetry::all_z(l), q)?),
    }
}

/// Boundary state of the transfer map: the fixed point reached from the
/// symmetric input in `sector` (a `∏Z` eigenvalue).
///
/// Non-CPTP maps are iterated with trace renormalization and Hermitization,
/// which converges to the leading eigen-operator of the chosen sector.
pub fn boundary_rdm(t: &TransferOperator, sector: Option<i64>, opts: FixedPointOptions) -> Result<DensityMatrix, IsoTnsError> {
    if sector.is_none() && t.symmetry != VirtualSymmetry::None {
        return Err(IsoTnsError::AmbiguousSector);
    }
    let rho0 = symmetric_input(t.n_sites(), sector)?;
    let opts = FixedPointOptions { renormalize: !t.is_cptp(), ..opts };
    let fp = iterate_to_fixed_point(&t.channel, &rho0, opts)?;
    if !fp.converged {
        return Err(IsoTnsError::NotConverged { iterations: fp.iterations, residual: fp.residual });
    }
    Ok(DensityMatrix::normalized(&fp.state)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_of_w() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let w1 = WTensor::new(1.0).unwrap();
        for (i, j, m, n) in leg_configs() {
            let expect = if (i + j + m + n) % 2 == 0 { h } else { 0.0 };
            assert!((w1.entry(i, j, m, n) - expect).abs() < 1e-15);
        }
        let wm = WTensor::new(-1.0).unwrap();
        assert!(wm.entries().iter().all(|x| (x - 0.5).abs() < 1e-15));
        let w0 = WTensor::new(0.0).unwrap();
        for (i, j, m, n) in leg_configs() {
            let expect = match (i + j, m + n) {
                (1, 1) => h,
                (0, 0) | (2, 2) => 1.0,
                _ => 0.0,
            };
            assert!((w0.entry(i, j, m, n) - expect).abs() < 1e-15, "{i}{j}{m}{n}");
        }
    }

    #[test]
    fn range_checked() {
        assert!(WTensor::new(1.5).is_err());
        assert!(deformed_tc_transfer(0.0, 4).is_err());
        assert!(ring_transfer_channel(&WTensor::new(0.5).unwrap(), 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let w = WTensor::new(-0.3).unwrap();
        let back = WTensor::from_json(&w.to_json()).unwrap();
        assert_eq!(back, w);
        let v: serde_json::Value = serde_json::from_str(&w.to_json()).unwrap();
        for key in ["g", "entries", "normalization"] {
            assert!(v.get(key).is_some());
        }
    }

    #[test]
    fn plumbed_isometry_and_trace_preservation() {
        for g in [-1.0, -0.6, -0.1, 0.0, 0.2, 0.7, 1.0] {
            let w = WTensor::new(g).unwrap();
            assert!(w.row_norm_defect() < 1e-12);
            let t = plumb(&w).unwrap();
            assert!(t.isometry_defect() < 1e-12);
            let ring = ring_transfer_channel(&w, 4).unwrap();
            assert!(ring.is_cptp());
            assert!(ring.channel().completeness_defect() < 1e-10);
        }
    }

    #[test]
    fn torus_patch_amplitudes_are_uniform_on_closed_loops() {
        // 2×2 periodic patch: vertex (x, y) owns its right link h(x,y) and up link v(x,y).
        // The incoming legs are the left link h(x−1,y) and the down link v(x,y−1).
        let t = plumb(&WTensor::new(1.0).unwrap()).unwrap();
        let h = |c: usize, x: usize, y: usize| c >> (2 * (y % 2) + x % 2) & 1;
        let v = |c: usize, x: usize, y: usize| c >> (4 + 2 * (y % 2) + x % 2) & 1;
        let mut nonzero = Vec::new();
        for c in 0..256usize {
            let mut amp = 1.0;
            for x in 0..2 {
                for y in 0..2 {
                    let i = h(c, x + 1, y);
                    let j = v(c, x, y + 1);
                    amp *= t.entry(j, i, i, j, h(c, x, y), v(c, x, y));
                }
            }
            if amp != 0.0 {
                nonzero.push(amp);
            }
        }
        assert_eq!(nonzero.len(), 32);
        assert!(nonzero.iter().all(|a| (a - 0.25).abs() < 1e-15));
    }

    #[test]
    fn g_one_channel_conserves_pair_parity() {
        let t = ring_transfer_channel(&WTensor::new(1.0).unwrap(), 2).unwrap();
        for b in 0..4 {
            let mut rho = DenseOperator::zeros(2);
            rho.set(b, b, C64::new(1.0, 0.0));
            let out = t.channel().apply(&rho).unwrap();
            let parity = (b.count_ones() % 2) as usize;
            for k in 0..4 {
                if (k as u32).count_ones() as usize % 2 != parity {
                    assert!(out.get(k, k).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn deformed_at_one_matches_ring_channel() {
        let a = deformed_tc_transfer(1.0, 4).unwrap();
        let b = ring_transfer_channel(&WTensor::new(1.0).unwrap(), 4).unwrap();
        assert!(a.is_cptp());
        let rho = symmetric_input(4, None).unwrap();
        assert!(a.channel().apply(&rho).unwrap().sub(&b.channel().apply(&rho).unwrap()).max_abs() < 1e-12);
        assert!(!deformed_tc_transfer(0.7, 4).unwrap().is_cptp());
    }

    #[test]
    fn metadata_json_keys() {
        let t = deformed_tc_transfer(0.5, 4).unwrap();
        let v: serde_json::Value = serde_json::from_str(&t.metadata_json()).unwrap();
        for key in ["L", "g", "cptp", "ordering", "beta"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn boundary_needs_sector_when_symmetric() {
        let t = ring_transfer_channel(&WTensor::new(0.5).unwrap(), 4).unwrap();
        assert_eq!(boundary_rdm(&t, None, FixedPointOptions::default()).unwrap_err(), IsoTnsError::AmbiguousSector);
    }
}
