//! The repeated channels acting directly on the system register, without ancillas.

use crate::dense::{DenseError, KrausChannel, LocalChannel};
use crate::pauli::{Pauli, PauliError, PauliOperator, StabilizerGroup};

use super::lattice::{Link, Torus};
use super::HolographyError;

fn probability(p: f64) -> Result<(), HolographyError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(HolographyError::Probability(p))
    }
}

/// Flip channel for the local Pauli spelled by `letters` on `sites`, in order.
fn flip(p: f64, letters: &str, sites: Vec<usize>) -> Result<LocalChannel, HolographyError> {
    let local: PauliOperator = letters.parse()?;
    Ok(LocalChannel::pauli_flip(p, &local, sites)?)
}

fn uniform(p: f64, letter: char, sites: Vec<usize>) -> Result<LocalChannel, HolographyError> {
    let letters: String = std::iter::repeat_n(letter, sites.len()).collect();
    flip(p, &letters, sites)
}

fn channel(n: usize, label: &str, steps: Vec<LocalChannel>) -> Result<KrausChannel, HolographyError> {
    KrausChannel::new(n, label, steps).map_err(|e: DenseError| e.into())
}

/// `∏ᵢ 𝓔^{ZZ}_{i,i+1} ∏ᵢ 𝓔^X_i` on a ring of `l` sites: X flips act first.
pub fn ising_chain_channel(l: usize, p_x: f64, p_z: f64) -> Result<KrausChannel, HolographyError> {
    if l < 2 {
        return Err(HolographyError::Size(format!("ring needs at least 2 sites, got {l}")));
    }
    probability(p_x)?;
    probability(p_z)?;
    let mut steps = Vec::with_capacity(2 * l);
    for i in 0..l {
        steps.push(uniform(p_x, 'X', vec![i])?);
    }
    for i in 0..l {
        steps.push(uniform(p_z, 'Z', vec![i, (i + 1) % l])?);
    }
    channel(l, "ising_chain", steps)
}

fn site(t: &Torus, (a, b): (usize, usize)) -> usize {
    b * t.lx + a
}

/// 0-form channel on an `lx × ly` torus of sites: X flips, then ZZ flips on every bond.
pub fn zero_form_channel(lx: usize, ly: usize, p_x: f64, p_z: f64) -> Result<KrausChannel, HolographyError> {
    let t = Torus::new(lx, ly)?;
    probability(p_x)?;
    probability(p_z)?;
    let mut steps = Vec::new();
    for v in t.vertices() {
        steps.push(uniform(p_x, 'X', vec![site(&t, v)])?);
    }
    for (da, db) in [(1, 0), (0, 1)] {
        for v in t.vertices() {
            steps.push(uniform(p_z, 'Z', vec![site(&t, v), site(&t, t.shift(v, da, db))])?);
        }
    }
    channel(t.n_vertices(), "zero_form", steps)
}

/// 1-form channel on the links of an `lx × ly` torus: X flips on links, then star flips.
pub fn one_form_channel(lx: usize, ly: usize, p_x: f64, p_z: f64) -> Result<KrausChannel, HolographyError> {
    let t = Torus::new(lx, ly)?;
    probability(p_x)?;
    probability(p_z)?;
    let mut steps = Vec::new();
    for i in 0..t.n_links() {
        steps.push(uniform(p_x, 'X', vec![i])?);
    }
    for v in t.vertices() {
        steps.push(uniform(p_z, 'Z', t.star_ids(v))?);
    }
    channel(t.n_links(), "one_form", steps)
}

/// Fermionic 1-form channel: hops `X_ℓ Z_{ℓ'}` on x-links, then y-links, then star flips.
///
/// Probabilities are flip probabilities for each hop and star.
pub fn fermionic_one_form_channel(lx: usize, ly: usize, flip_link: f64, flip_vertex: f64) -> Result<KrausChannel, HolographyError> {
    let t = Torus::new(lx, ly)?;
    probability(flip_link)?;
    probability(flip_vertex)?;
    let (xs, ys): (Vec<Link>, Vec<Link>) = t.links().into_iter().partition(|l| matches!(l, Link::X(..)));
    let mut steps = Vec::new();
    for l in xs.into_iter().chain(ys) {
        steps.push(flip(flip_link, "XZ", vec![t.link_id(l), t.link_id(t.fermion_partner(l))])?);
    }
    for v in t.vertices() {
        steps.push(uniform(flip_vertex, 'Z', t.star_ids(v))?);
    }
    channel(t.n_links(), "fermionic_one_form", steps)
}

/// Subsystem channel on an `lx × ly` torus of sites: X flips, then Z⊗4 on every plaquette's corners.
pub fn subsystem_channel(lx: usize, ly: usize, p_x: f64, p_z: f64) -> Result<KrausChannel, HolographyError> {
    let t = Torus::new(lx, ly)?;
    probability(p_x)?;
    probability(p_z)?;
    let mut steps = Vec::new();
    for v in t.vertices() {
        steps.push(uniform(p_x, 'X', vec![site(&t, v)])?);
    }
    for v in t.vertices() {
        let corners = [(0, 0), (1, 0), (0, 1), (1, 1)].iter().map(|&(da, db)| site(&t, t.shift(v, da, db))).collect();
        steps.push(uniform(p_z, 'Z', corners)?);
    }
    channel(t.n_vertices(), "subsystem", steps)
}

/// Majorana chain on `l` sites after Jordan–Wigner: bond flips `iη'ᵢηᵢ₊₁` with
/// probability `p_bond` (the wrap bond included, as `Y Z⋯Z Y`), then parity
/// flips `Zᵢ` with probability `p_parity`.
pub fn jordan_wigner_channel(l: usize, p_bond: f64, p_parity: f64) -> Result<KrausChannel, HolographyError> {
    if l < 2 {
        return Err(HolographyError::Size(format!("chain needs at least 2 sites, got {l}")));
    }
    probability(p_bond)?;
    probability(p_parity)?;
    let mut steps = Vec::new();
    for i in 0..l - 1 {
        steps.push(uniform(p_bond, 'X', vec![i, i + 1])?);
    }
    let wrap = format!("Y{}Y", "Z".repeat(l - 2));
    steps.push(flip(p_bond, &wrap, (0..l).collect())?);
    for i in 0..l {
        steps.push(uniform(p_parity, 'Z', vec![i])?);
    }
    channel(l, "jordan_wigner", steps)
}

/// Total fermion parity `∏ᵢ Zᵢ`.
pub fn parity_image(l: usize) -> Result<PauliOperator, HolographyError> {
    Ok(PauliOperator::on_sites(l, Pauli::Z, &(0..l).collect::<Vec<_>>())?)
}

/// `{∏ X}` on `n` sites: the steady state of the 0-form channel is `(1 + ∏X)/2ⁿ`.
pub fn zero_form_steady_group(n: usize) -> Result<StabilizerGroup, HolographyError> {
    let all: Vec<usize> = (0..n).collect();
    Ok(StabilizerGroup::new(n, vec![PauliOperator::x_on(n, &all)?])?)
}

/// Independent plaquette operators `B_p = X⊗4` on the links of the torus.
pub fn one_form_steady_group(lx: usize, ly: usize) -> Result<StabilizerGroup, HolographyError> {
    let t = Torus::new(lx, ly)?;
    let n = t.n_links();
    let plaquettes = t.vertices().into_iter().map(|v| PauliOperator::x_on(n, &t.plaquette_ids(v))).collect::<Result<Vec<_>, PauliError>>()?;
    Ok(StabilizerGroup::from_spanning(n, plaquettes)?)
}

/// Independent products `A_v B_{p(v)}` with `p(v)` the plaquette below and to the right of `v`.
pub fn fermionic_steady_group(lx: usize, ly: usize) -> Result<StabilizerGroup, HolographyError> {
    let t = Torus::new(lx, ly)?;
    let n = t.n_links();
    let mut ops = Vec::new();
    for v in t.vertices() {
        let star = PauliOperator::z_on(n, &t.star_ids(v))?;
        let plaq = PauliOperator::x_on(n, &t.plaquette_ids(t.bottom_right_plaquette(v)))?;
        ops.push(star.multiply(&plaq)?);
    }
    Ok(StabilizerGroup::from_spanning(n, ops)?)
}

/// Row and column products of X on the site torus, the symmetries kept by the subsystem channel.
pub fn subsystem_steady_group(lx: usize, ly: usize) -> Result<StabilizerGroup, HolographyError> {
    let t = Torus::new(lx, ly)?;
    let n = t.n_vertices();
    let mut ops = Vec::new();
    for b in 0..ly {
        ops.push(PauliOperator::x_on(n, &(0..lx).map(|a| site(&t, (a, b))).collect::<Vec<_>>())?);
    }
    for a in 0..lx {
        ops.push(PauliOperator::x_on(n, &(0..ly).map(|b| site(&t, (a, b))).collect::<Vec<_>>())?);
    }
    Ok(StabilizerGroup::from_spanning(n, ops)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{DensityMatrix, DenseOperator};

    fn commutes_with(ch: &KrausChannel, p: &PauliOperator) -> f64 {
        ch.symmetry_commutator(&DenseOperator::from_pauli(p)).unwrap()
    }

    #[test]
    fn channels_are_cptp() {
        assert!(ising_chain_channel(4, 0.2, 0.3).unwrap().is_cptp());
        assert!(zero_form_channel(2, 2, 0.2, 0.3).unwrap().is_cptp());
        assert!(one_form_channel(2, 2, 0.2, 0.3).unwrap().is_cptp());
        assert!(fermionic_one_form_channel(2, 2, 0.2, 0.3).unwrap().is_cptp());
        assert!(subsystem_channel(2, 3, 0.2, 0.3).unwrap().is_cptp());
        assert!(jordan_wigner_channel(4, 0.2, 0.3).unwrap().is_cptp());
    }

    #[test]
    fn steady_group_elements_are_symmetries() {
        let ch = one_form_channel(2, 2, 0.3, 0.1).unwrap();
        for g in one_form_steady_group(2, 2).unwrap().generators() {
            assert!(commutes_with(&ch, g) < 1e-10);
        }
        let ch = fermionic_one_form_channel(2, 2, 0.3, 0.1).unwrap();
        for g in fermionic_steady_group(2, 2).unwrap().generators() {
            assert!(commutes_with(&ch, g) < 1e-10);
        }
        let ch = subsystem_channel(3, 2, 0.3, 0.1).unwrap();
        for g in subsystem_steady_group(3, 2).unwrap().generators() {
            assert!(commutes_with(&ch, g) < 1e-10);
        }
        assert!(commutes_with(&jordan_wigner_channel(5, 0.3, 0.2).unwrap(), &parity_image(5).unwrap()) < 1e-10);
    }

    #[test]
    fn ranks() {
        assert_eq!(one_form_steady_group(3, 3).unwrap().len(), 8);
        assert_eq!(subsystem_steady_group(3, 4).unwrap().len(), 6);
        assert_eq!(fermionic_steady_group(3, 3).unwrap().len(), 8);
    }

    #[test]
    fn half_noise_zero_form_reaches_steady_state() {
        let ch = zero_form_channel(2, 2, 0.5, 0.5).unwrap();
        let rho = DensityMatrix::plus_product(4);
        let out = ch.apply(rho.operator()).unwrap();
        let expected = DensityMatrix::from_stabilizers(&zero_form_steady_group(4).unwrap());
        let diff = out.sub(expected.operator());
        assert!(diff.max_abs() < 1e-12);
    }
}
