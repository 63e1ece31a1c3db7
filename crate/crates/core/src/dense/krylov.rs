//! Restarted block Krylov (Rayleigh–Ritz) solver for the largest-magnitude
//! eigenvalues of a matrix-free linear map.

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DenseError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    /// Number of eigenvalues wanted.
    pub n_eigs: usize,
    /// Vectors added per expansion; should be at least the expected degeneracy.
    pub block: usize,
    /// Basis size before restart; clamped to at least `n_eigs + block`.
    pub max_basis: usize,
    /// Residual tolerance relative to the largest magnitude.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

impl KrylovOptions {
    pub fn new(n_eigs: usize) -> Self {
        KrylovOptions {
            n_eigs,
            block: 4,
            max_basis: (2 * n_eigs).max(30),
            tol: 1e-9,
            max_restarts: 400,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RitzPair {
    pub value: C64,
    pub vector: Vec<C64>,
    /// `‖A y − θ y‖` for the unit Ritz vector `y`.
    pub residual: f64,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C64], alpha: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
}

/// Orthogonalizes `v` against `basis` twice. Returns the norm before scaling, or
/// `None` if `v` was (numerically) inside the span.
fn orthonormalize_against(basis: &[Vec<C64>], v: &mut [C64]) -> Option<f64> {
    let before = norm(v);
    if before == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            axpy(v, -c, b);
        }
    }
    let after = norm(v);
    if after < 1e-10 * before {
        return None;
    }
    let s = C64::new(1.0 / after, 0.0);
    v.iter_mut().for_each(|x| *x *= s);
    Some(after)
}

/// Largest-magnitude eigenpairs of the `dim`-dimensional map `apply`.
///
/// Pairs come back sorted by decreasing `|θ|`.
pub fn block_krylov(
    dim: usize,
    apply: impl Fn(&[C64]) -> Vec<C64>,
    opts: KrylovOptions,
) -> Result<Vec<RitzPair>, DenseError> {
    let want = opts.n_eigs.min(dim).max(1);
    let block = opts.block.max(1).min(dim);
    let max_basis = opts.max_basis.max(want + block).min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut images: Vec<Vec<C64>> = Vec::new();
    let mut candidates: Vec<Vec<C64>> = (0..block).map(|_| random_vector(&mut rng, dim)).collect();
    let mut last_residual = f64::INFINITY;

    for _restart in 0..=opts.max_restarts {
        // Expand until the basis is full.
        while basis.len() < max_basis {
            let mut added = Vec::new();
            for mut v in candidates.drain(..) {
                if basis.len() >= max_basis {
                    break;
                }
                let mut ok = orthonormalize_against(&basis, &mut v);
                let mut tries = 0;
                while ok.is_none() && tries < 3 {
                    v = random_vector(&mut rng, dim);
                    ok = orthonormalize_against(&basis, &mut v);
                    tries += 1;
                }
                if ok.is_none() {
                    continue;
                }
                let w = apply(&v);
                basis.push(v);
                images.push(w);
                added.push(images.len() - 1);
            }
            if added.is_empty() {
                if basis.len() == dim {
                    break;
                }
                candidates = (0..block).map(|_| random_vector(&mut rng, dim)).collect();
                continue;
            }
            candidates = added.iter().map(|&i| images[i].clone()).collect();
        }

        let m = basis.len();
        let h = Mat::<C64>::from_fn(m, m, |i, j| dot(&basis[i], &images[j]));
        let eig = h.eigen().map_err(|_| DenseError::Eigen)?;
        let vals = eig.S().column_vector();
        let vecs = eig.U();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| vals[b].norm().total_cmp(&vals[a].norm()).then(a.cmp(&b)));

        let mut pairs = Vec::with_capacity(want);
        let mut ritz_images = Vec::with_capacity(want);
        for &idx in order.iter().take(want) {
            let theta = vals[idx];
            let mut y = vec![C64::new(0.0, 0.0); dim];
            let mut ay = vec![C64::new(0.0, 0.0); dim];
            for j in 0..m {
                let c = vecs[(j, idx)];
                axpy(&mut y, c, &basis[j]);
                axpy(&mut ay, c, &images[j]);
            }
            let ny = norm(&y);
            let s = C64::new(1.0 / ny, 0.0);
            y.iter_mut().for_each(|x| *x *= s);
            ay.iter_mut().for_each(|x| *x *= s);
            let mut r = ay.clone();
            axpy(&mut r, -theta, &y);
            let res = norm(&r);
            pairs.push(RitzPair { value: theta, vector: y, residual: res });
            ritz_images.push((ay, r));
        }
        let scale = pairs[0].value.norm().max(1e-300);
        last_residual = pairs.iter().map(|p| p.residual / scale).fold(0.0, f64::max);
        if last_residual < opts.tol || m == dim {
            return Ok(pairs);
        }

        // Thick restart: keep the Ritz vectors (with their images) and continue
        // from the residuals of the least converged ones.
        let mut next_basis: Vec<Vec<C64>> = Vec::with_capacity(max_basis);
        let mut next_images: Vec<Vec<C64>> = Vec::with_capacity(max_basis);
        for (p, (ay, _)) in pairs.iter().zip(&ritz_images) {
            let mut v = p.vector.clone();
            let mut w = ay.clone();
            for _ in 0..2 {
                for (b, bw) in next_basis.iter().zip(&next_images) {
                    let c = dot(b, &v);
                    axpy(&mut v, -c, b);
                    axpy(&mut w, -c, bw);
                }
            }
            let nv = norm(&v);
            if nv < 1e-10 {
                continue;
            }
            let s = C64::new(1.0 / nv, 0.0);
            v.iter_mut().for_each(|x| *x *= s);
            w.iter_mut().for_each(|x| *x *= s);
            next_basis.push(v);
            next_images.push(w);
        }
        let mut by_residual: Vec<usize> = (0..pairs.len()).collect();
        by_residual.sort_by(|&a, &b| pairs[b].residual.total_cmp(&pairs[a].residual));
        candidates = by_residual.iter().take(block).map(|&i| ritz_images[i].1.clone()).collect();
        basis = next_basis;
        images = next_images;
    }
    Err(DenseError::NoConvergence { iterations: opts.max_restarts, residual: last_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_apply(d: &[f64]) -> impl Fn(&[C64]) -> Vec<C64> + '_ {
        move |v| v.iter().zip(d).map(|(x, s)| x * s).collect()
    }

    #[test]
    fn diagonal_spectrum() {
        let d: Vec<f64> = (0..300).map(|i| 1.0 / (1.0 + i as f64 * 0.05)).collect();
        let pairs = block_krylov(d.len(), diag_apply(&d), KrylovOptions::new(4)).unwrap();
        for (k, p) in pairs.iter().enumerate() {
            assert!((p.value.re - d[k]).abs() < 1e-8, "{k}: {:?}", p.value);
            assert!(p.value.im.abs() < 1e-8);
        }
    }

    #[test]
    fn degenerate_leading_values() {
        let mut d: Vec<f64> = (0..200).map(|i| 0.9 - 0.004 * i as f64).collect();
        d[7] = 1.0;
        d[50] = -1.0;
        d[120] = 1.0;
        let pairs = block_krylov(d.len(), diag_apply(&d), KrylovOptions::new(5)).unwrap();
        let mags: Vec<f64> = pairs.iter().map(|p| p.value.norm()).collect();
        for m in &mags[..3] {
            assert!((m - 1.0).abs() < 1e-9);
        }
        assert!((mags[3] - 0.9).abs() < 1e-8);
    }

    #[test]
    fn rotation_block_gives_complex_pair() {
        // 2×2 rotation by 0.3 scaled by 0.95, plus a small diagonal tail.
        let n = 50;
        let (c, s) = (0.95 * 0.3f64.cos(), 0.95 * 0.3f64.sin());
        let apply = move |v: &[C64]| {
            let mut out: Vec<C64> = v.iter().enumerate().map(|(i, x)| x * (0.5 / (1.0 + i as f64))).collect();
            out[0] = v[0] * c - v[1] * s;
            out[1] = v[0] * s + v[1] * c;
            out
        };
        let pairs = block_krylov(n, apply, KrylovOptions::new(2)).unwrap();
        assert!((pairs[0].value.norm() - 0.95).abs() < 1e-9);
        assert!((pairs[1].value.norm() - 0.95).abs() < 1e-9);
        assert!((pairs[0].value.im.abs() - 0.95 * 0.3f64.sin()).abs() < 1e-9);
    }
}
