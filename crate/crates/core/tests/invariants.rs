//! Property tests of the stabilizer layer against dense linear algebra, and of
//! channel and diagnostic invariants on random inputs.

use num_complex::Complex64;
use proptest::prelude::*;
use swssb::dense::{DenseOperator, DensityMatrix, StateVector};
use swssb::diagnostics::{cmi, uhlmann_fidelity, von_neumann_entropy};
use swssb::holography::ising_chain_channel;
use swssb::partition::Partition;
use swssb::pauli::{conjugate_all, stabilizer_entropy, CliffordGate, ControlBasis, PauliOperator, StabilizerGroup};

const N: usize = 4;

fn pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
    (prop::collection::vec(0usize..4, n), any::<bool>()).prop_map(|(letters, neg)| {
        let s: String = letters.iter().map(|&k| ['I', 'X', 'Y', 'Z'][k]).collect();
        format!("{}{s}", if neg { "-" } else { "" }).parse().unwrap()
    })
}

/// A Hadamard or a controlled Pauli whose target avoids the control.
fn gate(n: usize) -> impl Strategy<Value = CliffordGate> {
    prop_oneof![
        (0..n).prop_map(CliffordGate::Hadamard),
        (0..n, any::<bool>(), pauli(n)).prop_filter_map("trivial target", move |(c, z_basis, p)| {
            let target = p.restricted_to(&(0..n).filter(|&q| q != c).collect::<Vec<_>>()).with_phase(swssb::pauli::Phase::ONE);
            if target.is_identity() {
                return None;
            }
            let basis = if z_basis { ControlBasis::Z } else { ControlBasis::X };
            CliffordGate::controlled(c, basis, target).ok()
        }),
    ]
}

fn random_state(n: usize) -> impl Strategy<Value = DensityMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("zero vector", move |amps| {
        let amps = amps.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let psi = StateVector::from_amplitudes(n, amps).ok()?.normalized().ok()?;
        DensityMatrix::normalized(&psi.density()).ok()
    })
}

/// Mixture of two random pure states, so entropies are not all trivial.
fn random_mixed(n: usize) -> impl Strategy<Value = DensityMatrix> {
    (random_state(n), random_state(n), 0.0f64..1.0).prop_map(|(a, b, w)| {
        let m = a.operator().scale(Complex64::new(w, 0.0)).add(&b.operator().scale(Complex64::new(1.0 - w, 0.0)));
        DensityMatrix::normalized(&m).unwrap()
    })
}

fn region(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(any::<bool>(), n)
        .prop_map(|mask| mask.iter().enumerate().filter(|(_, &b)| b).map(|(q, _)| q).collect::<Vec<_>>())
        .prop_filter("empty region", |r| !r.is_empty())
}

fn tripartition(n: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(0usize..4, n).prop_filter_map("empty A or C", move |labels| {
        let pick = |k: usize| labels.iter().enumerate().filter(|(_, &l)| l == k).map(|(q, _)| q).collect::<Vec<_>>();
        Partition::new(n, pick(0), pick(1), pick(2)).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_matches_dense(p in pauli(N), q in pauli(N)) {
        let pq = p.multiply(&q).unwrap();
        let dense = DenseOperator::from_pauli(&p).matmul(&DenseOperator::from_pauli(&q));
        prop_assert!(DenseOperator::from_pauli(&pq).sub(&dense).max_abs() < 1e-12);
        let qp = q.multiply(&p).unwrap();
        prop_assert_eq!(p.commutes(&q).unwrap(), pq == qp);
    }

    #[test]
    fn conjugation_matches_dense(gates in prop::collection::vec(gate(N), 1..5), p in pauli(N)) {
        let pushed = conjugate_all(&gates, &p).unwrap();
        let mut dense = DenseOperator::from_pauli(&p);
        for g in &gates {
            let u = DenseOperator::from_clifford(g, N);
            dense = u.matmul(&dense).matmul(&u.adjoint());
        }
        prop_assert!(DenseOperator::from_pauli(&pushed).sub(&dense).max_abs() < 1e-10, "{} -> {}", p, pushed);
    }

    #[test]
    fn stabilizer_entropy_matches_dense(
        gates in prop::collection::vec(gate(N), 0..8),
        keep in prop::collection::vec(any::<bool>(), N),
        part in region(N),
    ) {
        // Conjugated single-qubit Z's form an independent commuting set; drop some to get a mixed state.
        let gens: Vec<PauliOperator> = (0..N)
            .filter(|&q| keep[q])
            .map(|q| conjugate_all(&gates, &PauliOperator::z_on(N, &[q]).unwrap()).unwrap())
            .collect();
        let group = StabilizerGroup::new(N, gens).unwrap();
        let rho = DensityMatrix::from_stabilizers(&group);
        let dense = von_neumann_entropy(&rho, Some(&part)).unwrap();
        prop_assert!((dense - stabilizer_entropy(&group, &part)).abs() < 1e-9);
    }

    #[test]
    fn channel_preserves_trace_and_hermiticity(rho in random_mixed(N), p_x in 0.0f64..1.0, p_z in 0.0f64..1.0) {
        let out = ising_chain_channel(N, p_x, p_z).unwrap().apply(rho.operator()).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.hermiticity_defect() < 1e-12);
        prop_assert!(out.hermitian_eigenvalues().unwrap().iter().all(|&v| v > -1e-12));
    }

    #[test]
    fn cmi_is_nonnegative(rho in random_mixed(N), part in tripartition(N)) {
        prop_assert!(cmi(&rho, &part).unwrap() > -1e-9);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in random_mixed(3), b in random_mixed(3)) {
        let ab = uhlmann_fidelity(&a, &b).unwrap();
        let ba = uhlmann_fidelity(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-8);
        prop_assert!((-1e-10..=1.0 + 1e-8).contains(&ab));
        prop_assert!((uhlmann_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-8);
    }
}
