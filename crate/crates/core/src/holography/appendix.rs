//! Structural checks of the stabilizer flow through each construction.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dense::{DenseOperator, DensityMatrix, StateVector};
use crate::pauli::{Pauli, PauliOperator, StabilizerGroup};

use super::channels::{
    fermionic_one_form_channel, fermionic_steady_group, ising_chain_channel, one_form_channel, one_form_steady_group,
    subsystem_channel, subsystem_steady_group, zero_form_steady_group,
};
use super::circuit::{system_state, SequentialCircuit};
use super::constructions::{
    build_1d_channel_circuit_cut, build_fermionic_circuit, build_one_form_circuit, build_subsystem_circuit,
    build_zero_form_circuit, BoundaryCut, OneFormInput,
};
use super::flow::{connecting_string, extract_boundary_structure, push_through};
use super::lattice::{Link, QubitKind, QubitLabel, Torus};
use super::{evolve_initial_stabilizers, HolographyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Appendix {
    /// 1d Ising channel, 2d toric-code bulk.
    A,
    /// 2d 0-form channel.
    D,
    /// 2d 1-form channel.
    E,
    /// 2d fermionic 1-form channel.
    F,
    /// Subsystem channel with line-like symmetries.
    Subsystem,
}

impl FromStr for Appendix {
    type Err = HolographyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Appendix::A),
            "d" => Ok(Appendix::D),
            "e" => Ok(Appendix::E),
            "f" => Ok(Appendix::F),
            "subsystem" | "s" => Ok(Appendix::Subsystem),
            _ => Err(HolographyError::Invalid(format!("unknown construction {s:?}"))),
        }
    }
}

impl fmt::Display for Appendix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Appendix::A => "A",
            Appendix::D => "D",
            Appendix::E => "E",
            Appendix::F => "F",
            Appendix::Subsystem => "subsystem",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixReport {
    pub appendix: String,
    pub checks: Vec<AppendixCheck>,
}

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

struct Checks(Vec<AppendixCheck>);

impl Checks {
    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.0.push(AppendixCheck { name: name.to_string(), passed, detail: detail.into() });
    }

    /// Exact image check, separating letter mismatches from sign mismatches.
    fn image(&mut self, name: &str, got: &PauliOperator, expected: &PauliOperator) {
        let detail = format!("got {got}, expected {expected}");
        if got.letters() == expected.letters() && got.phase() != expected.phase() {
            self.push(name, false, format!("sign mismatch: {detail}"));
        } else {
            self.push(name, got == expected, detail);
        }
    }

    fn member(&mut self, name: &str, group: &StabilizerGroup, p: &PauliOperator) -> Result<(), HolographyError> {
        let signed = group.contains(p)?;
        let unsigned = group.contains_up_to_sign(p)?;
        let detail = match (signed, unsigned) {
            (true, _) => format!("{p} is in the group"),
            (false, true) => format!("sign mismatch: {p} is in the group only with the opposite sign"),
            (false, false) => format!("{p} is not in the group"),
        };
        self.push(name, signed, detail);
        Ok(())
    }
}

/// Pauli on `n` qubits from `(qubit, letter)` pairs.
fn pauli(n: usize, letters: &[(usize, Pauli)]) -> Result<PauliOperator, HolographyError> {
    let mut p = PauliOperator::identity(n);
    for &(q, l) in letters {
        p = p.multiply(&PauliOperator::single(n, q, l)?)?;
    }
    Ok(p)
}

fn ids(c: &SequentialCircuit, labels: &[QubitLabel]) -> Result<Vec<usize>, HolographyError> {
    labels.iter().map(|&l| c.lattice().id_of(l)).collect()
}

fn uniform(c: &SequentialCircuit, letter: Pauli, labels: &[QubitLabel]) -> Result<PauliOperator, HolographyError> {
    Ok(PauliOperator::on_sites(c.n_qubits(), letter, &ids(c, labels)?)?)
}

fn anc(kind: QubitKind, x: usize, y: usize, k: usize) -> QubitLabel {
    QubitLabel::ancilla(kind, x, y, k)
}

fn link_anc(link: Link, k: usize) -> QubitLabel {
    match link {
        Link::X(a, b) => anc(QubitKind::XLink, a, b, k),
        Link::Y(a, b) => anc(QubitKind::YLink, a, b, k),
    }
}

fn full_rank(checks: &mut Checks, c: &SequentialCircuit, g: &StabilizerGroup) {
    checks.push("full_rank", g.len() == c.n_qubits(), format!("{} independent generators on {} qubits", g.len(), c.n_qubits()));
}

/// Largest deviation between the circuit's system channel and `direct` on `rho`.
fn channel_agreement(c: &SequentialCircuit, direct: &crate::dense::KrausChannel, rho: &DenseOperator) -> Result<f64, HolographyError> {
    let via_circuit = c.system_channel()?.apply(rho)?;
    let via_channel = direct.apply(rho)?;
    Ok(via_circuit.sub(&via_channel).max_abs())
}

const CHANNEL_TOL: f64 = 1e-10;

/// Run the structural checks for one construction at its default size.
pub fn verify_appendix(which: Appendix) -> Result<AppendixReport, HolographyError> {
    let checks = match which {
        Appendix::A => one_d()?,
        Appendix::D => zero_form()?,
        Appendix::E => one_form()?,
        Appendix::F => fermionic()?,
        Appendix::Subsystem => subsystem()?,
    };
    Ok(AppendixReport { appendix: which.to_string(), checks: checks.0 })
}

fn one_d() -> Result<Checks, HolographyError> {
    let (l, depth) = (4, 3);
    let mut checks = Checks(Vec::new());
    let c = build_1d_channel_circuit_cut(l, depth, 0.5, 0.5, BoundaryCut::ZzLast)?;
    let g = evolve_initial_stabilizers(&c)?;
    let n = c.n_qubits();
    full_rank(&mut checks, &c, &g);

    let (i, k) = (1, 1);
    let xx = uniform(&c, Pauli::X, &[anc(QubitKind::YLink, i, 0, k), anc(QubitKind::YLink, i, 0, k + 1)])?;
    let star = uniform(
        &c,
        Pauli::X,
        &[
            anc(QubitKind::YLink, i, 0, k),
            anc(QubitKind::XLink, i - 1, 0, k),
            anc(QubitKind::XLink, i, 0, k),
            anc(QubitKind::YLink, i, 0, k + 1),
        ],
    )?;
    checks.image("xx_to_star", &push_through(&c, &xx)?, &star);

    let zz = uniform(&c, Pauli::Z, &[anc(QubitKind::XLink, i, 0, k), anc(QubitKind::XLink, i, 0, k + 1)])?;
    let plaquette_labels = [
        anc(QubitKind::XLink, i, 0, k),
        anc(QubitKind::XLink, i, 0, k + 1),
        anc(QubitKind::YLink, i, 0, k + 1),
        anc(QubitKind::YLink, i + 1, 0, k + 1),
    ];
    let plaquette = uniform(&c, Pauli::Z, &plaquette_labels)?;
    checks.image("zz_to_plaquette", &push_through(&c, &zz)?, &plaquette);

    // Rough top: Z on the last x-link layer and the two sites below it.
    let zzz = |circuit: &SequentialCircuit, i: usize| -> Result<PauliOperator, HolographyError> {
        let b = circuit.lattice().id_of(anc(QubitKind::XLink, i, 0, depth))?;
        pauli(circuit.n_qubits(), &[(b, Pauli::Z), (i, Pauli::Z), ((i + 1) % l, Pauli::Z)])
    };
    checks.member("rough_top_zzz", &g, &zzz(&c, 0)?)?;

    let all_x = zero_form_steady_group(l)?.generators()[0].clone();
    let structure = extract_boundary_structure(&g, c.system(), &all_x)?;
    checks.member("top_all_x", &structure.top, &all_x)?;

    // Open string between sites 0 and l/2 along the rough top, then pushed into the bulk.
    let mut string = PauliOperator::identity(n);
    for j in 0..l / 2 {
        string = string.multiply(&zzz(&c, j)?)?;
    }
    checks.member("string_in_group", &g, &string)?;
    let deformed = string.multiply(&uniform(
        &c,
        Pauli::Z,
        &[
            anc(QubitKind::XLink, 0, 0, depth - 1),
            anc(QubitKind::XLink, 0, 0, depth),
            anc(QubitKind::YLink, 0, 0, depth),
            anc(QubitKind::YLink, 1, 0, depth),
        ],
    )?)?;
    checks.member("string_deformable", &g, &deformed)?;
    let mut ends = PauliOperator::identity(l);
    ends = ends.multiply(&PauliOperator::on_sites(l, Pauli::Z, &[0, l / 2])?)?;
    let found = connecting_string(&g, c.system(), &ends)?;
    checks.push("string_connects_top_sites", found.is_some(), format!("endpoints 0 and {}", l / 2));

    let x_last = build_1d_channel_circuit_cut(l, depth, 0.5, 0.5, BoundaryCut::XLast)?;
    let gx = evolve_initial_stabilizers(&x_last)?;
    let zz_last_has = g.contains(&zzz(&c, 0)?)?;
    let x_last_has = gx.contains_up_to_sign(&zzz(&x_last, 0)?)?;
    checks.push(
        "cut_choice",
        zz_last_has && !x_last_has && gx.len() == x_last.n_qubits(),
        format!("ZZZ top generator: ending on ZZ noise {zz_last_has}, ending on X noise {x_last_has}"),
    );

    // Deformed ancillas: the circuit with e^{(g/2)σ} on each ancilla equals the
    // undeformed output dressed by the pushed-through e^{(g/2)UσU†}.
    let (small_l, p_x, p_z) = (3, 0.2, 0.35);
    let deformed_c = build_1d_channel_circuit_cut(small_l, 1, p_x, p_z, BoundaryCut::ZzLast)?;
    let plain = build_1d_channel_circuit_cut(small_l, 1, 0.5, 0.5, BoundaryCut::ZzLast)?;
    let input = StateVector::plus_state(small_l);
    let direct = deformed_c.simulate_statevector(&input)?;
    let mut dressed = plain.simulate_statevector(&input)?;
    for (&q, d) in deformed_c.deformations() {
        let letter = match d.axis {
            super::Axis::X => Pauli::X,
            super::Axis::Z => Pauli::Z,
        };
        let image = push_through(&plain, &PauliOperator::single(plain.n_qubits(), q, letter)?)?;
        let (ch, sh) = ((d.g / 2.0).cosh(), (d.g / 2.0).sinh());
        let flipped = dressed.apply_pauli(&image);
        let amps = dressed
            .amplitudes()
            .iter()
            .zip(flipped.amplitudes())
            .map(|(a, b)| a * ch + b * sh)
            .collect();
        dressed = StateVector::from_amplitudes(plain.n_qubits(), amps)?;
    }
    let dressed = dressed.normalized()?;
    let overlap = direct.inner(&dressed).norm();
    checks.push("deformation_commutes", (overlap - 1.0).abs() < 1e-10, format!("|⟨a|b⟩| = {overlap:.12}"));

    let rho = system_state(&direct, small_l);
    let expected = ising_chain_channel(small_l, p_x, p_z)?.apply(DensityMatrix::plus_product(small_l).operator())?;
    let diff = rho.sub(&expected).max_abs();
    checks.push("circuit_matches_channel", diff < CHANNEL_TOL, format!("max entry difference {diff:.2e}"));
    Ok(checks)
}

fn zero_form() -> Result<Checks, HolographyError> {
    let (lx, ly, depth) = (3, 3, 2);
    let t = Torus::new(lx, ly)?;
    let c = build_zero_form_circuit(lx, ly, depth, 0.5, 0.5)?;
    let g = evolve_initial_stabilizers(&c)?;
    let mut checks = Checks(Vec::new());
    full_rank(&mut checks, &c, &g);
    let (v, k) = ((1, 1), 1);
    let left = t.shift(v, -1, 0);
    let down = t.shift(v, 0, -1);
    let xx = uniform(&c, Pauli::X, &[anc(QubitKind::ZLink, v.0, v.1, k), anc(QubitKind::ZLink, v.0, v.1, k + 1)])?;
    let star = uniform(
        &c,
        Pauli::X,
        &[
            anc(QubitKind::ZLink, v.0, v.1, k),
            anc(QubitKind::ZLink, v.0, v.1, k + 1),
            anc(QubitKind::XLink, v.0, v.1, k),
            anc(QubitKind::XLink, left.0, left.1, k),
            anc(QubitKind::YLink, v.0, v.1, k),
            anc(QubitKind::YLink, down.0, down.1, k),
        ],
    )?;
    checks.image("xx_to_x6_star", &push_through(&c, &xx)?, &star);

    for (name, kind, step) in [("xz_plaquette", QubitKind::XLink, (1, 0)), ("yz_plaquette", QubitKind::YLink, (0, 1))] {
        let other = t.shift(v, step.0, step.1);
        let zz = uniform(&c, Pauli::Z, &[anc(kind, v.0, v.1, k), anc(kind, v.0, v.1, k + 1)])?;
        let expected = uniform(
            &c,
            Pauli::Z,
            &[
                anc(kind, v.0, v.1, k),
                anc(kind, v.0, v.1, k + 1),
                anc(QubitKind::ZLink, v.0, v.1, k + 1),
                anc(QubitKind::ZLink, other.0, other.1, k + 1),
            ],
        )?;
        checks.image(name, &push_through(&c, &zz)?, &expected);
    }
    let right = t.shift(v, 1, 0);
    let up = t.shift(v, 0, 1);
    let xy = uniform(
        &c,
        Pauli::Z,
        &[
            anc(QubitKind::XLink, v.0, v.1, k),
            anc(QubitKind::XLink, up.0, up.1, k),
            anc(QubitKind::YLink, v.0, v.1, k),
            anc(QubitKind::YLink, right.0, right.1, k),
        ],
    )?;
    checks.image("xy_plaquette", &push_through(&c, &xy)?, &xy);

    let all_x = zero_form_steady_group(t.n_vertices())?.generators()[0].clone();
    let structure = extract_boundary_structure(&g, c.system(), &all_x)?;
    checks.member("top_all_x", &structure.top, &all_x)?;
    let s = v.1 * lx + v.0;
    let s_right = right.1 * lx + right.0;
    let b = c.lattice().id_of(anc(QubitKind::XLink, v.0, v.1, depth))?;
    let condensed = pauli(c.n_qubits(), &[(b, Pauli::Z), (s, Pauli::Z), (s_right, Pauli::Z)])?;
    checks.member("zz_condensed", &g, &condensed)?;
    Ok(checks)
}

fn one_form() -> Result<Checks, HolographyError> {
    let (lx, ly, depth) = (3, 3, 2);
    let t = Torus::new(lx, ly)?;
    let c = build_one_form_circuit(lx, ly, depth, 0.5, 0.5, OneFormInput::Plus)?;
    let g = evolve_initial_stabilizers(&c)?;
    let mut checks = Checks(Vec::new());
    full_rank(&mut checks, &c, &g);
    let k = 1;
    let link = Link::X(1, 1);
    let [v1, v2] = t.ends(link);
    let xx = uniform(&c, Pauli::X, &[link_anc(link, k), link_anc(link, k + 1)])?;
    let expected = uniform(
        &c,
        Pauli::X,
        &[link_anc(link, k), link_anc(link, k + 1), anc(QubitKind::ZLink, v1.0, v1.1, k), anc(QubitKind::ZLink, v2.0, v2.1, k)],
    )?;
    checks.image("xx_to_x4_vertical_plaquette", &push_through(&c, &xx)?, &expected);

    let v = (1, 1);
    let zz = uniform(&c, Pauli::Z, &[anc(QubitKind::ZLink, v.0, v.1, k), anc(QubitKind::ZLink, v.0, v.1, k + 1)])?;
    let mut z6_labels = vec![anc(QubitKind::ZLink, v.0, v.1, k), anc(QubitKind::ZLink, v.0, v.1, k + 1)];
    z6_labels.extend(t.star(v).iter().map(|&l| link_anc(l, k + 1)));
    checks.image("zz_to_z6", &push_through(&c, &zz)?, &uniform(&c, Pauli::Z, &z6_labels)?);

    let plaquettes = one_form_steady_group(lx, ly)?;
    let b_p = plaquettes.generators()[0].clone();
    let structure = extract_boundary_structure(&g, c.system(), &b_p)?;
    checks.member("top_b_p_with_plus_input", &structure.top, &b_p)?;
    let zero_in = build_one_form_circuit(lx, ly, depth, 0.5, 0.5, OneFormInput::Zero)?;
    let gz = evolve_initial_stabilizers(&zero_in)?;
    let top_zero = extract_boundary_structure(&gz, zero_in.system(), &b_p).map(|s| s.top);
    let absent = match top_zero {
        Ok(top) => !top.contains_up_to_sign(&b_p)?,
        Err(HolographyError::NotConnectable(_)) => true,
        Err(e) => return Err(e),
    };
    checks.push("top_b_p_absent_with_zero_input", absent, "B_p on the top needs a |+⟩ input");

    let small = one_form_channel(2, 2, 0.3, 0.2)?;
    let worst = one_form_steady_group(2, 2)?
        .generators()
        .iter()
        .map(|p| small.symmetry_commutator(&DenseOperator::from_pauli(p)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push("b_p_strong", worst < CHANNEL_TOL, format!("largest Kraus commutator {worst:.2e}"));

    let gid = c.lattice().id_of(anc(QubitKind::ZLink, v.0, v.1, depth))?;
    let mut condensed = pauli(c.n_qubits(), &[(gid, Pauli::Z)])?;
    condensed = condensed.multiply(&PauliOperator::on_sites(c.n_qubits(), Pauli::Z, &t.star_ids(v))?)?;
    checks.member("m_condensed", &g, &condensed)?;
    Ok(checks)
}

fn fermionic() -> Result<Checks, HolographyError> {
    let (lx, ly, depth) = (3, 3, 2);
    let t = Torus::new(lx, ly)?;
    let c = build_fermionic_circuit(lx, ly, depth, 0.5, 0.5)?;
    let g = evolve_initial_stabilizers(&c)?;
    let mut checks = Checks(Vec::new());
    full_rank(&mut checks, &c, &g);
    let (v, k) = ((1, 1), 1);
    let zz = uniform(&c, Pauli::Z, &[anc(QubitKind::ZLink, v.0, v.1, k), anc(QubitKind::ZLink, v.0, v.1, k + 1)])?;
    let mut z6_labels = vec![anc(QubitKind::ZLink, v.0, v.1, k), anc(QubitKind::ZLink, v.0, v.1, k + 1)];
    z6_labels.extend(t.star(v).iter().map(|&l| link_anc(l, k + 1)));
    checks.image("zz_to_z6", &push_through(&c, &zz)?, &uniform(&c, Pauli::Z, &z6_labels)?);

    let lines = fermionic_steady_group(lx, ly)?;
    let structure = extract_boundary_structure(&g, c.system(), &lines.generators()[0])?;
    let missing = lines.generators().iter().filter(|p| !structure.top.contains(p).unwrap_or(false)).count();
    checks.push(
        "top_fermion_lines",
        missing == 0,
        format!("{} of {} products A_v B_p(v) on the top", lines.len() - missing, lines.len()),
    );
    let gid = c.lattice().id_of(anc(QubitKind::ZLink, v.0, v.1, depth))?;
    let truncated = pauli(c.n_qubits(), &[(gid, Pauli::Z)])?
        .multiply(&PauliOperator::on_sites(c.n_qubits(), Pauli::Z, &t.star_ids(v))?)?;
    checks.member("truncated_vertex", &g, &truncated)?;

    let small = build_fermionic_circuit(2, 2, 1, 0.3, 0.2)?;
    let direct = fermionic_one_form_channel(2, 2, 0.3, 0.2)?;
    let input = StabilizerGroup::new(8, small.input_stabilizers().iter().map(|p| compress_system(p, 8)).collect())?;
    let rho = DensityMatrix::from_stabilizers(&input);
    let diff = channel_agreement(&small, &direct, rho.operator())?;
    checks.push("circuit_matches_channel", diff < CHANNEL_TOL, format!("max entry difference {diff:.2e}"));
    Ok(checks)
}

fn compress_system(p: &PauliOperator, n_system: usize) -> PauliOperator {
    super::flow::compress(p, &(0..n_system).collect::<Vec<_>>())
}

fn subsystem() -> Result<Checks, HolographyError> {
    let (lx, ly, depth) = (3, 3, 2);
    let t = Torus::new(lx, ly)?;
    let c = build_subsystem_circuit(lx, ly, depth, 0.5, 0.5)?;
    let g = evolve_initial_stabilizers(&c)?;
    let mut checks = Checks(Vec::new());
    full_rank(&mut checks, &c, &g);
    let (v, k) = ((1, 1), 1);
    let xx = uniform(&c, Pauli::X, &[anc(QubitKind::ZLink, v.0, v.1, k), anc(QubitKind::ZLink, v.0, v.1, k + 1)])?;
    let mut x6_labels = vec![anc(QubitKind::ZLink, v.0, v.1, k), anc(QubitKind::ZLink, v.0, v.1, k + 1)];
    for (da, db) in [(0, 0), (-1, 0), (0, -1), (-1, -1)] {
        let p = t.shift(v, da, db);
        x6_labels.push(anc(QubitKind::Plaquette, p.0, p.1, k));
    }
    checks.image("xx_to_x6", &push_through(&c, &xx)?, &uniform(&c, Pauli::X, &x6_labels)?);

    let lines = subsystem_steady_group(lx, ly)?;
    let structure = extract_boundary_structure(&g, c.system(), &lines.generators()[0])?;
    let missing = lines.generators().iter().filter(|p| !structure.top.contains(p).unwrap_or(false)).count();
    checks.push("top_line_symmetries", missing == 0, format!("{} of {} row and column X products on the top", lines.len() - missing, lines.len()));

    let pid = c.lattice().id_of(anc(QubitKind::Plaquette, v.0, v.1, depth))?;
    let corners: Vec<usize> = [(0, 0), (1, 0), (0, 1), (1, 1)]
        .iter()
        .map(|&(da, db)| {
            let s = t.shift(v, da, db);
            s.1 * lx + s.0
        })
        .collect();
    let truncated = pauli(c.n_qubits(), &[(pid, Pauli::Z)])?.multiply(&PauliOperator::on_sites(c.n_qubits(), Pauli::Z, &corners)?)?;
    checks.member("truncated_cube_top", &g, &truncated)?;

    let small = build_subsystem_circuit(3, 2, 1, 0.3, 0.2)?;
    let direct = subsystem_channel(3, 2, 0.3, 0.2)?;
    let rho = DensityMatrix::plus_product(6);
    let diff = channel_agreement(&small, &direct, rho.operator())?;
    checks.push("circuit_matches_channel", diff < CHANNEL_TOL, format!("max entry difference {diff:.2e}"));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("a".parse::<Appendix>().unwrap(), Appendix::A);
        assert_eq!("Subsystem".parse::<Appendix>().unwrap(), Appendix::Subsystem);
        assert!("q".parse::<Appendix>().is_err());
    }

    #[test]
    fn all_constructions_pass() {
        for which in [Appendix::A, Appendix::D, Appendix::E, Appendix::F, Appendix::Subsystem] {
            let report = verify_appendix(which).unwrap();
            for c in &report.checks {
                assert!(c.passed, "{which} {}: {}", c.name, c.detail);
            }
        }
    }
}
