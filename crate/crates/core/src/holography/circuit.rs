//! Time-sliced controlled-Pauli circuits in which a system register meets fresh
//! ancillas, plus their dense simulation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dense::{DenseOperator, KrausChannel, LocalChannel, LocalOperator, StateVector};
use crate::pauli::{CliffordGate, ControlBasis, PauliOperator};

use super::lattice::{Geometry, Lattice, QubitKind, QubitLabel};
use super::HolographyError;

/// Total qubit count above which a full state vector is refused.
pub const STATEVECTOR_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaState {
    Zero,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Z,
}

/// Imaginary-time factor `e^{(g/2)·axis}` on an ancilla; `g` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deformation {
    pub axis: Axis,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    /// Position on the time axis; half-integers for single-site noise, integers for couplings.
    pub time: f64,
    pub label: String,
    pub gates: Vec<CliffordGate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialCircuit {
    lattice: Lattice,
    system: Vec<usize>,
    slices: Vec<Slice>,
    ancilla_init: BTreeMap<usize, AncillaState>,
    deformations: BTreeMap<usize, Deformation>,
    input_stabilizers: Vec<PauliOperator>,
}

/// Splits `gates` greedily into groups acting on disjoint qubits, keeping order.
pub fn disjoint_groups(gates: Vec<CliffordGate>) -> Vec<Vec<CliffordGate>> {
    let mut groups: Vec<(BTreeSet<usize>, Vec<CliffordGate>)> = Vec::new();
    for g in gates {
        let sites: BTreeSet<usize> = g.sites().into_iter().collect();
        match groups.iter_mut().find(|(used, _)| used.is_disjoint(&sites)) {
            Some((used, list)) => {
                used.extend(sites);
                list.push(g);
            }
            None => groups.push((sites, vec![g])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

impl SequentialCircuit {
    /// Assembles and validates a circuit. Every qubit outside `system` must have an
    /// entry in `ancilla_init`.
    pub fn new(
        lattice: Lattice,
        system: Vec<usize>,
        slices: Vec<Slice>,
        ancilla_init: BTreeMap<usize, AncillaState>,
        deformations: BTreeMap<usize, Deformation>,
        input_stabilizers: Vec<PauliOperator>,
    ) -> Result<Self, HolographyError> {
        let c = SequentialCircuit { lattice, system, slices, ancilla_init, deformations, input_stabilizers };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), HolographyError> {
        let n = self.lattice.n_qubits();
        let bad = |m: String| Err(HolographyError::Invalid(m));
        if self.system.iter().enumerate().any(|(i, &s)| s != i) {
            return bad("system qubits must occupy ids 0..n_system".into());
        }
        let n_sys = self.system.len();
        for q in 0..n {
            let is_ancilla = self.ancilla_init.contains_key(&q);
            if (q < n_sys) == is_ancilla {
                return bad(format!("qubit {q} is neither a system qubit nor an initialized ancilla"));
            }
        }
        for (q, d) in &self.deformations {
            if !self.ancilla_init.contains_key(q) {
                return bad(format!("deformation on non-ancilla {q}"));
            }
            if d.g.is_nan() {
                return bad(format!("deformation on {q} is NaN"));
            }
        }
        let mut slices_touching = vec![0usize; n];
        for (k, slice) in self.slices.iter().enumerate() {
            let mut used = BTreeSet::new();
            for gate in &slice.gates {
                let CliffordGate::ControlledPauli { control, target, .. } = gate else {
                    return bad(format!("slice {k}: only controlled Paulis are supported"));
                };
                if target.n_qubits() != n {
                    return bad(format!("slice {k}: gate sized for {} qubits", target.n_qubits()));
                }
                if *control < n_sys || target.support().iter().any(|&s| s >= n_sys) {
                    return bad(format!("slice {k}: gates must be controlled by an ancilla and act on the system"));
                }
                for s in gate.sites() {
                    if !used.insert(s) {
                        return bad(format!("slice {k}: qubit {s} used twice"));
                    }
                }
            }
            for s in used {
                if s >= n_sys {
                    slices_touching[s] += 1;
                }
            }
        }
        if let Some(q) = (n_sys..n).find(|&q| slices_touching[q] != 1) {
            return bad(format!("ancilla {q} appears in {} slices", slices_touching[q]));
        }
        for p in &self.input_stabilizers {
            if p.n_qubits() != n || p.support().iter().any(|&s| s >= n_sys) {
                return bad("input stabilizers must act on the system only".into());
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn n_qubits(&self) -> usize {
        self.lattice.n_qubits()
    }

    pub fn n_system(&self) -> usize {
        self.system.len()
    }

    pub fn system(&self) -> &[usize] {
        &self.system
    }

    pub fn ancillas(&self) -> Vec<usize> {
        self.ancilla_init.keys().copied().collect()
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn gates(&self) -> impl Iterator<Item = &CliffordGate> {
        self.slices.iter().flat_map(|s| s.gates.iter())
    }

    pub fn ancilla_init(&self) -> &BTreeMap<usize, AncillaState> {
        &self.ancilla_init
    }

    pub fn deformations(&self) -> &BTreeMap<usize, Deformation> {
        &self.deformations
    }

    pub fn is_deformed(&self) -> bool {
        self.deformations.values().any(|d| d.g != 0.0)
    }

    pub fn input_stabilizers(&self) -> &[PauliOperator] {
        &self.input_stabilizers
    }

    /// Same circuit with another declared input state.
    pub fn with_input(&self, input_stabilizers: Vec<PauliOperator>) -> Result<Self, HolographyError> {
        let mut c = self.clone();
        c.input_stabilizers = input_stabilizers;
        c.validate()?;
        Ok(c)
    }

    /// `e^{(g/2)·axis}|init⟩`, normalized, in the computational basis.
    pub fn ancilla_amplitudes(&self, q: usize) -> Result<[C64; 2], HolographyError> {
        let init = *self.ancilla_init.get(&q).ok_or_else(|| HolographyError::Invalid(format!("{q} is not an ancilla")))?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = match init {
            AncillaState::Zero => [1.0, 0.0],
            AncillaState::Plus => [h, h],
        };
        let Some(d) = self.deformations.get(&q) else {
            return Ok([C64::new(v[0], 0.0), C64::new(v[1], 0.0)]);
        };
        // e^{hA} ∝ 1 + tanh(h) A, which also covers infinite h.
        let (c, s) = (1.0, (d.g / 2.0).tanh());
        let av = match d.axis {
            Axis::X => [v[1], v[0]],
            Axis::Z => [v[0], -v[1]],
        };
        let w = [c * v[0] + s * av[0], c * v[1] + s * av[1]];
        let norm = (w[0] * w[0] + w[1] * w[1]).sqrt();
        if norm == 0.0 {
            return Err(HolographyError::Invalid(format!("deformation annihilates ancilla {q}")));
        }
        Ok([C64::new(w[0] / norm, 0.0), C64::new(w[1] / norm, 0.0)])
    }

    /// Local gate on `[control, support...]` and the system sites it touches.
    fn local_gate(gate: &CliffordGate) -> Result<(usize, Vec<usize>, DenseOperator), HolographyError> {
        let CliffordGate::ControlledPauli { control, basis, target } = gate else {
            return Err(HolographyError::Invalid("only controlled Paulis are supported".into()));
        };
        let support = target.support();
        let k = support.len() + 1;
        let mut local = PauliOperator::identity(k);
        for (j, &s) in support.iter().enumerate() {
            local = local.multiply(&PauliOperator::single(k, j + 1, target.letter(s))?)?;
        }
        let embedded = local.with_phase(target.phase());
        let g = CliffordGate::controlled(0, *basis, embedded)?;
        Ok((*control, support, DenseOperator::from_clifford(&g, k)))
    }

    /// The system channel obtained by tracing out each ancilla right after its gate.
    ///
    /// Kraus operators are read off the dense gate matrix: `K_b = (⟨b| ⊗ 1) U (|a⟩ ⊗ 1)`.
    pub fn system_channel(&self) -> Result<KrausChannel, HolographyError> {
        let mut steps = Vec::new();
        for gate in self.gates() {
            let (control, support, u) = Self::local_gate(gate)?;
            let amp = self.ancilla_amplitudes(control)?;
            let d = 1usize << support.len();
            let mut kraus = Vec::with_capacity(2);
            for b in 0..2 {
                let mut k = vec![C64::new(0.0, 0.0); d * d];
                for r in 0..d {
                    for c in 0..d {
                        k[r * d + c] = (0..2).map(|a| u.get(b * d + r, a * d + c) * amp[a]).sum();
                    }
                }
                if k.iter().any(|z| z.norm() > 0.0) {
                    kraus.push(k);
                }
            }
            steps.push(LocalChannel::new(support, kraus)?);
        }
        Ok(KrausChannel::new(self.n_system(), "sequential circuit", steps)?)
    }

    /// Runs the circuit on a system density matrix and returns the system output.
    pub fn simulate_dense(&self, rho: &DenseOperator) -> Result<DenseOperator, HolographyError> {
        Ok(self.system_channel()?.apply(rho)?)
    }

    /// Full pure-state run: system input `psi` times all ancillas, then every gate.
    pub fn simulate_statevector(&self, psi: &StateVector) -> Result<StateVector, HolographyError> {
        let n = self.n_qubits();
        if n > STATEVECTOR_LIMIT {
            return Err(HolographyError::TooLarge { qubits: n, limit: STATEVECTOR_LIMIT });
        }
        if psi.n_qubits() != self.n_system() {
            return Err(HolographyError::Invalid(format!("input has {} qubits, system has {}", psi.n_qubits(), self.n_system())));
        }
        let mut amps = psi.amplitudes().to_vec();
        for q in self.n_system()..n {
            let a = self.ancilla_amplitudes(q)?;
            amps = amps.iter().flat_map(|x| [x * a[0], x * a[1]]).collect();
        }
        let mut state = StateVector::from_amplitudes(n, amps)?;
        for gate in self.gates() {
            let (control, support, u) = Self::local_gate(gate)?;
            let mut sites = vec![control];
            sites.extend(support);
            state = state.apply_local(&LocalOperator::from_dense(sites, &u)?)?;
        }
        Ok(state)
    }

    /// Serializes to the line-oriented text form read by [`SequentialCircuit::from_text`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let g = self.lattice.geometry();
        let dims: Vec<String> = g.dims().iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "geometry {} {}", g.name(), dims.join(" "));
        for l in self.lattice.labels() {
            let layer = l.layer.map(|k| k.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(s, "qubit {} {} {} {}", l.kind.name(), l.x, l.y, layer);
        }
        let _ = writeln!(s, "system {}", self.system.len());
        for (q, init) in &self.ancilla_init {
            let name = match init {
                AncillaState::Zero => "zero",
                AncillaState::Plus => "plus",
            };
            let _ = writeln!(s, "init {q} {name}");
        }
        for (q, d) in &self.deformations {
            let _ = writeln!(s, "deform {q} {:?} {:?}", d.axis, d.g);
        }
        for p in &self.input_stabilizers {
            let _ = writeln!(s, "input {p}");
        }
        for slice in &self.slices {
            let _ = writeln!(s, "slice {:?} {}", slice.time, slice.label);
            for gate in &slice.gates {
                if let CliffordGate::ControlledPauli { control, basis, target } = gate {
                    let b = match basis {
                        ControlBasis::Z => "z",
                        ControlBasis::X => "x",
                    };
                    let _ = writeln!(s, "gate {control} {b} {target}");
                }
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, HolographyError> {
        let mut geometry = None;
        let mut labels = Vec::new();
        let mut n_system = None;
        let mut init = BTreeMap::new();
        let mut deformations = BTreeMap::new();
        let mut inputs = Vec::new();
        let mut slices: Vec<Slice> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: &str| HolographyError::Parse { line, msg: msg.to_string() };
            let words: Vec<&str> = raw.split_whitespace().collect();
            let Some((&head, rest)) = words.split_first() else { continue };
            let num = |w: &str| w.parse::<usize>().map_err(|_| err(&format!("bad integer {w:?}")));
            match (head, rest) {
                ("geometry", [name, dims @ ..]) => {
                    let dims = dims.iter().map(|d| num(d)).collect::<Result<Vec<_>, _>>()?;
                    geometry = Some(Geometry::from_parts(name, &dims).ok_or_else(|| err("unknown geometry"))?);
                }
                ("qubit", [kind, x, y, layer]) => {
                    let kind = QubitKind::parse(kind).ok_or_else(|| err("unknown qubit kind"))?;
                    let layer = if *layer == "-" { None } else { Some(num(layer)?) };
                    labels.push(QubitLabel { kind, x: num(x)?, y: num(y)?, layer });
                }
                ("system", [n]) => n_system = Some(num(n)?),
                ("init", [q, state]) => {
                    let s = match *state {
                        "zero" => AncillaState::Zero,
                        "plus" => AncillaState::Plus,
                        _ => return Err(err("unknown ancilla state")),
                    };
                    init.insert(num(q)?, s);
                }
                ("deform", [q, axis, g]) => {
                    let axis = match *axis {
                        "X" => Axis::X,
                        "Z" => Axis::Z,
                        _ => return Err(err("unknown axis")),
                    };
                    let g: f64 = g.parse().map_err(|_| err("bad deformation strength"))?;
                    deformations.insert(num(q)?, Deformation { axis, g });
                }
                ("input", [p]) => inputs.push(p.parse::<PauliOperator>()?),
                ("slice", [time, label @ ..]) => {
                    let time: f64 = time.parse().map_err(|_| err("bad slice time"))?;
                    slices.push(Slice { time, label: label.join(" "), gates: Vec::new() });
                }
                ("gate", [control, basis, target]) => {
                    let basis = match *basis {
                        "z" => ControlBasis::Z,
                        "x" => ControlBasis::X,
                        _ => return Err(err("unknown control basis")),
                    };
                    let gate = CliffordGate::controlled(num(control)?, basis, target.parse()?)?;
                    slices.last_mut().ok_or_else(|| err("gate before any slice"))?.gates.push(gate);
                }
                _ => return Err(err(&format!("unrecognized line {raw:?}"))),
            }
        }
        let geometry = geometry.ok_or_else(|| HolographyError::Parse { line: 0, msg: "missing geometry".into() })?;
        let n_system = n_system.ok_or_else(|| HolographyError::Parse { line: 0, msg: "missing system".into() })?;
        let lattice = Lattice::new(geometry, labels)?;
        Self::new(lattice, (0..n_system).collect(), slices, init, deformations, inputs)
    }
}

/// `Tr_ancilla |ψ⟩⟨ψ|` when the system occupies the leading `n_system` qubits.
pub fn system_state(psi: &StateVector, n_system: usize) -> DenseOperator {
    let n = psi.n_qubits();
    let cols = 1usize << (n - n_system);
    let amps = psi.amplitudes();
    DenseOperator::from_fn(n_system, |i, j| {
        let (ri, rj) = (&amps[i * cols..(i + 1) * cols], &amps[j * cols..(j + 1) * cols]);
        ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum()
    })
}
