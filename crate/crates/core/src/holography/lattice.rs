//! Qubit layouts for the sequential circuits: labelled qubits with a dense id map.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::HolographyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// Periodic chain of `l` system sites, grown along a time axis.
    Ring { l: usize },
    /// Periodic `lx` direction, open time direction of `ly` layers.
    SquareCylinder { lx: usize, ly: usize },
    /// `lx × ly` torus of system qubits, grown through `lz` layers.
    CubicSlab { lx: usize, ly: usize, lz: usize },
}

impl Geometry {
    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Ring { .. } => "ring",
            Geometry::SquareCylinder { .. } => "square_cylinder",
            Geometry::CubicSlab { .. } => "cubic_slab",
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match *self {
            Geometry::Ring { l } => vec![l],
            Geometry::SquareCylinder { lx, ly } => vec![lx, ly],
            Geometry::CubicSlab { lx, ly, lz } => vec![lx, ly, lz],
        }
    }

    pub fn from_parts(name: &str, dims: &[usize]) -> Option<Self> {
        match (name, dims) {
            ("ring", [l]) => Some(Geometry::Ring { l: *l }),
            ("square_cylinder", [lx, ly]) => Some(Geometry::SquareCylinder { lx: *lx, ly: *ly }),
            ("cubic_slab", [lx, ly, lz]) => Some(Geometry::CubicSlab { lx: *lx, ly: *ly, lz: *lz }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitKind {
    Site,
    XLink,
    YLink,
    ZLink,
    Plaquette,
}

impl QubitKind {
    pub fn name(self) -> &'static str {
        match self {
            QubitKind::Site => "site",
            QubitKind::XLink => "x_link",
            QubitKind::YLink => "y_link",
            QubitKind::ZLink => "z_link",
            QubitKind::Plaquette => "plaquette",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [QubitKind::Site, QubitKind::XLink, QubitKind::YLink, QubitKind::ZLink, QubitKind::Plaquette]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

/// Position of a qubit. `layer` is `None` for system qubits (the top boundary)
/// and `Some(k)` for ancillas consumed by the `k`-th channel application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QubitLabel {
    pub kind: QubitKind,
    pub x: usize,
    pub y: usize,
    pub layer: Option<usize>,
}

impl QubitLabel {
    pub fn system(kind: QubitKind, x: usize, y: usize) -> Self {
        QubitLabel { kind, x, y, layer: None }
    }

    pub fn ancilla(kind: QubitKind, x: usize, y: usize, layer: usize) -> Self {
        QubitLabel { kind, x, y, layer: Some(layer) }
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.layer {
            Some(k) => write!(f, "{}({},{})@{}", self.kind.name(), self.x, self.y, k),
            None => write!(f, "{}({},{})", self.kind.name(), self.x, self.y),
        }
    }
}

/// A geometry plus a bijection between qubit labels and `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    geometry: Geometry,
    labels: Vec<QubitLabel>,
    index: HashMap<QubitLabel, usize>,
}

impl Lattice {
    pub fn new(geometry: Geometry, labels: Vec<QubitLabel>) -> Result<Self, HolographyError> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(*l, i).is_some() {
                return Err(HolographyError::Invalid(format!("qubit {l} listed twice")));
            }
        }
        Ok(Lattice { geometry, labels, index })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn label(&self, id: usize) -> QubitLabel {
        self.labels[id]
    }

    pub fn id(&self, label: &QubitLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub(crate) fn id_of(&self, label: QubitLabel) -> Result<usize, HolographyError> {
        self.id(&label).ok_or_else(|| HolographyError::Invalid(format!("no qubit {label}")))
    }

    /// System qubits, in id order.
    pub fn top(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i].layer.is_none()).collect()
    }

    /// Ancillas of the first layer.
    pub fn bottom(&self) -> Vec<usize> {
        self.layer(1)
    }

    pub fn layer(&self, k: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i].layer == Some(k)).collect()
    }
}

/// `(v + delta) mod len`
pub fn wrap(v: usize, delta: isize, len: usize) -> usize {
    (v as isize + delta).rem_euclid(len as isize) as usize
}

/// A link of the periodic square lattice, named by its lower or left vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    /// `(a, b) → (a+1, b)`
    X(usize, usize),
    /// `(a, b) → (a, b+1)`
    Y(usize, usize),
}

/// An `lx × ly` periodic square lattice with qubits on links.
///
/// Link ids: `X(a, b) ↦ b·lx + a`, `Y(a, b) ↦ lx·ly + b·lx + a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Torus {
    pub lx: usize,
    pub ly: usize,
}

impl Torus {
    pub fn new(lx: usize, ly: usize) -> Result<Self, HolographyError> {
        if lx < 2 || ly < 2 {
            return Err(HolographyError::Size(format!("torus needs at least 2×2, got {lx}×{ly}")));
        }
        Ok(Torus { lx, ly })
    }

    pub fn n_links(&self) -> usize {
        2 * self.lx * self.ly
    }

    pub fn n_vertices(&self) -> usize {
        self.lx * self.ly
    }

    pub fn link_id(&self, link: Link) -> usize {
        match link {
            Link::X(a, b) => b * self.lx + a,
            Link::Y(a, b) => self.lx * self.ly + b * self.lx + a,
        }
    }

    pub fn link(&self, id: usize) -> Link {
        let n = self.lx * self.ly;
        let (base, horizontal) = if id < n { (id, true) } else { (id - n, false) };
        let (a, b) = (base % self.lx, base / self.lx);
        if horizontal {
            Link::X(a, b)
        } else {
            Link::Y(a, b)
        }
    }

    pub fn links(&self) -> Vec<Link> {
        (0..self.n_links()).map(|i| self.link(i)).collect()
    }

    pub fn vertices(&self) -> Vec<(usize, usize)> {
        (0..self.ly).flat_map(|b| (0..self.lx).map(move |a| (a, b))).collect()
    }

    pub fn shift(&self, (a, b): (usize, usize), da: isize, db: isize) -> (usize, usize) {
        (wrap(a, da, self.lx), wrap(b, db, self.ly))
    }

    /// The four links touching vertex `v`: right, left, up, down.
    pub fn star(&self, v: (usize, usize)) -> [Link; 4] {
        let (a, b) = v;
        let (l, _) = self.shift(v, -1, 0);
        let (_, d) = self.shift(v, 0, -1);
        [Link::X(a, b), Link::X(l, b), Link::Y(a, b), Link::Y(a, d)]
    }

    /// Boundary of the plaquette with lower-left corner `v`: bottom, top, left, right.
    pub fn plaquette(&self, v: (usize, usize)) -> [Link; 4] {
        let (a, b) = v;
        let (r, _) = self.shift(v, 1, 0);
        let (_, u) = self.shift(v, 0, 1);
        [Link::X(a, b), Link::X(a, u), Link::Y(a, b), Link::Y(r, b)]
    }

    /// Endpoints of a link.
    pub fn ends(&self, link: Link) -> [(usize, usize); 2] {
        match link {
            Link::X(a, b) => [(a, b), self.shift((a, b), 1, 0)],
            Link::Y(a, b) => [(a, b), self.shift((a, b), 0, 1)],
        }
    }

    /// The link displaced from `link` by `(x̂ − ŷ)/2`.
    pub fn fermion_partner(&self, link: Link) -> Link {
        match link {
            Link::X(a, b) => {
                let (r, d) = self.shift((a, b), 1, -1);
                Link::Y(r, d)
            }
            Link::Y(a, b) => Link::X(a, b),
        }
    }

    /// Lower-left corner of the plaquette just below and to the right of `v`.
    pub fn bottom_right_plaquette(&self, v: (usize, usize)) -> (usize, usize) {
        self.shift(v, 0, -1)
    }

    pub fn star_ids(&self, v: (usize, usize)) -> Vec<usize> {
        self.star(v).iter().map(|&l| self.link_id(l)).collect()
    }

    pub fn plaquette_ids(&self, v: (usize, usize)) -> Vec<usize> {
        self.plaquette(v).iter().map(|&l| self.link_id(l)).collect()
    }
}
