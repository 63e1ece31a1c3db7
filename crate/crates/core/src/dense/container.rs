//! Binary container for dense operators and state vectors.
//!
//! Layout (little endian): magic `SWDM`, `u32` format version, `u32` qubit count,
//! `u8` dtype tag (1 = complex f64), `u8` kind tag, then the row-major entries as
//! `(re, im)` pairs of `f64`.

use std::io::{Read, Write};

use num_complex::Complex64 as C64;

use super::operator::{DenseOperator, StateVector};
use super::DenseError;

const MAGIC: &[u8; 4] = b"SWDM";
const VERSION: u32 = 1;
const DTYPE_C64: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContainerKind {
    Operator = 1,
    State = 2,
}

fn io_err(e: std::io::Error) -> DenseError {
    DenseError::Container(e.to_string())
}

pub fn write_container(mut w: impl Write, n_qubits: usize, kind: ContainerKind, data: &[C64]) -> Result<(), DenseError> {
    let d = 1usize << n_qubits;
    let expected = match kind {
        ContainerKind::Operator => d * d,
        ContainerKind::State => d,
    };
    if data.len() != expected {
        return Err(DenseError::Shape { expected, found: data.len() });
    }
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&(n_qubits as u32).to_le_bytes()).map_err(io_err)?;
    w.write_all(&[DTYPE_C64, kind as u8]).map_err(io_err)?;
    for z in data {
        w.write_all(&z.re.to_le_bytes()).map_err(io_err)?;
        w.write_all(&z.im.to_le_bytes()).map_err(io_err)?;
    }
    Ok(())
}

/// Returns `(n_qubits, kind, entries)`.
pub fn read_container(mut r: impl Read) -> Result<(usize, ContainerKind, Vec<C64>), DenseError> {
    let mut head = [0u8; 14];
    r.read_exact(&mut head).map_err(io_err)?;
    if &head[0..4] != MAGIC {
        return Err(DenseError::Container("bad magic".into()));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(DenseError::Container(format!("unsupported version {version}")));
    }
    let n = u32::from_le_bytes(head[8..12].try_into().expect("4 bytes")) as usize;
    if head[12] != DTYPE_C64 {
        return Err(DenseError::Container(format!("unknown dtype tag {}", head[12])));
    }
    let kind = match head[13] {
        1 => ContainerKind::Operator,
        2 => ContainerKind::State,
        k => return Err(DenseError::Container(format!("unknown kind tag {k}"))),
    };
    let d = 1usize << n;
    let count = match kind {
        ContainerKind::Operator => d * d,
        ContainerKind::State => d,
    };
    let mut buf = vec![0u8; 16 * count];
    r.read_exact(&mut buf).map_err(io_err)?;
    let data = buf
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[0..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..16].try_into().expect("8 bytes")),
            )
        })
        .collect();
    Ok((n, kind, data))
}

impl DenseOperator {
    pub fn write_to(&self, w: impl Write) -> Result<(), DenseError> {
        write_container(w, self.n_qubits(), ContainerKind::Operator, self.data())
    }

    pub fn read_from(r: impl Read) -> Result<Self, DenseError> {
        match read_container(r)? {
            (n, ContainerKind::Operator, data) => DenseOperator::from_data(n, data),
            _ => Err(DenseError::Container("expected an operator".into())),
        }
    }
}

impl StateVector {
    pub fn write_to(&self, w: impl Write) -> Result<(), DenseError> {
        write_container(w, self.n_qubits(), ContainerKind::State, self.amplitudes())
    }

    pub fn read_from(r: impl Read) -> Result<Self, DenseError> {
        match read_container(r)? {
            (n, ContainerKind::State, data) => StateVector::from_amplitudes(n, data),
            _ => Err(DenseError::Container("expected a state vector".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_round_trip_is_bit_exact() {
        let m = DenseOperator::from_fn(2, |i, j| C64::new(1.0 / (i + 1) as f64, -(j as f64) / 3.0));
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 14 + 16 * 16);
        assert_eq!(&buf[0..4], b"SWDM");
        let back = DenseOperator::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn kind_mismatch_rejected() {
        let mut buf = Vec::new();
        StateVector::plus_state(2).write_to(&mut buf).unwrap();
        assert!(DenseOperator::read_from(buf.as_slice()).is_err());
        assert_eq!(StateVector::read_from(buf.as_slice()).unwrap(), StateVector::plus_state(2));
    }
}
