pub mod dense;
pub mod diagnostics;
pub mod gf2;
pub mod holography;
pub mod isotns;
pub mod partition;
pub mod pauli;
pub mod runner;
