//! Two-way quantum-classical finite automata: language toolkit, channel kernel,
//! machine model, execution engines and template compilers.

pub mod builders;
pub mod engines;
pub mod langkit;
pub mod machine;
pub mod par;
pub mod qkernel;

pub use langkit::{Family, LangError, LangParams};
pub use machine::{MachineSpec, Verdict};
pub use qkernel::{QuantumChannel, QuantumState};
