//! Two-party privacy-preserving SAT verification.

pub mod bench;
pub mod bgp;
pub mod cnf;
pub mod crypto;
pub mod dpll;
pub mod gc;
pub mod oracle;
pub mod protocol;
pub mod shuffle;
pub mod transport;
