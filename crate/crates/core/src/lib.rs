//! Simulation laboratory for discrete modulo-additive two-way channels.
//!
//! The crate executes the two-user two-way channel (2TWC) and the
//! multiple-access / degraded-broadcast network (MA/DBC) symbol by symbol,
//! builds non-adaptive and adaptive coding schemes for them, evaluates their
//! capacity regions, and provides the Monte Carlo and exhaustive-search
//! harnesses used to check that adaptation does not enlarge those regions
//! when the noise processes in the two directions are independent.
//!
//! All information quantities are in bits.

pub mod alphabet;
pub mod capacity;
pub mod channels;
pub mod coding;
pub mod error;
pub mod noise;
pub mod parallel;
pub mod seeds;
pub mod verification;

pub use alphabet::{Alphabet, Pmf, Symbol};
pub use error::{Error, Result};
pub use parallel::Execution;
pub use seeds::SimRng;
