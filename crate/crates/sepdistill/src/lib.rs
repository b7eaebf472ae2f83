//! Numerical laboratory for single-copy entanglement manipulation.
//!
//! The crate constructs two-element mixtures `rho = w |psi1><psi1| +
//! (1-w) |psi2><psi2|` for a fixed catalogue of state families, builds the
//! separable-operator pairs and LOCC protocols associated with each family,
//! applies them as quantum instruments, and checks every claimed property
//! numerically: filtering identities, completeness, outcome statistics,
//! Schmidt ranks, pencil rank obstructions, dimension bounds, and branch
//! survival.  A derivative-free search probes feasibility of separable
//! filtering where no closed-form operators are known.
//!
//! Modules are layered bottom-up: [`numlin`] (dense complex kernels),
//! [`states`] (state families), [`instruments`] (operator families),
//! [`channel`] (instrument application and verdicts), [`locc`] (protocol
//! trees), [`analysis`] (ranks and bounds), [`search`] (feasibility
//! search), and [`cli`] (the command-line front end used by the `sepdistill`
//! binary).

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod error;
pub mod instruments;
pub mod json;
pub mod locc;
pub mod numlin;
pub mod policy;
pub mod search;
pub mod states;

pub use error::{Error, Result};
pub use policy::Policy;
