//! Competitive equilibria of pure exchange economies with linear, Leontief
//! and Cobb-Douglas utilities, and the incentive ratio: the factor by which
//! an agent can raise its true utility by misreporting its preferences.
//!
//! * [`market`]: economies, utilities, demand, excess demand, equilibrium checks.
//! * [`solvers`]: Cobb-Douglas closed forms, Leontief and linear searches,
//!   brute-force oracle.
//! * [`adjugate`]: the spending matrix `E A^T - I`, adjugate prices and
//!   determinant budgets.
//! * [`incentive`]: ratio search, 2x2 closed form, unbounded witness markets,
//!   bound sweeps.
//! * [`market_file`]: the TOML/JSON market description format.

pub mod adjugate;
pub mod error;
pub mod incentive;
pub mod linalg;
pub mod market;
pub mod market_file;
pub mod reference;
pub mod sampling;
pub mod simplex;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
pub use market::{Economy, Equilibrium, ReportProfile, UtilityFunction, UtilityKind};
pub use solvers::{EquilibriumSet, SolverConfig};
