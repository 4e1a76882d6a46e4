//! Computable invariants of area-preserving identity isotopies on the flat
//! torus `R^2 / (L Z)^2`.
//!
//! The library works with an isotopy `I = (F_t)` given by closed-form
//! evaluators together with its canonical lift to the plane, and computes:
//!
//! * winding numbers and signed polyline intersections ([`cover`]),
//! * the isotopy algebra (compose, inverse, power) and the plane
//!   normalization fixing two lifted fixed points ([`isotopy`]),
//! * pairwise linking numbers of lifted fixed points and their deck sums
//!   ([`linking`]),
//! * first-return Birkhoff intersection sums and rotation vectors along
//!   orbits ([`orbits`]),
//! * action differences of invariant measures, the resolved action
//!   function, its spectrum and width, and the classical Hamiltonian
//!   action cross-check ([`action`]).
//!
//! All types are immutable after construction and all operations are pure,
//! so everything can be shared freely across threads. Parallel reductions
//! use a fixed pairwise tree so results do not depend on the thread count.

pub mod action;
pub mod cover;
pub mod isotopy;
pub mod linking;
pub mod orbits;

mod rng;
mod sum;

pub use cover::{DeckElement, PlanePath, PlanePoint, RefineConfig, Torus, TorusPoint};
pub use isotopy::{Isotopy, PlaneIsotopy, Trajectory, TwistProfile};

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("point within clearance of the curve (distance {distance:.3e}, clearance {clearance:.3e})")]
    ClearanceViolation { distance: f64, clearance: f64 },

    #[error("adaptive refinement exhausted at depth {depth}")]
    RefinementExhausted { depth: u32 },

    #[error("winding of a closed curve was not integral (got {value})")]
    NonIntegralWinding { value: f64 },

    #[error("degenerate incidence between paths (endpoint contact or collinear overlap)")]
    DegenerateIncidence,

    #[error("inversion of the isotopy evaluator diverged")]
    InversionDiverged,

    #[error("point is not a fixed point of the lifted time-one map (residual {residual:.3e})")]
    NotFixed { residual: f64 },

    #[error("normalization denominator fell below clearance")]
    DegenerateDenominator,

    #[error("point is not an admissible contractible fixed point")]
    NotContractibleFixed,

    #[error("deck shell cap {cap} exceeded before the sum stabilized")]
    ShellCapExceeded { cap: i64 },

    #[error("orbit did not return within {cap} iterates")]
    CapExceeded { cap: u64 },

    #[error("limit did not converge (spread {spread:.3e} > {tol:.3e})")]
    NotConverged { spread: f64, tol: f64 },

    #[error("deck-translate truncation changed the sum on the verification shell")]
    TruncationUnverified,

    #[error("cocycle residual {residual:.3e} exceeds limit {limit:.3e}")]
    CocycleResidualExceeded { residual: f64, limit: f64 },

    #[error("action difference across a deck translate is nonzero ({value:.3e}); quotient action undefined")]
    DeckInconsistent { value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
