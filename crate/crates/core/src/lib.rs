//! Generalized information divergences (Rényi, α-Jensen-Shannon, Sibson) and
//! upper bounds on the excess minimum risk `L*(Y|Z) - L*(Y|X)` for Markov
//! chains `Y → X → Z`.
//!
//! - [`divergence`]: exact divergences on finite alphabets.
//! - [`discrete`]: q-ary symmetric channel chains, exact 0-1 Bayes risks and bound terms.
//! - [`gaussian`]: the additive Gaussian chains, closed forms and quadrature.
//! - [`bounds`]: the bound formulas and α sweeps.
//! - [`oracle`]: brute-force and sampling cross-checks.

pub mod bounds;
pub mod discrete;
pub mod divergence;
pub mod error;
pub mod gaussian;
pub mod oracle;

pub use error::{Error, Result};
