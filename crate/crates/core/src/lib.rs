//! Kummer sums weighted by `|L(1, chi)|` modulo a prime.
//!
//! The crate evaluates the cubic exponential sums
//! `S_p(n; chi) = sum_{a=1}^{p} chi(a) e(n a^3 / p)` over the full group of
//! Dirichlet characters mod `p`, the values `L(1, chi)`, the weight constants
//! `C` and `C_t`, and the second and fourth moments (plain and weighted) built
//! from them. Exact identities are checked against independent evaluation
//! routes; bulk evaluation over all characters runs as one arbitrary-length
//! DFT per prime.

pub mod arith;
pub mod characters;
pub mod dft;
pub mod error;
pub mod expsums;
pub mod kummer;
pub mod lfun;
pub mod moments;
pub mod sieve;
pub mod summation;
pub mod weights;

pub use arith::{CubicContext, PrimeContext};
pub use characters::DirichletCharacter;
pub use error::{Error, Result};
