//! Exact arithmetic dynamics on the projective line over `Q` and `Q(t)`.
//!
//! The crate computes portraits of points modulo primes and places, searches
//! for primes at which a point has a squarefree portrait `(m, n)`, and decides
//! membership in the admissible preperiod/period sets with certificates that
//! can be re-checked independently.

pub mod admissible;
pub mod arith;
pub mod base;
pub mod cli;
pub mod dynamics;
pub mod expr;
pub mod factor;
pub mod fixtures;
pub mod funcfield;
pub mod heights;
pub mod modp;
pub mod poly;
pub mod portraits;
pub mod quot;
pub mod ratfunc;
pub mod report;
pub mod residue;
pub mod workers;

mod error;

pub use arith::{Field, Rat};
pub use base::Base;
pub use error::{Error, Result};
pub use poly::Poly;
pub use ratfunc::RatFunc;
