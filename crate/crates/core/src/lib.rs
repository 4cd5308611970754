//! Conditional Orlicz spaces on finite probability spaces.
//!
//! The crate models a random normed module `E = L⁰(ℝ^d)` over a finite
//! probability space, Orlicz functions and their conjugates, the Luxemburg
//! and Orlicz norms (unconditional and conditioned on a partition), and the
//! duality map `T f = E[f(·) | 𝓕]` identifying the random conjugate of the
//! conditional Orlicz heart `H_𝓕^Φ(E)` with `L_𝓕^Ψ(E*)`.
//!
//! | module       | contents                                                   |
//! |--------------|------------------------------------------------------------|
//! | [`prob`]     | spaces, partitions, random scalars, conditional expectation |
//! | [`orlicz`]   | Orlicz functions, conjugation, random Orlicz functions, Δ₂  |
//! | [`norms`]    | Luxemburg / Orlicz norms, conditional versions, membership |
//! | [`module`]   | module elements, functionals, truncation and denseness     |
//! | [`duality`]  | the map `T`, operator-norm brackets, recovery, Δ₂ collapse  |
//! | [`oracle`]   | brute-force reference computations                         |
//! | [`json`]     | wire formats                                               |

pub mod duality;
pub mod error;
pub mod json;
pub mod module;
pub mod norms;
pub mod oracle;
pub mod orlicz;
pub mod prob;

pub use error::{OrliczError, Result};
pub use module::{ModuleElement, RandomFunctional};
pub use norms::{Membership, NormReport};
pub use orlicz::{OrliczFunction, RandomOrliczFunction};
pub use prob::{AtomPartition, FiniteProbSpace, RandomScalar};

/// Crate version, embedded in generated reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
