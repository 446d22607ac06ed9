//! Numerical toolkit for the joint convexity and concavity of the trace
//! functionals `Φ_{p,q,s}(A,B) = Tr[(A^{q/2} B^p A^{q/2})^s]` and their relatives.
//!
//! * [`linalg`]: Hermitian eigensolver, matrix powers, seeded random matrices.
//! * [`functionals`]: `Φ`, `Ψ_K`, the sandwich map, the triple trace, the
//!   variational trace-power formulas and the α–z Rényi divergence.
//! * [`regions`]: which `(p,q,s)` are known convex, concave, or neither.
//! * [`probes`]: randomized convexity tests with witness capture and grid scans.
//! * [`counterexamples`]: the explicit 2×2 constructions and the dilation limit.
//! * [`channels`]: random CPTP maps and data-processing checks.

pub mod channels;
pub mod counterexamples;
mod error;
pub mod functionals;
pub mod linalg;
pub mod probes;
pub mod regions;
pub mod report;

pub use error::{Error, Result};
