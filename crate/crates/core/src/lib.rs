//! Rigorous upper bounds on `A(n,d)`, the largest size of a binary code of
//! length `n` and minimum distance `d`.
//!
//! * [`radial`]: binomials, Krawtchouk polynomials, radial and dense
//!   Walsh–Hadamard transforms, binary entropy.
//! * [`walks`]: exact level-to-level walk counts in the Hamming cube.
//! * [`certificate`]: walk certificates `g = φ_m·Γ_r²`, their exact
//!   feasibility checks and bounds, and the classical comparison certificate.
//! * [`delsarte`]: exact simplex solver for the radial Delsarte LP.
//! * [`codes`]: exhaustive `A(n,d)` for small `n` and distance distributions.
//! * [`report`]: bound reports, rate–distance curves and sweeps.
//!
//! All bound arithmetic is exact; floats appear only in entropies and
//! exponents.

pub mod certificate;
pub mod codes;
pub mod delsarte;
pub mod error;
pub mod radial;
pub mod rational;
pub mod report;
pub mod walks;

pub use error::{Error, Result};
