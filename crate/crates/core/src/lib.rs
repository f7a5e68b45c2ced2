//! Symbolic computation of Legendrian surgery invariants.
//!
//! Input is a Legendrian homology DGA (or directed A-infinity structure
//! constants of a Lefschetz fibration); output is the cyclic, Hochschild-type,
//! linearized and surgery complexes with exact homology over `Q`.

pub mod algebra;
pub mod complexes;
pub mod dga;
pub mod examples;
pub mod homology;
pub mod io;
pub mod lefschetz;
pub mod random;
pub mod surgery;
