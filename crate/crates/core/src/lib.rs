//! Bound-state spectra of a spinless particle in an elastic medium carrying a
//! screw dislocation (a vertical line distorted into a vertical spiral),
//! confined by a hard cylindrical wall and optionally observed from a
//! rotating frame.
//!
//! The closed-form spectra quantize through zeros of J_|γ| with the
//! effective angular momentum γ = l − βk. [`mathieu_oracle`] solves the
//! unapproximated radial problem (a modified Mathieu equation) by shooting so
//! the small-β reduction can be checked numerically.

pub mod cli;
pub mod geometry;
pub mod mathieu_oracle;
pub mod specfun;
pub mod spectrum;
