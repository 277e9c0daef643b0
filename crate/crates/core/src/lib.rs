//! Exact computational algebra for plane and superelliptic curves defined by
//! Chebyshev polynomials over finite fields.
//!
//! The library builds the degree-d Chebyshev polynomial phi_d (monic, with
//! phi_d(t + 1/t) = t^d + t^{-d}), the projective curve y^d = phi_d(x) and its
//! superelliptic relatives y^m = f(x), and provides the machinery used to
//! study them mechanically: total inflection points, tangent/line intersection
//! profiles, point counts and maximality over F_{q^2}, setwise stabilizers in
//! PGL(2,q) found by sharp 3-transitivity, automorphism lifting, and binary
//! quartic j-invariants.
//!
//! Everything is deterministic: field constructions, element orderings and
//! report payloads are canonical, so equal inputs give byte-equal reports.
//!
//! The default `parallel` feature runs the enumeration kernels on rayon;
//! disabling it swaps in sequential equivalents with identical results.

pub mod aut;
pub mod caps;
pub mod cheb;
pub mod curve;
pub mod error;
mod exec;
pub mod ff;
pub mod moebius;
pub mod poly;

pub use caps::Caps;
pub use error::{Error, Result};
