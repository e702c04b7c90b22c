//! Ground-state solitons of the discrete nonlinear Schrödinger equation
//! `i∂ₜw = L₀w − |w|^{p−1}w` on the half-lattice, where `L₀` is the Jacobi
//! operator with linearly growing weights
//! `(L₀v)(x) = −(x+1)v(x+1) + (2x+1)v(x) − xv(x−1)`.
//!
//! A soliton is a positive solution of `L₀α + μα = αᵖ`.
//! [`soliton::construct_soliton`] builds it for `μ` above the threshold
//! `μ⋆(p)`, [`verify::verify_all`] audits it, and [`dnls`] evolves it in
//! time.
//!
//! ```
//! use ncsoliton::soliton::{construct_soliton, SolitonParams};
//!
//! let r = construct_soliton(&SolitonParams::new(6.0, 3)).unwrap();
//! assert!(r.residual_sup < 1e-10);
//! assert!(r.alpha[0] > r.alpha[1]);
//! ```
//!
//! The guide in `book/` walks through each module; its snippets run as
//! doc-tests of this crate.

pub mod cli;
pub mod dnls;
pub mod error;
pub mod lattice;
pub mod operator;
pub mod soliton;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::LatticeVector;

// The book's code blocks are compiled and run by `cargo test --doc`.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/special-functions.md")]
    mod special_functions {}
    #[doc = include_str!("../../../book/src/resolvent.md")]
    mod resolvent {}
    #[doc = include_str!("../../../book/src/construction.md")]
    mod construction {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
