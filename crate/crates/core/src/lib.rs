//! Nevanlinna-Pick interpolation and kernel-ball geometry.
//!
//! A positive definite `n x n` matrix `K` defines the compact convex set
//!
//! ```text
//! D_K = { w in C^n : ((1 - w_i conj(w_j)) K(i, j)) is positive semidefinite }
//! ```
//!
//! For distinct disc nodes and the Szego matrix `K = 1 / (1 - l_i conj(l_j))`
//! this is exactly the set of value tuples of holomorphic self-maps of the
//! closed disc (the Pick body). The crate computes with these sets on the disc
//! and polydisc: Pick solvability and the extremal Blaschke interpolant,
//! membership and boundary geometry of kernel balls, Szego-form recognition,
//! Caratheodory quantities, and sampled verification of extremality and of
//! several structural statements about kernels whose ball is a Pick body.
//!
//! The guide in `book/` walks through the concepts; its code listings are
//! compiled and run as doc-tests of this crate.
//!
//! ```
//! use pickbody::numlin::ToleranceConfig;
//! use pickbody::pick_disc::{solution_count_class, PickProblem, SolutionClass};
//! use num_complex::Complex64 as C;
//!
//! let p = PickProblem::new(
//!     vec![C::new(0.0, 0.0), C::new(0.5, 0.0)],
//!     vec![C::new(0.0, 0.0), C::new(0.5, 0.0)],
//! )?;
//! assert_eq!(solution_count_class(&p, &ToleranceConfig::default()), SolutionClass::Unique(1));
//! # Ok::<(), pickbody::Error>(())
//! ```

pub mod cara;
pub mod cli;
pub mod error;
pub mod extremal;
pub mod json;
pub mod kernel_ball;
pub mod moebius;
pub mod numlin;
pub mod pick_disc;
pub mod sampling;

pub use error::{Error, Result};
pub use numlin::C64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/pick.md")]
    mod pick {}
    #[doc = include_str!("../../../book/src/kernel_balls.md")]
    mod kernel_balls {}
    #[doc = include_str!("../../../book/src/caratheodory.md")]
    mod caratheodory {}
    #[doc = include_str!("../../../book/src/extremal.md")]
    mod extremal {}
    #[doc = include_str!("../../../book/src/theorems.md")]
    mod theorems {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
