//! Chebyshev polynomials over a prime field and an authentication and key
//! agreement protocol built on them.
//!
//! See the guide under `book/` for a walk-through; every snippet there is
//! compiled as a doc-test of this crate.

pub mod bench;
pub mod cheb;
pub mod harness;
pub mod protocol;
pub mod wire;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/chebyshev.md")]
    mod chebyshev {}
    #[doc = include_str!("../../../book/src/moduli.md")]
    mod moduli {}
    #[doc = include_str!("../../../book/src/protocol.md")]
    mod protocol {}
    #[doc = include_str!("../../../book/src/wire.md")]
    mod wire {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
}
