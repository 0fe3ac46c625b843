//! Orlicz-function calculus and a numerical laboratory for weighted
//! fractional Orlicz-Hardy inequalities over radial test functions.
//!
//! * [`orlicz`]: parsing, validation, indices, equivalence, growth functions,
//!   Luxemburg norms.
//! * [`lemmas`]: the splitting inequality Phi(a+b) <= lambda Phi(a) + C Phi(b)
//!   and its empirical constant.
//! * [`quadrature`]: modular integrals (Hardy side, weighted Gagliardo
//!   seminorm, log-corrected and gradient variants) with divergence probes.
//! * [`dyadic`]: contraction factors and the annulus-by-annulus certificate.
//! * [`lab`]: test-function families and end-to-end experiments.
//! * [`cli`]: the batch front end behind the `orlicz-lab` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dyadic;
pub mod lab;
pub mod lemmas;
pub mod numerics;
pub mod orlicz;
pub mod quadrature;
