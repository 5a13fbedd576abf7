//! Exact computation of degenerate number families — Stirling numbers of
//! both kinds, harmonic, hyperharmonic, Fubini, harmonic-Fubini and
//! hyperharmonic-Fubini — with every family computed by at least two
//! independent routes, plus a harness that machine-checks the identities
//! connecting them and reports exact counterexamples.
//!
//! All arithmetic is arbitrary-precision rational; no floating point
//! anywhere. The deformation parameter λ is either a fixed nonzero
//! rational or the indeterminate of a rational-coefficient polynomial
//! ring, so classical λ→0 limits are exact evaluations, never
//! approximations.

pub mod harness;
pub mod kernel;
pub mod numbers;
pub mod poly;
pub mod series;

pub use kernel::{
    binomial_general, div_exact_lambda, falling_factorial, falling_factorial_deg,
    rising_factorial, KernelError, LambdaPoly, Rational, Scalar,
};
pub use poly::Poly;
pub use series::{geometric, PowerSeries, SeriesError, Var};

/// Series over a fixed rational λ.
pub type RationalSeries = PowerSeries<Rational>;
/// Series with λ carried symbolically.
pub type SymbolicSeries = PowerSeries<LambdaPoly>;
pub type RationalPoly = Poly<Rational>;
pub type SymbolicPoly = Poly<LambdaPoly>;
