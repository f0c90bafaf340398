//! Semi-analytic solver for the similarity boundary layer of Marangoni
//! convection driven by an imposed surface-temperature gradient.
//!
//! The momentum and temperature similarity equations
//!
//! ```text
//! F''' = a F'^2 - b F F''        F(0) = 0,  F''(0) = -(k+1),  F'(inf) = 0
//! g''  = Pr (-b F g' - t F' g)   g(0) = 1,  g'(inf) = 0
//! ```
//!
//! are solved by successive correction with a polynomial integral kernel.
//! Each iterate lives in the ring of exp-polynomials `sum_k P_k(eta) e^{-k eta}`
//! with exact rational coefficients ([`exppoly`]), so the correction step is
//! closed-form. The far-field conditions are imposed on the free constant of
//! the initial guess through a diagonal Padé approximant of the iterate's
//! derivative series ([`pade`]). An independent fourth-order Runge-Kutta
//! shooting oracle ([`bvp`]) cross-checks every profile.
//!
//! The symbolic side is generic over the coefficient field via [`Scalar`];
//! the default instantiation is the exact rational [`Rational`], and floats
//! only appear at evaluation time and in the numeric oracle.

pub mod bvp;
pub mod driver;
pub mod exppoly;
pub mod pade;
pub mod params;
pub mod report;
pub mod scalar;
pub mod vim;

/// Exact arbitrary-precision rational, the default coefficient field for the
/// whole symbolic pipeline.
pub type Rational = num_rational::BigRational;

pub use bvp::NumericSolution;
pub use exppoly::ExpPoly;
pub use pade::PadeApproximant;
pub use params::{PhysicalParams, SimilarityParams};
pub use report::VimReport;
pub use scalar::Scalar;
pub use vim::{CorrectionFunctional, VimState};
