//! Similarity exponents and scaling constants.
//!
//! The surface-temperature power-law exponent `k` fixes the residual
//! coefficient triple exactly:
//!
//! ```text
//! a = (2k + 1)/3,   b = (k + 2)/3,   t = -1 - k
//! ```
//!
//! with `k >= -1`; `k = -1` is the no-flow case (no temperature variation on
//! the surface). The physical scaling constants are real cube roots
//!
//! ```text
//! C1 = cbrt(dsigma_dt * m * rho / mu^2),   C2 = cbrt(rho^2 / (dsigma_dt * m * mu))
//! ```

use num_traits::Float;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("power-law exponent k = {k} is below the admissible minimum -1")]
    KBelowMinimum { k: f64 },
    #[error("{name} must be positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error(
        "degenerate forcing: dsigma_dt * m = 0 leaves the second scaling constant dividing by zero"
    )]
    DegenerateForcing,
}

/// Dimensionless parameters of the two similarity residuals.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityParams<T: Scalar = Rational> {
    /// Surface-temperature power-law exponent, `k >= -1`.
    pub k: T,
    /// Coefficient of `F'^2` in the momentum residual, `(2k + 1)/3`.
    pub a: T,
    /// Coefficient of `F F''`, `(k + 2)/3`.
    pub b: T,
    /// Coefficient of `F' g` in the temperature residual, `-1 - k`.
    pub t: T,
    /// Prandtl number, `> 0`. Independent input; physically `nu / kappa`.
    pub pr: T,
    /// Surface-temperature gradient coefficient; `theta(0) = m`.
    pub m: T,
}

impl<T: Scalar> SimilarityParams<T> {
    /// Derive the full parameter set from `k`, `Pr` and `m`.
    pub fn new(k: T, pr: T, m: T) -> Result<Self, ParamsError> {
        if pr <= T::zero() {
            return Err(ParamsError::NonPositive {
                name: "Prandtl number",
                value: pr.to_double(),
            });
        }
        let (a, b, t) = derive_exponents(&k)?;
        Ok(SimilarityParams { k, a, b, t, pr, m })
    }

    /// Double-precision view for the numeric oracle.
    pub fn to_f64(&self) -> SimilarityParams<f64> {
        SimilarityParams {
            k: self.k.to_double(),
            a: self.a.to_double(),
            b: self.b.to_double(),
            t: self.t.to_double(),
            pr: self.pr.to_double(),
            m: self.m.to_double(),
        }
    }
}

/// Exact residual-coefficient triple `(a, b, t)` for a given `k >= -1`.
pub fn derive_exponents<T: Scalar>(k: &T) -> Result<(T, T, T), ParamsError> {
    if *k < -T::one() {
        return Err(ParamsError::KBelowMinimum { k: k.to_double() });
    }
    let third = T::ratio(1, 3);
    let a = (T::int(2) * k.clone() + T::one()) * third.clone();
    let b = (k.clone() + T::int(2)) * third;
    let t = -T::one() - k.clone();
    Ok((a, b, t))
}

/// Physical inputs for the scaling constants. Density, viscosity and the
/// surface-tension temperature coefficient live here; velocities, stream
/// function and temperature fields are reconstructed downstream of `C1`,
/// `C2` and are not modelled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams<T: Float = f64> {
    /// Surface-tension temperature coefficient, force/length per temperature.
    pub dsigma_dt: T,
    /// Surface-temperature gradient coefficient, temperature per length^{k+1}.
    pub m: T,
    /// Density, mass/volume.
    pub rho: T,
    /// Dynamic viscosity, pressure * time.
    pub mu: T,
}

/// Real (sign-preserving) cube-root scaling constants `(C1, C2)`.
///
/// Negative forcing `dsigma_dt * m < 0` is admissible through the real cube
/// root, although the physical setting assumes it positive.
pub fn scaling_constants<T: Float>(p: &PhysicalParams<T>) -> Result<(T, T), ParamsError> {
    if p.rho <= T::zero() {
        return Err(ParamsError::NonPositive {
            name: "density",
            value: p.rho.to_f64().unwrap_or(f64::NAN),
        });
    }
    if p.mu <= T::zero() {
        return Err(ParamsError::NonPositive {
            name: "dynamic viscosity",
            value: p.mu.to_f64().unwrap_or(f64::NAN),
        });
    }
    let forcing = p.dsigma_dt * p.m;
    if forcing == T::zero() {
        return Err(ParamsError::DegenerateForcing);
    }
    let c1 = (forcing * p.rho / (p.mu * p.mu)).cbrt();
    let c2 = (p.rho * p.rho / (forcing * p.mu)).cbrt();
    Ok((c1, c2))
}
