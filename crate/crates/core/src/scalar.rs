//! Coefficient-field abstraction for the symbolic pipeline.
//!
//! Everything on the symbolic side (exp-polynomials, Taylor coefficients,
//! Padé construction) is generic over [`Scalar`]. The default instantiation
//! is [`Rational`], where every operation is exact; `f64`/`f32` satisfy the
//! same bounds for quick approximate work.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use crate::Rational;

/// Field scalar: exact rationals by default, floats as approximate stand-ins.
pub trait Scalar:
    Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Clone
    + PartialOrd
    + Display
    + Debug
    + Send
    + Sync
    + 'static
{
    /// The ratio `numer / denom` of two machine integers. `denom` must be
    /// nonzero.
    fn ratio(numer: i64, denom: i64) -> Self {
        Self::int(numer) / Self::int(denom)
    }

    /// Scalar from a machine integer.
    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("machine integer converts to scalar")
    }

    /// Lossless text rendering used in fixtures and reports.
    fn exact_string(&self) -> String;

    /// Parse the [`Scalar::exact_string`] form back. Plain integers and
    /// `numerator/denominator` pairs are both accepted.
    fn parse_exact(text: &str) -> Option<Self>;

    /// Double-precision rendering (NaN if the value does not fit).
    fn to_double(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact conversion from a double; every finite double is rational.
    fn from_double(x: f64) -> Option<Self> {
        Self::from_f64(x)
    }
}

impl Scalar for Rational {
    fn exact_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_exact(text: &str) -> Option<Self> {
        let mut parts = text.splitn(2, '/');
        let numer: BigInt = parts.next()?.trim().parse().ok()?;
        let denom: BigInt = match parts.next() {
            Some(d) => d.trim().parse().ok()?,
            None => BigInt::from(1),
        };
        if denom == BigInt::from(0) {
            return None;
        }
        Some(Rational::new(numer, denom))
    }
}

macro_rules! impl_scalar_for_float {
    ($t:ty) => {
        impl Scalar for $t {
            fn exact_string(&self) -> String {
                format!("{self:?}")
            }

            fn parse_exact(text: &str) -> Option<Self> {
                if let Ok(v) = text.trim().parse::<$t>() {
                    return Some(v);
                }
                let mut parts = text.splitn(2, '/');
                let numer: $t = parts.next()?.trim().parse().ok()?;
                let denom: $t = parts.next()?.trim().parse().ok()?;
                (denom != 0.0).then(|| numer / denom)
            }
        }
    };
}

impl_scalar_for_float!(f64);
impl_scalar_for_float!(f32);
