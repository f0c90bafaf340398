//! Correction iteration for the two similarity equations.
//!
//! Each equation is attacked by the successive-approximation scheme
//!
//! ```text
//! u_{n+1}(eta) = u_n(eta) + integral_0^eta lambda(tau) R(u_n)(tau) dtau
//! ```
//!
//! with a polynomial multiplier `lambda(tau) = s (tau - eta)^p` chosen so the
//! step preserves the initial values the boundary conditions pin down:
//!
//! * momentum: `lambda = -1/2 (tau - eta)^2`, residual `F''' - a F'^2 + b F F''`;
//!   value, slope and curvature at 0 are untouched by a step, so `F(0) = 0`
//!   and `F''(0) = -(k+1)` are imposed once on the initial guess
//!   `F_0 = A + B eta + C e^{-eta}` and survive every iteration.
//! * temperature: `lambda = (tau - eta)`, residual `g'' + Pr b F g' + Pr t F' g`;
//!   value and slope at 0 survive, so `g(0) = 1` fixes `C = 1` in
//!   `g_0 = B eta + C e^{-eta}`.
//!
//! In both cases the slope constant `B` is the single free parameter; the
//! far-field closure (see [`crate::pade`]) determines it numerically, so the
//! iterate is rebuilt per candidate rather than carrying `B` symbolically.

use crate::exppoly::{ExpPoly, TERM_COUNT_WARNING};
use crate::params::SimilarityParams;
use crate::scalar::Scalar;
use crate::Rational;

/// Which similarity residual a correction functional drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualKind {
    Momentum,
    Temperature,
}

/// A correction functional: the polynomial kernel `s (tau - eta)^p` together
/// with the residual it integrates.
#[derive(Clone, Debug)]
pub struct CorrectionFunctional<T: Scalar = Rational> {
    kind: ResidualKind,
    kernel_exponent: u32,
    kernel_scale: T,
    params: SimilarityParams<T>,
    /// Momentum profile the temperature residual couples to.
    momentum_profile: Option<ExpPoly<T>>,
}

impl<T: Scalar> CorrectionFunctional<T> {
    /// Momentum functional, kernel `-1/2 (tau - eta)^2`.
    pub fn momentum(params: SimilarityParams<T>) -> Self {
        CorrectionFunctional {
            kind: ResidualKind::Momentum,
            kernel_exponent: 2,
            kernel_scale: T::ratio(-1, 2),
            params,
            momentum_profile: None,
        }
    }

    /// Temperature functional, kernel `(tau - eta)`, coupled to the given
    /// momentum profile.
    pub fn temperature(params: SimilarityParams<T>, momentum_profile: ExpPoly<T>) -> Self {
        CorrectionFunctional {
            kind: ResidualKind::Temperature,
            kernel_exponent: 1,
            kernel_scale: T::one(),
            params,
            momentum_profile: Some(momentum_profile),
        }
    }

    pub fn kind(&self) -> ResidualKind {
        self.kind
    }

    pub fn kernel_exponent(&self) -> u32 {
        self.kernel_exponent
    }

    pub fn kernel_scale(&self) -> &T {
        &self.kernel_scale
    }

    pub fn params(&self) -> &SimilarityParams<T> {
        &self.params
    }

    /// Residual of the governed equation at the given iterate.
    pub fn residual(&self, iterate: &ExpPoly<T>) -> ExpPoly<T> {
        match self.kind {
            ResidualKind::Momentum => momentum_residual(iterate, &self.params),
            ResidualKind::Temperature => temperature_residual(
                iterate,
                self.momentum_profile
                    .as_ref()
                    .expect("temperature functional carries a momentum profile"),
                &self.params,
            ),
        }
    }
}

/// Momentum residual `R(F) = F''' - a F'^2 + b F F''`, exact.
pub fn momentum_residual<T: Scalar>(f: &ExpPoly<T>, params: &SimilarityParams<T>) -> ExpPoly<T> {
    let df = f.differentiate();
    let ddf = df.differentiate();
    let dddf = ddf.differentiate();
    let advection = (&df * &df).scale(&params.a);
    let shear = (f * &ddf).scale(&params.b);
    &(&dddf - &advection) + &shear
}

/// Temperature residual `R(g) = g'' + Pr b F g' + Pr t F' g`, exact.
///
/// The slope term enters linearly.
pub fn temperature_residual<T: Scalar>(
    g: &ExpPoly<T>,
    f: &ExpPoly<T>,
    params: &SimilarityParams<T>,
) -> ExpPoly<T> {
    let dg = g.differentiate();
    let ddg = dg.differentiate();
    let df = f.differentiate();
    let conv = (f * &dg).scale(&(params.pr.clone() * params.b.clone()));
    let source = (&df * g).scale(&(params.pr.clone() * params.t.clone()));
    &(&ddg + &conv) + &source
}

/// One iterate plus the constants that produced its stage-0 guess.
#[derive(Clone, Debug)]
pub struct VimState<T: Scalar = Rational> {
    /// Current closed-form iterate.
    pub iterate: ExpPoly<T>,
    /// Number of correction steps applied so far.
    pub iteration: u32,
    /// Constant offset `A` of the initial guess (zero for temperature).
    pub offset: T,
    /// Linear slope `B`, the free constant the closure determines.
    pub slope: T,
    /// Amplitude `C` of the `e^{-eta}` term.
    pub decay_amplitude: T,
    /// Diagnostics accumulated across steps (term-count growth).
    pub warnings: Vec<String>,
}

/// The initial momentum guess `A + B eta + C e^{-eta}`.
pub fn momentum_initial<T: Scalar>(offset: T, slope: T, decay_amplitude: T) -> ExpPoly<T> {
    ExpPoly::constant(offset)
        + ExpPoly::monomial(1, slope)
        + ExpPoly::exp_term(1, vec![decay_amplitude])
}

/// Constants `(A, C)` that impose `F(0) = 0` and `F''(0) = -(k+1)` on the
/// momentum guess, leaving the slope `B` free: `C = -(k+1)`, `A = k + 1`.
pub fn apply_momentum_bcs<T: Scalar>(k: &T) -> (T, T) {
    let c = -(k.clone() + T::one());
    (-c.clone(), c)
}

/// The initial temperature guess `B eta + C e^{-eta}`.
pub fn temperature_initial<T: Scalar>(slope: T, decay_amplitude: T) -> ExpPoly<T> {
    ExpPoly::monomial(1, slope) + ExpPoly::exp_term(1, vec![decay_amplitude])
}

/// The amplitude `C` imposing `g(0) = 1` on the temperature guess.
pub fn apply_temperature_bcs<T: Scalar>() -> T {
    T::one()
}

/// Dimensionless temperature from the reduced profile: `theta = m g`.
pub fn theta_from_g<T: Scalar>(g: &ExpPoly<T>, m: &T) -> ExpPoly<T> {
    g.scale(m)
}

/// Stage-0 momentum state for the given `k` and free slope.
pub fn momentum_state<T: Scalar>(params: &SimilarityParams<T>, slope: T) -> VimState<T> {
    let (offset, decay_amplitude) = apply_momentum_bcs(&params.k);
    VimState {
        iterate: momentum_initial(offset.clone(), slope.clone(), decay_amplitude.clone()),
        iteration: 0,
        offset,
        slope,
        decay_amplitude,
        warnings: Vec::new(),
    }
}

/// Stage-0 temperature state for the given free slope.
pub fn temperature_state<T: Scalar>(slope: T) -> VimState<T> {
    let decay_amplitude = apply_temperature_bcs::<T>();
    VimState {
        iterate: temperature_initial(slope.clone(), decay_amplitude.clone()),
        iteration: 0,
        offset: T::zero(),
        slope,
        decay_amplitude,
        warnings: Vec::new(),
    }
}

/// One correction step: `u + integral_0^eta s (tau - eta)^p R(u) dtau`.
pub fn correction_step<T: Scalar>(
    state: &VimState<T>,
    functional: &CorrectionFunctional<T>,
) -> VimState<T> {
    let residual = functional.residual(&state.iterate);
    let update = residual.integrate_kernel(functional.kernel_exponent(), functional.kernel_scale());
    let iterate = &state.iterate + &update;
    let mut warnings = state.warnings.clone();
    let count = iterate.term_count();
    if count > TERM_COUNT_WARNING {
        warnings.push(format!(
            "iterate after step {} holds {count} terms (warning threshold {TERM_COUNT_WARNING})",
            state.iteration + 1
        ));
    }
    VimState {
        iterate,
        iteration: state.iteration + 1,
        offset: state.offset.clone(),
        slope: state.slope.clone(),
        decay_amplitude: state.decay_amplitude.clone(),
        warnings,
    }
}

/// Apply `n` correction steps.
pub fn correction_steps<T: Scalar>(
    state: VimState<T>,
    functional: &CorrectionFunctional<T>,
    n: u32,
) -> VimState<T> {
    let mut cur = state;
    for _ in 0..n {
        cur = correction_step(&cur, functional);
    }
    cur
}
