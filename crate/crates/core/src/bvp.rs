//! Independent numeric oracle: classical fourth-order Runge-Kutta plus a
//! shooting loop for both similarity boundary-value problems.
//!
//! The far-field conditions `F'(inf) = 0` and `g'(inf) = 0` are imposed as
//! point conditions at `eta_max`. A shot integrates the initial-value
//! problem with a candidate initial slope; the slope is bracket-scanned,
//! bisected to a narrow bracket and polished with two secant steps. The
//! temperature problem integrates the joint five-component system
//! `(F, F', F'', g, g')` with the already-fitted momentum slope rather than
//! interpolating a stored momentum grid.

use num_traits::Float;
use thiserror::Error;

use crate::params::SimilarityParams;
use crate::scalar::Scalar;

/// Default truncation point for the far-field conditions.
pub const DEFAULT_ETA_MAX: f64 = 10.0;
/// Default integration step.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Default bracket for the momentum surface velocity `F'(0)`.
pub const DEFAULT_MOMENTUM_BRACKET: (f64, f64) = (0.0, 3.0);
/// Default bracket for the temperature surface slope `g'(0)`.
pub const DEFAULT_TEMPERATURE_BRACKET: (f64, f64) = (-10.0, 2.0);
/// Returned solutions satisfy `|terminal residual| <=` this.
pub const TERMINAL_TOLERANCE: f64 = 1e-8;
/// Bisection stops at this bracket width, before secant polishing.
pub const BRACKET_WIDTH_TOLERANCE: f64 = 1e-10;

const SCAN_INTERVALS: usize = 40;

#[derive(Debug, Error, PartialEq)]
pub enum BvpError {
    #[error("invalid integration setup: step {h} must be positive and eta_max {eta_max} at least one step")]
    InvalidStep { h: f64, eta_max: f64 },
    #[error("state became non-finite at node {node} (eta = {eta}); shrink eta_max or the step")]
    Blowup { node: usize, eta: f64 },
    #[error("no shooting bracket on [{lo}, {hi}]: terminal residual runs {r_lo} to {r_hi} without a sign change")]
    NoSignChange {
        lo: f64,
        hi: f64,
        r_lo: f64,
        r_hi: f64,
    },
    #[error("shooting stalled: terminal residual {residual} exceeds tolerance {tolerance}")]
    NoConvergence { residual: f64, tolerance: f64 },
    #[error("momentum solution carries no fitted slope; run the momentum shot first")]
    MissingShootingParameter,
}

/// Grid-sampled solution of one of the two boundary-value problems.
///
/// Momentum solutions carry the components `[F, F', F'']`, temperature
/// solutions `[g, g']`, one vector per component over the shared `grid`.
#[derive(Clone, Debug)]
pub struct NumericSolution<T: Float = f64> {
    pub grid: Vec<T>,
    pub components: Vec<Vec<T>>,
    pub step: T,
    /// Fitted initial slope, present on shooting results.
    pub shooting_parameter: Option<T>,
    /// Far-field target value at `eta_max`, present on shooting results.
    pub terminal_residual: Option<T>,
}

impl<T: Float> NumericSolution<T> {
    pub fn component(&self, idx: usize) -> &[T] {
        &self.components[idx]
    }

    /// Value of component `idx` at `eta` by linear interpolation between
    /// grid nodes (the grid is uniform).
    pub fn sample(&self, idx: usize, eta: T) -> T {
        let column = &self.components[idx];
        let position = (eta / self.step).max(T::zero());
        let i = position
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(column.len() - 1);
        if i + 1 >= column.len() {
            return column[column.len() - 1];
        }
        let frac = position - T::from(i).unwrap();
        column[i] + frac * (column[i + 1] - column[i])
    }

    fn terminal(&self, idx: usize) -> T {
        *self.components[idx].last().expect("nonempty grid")
    }
}

/// Classical RK4 over `[0, eta_max]` with fixed step `h`.
///
/// `field` maps `(eta, state)` to the state derivative. Fails with
/// [`BvpError::Blowup`] as soon as a state component stops being finite.
pub fn rk4_integrate<T: Float, const N: usize>(
    field: impl Fn(T, &[T; N]) -> [T; N],
    y0: [T; N],
    h: T,
    eta_max: T,
) -> Result<NumericSolution<T>, BvpError> {
    if h <= T::zero() || eta_max < h {
        return Err(BvpError::InvalidStep {
            h: h.to_f64().unwrap_or(f64::NAN),
            eta_max: eta_max.to_f64().unwrap_or(f64::NAN),
        });
    }
    let steps = (eta_max / h)
        .round()
        .to_usize()
        .expect("step count fits usize");
    let mut grid = Vec::with_capacity(steps + 1);
    let mut components = vec![Vec::with_capacity(steps + 1); N];
    let mut state = y0;
    let two = T::from(2.0).unwrap();
    let six = T::from(6.0).unwrap();
    let half = h / two;
    for node in 0..=steps {
        let eta = T::from(node).unwrap() * h;
        if state.iter().any(|v| !v.is_finite()) {
            return Err(BvpError::Blowup {
                node,
                eta: eta.to_f64().unwrap_or(f64::NAN),
            });
        }
        grid.push(eta);
        for (column, value) in components.iter_mut().zip(state.iter()) {
            column.push(*value);
        }
        if node == steps {
            break;
        }
        let k1 = field(eta, &state);
        let k2 = field(eta + half, &offset(&state, &k1, half));
        let k3 = field(eta + half, &offset(&state, &k2, half));
        let k4 = field(eta + h, &offset(&state, &k3, h));
        for i in 0..N {
            state[i] = state[i] + h * (k1[i] + two * k2[i] + two * k3[i] + k4[i]) / six;
        }
    }
    Ok(NumericSolution {
        grid,
        components,
        step: h,
        shooting_parameter: None,
        terminal_residual: None,
    })
}

fn offset<T: Float, const N: usize>(state: &[T; N], slope: &[T; N], h: T) -> [T; N] {
    let mut out = *state;
    for i in 0..N {
        out[i] = out[i] + h * slope[i];
    }
    out
}

/// Momentum vector field: `(F, F', F'') -> (F', F'', a F'^2 - b F F'')`.
fn momentum_field<T: Float>(a: T, b: T) -> impl Fn(T, &[T; 3]) -> [T; 3] {
    move |_eta, y| [y[1], y[2], a * y[1] * y[1] - b * y[0] * y[2]]
}

/// Joint field `(F, F', F'', g, g')` with `g'' = Pr(-b F g' - t F' g)`.
fn joint_field<T: Float>(a: T, b: T, t: T, pr: T) -> impl Fn(T, &[T; 5]) -> [T; 5] {
    move |_eta, y| {
        [
            y[1],
            y[2],
            a * y[1] * y[1] - b * y[0] * y[2],
            y[4],
            pr * (-b * y[0] * y[4] - t * y[1] * y[3]),
        ]
    }
}

/// Fit the momentum surface velocity `F'(0)` so that `F'(eta_max) = 0`.
///
/// The terminal residual can cross zero more than once on a truncated
/// domain: below the genuine slope the profile overshoots, turns around
/// under the quadratic term and recrosses zero in a window that widens as
/// `eta_max` shrinks. Every crossing in the bracket is therefore refined and
/// the shot with the flattest far field (smallest `|F''(eta_max)|`) is the
/// solution; the artificial crossings end far from flat.
pub fn shoot_momentum<T>(
    params: &SimilarityParams<T>,
    eta_max: T,
    h: T,
    bracket: (T, T),
) -> Result<NumericSolution<T>, BvpError>
where
    T: Float + Scalar,
{
    let k1 = params.k + T::one();
    let (a, b) = (params.a, params.b);
    let run = |slope: T| rk4_integrate(momentum_field(a, b), [T::zero(), slope, -k1], h, eta_max);
    let slopes = find_shots(|s| Ok(run(s)?.terminal(1)), bracket)?;
    let slope = select_flattest(&slopes, |s| {
        let sol = run(s)?;
        Ok(sol.terminal(2).abs())
    })?;
    let mut solution = run(slope)?;
    let residual = solution.terminal(1);
    check_terminal(residual)?;
    solution.shooting_parameter = Some(slope);
    solution.terminal_residual = Some(residual);
    Ok(solution)
}

/// Fit the temperature surface slope `g'(0)` so that `g'(eta_max) = 0`,
/// integrating jointly with the already-fitted momentum shot.
pub fn shoot_temperature<T>(
    params: &SimilarityParams<T>,
    momentum: &NumericSolution<T>,
    eta_max: T,
    h: T,
    bracket: (T, T),
) -> Result<NumericSolution<T>, BvpError>
where
    T: Float + Scalar,
{
    let momentum_slope = momentum
        .shooting_parameter
        .ok_or(BvpError::MissingShootingParameter)?;
    let k1 = params.k + T::one();
    let (a, b, t, pr) = (params.a, params.b, params.t, params.pr);
    let run = |slope: T| {
        rk4_integrate(
            joint_field(a, b, t, pr),
            [T::zero(), momentum_slope, -k1, T::one(), slope],
            h,
            eta_max,
        )
    };
    let slopes = find_shots(|s| Ok(run(s)?.terminal(4)), bracket)?;
    let slope = select_flattest(&slopes, |s| {
        let sol = run(s)?;
        // |g''(eta_max)| from the governing equation at the terminal state
        let (f, df, g, dg) = (
            sol.terminal(0),
            sol.terminal(1),
            sol.terminal(3),
            sol.terminal(4),
        );
        Ok((pr * (-b * f * dg - t * df * g)).abs())
    })?;
    let joint = run(slope)?;
    let residual = joint.terminal(4);
    check_terminal(residual)?;
    Ok(NumericSolution {
        grid: joint.grid,
        components: vec![joint.components[3].clone(), joint.components[4].clone()],
        step: joint.step,
        shooting_parameter: Some(slope),
        terminal_residual: Some(residual),
    })
}

fn check_terminal<T: Float>(residual: T) -> Result<(), BvpError> {
    let r = residual.to_f64().unwrap_or(f64::NAN);
    if r.abs() <= TERMINAL_TOLERANCE {
        Ok(())
    } else {
        Err(BvpError::NoConvergence {
            residual: r,
            tolerance: TERMINAL_TOLERANCE,
        })
    }
}

/// All roots of the terminal residual over the slope bracket: scan for exact
/// zeros and sign changes, bisect each change to [`BRACKET_WIDTH_TOLERANCE`],
/// then polish with two secant steps. Shots that blow up mid-integration are
/// skipped during the scan (wrong slopes may genuinely diverge before
/// `eta_max`).
fn find_shots<T: Float>(
    residual: impl Fn(T) -> Result<T, BvpError>,
    bracket: (T, T),
) -> Result<Vec<T>, BvpError> {
    let (lo, hi) = bracket;
    let n = T::from(SCAN_INTERVALS).unwrap();
    let grid_point =
        |i: usize| (lo * T::from(SCAN_INTERVALS - i).unwrap() + hi * T::from(i).unwrap()) / n;
    let mut previous: Option<(T, T)> = None;
    let mut changes: Vec<((T, T), (T, T))> = Vec::new();
    let mut roots: Vec<T> = Vec::new();
    let mut first_error: Option<BvpError> = None;
    let mut finite: Vec<(T, T)> = Vec::new();
    for i in 0..=SCAN_INTERVALS {
        let s = grid_point(i);
        match residual(s) {
            Ok(r) => {
                if r == T::zero() {
                    roots.push(s);
                    previous = None;
                    continue;
                }
                if let Some((_, r_prev)) = previous {
                    if r_prev.signum() != r.signum() {
                        changes.push((previous.unwrap(), (s, r)));
                    }
                }
                finite.push((s, r));
                previous = Some((s, r));
            }
            Err(err) => {
                if first_error.is_none() {
                    first_error = Some(err);
                }
                previous = None;
            }
        }
    }
    if roots.is_empty() && changes.is_empty() {
        return Err(match (finite.first(), finite.last()) {
            (Some(&(_, r_first)), Some(&(_, r_last))) => BvpError::NoSignChange {
                lo: lo.to_f64().unwrap_or(f64::NAN),
                hi: hi.to_f64().unwrap_or(f64::NAN),
                r_lo: r_first.to_f64().unwrap_or(f64::NAN),
                r_hi: r_last.to_f64().unwrap_or(f64::NAN),
            },
            _ => first_error.expect("either a finite shot or an error exists"),
        });
    }
    let tol = T::from(BRACKET_WIDTH_TOLERANCE).unwrap();
    let two = T::from(2.0).unwrap();
    for ((mut a, mut ra), (mut b, _)) in changes {
        let mut exact = None;
        while b - a > tol {
            let mid = (a + b) / two;
            let rm = residual(mid)?;
            if rm == T::zero() {
                exact = Some(mid);
                break;
            }
            if rm.signum() == ra.signum() {
                a = mid;
                ra = rm;
            } else {
                b = mid;
            }
        }
        if let Some(mid) = exact {
            roots.push(mid);
            continue;
        }
        let mut best = (a + b) / two;
        let mut best_res = residual(best)?.abs();
        let (mut x0, mut x1) = (a, b);
        for _ in 0..2 {
            let (Ok(f0), Ok(f1)) = (residual(x0), residual(x1)) else {
                break;
            };
            if f1 == f0 {
                break;
            }
            let candidate = x1 - f1 * (x1 - x0) / (f1 - f0);
            if !candidate.is_finite() {
                break;
            }
            let Ok(fc) = residual(candidate) else { break };
            if fc.abs() <= best_res {
                best = candidate;
                best_res = fc.abs();
            }
            x0 = x1;
            x1 = candidate;
            if fc == T::zero() {
                break;
            }
        }
        roots.push(best);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(roots)
}

/// The candidate slope whose far field is flattest under the given metric.
fn select_flattest<T: Float>(
    slopes: &[T],
    flatness: impl Fn(T) -> Result<T, BvpError>,
) -> Result<T, BvpError> {
    let mut best: Option<(T, T)> = None;
    for &s in slopes {
        let value = flatness(s)?;
        if best.map(|(_, v)| value < v).unwrap_or(true) {
            best = Some((s, value));
        }
    }
    Ok(best.expect("at least one shot root").0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_k0() -> SimilarityParams<f64> {
        SimilarityParams::new(0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn constant_solution_is_exact() {
        let sol = rk4_integrate(|_t, _y: &[f64; 1]| [0.0], [1.0], 0.1, 1.0).unwrap();
        assert!(sol.component(0).iter().all(|&v| v == 1.0));
        assert_eq!(sol.grid.len(), 11);
        assert_eq!(sol.grid[0], 0.0);
    }

    #[test]
    fn exponential_growth_fourth_order_accuracy() {
        // global error of classical RK4 on y' = y over [0, 1] is ~2.1e-6 at
        // h = 0.1 and shrinks sixteenfold per halving
        let sol = rk4_integrate(|_t, y: &[f64; 1]| [y[0]], [1.0], 0.1, 1.0).unwrap();
        let y1 = sol.component(0).last().unwrap();
        assert!((y1 - std::f64::consts::E).abs() < 3e-6);
        let fine = rk4_integrate(|_t, y: &[f64; 1]| [y[0]], [1.0], 0.05, 1.0).unwrap();
        let y1_fine = fine.component(0).last().unwrap();
        assert!((y1_fine - std::f64::consts::E).abs() < 2e-7);
    }

    #[test]
    fn riccati_decay_matches_closed_form() {
        // y' = -y^2, y(0) = 1 has y(eta) = 1/(1 + eta)
        let sol = rk4_integrate(|_t, y: &[f64; 1]| [-y[0] * y[0]], [1.0], 1e-3, 1.0).unwrap();
        let y1 = sol.component(0).last().unwrap();
        assert!((y1 - 0.5).abs() < 1e-8);
    }

    #[test]
    fn blowup_is_reported_with_node() {
        // y' = y^2 from y(0) = 1.5 blows up at eta = 2/3
        let err = rk4_integrate(|_t, y: &[f64; 1]| [y[0] * y[0]], [1.5], 1e-3, 1.0).unwrap_err();
        match err {
            BvpError::Blowup { eta, .. } => assert!(eta > 0.5 && eta < 1.0, "eta = {eta}"),
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn invalid_step_is_rejected() {
        let err = rk4_integrate(|_t, _y: &[f64; 1]| [0.0], [1.0], 0.0, 1.0).unwrap_err();
        assert!(matches!(err, BvpError::InvalidStep { .. }));
    }

    #[test]
    fn grid_spacing_is_uniform() {
        let sol = rk4_integrate(|_t, y: &[f64; 1]| [y[0]], [1.0], 1e-3, 2.0).unwrap();
        for w in sol.grid.windows(2) {
            assert!((w[1] - w[0] - 1e-3).abs() < 1e-12);
        }
    }

    #[test]
    fn no_flow_momentum_shot_is_exactly_zero() {
        let params = SimilarityParams::<f64>::new(-1.0, 1.0, 1.0).unwrap();
        let sol = shoot_momentum(&params, 10.0, 1e-3, (0.0, 3.0)).unwrap();
        assert_eq!(sol.shooting_parameter, Some(0.0));
        assert!(sol.component(0).iter().all(|&v| v == 0.0));
        assert!(sol.component(1).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn no_flow_temperature_is_constant_one() {
        let params = SimilarityParams::<f64>::new(-1.0, 1.0, 1.0).unwrap();
        let momentum = shoot_momentum(&params, 10.0, 1e-3, (0.0, 3.0)).unwrap();
        let temp = shoot_temperature(&params, &momentum, 10.0, 1e-3, (-10.0, 2.0)).unwrap();
        let max_dev = temp
            .component(0)
            .iter()
            .map(|&g| (g - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(max_dev <= 1e-10, "max |g - 1| = {max_dev}");
    }

    #[test]
    fn momentum_bracket_probe_changes_sign_for_linear_wall() {
        // the terminal residual dips negative in a window around the genuine
        // slope; two probe integrations pin the sign change inside [0, 3]
        let params = params_k0();
        let run = |slope: f64| {
            rk4_integrate(
                momentum_field(params.a, params.b),
                [0.0, slope, -1.0],
                1e-3,
                10.0,
            )
            .map(|sol| *sol.component(1).last().unwrap())
        };
        let r_low = run(1.2).unwrap();
        let r_inside = run(1.275).unwrap();
        assert!(
            r_low > 0.0 && r_inside < 0.0,
            "r(1.2) = {r_low}, r(1.275) = {r_inside}"
        );
    }

    #[test]
    fn momentum_shot_selects_the_flat_crossing() {
        // the truncated domain admits a turnaround crossing near 1.22 whose
        // far field is visibly curved; the fitted slope must be the flat one
        let params = params_k0();
        let sol = shoot_momentum(&params, 10.0, 1e-3, (0.0, 3.0)).unwrap();
        let slope = sol.shooting_parameter.unwrap();
        assert!(
            (slope - 1.296).abs() < 5e-3,
            "fitted slope {slope} is not the flat crossing"
        );
        assert!(sol.terminal_residual.unwrap().abs() <= TERMINAL_TOLERANCE);
        // far field is flat and positive: F' decays monotonically in the
        // last quarter of the grid
        let df = sol.component(1);
        let start = 3 * df.len() / 4;
        for w in df[start..].windows(2) {
            assert!(w[1].abs() <= w[0].abs() + 1e-12);
        }
    }

    #[test]
    fn missing_momentum_slope_is_an_error() {
        let params = params_k0();
        let bare = rk4_integrate(
            momentum_field(params.a, params.b),
            [0.0, 1.0, -1.0],
            1e-3,
            1.0,
        )
        .unwrap();
        let err = shoot_temperature(&params, &bare, 1.0, 1e-3, (-10.0, 2.0)).unwrap_err();
        assert_eq!(err, BvpError::MissingShootingParameter);
    }

    #[test]
    fn sample_interpolates_linearly() {
        let sol = rk4_integrate(|_t, _y: &[f64; 1]| [2.0], [0.0], 0.5, 2.0).unwrap();
        // solution is y = 2 eta
        assert!((sol.sample(0, 0.75) - 1.5).abs() < 1e-12);
        assert!((sol.sample(0, 2.0) - 4.0).abs() < 1e-12);
    }
}
