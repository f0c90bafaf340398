//! Diagonal Padé approximants and the far-field closure of the free slope.
//!
//! An `[L/M]` approximant is the rational function whose Maclaurin expansion
//! reproduces a given Taylor series through order `L + M`. The denominator
//! coefficients come from the `M x M` Toeplitz system on the series tail, the
//! numerator from a convolution; with exact rational input everything is
//! exact. The far-field condition (`F'(inf) = 0`, `g'(inf) = 0`) is imposed
//! on the free slope `B` of an iterate by root-finding the leading numerator
//! coefficient of the diagonal approximant of the iterate's derivative
//! series: at a root the approximant's limit at infinity is zero, provided
//! the leading denominator coefficient stays away from zero (checked after
//! the fact, to keep the root function pole-free during bisection).

use thiserror::Error;

use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Error, PartialEq)]
pub enum PadeError {
    #[error("need {needed} Taylor coefficients for [{l}/{m}], got {got}")]
    InsufficientCoefficients {
        l: usize,
        m: usize,
        needed: usize,
        got: usize,
    },
    #[error("degenerate Padé system for [{l}/{m}]: singular Toeplitz matrix")]
    DegeneratePade { l: usize, m: usize },
    #[error("invalid approximant: numerator and denominator are both zero")]
    InvalidApproximant,
    #[error("denominator must be normalized to q0 = 1")]
    NotNormalized,
    #[error(
        "no closure root on [{lo}, {hi}]: root function is {phi_lo} at the left end and {phi_hi} at the right end"
    )]
    NoClosureRoot {
        lo: f64,
        hi: f64,
        phi_lo: f64,
        phi_hi: f64,
    },
    #[error(
        "spurious pole at closure root {root}: leading denominator coefficient {denominator_leading} is too close to zero"
    )]
    SpuriousPole { root: f64, denominator_leading: f64 },
}

/// Rational function `p(x)/q(x)` with `q(0) = 1`, built from a Taylor series.
#[derive(Clone, Debug, PartialEq)]
pub struct PadeApproximant<T: Scalar = Rational> {
    /// Numerator coefficients `p_0..p_L` (ascending, untrimmed).
    numer: Vec<T>,
    /// Denominator coefficients `q_0..q_M` with `q_0 = 1` (ascending, untrimmed).
    denom: Vec<T>,
}

impl<T: Scalar> PadeApproximant<T> {
    /// Wrap explicit coefficient lists; the denominator must satisfy `q_0 = 1`.
    pub fn new(numer: Vec<T>, denom: Vec<T>) -> Result<Self, PadeError> {
        if denom.first().map(|q0| !q0.is_one()).unwrap_or(true) {
            return Err(PadeError::NotNormalized);
        }
        Ok(PadeApproximant { numer, denom })
    }

    /// `[L/M]` approximant of the series `c_0..c_{L+M}` (more coefficients
    /// than `L + M + 1` are ignored; fewer are an error).
    ///
    /// When the series tail `c_{L+1}..c_{L+M}` vanishes identically the
    /// series is already a polynomial of degree `<= L` and the approximant
    /// degenerates to that polynomial over the denominator `[1]`.
    pub fn from_taylor(c: &[T], l: usize, m: usize) -> Result<Self, PadeError> {
        let needed = l + m + 1;
        if c.len() < needed {
            return Err(PadeError::InsufficientCoefficients {
                l,
                m,
                needed,
                got: c.len(),
            });
        }
        let coeff = |i: isize| -> T {
            if i < 0 {
                T::zero()
            } else {
                c[i as usize].clone()
            }
        };
        if m == 0 || (1..=m).all(|i| c[l + i].is_zero()) {
            return Ok(PadeApproximant {
                numer: c[..=l].to_vec(),
                denom: vec![T::one()],
            });
        }
        // Toeplitz system: sum_{j=1..m} c_{l+i-j} q_j = -c_{l+i},  i = 1..m
        let mut matrix = vec![vec![T::zero(); m]; m];
        let mut rhs = vec![T::zero(); m];
        for i in 1..=m {
            for j in 1..=m {
                matrix[i - 1][j - 1] = coeff(l as isize + i as isize - j as isize);
            }
            rhs[i - 1] = -coeff((l + i) as isize);
        }
        let q_tail = solve_dense(matrix, rhs).ok_or(PadeError::DegeneratePade { l, m })?;
        let mut denom = Vec::with_capacity(m + 1);
        denom.push(T::one());
        denom.extend(q_tail);
        // numerator by convolution: p_i = sum_{j=0..min(i,m)} q_j c_{i-j}
        let mut numer = Vec::with_capacity(l + 1);
        for i in 0..=l {
            let mut p = T::zero();
            for (j, q) in denom.iter().enumerate().take(i + 1) {
                p = p + q.clone() * coeff(i as isize - j as isize);
            }
            numer.push(p);
        }
        Ok(PadeApproximant { numer, denom })
    }

    /// `(L, M)` as stored (untrimmed).
    pub fn orders(&self) -> (usize, usize) {
        (
            self.numer.len().saturating_sub(1),
            self.denom.len().saturating_sub(1),
        )
    }

    pub fn numerator(&self) -> &[T] {
        &self.numer
    }

    pub fn denominator(&self) -> &[T] {
        &self.denom
    }

    /// Maclaurin coefficients `d_0..d_n` of `p/q` by series division.
    pub fn maclaurin(&self, n: usize) -> Vec<T> {
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut d = self.numer.get(i).cloned().unwrap_or_else(T::zero);
            for j in 1..=i.min(self.denom.len() - 1) {
                d = d - self.denom[j].clone() * out[i - j].clone();
            }
            out.push(d);
        }
        out
    }

    /// Double-precision value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.numer, x) / horner(&self.denom, x)
    }

    /// Limit of `p(x)/q(x)` as `x -> inf`, as an extended real.
    ///
    /// Trailing zero coefficients are dropped first, so a vanished leading
    /// denominator coefficient falls back to the highest nonzero one.
    pub fn farfield_limit(&self) -> Result<f64, PadeError> {
        let deg_p = effective_degree(&self.numer);
        let deg_q = effective_degree(&self.denom);
        match (deg_p, deg_q) {
            (None, None) => Err(PadeError::InvalidApproximant),
            (None, Some(_)) => Ok(0.0),
            (Some(_), None) => Err(PadeError::InvalidApproximant),
            (Some(dp), Some(dq)) => {
                let ratio = self.numer[dp].to_double() / self.denom[dq].to_double();
                if dp < dq {
                    Ok(0.0)
                } else if dp == dq {
                    Ok(ratio)
                } else {
                    Ok(ratio.signum() * f64::INFINITY)
                }
            }
        }
    }
}

fn horner<T: Scalar>(coeffs: &[T], x: f64) -> f64 {
    coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * x + c.to_double())
}

fn effective_degree<T: Scalar>(coeffs: &[T]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero())
}

/// Gaussian elimination with magnitude pivoting; `None` when singular.
fn solve_dense<T: Scalar>(mut matrix: Vec<Vec<T>>, mut rhs: Vec<T>) -> Option<Vec<T>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !matrix[r][col].is_zero())
            .max_by(|&r1, &r2| {
                let m1 = matrix[r1][col].to_double().abs();
                let m2 = matrix[r2][col].to_double().abs();
                m1.partial_cmp(&m2).unwrap_or(std::cmp::Ordering::Equal)
            })?;
        matrix.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..n {
            if matrix[row][col].is_zero() {
                continue;
            }
            let factor = matrix[row][col].clone() / matrix[col][col].clone();
            let (upper, lower) = matrix.split_at_mut(row);
            for (dst, src) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *dst = dst.clone() - factor.clone() * src.clone();
            }
            rhs[row] = rhs[row].clone() - factor * rhs[col].clone();
        }
    }
    let mut solution = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for j in (row + 1)..n {
            acc = acc - matrix[row][j].clone() * solution[j].clone();
        }
        solution[row] = acc / matrix[row][row].clone();
    }
    Some(solution)
}

/// Knobs of the closure root search.
#[derive(Clone, Copy, Debug)]
pub struct ClosureOptions {
    /// Scan step used to locate sign changes across the bracket.
    pub scan_step: f64,
    /// Bisection stops once the bracket width is at most this.
    pub bisect_tol: f64,
    /// Minimum magnitude of the leading denominator coefficient at a root.
    pub denominator_floor: f64,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            scan_step: 0.05,
            bisect_tol: 1e-12,
            denominator_floor: 1e-9,
        }
    }
}

/// All closure roots in the bracket, ascending.
///
/// The root function is the leading numerator coefficient `p_L(B)` of the
/// `[L/L]` approximant of the series produced by `make_series`; the bracket
/// is scanned at `scan_step` for sign changes and exact zeros, each sign
/// change is bisected and then polished with two secant steps. If `p_L`
/// vanishes at every scan point the whole family is degenerate (the
/// approximant collapses below order `L`); the far-field limit itself is
/// then used as the root function so the condition "limit = 0" is still the
/// quantity being solved.
pub fn find_closure_roots<T, S>(
    make_series: &S,
    l: usize,
    bracket: (f64, f64),
    options: &ClosureOptions,
) -> Result<Vec<f64>, PadeError>
where
    T: Scalar,
    S: Fn(f64) -> Vec<T>,
{
    let approximant = |b: f64| PadeApproximant::from_taylor(&make_series(b), l, l);
    let leading = |b: f64| -> Option<f64> { approximant(b).ok().map(|p| p.numer[l].to_double()) };
    let limit = |b: f64| -> Option<f64> {
        approximant(b)
            .ok()
            .and_then(|p| p.farfield_limit().ok())
            .map(|v| {
                // clamp infinities so sign logic stays usable
                if v.is_infinite() {
                    v.signum() * 1e300
                } else {
                    v
                }
            })
    };

    let (lo, hi) = bracket;
    let width = hi - lo;
    let intervals = ((width / options.scan_step).ceil() as usize).max(1);
    // endpoint-symmetric grid: hits the exact midpoint of symmetric brackets
    let grid_point = |i: usize| (lo * (intervals - i) as f64 + hi * i as f64) / intervals as f64;

    struct Scan {
        exact_zeros: Vec<f64>,
        sign_changes: Vec<(f64, f64)>,
        values: Vec<Option<f64>>,
    }
    let scan = |phi: &dyn Fn(f64) -> Option<f64>| -> Scan {
        let values: Vec<Option<f64>> = (0..=intervals).map(|i| phi(grid_point(i))).collect();
        let mut exact_zeros = Vec::new();
        let mut sign_changes = Vec::new();
        for (i, value) in values.iter().enumerate() {
            let Some(v) = *value else { continue };
            if v == 0.0 {
                exact_zeros.push(grid_point(i));
            } else if i > 0 {
                if let Some(prev) = values[i - 1] {
                    if prev != 0.0 && prev.signum() != v.signum() {
                        sign_changes.push((grid_point(i - 1), grid_point(i)));
                    }
                }
            }
        }
        Scan {
            exact_zeros,
            sign_changes,
            values,
        }
    };

    let mut found = scan(&leading);
    let degenerate_family = found
        .values
        .iter()
        .all(|v| matches!(v, Some(x) if *x == 0.0));
    if degenerate_family {
        found = scan(&limit);
    }
    let phi: &dyn Fn(f64) -> Option<f64> = if degenerate_family { &limit } else { &leading };

    let mut roots = found.exact_zeros;
    for (mut a, mut b) in found.sign_changes {
        let mut fa = phi(a).unwrap_or(f64::NAN);
        while b - a > options.bisect_tol {
            let mut mid = 0.5 * (a + b);
            let fm = match phi(mid) {
                Some(v) => v,
                None => {
                    // an isolated singular construction: nudge once
                    let nudged = mid + 0.01 * (b - a);
                    match phi(nudged) {
                        Some(v) => {
                            mid = nudged;
                            v
                        }
                        None => break,
                    }
                }
            };
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fm.signum() == fa.signum() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        let mut root = 0.5 * (a + b);
        // secant polish: exact for root functions affine in B
        let mut x0 = a;
        let mut x1 = b;
        for _ in 0..2 {
            let (Some(f0), Some(f1)) = (phi(x0), phi(x1)) else {
                break;
            };
            if f1 == f0 {
                break;
            }
            let candidate = x1 - f1 * (x1 - x0) / (f1 - f0);
            if !candidate.is_finite() || candidate < lo.min(hi) || candidate > lo.max(hi) {
                break;
            }
            let fc = phi(candidate).unwrap_or(f64::NAN);
            let fr = phi(root).unwrap_or(f64::NAN);
            if fc.is_nan() {
                break;
            }
            if fc.abs() <= fr.abs() {
                root = candidate;
            }
            x0 = x1;
            x1 = candidate;
            if fc == 0.0 {
                break;
            }
        }
        roots.push(root);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.dedup_by(|x, y| (*x - *y).abs() <= options.bisect_tol);

    if roots.is_empty() {
        return Err(PadeError::NoClosureRoot {
            lo,
            hi,
            phi_lo: leading(lo).unwrap_or(f64::NAN),
            phi_hi: leading(hi).unwrap_or(f64::NAN),
        });
    }

    // at each root the limit must be genuinely zero, not 0/0
    for &root in &roots {
        let p = approximant(root)?;
        if p.numer.iter().all(|c| c.is_zero()) {
            continue; // identically zero: its limit is zero with no pole risk
        }
        let q_leading = p.denom[l.min(p.denom.len() - 1)].to_double();
        if q_leading.abs() < options.denominator_floor {
            return Err(PadeError::SpuriousPole {
                root,
                denominator_leading: q_leading,
            });
        }
    }
    Ok(roots)
}

/// First closure root in the bracket under default options.
pub fn solve_free_parameter<T, S>(
    make_series: &S,
    l: usize,
    bracket: (f64, f64),
) -> Result<f64, PadeError>
where
    T: Scalar,
    S: Fn(f64) -> Vec<T>,
{
    Ok(find_closure_roots(make_series, l, bracket, &ClosureOptions::default())?[0])
}
