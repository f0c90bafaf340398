//! Shared oracles for the property and acceptance suites: adaptive
//! quadrature and finite-difference derivatives, independent of the
//! closed-form paths they check.

#![allow(dead_code)]

use marangoni_core::exppoly::ExpPoly;
use marangoni_core::scalar::Scalar;
use marangoni_core::Rational;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
#[allow(clippy::too_many_arguments)]
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// `n`-th derivative of `f` at 0 by central differences with three
/// Richardson eliminations (effective order h^8), `n <= 4`.
pub fn fd_derivative_at_zero(f: &dyn Fn(f64) -> f64, n: usize, h: f64) -> f64 {
    fn stencil(f: &dyn Fn(f64) -> f64, n: usize, h: f64) -> f64 {
        match n {
            0 => f(0.0),
            1 => (f(h) - f(-h)) / (2.0 * h),
            2 => (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h),
            3 => (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h),
            4 => {
                (f(2.0 * h) - 4.0 * f(h) + 6.0 * f(0.0) - 4.0 * f(-h) + f(-2.0 * h))
                    / (h * h * h * h)
            }
            _ => panic!("stencil order {n} not supported"),
        }
    }
    if n == 0 {
        return f(0.0);
    }
    let mut level: Vec<f64> = (0..4)
        .map(|i| stencil(f, n, h / f64::powi(2.0, i)))
        .collect();
    let mut weight = 4.0;
    while level.len() > 1 {
        level = level
            .windows(2)
            .map(|w| (weight * w[1] - w[0]) / (weight - 1.0))
            .collect();
        weight *= 4.0;
    }
    level[0]
}

/// Deterministic xorshift generator for repository-pinned randomized checks.
pub struct Xorshift64(pub u64);

impl Xorshift64 {
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// Small exact rational with numerator in `[-9, 9]`, denominator in `[1, 9]`.
    pub fn rational(&mut self) -> Rational {
        Rational::ratio(self.int(-9, 9), self.int(1, 9))
    }

    /// Exp-polynomial with up to three terms, decay index <= 2, degree <= 2.
    pub fn exppoly(&mut self) -> ExpPoly<Rational> {
        let terms = self.int(1, 3);
        let mut out = ExpPoly::zero();
        for _ in 0..terms {
            let decay = self.int(0, 2) as u32;
            let degree = self.int(0, 2) as usize;
            let coeffs: Vec<Rational> = (0..=degree).map(|_| self.rational()).collect();
            out = out + ExpPoly::exp_term(decay, coeffs);
        }
        out
    }
}
