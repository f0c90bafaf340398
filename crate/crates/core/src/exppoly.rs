//! Exact algebra on the exp-polynomial ring `sum_k P_k(eta) e^{-k eta}`.
//!
//! Values are stored as a map from the nonnegative integer decay index `k`
//! (the factor `e^{-k eta}`) to the dense ascending-power coefficient list of
//! the polynomial `P_k`. The ring is closed under addition, multiplication,
//! differentiation and the kernel integral
//!
//! ```text
//! eta -> integral_0^eta  s * (tau - eta)^p * f(tau) dtau
//! ```
//!
//! so every correction iterate stays in closed form. Canonical form (no
//! all-zero polynomial, no trailing zero coefficients) is restored after
//! every operation; two values representing the same function compare equal.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::Rational;

/// Iterates larger than this many nonzero monomials trigger a diagnostic
/// warning in the correction step.
pub const TERM_COUNT_WARNING: usize = 10_000;

/// Element of the ring `sum_k P_k(eta) e^{-k eta}` with coefficients in `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPoly<T: Scalar = Rational> {
    /// Decay index `k` -> ascending-power coefficients of `P_k`.
    terms: BTreeMap<u32, Vec<T>>,
}

impl<T: Scalar> ExpPoly<T> {
    /// The zero function (empty term map).
    pub fn zero() -> Self {
        ExpPoly {
            terms: BTreeMap::new(),
        }
    }

    /// Constant function.
    pub fn constant(c: T) -> Self {
        Self::from_terms([(0, vec![c])])
    }

    /// The similarity coordinate `eta` itself.
    pub fn eta() -> Self {
        Self::from_terms([(0, vec![T::zero(), T::one()])])
    }

    /// `c * eta^power`.
    pub fn monomial(power: usize, c: T) -> Self {
        let mut coeffs = vec![T::zero(); power + 1];
        coeffs[power] = c;
        Self::from_terms([(0, coeffs)])
    }

    /// `P(eta) * e^{-k eta}` for the given ascending coefficients of `P`.
    pub fn exp_term(decay: u32, coeffs: Vec<T>) -> Self {
        Self::from_terms([(decay, coeffs)])
    }

    /// Build from `(decay index, coefficients)` pairs; repeated indices add.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, Vec<T>)>,
    {
        let mut map: BTreeMap<u32, Vec<T>> = BTreeMap::new();
        for (k, coeffs) in terms {
            accumulate(&mut map, k, 0, coeffs);
        }
        let mut out = ExpPoly { terms: map };
        out.canonicalize();
        out
    }

    fn canonicalize(&mut self) {
        self.terms.retain(|_, coeffs| {
            while coeffs.last().is_some_and(|c| c.is_zero()) {
                coeffs.pop();
            }
            !coeffs.is_empty()
        });
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero monomials `eta^m e^{-k eta}` in canonical form.
    pub fn term_count(&self) -> usize {
        self.terms
            .values()
            .map(|p| p.iter().filter(|c| !c.is_zero()).count())
            .sum()
    }

    /// Coefficient of `eta^power e^{-decay eta}` (zero when absent).
    pub fn coefficient(&self, decay: u32, power: usize) -> T {
        self.terms
            .get(&decay)
            .and_then(|p| p.get(power))
            .cloned()
            .unwrap_or_else(T::zero)
    }

    /// Iterate `(decay index, polynomial coefficients)` in ascending order.
    pub fn iter_terms(&self) -> impl Iterator<Item = (u32, &[T])> {
        self.terms.iter().map(|(k, p)| (*k, p.as_slice()))
    }

    /// Multiply by the scalar `c`.
    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, p)| (*k, p.iter().map(|x| x.clone() * c.clone()).collect()))
            .collect();
        let mut out = ExpPoly { terms };
        out.canonicalize();
        out
    }

    /// Exact derivative: `d/deta [eta^m e^{-k eta}] = (m eta^{m-1} - k eta^m) e^{-k eta}`.
    pub fn differentiate(&self) -> Self {
        let mut map: BTreeMap<u32, Vec<T>> = BTreeMap::new();
        for (k, poly) in &self.terms {
            // P' part
            let dp = poly
                .iter()
                .enumerate()
                .skip(1)
                .map(|(m, c)| T::int(m as i64) * c.clone());
            accumulate(&mut map, *k, 0, dp);
            // -k P part
            if *k > 0 {
                let neg_k = -T::int(*k as i64);
                accumulate(
                    &mut map,
                    *k,
                    0,
                    poly.iter().map(|c| neg_k.clone() * c.clone()),
                );
            }
        }
        let mut out = ExpPoly { terms: map };
        out.canonicalize();
        out
    }

    /// `n`-th exact derivative.
    pub fn differentiate_n(&self, n: u32) -> Self {
        let mut cur = self.clone();
        for _ in 0..n {
            cur = cur.differentiate();
        }
        cur
    }

    /// Exact closed form of `eta -> integral_0^eta s (tau - eta)^p f(tau) dtau`.
    ///
    /// `(tau - eta)^p` is expanded binomially and each piece reduced with the
    /// closed antiderivatives of `tau^n e^{-k tau}`; the result stays in the
    /// ring.
    pub fn integrate_kernel(&self, p: u32, s: &T) -> Self {
        let mut map: BTreeMap<u32, Vec<T>> = BTreeMap::new();
        // binomial coefficients C(p, i), computed incrementally in T
        let mut binom = T::one();
        for i in 0..=p {
            if i > 0 {
                binom = binom * T::int((p - i + 1) as i64) / T::int(i as i64);
            }
            // sign of (-eta)^{p-i}
            let sign = if (p - i).is_multiple_of(2) {
                T::one()
            } else {
                -T::one()
            };
            let eta_power = (p - i) as usize;
            for (k, poly) in &self.terms {
                for (m, c) in poly.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let weight = s.clone() * binom.clone() * sign.clone() * c.clone();
                    let lower: ExpPoly<T> = lower_incomplete(m as u32 + i, *k);
                    for (decay, part) in lower.terms {
                        accumulate(
                            &mut map,
                            decay,
                            eta_power,
                            part.into_iter().map(|x| x * weight.clone()),
                        );
                    }
                }
            }
        }
        let mut out = ExpPoly { terms: map };
        out.canonicalize();
        out
    }

    /// Double-precision value at `eta`.
    ///
    /// At `eta = 0` the constant coefficients are summed exactly first, so
    /// cancellations imposed by boundary conditions survive the conversion.
    pub fn eval(&self, eta: f64) -> f64 {
        if eta == 0.0 {
            return self.value_at_zero().to_double();
        }
        let mut total = 0.0;
        for (k, poly) in &self.terms {
            let mut horner = 0.0;
            for c in poly.iter().rev() {
                horner = horner * eta + c.to_double();
            }
            total += horner * (-(*k as f64) * eta).exp();
        }
        total
    }

    /// Exact value at `eta = 0` (the sum of the constant coefficients).
    pub fn value_at_zero(&self) -> T {
        self.terms
            .values()
            .filter_map(|p| p.first().cloned())
            .fold(T::zero(), |acc, c| acc + c)
    }

    /// Exact Maclaurin coefficients `c_0..c_n`, expanding `e^{-k eta}` as
    /// `sum_j (-k)^j eta^j / j!`.
    pub fn taylor(&self, n: usize) -> Vec<T> {
        let mut out = vec![T::zero(); n + 1];
        for (k, poly) in &self.terms {
            // E_j = (-k)^j / j!
            let mut exp_coeff = T::one();
            for j in 0..=n {
                if j > 0 {
                    exp_coeff = exp_coeff * T::int(-(*k as i64)) / T::int(j as i64);
                }
                for (m, c) in poly.iter().enumerate() {
                    if m + j > n {
                        break;
                    }
                    if !c.is_zero() {
                        out[m + j] = out[m + j].clone() + c.clone() * exp_coeff.clone();
                    }
                }
            }
        }
        out
    }

    /// Exact `n`-th derivative at zero, `f^(n)(0) = n! * taylor[n]`.
    pub fn derivative_at_zero(&self, n: usize) -> T {
        let c = self
            .taylor(n)
            .pop()
            .expect("taylor returns n+1 coefficients");
        let mut factorial = T::one();
        for j in 2..=n {
            factorial = factorial * T::int(j as i64);
        }
        c * factorial
    }

    /// Serialize to the structured text form used in fixtures and reports.
    pub fn to_records(&self) -> Vec<ExpPolyRecord> {
        self.terms
            .iter()
            .map(|(k, p)| ExpPolyRecord {
                decay_index: *k,
                coefficients: p.iter().map(|c| c.exact_string()).collect(),
            })
            .collect()
    }

    /// Rebuild from the structured text form.
    pub fn from_records(records: &[ExpPolyRecord]) -> Result<Self, RecordError> {
        let mut terms = Vec::new();
        for rec in records {
            let mut coeffs = Vec::with_capacity(rec.coefficients.len());
            for text in &rec.coefficients {
                let c = T::parse_exact(text).ok_or_else(|| RecordError::BadCoefficient {
                    text: text.clone(),
                    decay_index: rec.decay_index,
                })?;
                coeffs.push(c);
            }
            terms.push((rec.decay_index, coeffs));
        }
        Ok(Self::from_terms(terms))
    }
}

/// Add `coeffs * eta^offset * e^{-decay eta}` into a term map in place.
fn accumulate<T: Scalar>(
    map: &mut BTreeMap<u32, Vec<T>>,
    decay: u32,
    offset: usize,
    coeffs: impl IntoIterator<Item = T>,
) {
    let entry = map.entry(decay).or_default();
    for (j, c) in coeffs.into_iter().enumerate() {
        let index = offset + j;
        if entry.len() <= index {
            entry.resize(index + 1, T::zero());
        }
        entry[index] = entry[index].clone() + c;
    }
}

/// `integral_0^eta tau^n e^{-k tau} dtau` in closed form.
fn lower_incomplete<T: Scalar>(n: u32, k: u32) -> ExpPoly<T> {
    if k == 0 {
        return ExpPoly::monomial(n as usize + 1, T::ratio(1, n as i64 + 1));
    }
    // antiderivative -e^{-k tau} * sum_j a_j tau^{n-j}, a_0 = 1/k,
    // a_{j+1} = a_j (n - j)/k; boundary term a_n at tau = 0.
    let kk = T::int(k as i64);
    let mut a = T::one() / kk.clone();
    let mut decaying = vec![T::zero(); n as usize + 1];
    for j in 0..=n {
        decaying[(n - j) as usize] = -a.clone();
        if j < n {
            a = a * T::int((n - j) as i64) / kk.clone();
        }
    }
    // after the loop, a == a_n == n!/k^{n+1}
    ExpPoly::from_terms([(0, vec![a]), (k, decaying)])
}

impl<T: Scalar> Add for &ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn add(self, rhs: &ExpPoly<T>) -> ExpPoly<T> {
        ExpPoly::from_terms(
            self.terms
                .iter()
                .chain(rhs.terms.iter())
                .map(|(k, p)| (*k, p.clone())),
        )
    }
}

impl<T: Scalar> Add for ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn add(self, rhs: ExpPoly<T>) -> ExpPoly<T> {
        &self + &rhs
    }
}

impl<T: Scalar> Neg for &ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn neg(self) -> ExpPoly<T> {
        self.scale(&-T::one())
    }
}

impl<T: Scalar> Neg for ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn neg(self) -> ExpPoly<T> {
        -&self
    }
}

impl<T: Scalar> Sub for &ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn sub(self, rhs: &ExpPoly<T>) -> ExpPoly<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Sub for ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn sub(self, rhs: ExpPoly<T>) -> ExpPoly<T> {
        &self - &rhs
    }
}

impl<T: Scalar> Mul for &ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn mul(self, rhs: &ExpPoly<T>) -> ExpPoly<T> {
        let mut terms: Vec<(u32, Vec<T>)> = Vec::new();
        for (k1, p1) in &self.terms {
            for (k2, p2) in &rhs.terms {
                let mut conv = vec![T::zero(); p1.len() + p2.len() - 1];
                for (i, a) in p1.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in p2.iter().enumerate() {
                        if !b.is_zero() {
                            conv[i + j] = conv[i + j].clone() + a.clone() * b.clone();
                        }
                    }
                }
                terms.push((k1 + k2, conv));
            }
        }
        ExpPoly::from_terms(terms)
    }
}

impl<T: Scalar> Mul for ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn mul(self, rhs: ExpPoly<T>) -> ExpPoly<T> {
        &self * &rhs
    }
}

impl<T: Scalar> fmt::Display for ExpPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, poly) in &self.terms {
            for (m, c) in poly.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({c})")?;
                match m {
                    0 => {}
                    1 => write!(f, "*eta")?,
                    _ => write!(f, "*eta^{m}")?,
                }
                match k {
                    0 => {}
                    1 => write!(f, "*exp(-eta)")?,
                    _ => write!(f, "*exp(-{k}*eta)")?,
                }
            }
        }
        Ok(())
    }
}

/// One `P_k(eta) e^{-k eta}` term in the structured text form: the decay
/// index and the exact coefficient strings of `P_k` in ascending power order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpPolyRecord {
    pub decay_index: u32,
    pub coefficients: Vec<String>,
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("unparseable coefficient {text:?} in term with decay index {decay_index}")]
    BadCoefficient { text: String, decay_index: u32 },
}
