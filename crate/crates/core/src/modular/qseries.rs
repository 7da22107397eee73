//! Truncated Laurent series in `q` and the q-expansions of `E4`, `E6`, `j`.

use std::f64::consts::PI;
use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::numerics::{c, Complex};

/// Coefficient ring for [`QSeries`]: exact `i128` or floating `Complex`.
pub trait Coefficient: Copy + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn checked_add(self, o: Self) -> Option<Self>;
    fn checked_mul(self, o: Self) -> Option<Self>;
    fn neg(self) -> Self;
    /// Multiplicative inverse, if it exists in the ring.
    fn inverse(self) -> Option<Self>;
    fn is_zero(self) -> bool {
        self == Self::zero()
    }
}

impl Coefficient for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn checked_add(self, o: Self) -> Option<Self> {
        i128::checked_add(self, o)
    }
    fn checked_mul(self, o: Self) -> Option<Self> {
        i128::checked_mul(self, o)
    }
    fn neg(self) -> Self {
        -self
    }
    fn inverse(self) -> Option<Self> {
        match self {
            1 | -1 => Some(self),
            _ => None,
        }
    }
}

impl Coefficient for Complex {
    fn zero() -> Self {
        c(0.0, 0.0)
    }
    fn one() -> Self {
        c(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        c(v as f64, 0.0)
    }
    fn checked_add(self, o: Self) -> Option<Self> {
        Some(self + o)
    }
    fn checked_mul(self, o: Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(self) -> Self {
        -self
    }
    fn inverse(self) -> Option<Self> {
        if self.norm() == 0.0 {
            None
        } else {
            Some(self.inv())
        }
    }
}

/// `sum_i coeffs[i] q^(valuation + i) + O(q^precision)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries<T = Complex> {
    valuation: i64,
    coeffs: Vec<T>,
    precision: i64,
}

fn overflow() -> Error {
    Error::InvalidArgument("q-series coefficient overflow".into())
}

impl<T: Coefficient> QSeries<T> {
    /// Series known modulo `q^precision`; coefficients at or beyond
    /// `precision` are dropped.
    pub fn new(valuation: i64, coeffs: Vec<T>, precision: i64) -> Self {
        let mut s = QSeries { valuation, coeffs, precision };
        s.normalize();
        s
    }

    /// The exact monomial `a q^e` known to order `precision`.
    pub fn monomial(a: T, e: i64, precision: i64) -> Self {
        Self::new(e, vec![a], precision)
    }

    fn normalize(&mut self) {
        let keep = (self.precision - self.valuation).max(0) as usize;
        self.coeffs.truncate(keep);
        let lead = self.coeffs.iter().position(|z| !z.is_zero()).unwrap_or(self.coeffs.len());
        self.coeffs.drain(..lead);
        self.valuation += lead as i64;
        if self.coeffs.is_empty() {
            self.valuation = self.precision;
        }
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// Coefficient of `q^e` (zero below the valuation).
    pub fn coeff(&self, e: i64) -> Option<T> {
        if e >= self.precision {
            return None;
        }
        if e < self.valuation {
            return Some(T::zero());
        }
        Some(self.coeffs.get((e - self.valuation) as usize).copied().unwrap_or_else(T::zero))
    }

    /// `(exponent, coefficient)` for every known exponent from the valuation.
    pub fn terms(&self) -> Vec<(i64, T)> {
        (self.valuation..self.precision).map(|e| (e, self.coeff(e).unwrap())).collect()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let precision = self.precision.min(o.precision);
        let lo = self.valuation.min(o.valuation);
        let mut coeffs = Vec::new();
        for e in lo..precision {
            let a = self.coeff(e).unwrap_or_else(T::zero);
            let b = o.coeff(e).unwrap_or_else(T::zero);
            coeffs.push(a.checked_add(b).ok_or_else(overflow)?);
        }
        Ok(Self::new(lo, coeffs, precision))
    }

    pub fn neg(&self) -> Self {
        QSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|z| z.neg()).collect(),
            precision: self.precision,
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn scale(&self, a: T) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|z| z.checked_mul(a).ok_or_else(overflow)).collect::<Result<_>>()?;
        Ok(Self::new(self.valuation, coeffs, self.precision))
    }

    /// Product; known modulo `q^min(pa + vb, pb + va)`.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        let precision = (self.precision + o.valuation).min(o.precision + self.valuation);
        let valuation = self.valuation + o.valuation;
        let len = (precision - valuation).max(0) as usize;
        let mut coeffs = vec![T::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                let p = a.checked_mul(*b).ok_or_else(overflow)?;
                coeffs[i + j] = coeffs[i + j].checked_add(p).ok_or_else(overflow)?;
            }
        }
        Ok(Self::new(valuation, coeffs, precision))
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut out = Self::monomial(T::one(), 0, i64::MAX / 4);
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// `1 / self`; fails with `SeriesDivision` if no coefficient is known to
    /// be non-zero or the leading coefficient is not invertible.
    pub fn inverse(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::SeriesDivision);
        }
        let lead_inv = self.coeffs[0].inverse().ok_or(Error::SeriesDivision)?;
        let v = self.valuation;
        let rel = self.precision - v;
        let n = rel as usize;
        let mut out = vec![T::zero(); n];
        out[0] = lead_inv;
        for m in 1..n {
            let mut acc = T::zero();
            for j in 1..=m.min(self.coeffs.len() - 1) {
                let p = self.coeffs[j].checked_mul(out[m - j]).ok_or_else(overflow)?;
                acc = acc.checked_add(p).ok_or_else(overflow)?;
            }
            out[m] = acc.neg().checked_mul(lead_inv).ok_or_else(overflow)?;
        }
        Ok(Self::new(-v, out, rel - v))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.mul(&o.inverse()?)
    }
}

impl QSeries<i128> {
    pub fn to_complex(&self) -> QSeries<Complex> {
        QSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|&v| c(v as f64, 0.0)).collect(),
            precision: self.precision,
        }
    }
}

impl QSeries<Complex> {
    /// Value of the known terms at `q`.
    pub fn eval(&self, q: Complex) -> Complex {
        let mut acc = c(0.0, 0.0);
        for z in self.coeffs.iter().rev() {
            acc = acc * q + z;
        }
        acc * q.powi(self.valuation as i32)
    }
}

fn sigma(power: u32, n: u64) -> i128 {
    (1..=n).filter(|d| n % d == 0).map(|d| (d as i128).pow(power)).sum()
}

/// Normalised Eisenstein series `1 + c_k sum sigma_{k-1}(n) q^n`, exact,
/// modulo `q^precision`, for `k` in {4, 6}.
pub fn normalized_eisenstein_series(k: u32, precision: i64) -> Result<QSeries<i128>> {
    let ck: i128 = match k {
        4 => 240,
        6 => -504,
        _ => return Err(Error::InvalidArgument(format!("exact series only for k = 4, 6, got {k}"))),
    };
    let mut coeffs = vec![1i128];
    for n in 1..precision.max(1) {
        coeffs.push(ck * sigma(k - 1, n as u64));
    }
    Ok(QSeries::new(0, coeffs, precision.max(1)))
}

/// `j = 1728 E4^3 / (E4^3 - E6^2)` as an exact q-series with `n_terms`
/// coefficients, starting at `q^-1`.
pub fn j_q_expansion(n_terms: usize) -> Result<QSeries<i128>> {
    if n_terms == 0 {
        return Err(Error::InvalidArgument("need at least one term".into()));
    }
    let prec = n_terms as i64 + 1;
    let e4 = normalized_eisenstein_series(4, prec)?;
    let e6 = normalized_eisenstein_series(6, prec)?;
    let e4c = e4.pow(3)?;
    // (E4^3 - E6^2) / 1728 = q - 24 q^2 + ... has integer coefficients
    let disc = e4c.sub(&e6.pow(2)?)?;
    let terms: Vec<i128> = disc.terms().iter().map(|&(_, v)| v / 1728).collect();
    if disc.terms().iter().any(|&(_, v)| v % 1728 != 0) {
        return Err(Error::SeriesDivision);
    }
    let delta = QSeries::new(disc.valuation(), terms, disc.precision());
    e4c.div(&delta)
}

/// `zeta(k)` for `k >= 2` by direct summation with an Euler-Maclaurin tail.
pub fn zeta(k: u32) -> f64 {
    match k {
        4 => PI.powi(4) / 90.0,
        6 => PI.powi(6) / 945.0,
        _ => {
            let n = 20u32;
            let kf = k as f64;
            let nf = n as f64;
            let head: f64 = (1..n).rev().map(|m| (m as f64).powf(-kf)).sum();
            head + nf.powf(1.0 - kf) / (kf - 1.0) + 0.5 * nf.powf(-kf) + kf / 12.0 * nf.powf(-kf - 1.0)
                - kf * (kf + 1.0) * (kf + 2.0) / 720.0 * nf.powf(-kf - 3.0)
        }
    }
}

/// Moves `tau` into the standard fundamental domain; returns the new point
/// and `(c, d)` of the accumulated matrix, so that
/// `tau' = (a tau + b) / (c tau + d)`.
pub fn reduce_to_fundamental_domain(tau: Complex) -> Result<(Complex, [i64; 4])> {
    if !(tau.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane { re: tau.re, im: tau.im });
    }
    let mut t = tau;
    let mut m = [1i64, 0, 0, 1];
    for _ in 0..10_000 {
        let shift = t.re.round();
        t -= shift;
        m = [m[0] - shift as i64 * m[2], m[1] - shift as i64 * m[3], m[2], m[3]];
        if t.norm_sqr() < 1.0 - 1e-15 {
            t = -t.inv();
            m = [-m[2], -m[3], m[0], m[1]];
        } else {
            break;
        }
    }
    Ok((t, m))
}

/// Number of q-terms after which `n^k |q|^n` drops below `eps`.
fn terms_needed(q_abs: f64, k: u32) -> usize {
    let mut n = 1usize;
    while n < 10_000 && (n as f64).powi(k as i32) * q_abs.powi(n as i32) > 1e-18 {
        n += 1;
    }
    n
}

/// `E_k(Z tau + Z) = 2 zeta(k) + 2 (2 pi i)^k / (k-1)! sum sigma_{k-1}(n) q^n`
/// for even `k >= 4`, summing `n_terms` terms after moving `tau` to the
/// fundamental domain (`n_terms = 0` picks the count automatically).
pub fn eisenstein_q(k: u32, tau: Complex, n_terms: usize) -> Result<Complex> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!("weight must be even and >= 4, got {k}")));
    }
    let (t, m) = reduce_to_fundamental_domain(tau)?;
    let q = (2.0 * PI * c(0.0, 1.0) * t).exp();
    let n_terms = if n_terms == 0 { terms_needed(q.norm(), k) } else { n_terms };
    let fact: f64 = (1..k).map(|v| v as f64).product();
    let pref = 2.0 * c(0.0, 2.0 * PI).powi(k as i32) / fact;
    let mut s = c(0.0, 0.0);
    let mut qn = c(1.0, 0.0);
    for n in 1..=n_terms as u64 {
        qn *= q;
        s += qn * sigma(k - 1, n) as f64;
    }
    let value = 2.0 * zeta(k) + pref * s;
    // E_k(Z tau' + Z) = (c tau + d)^k E_k(Z tau + Z)
    let factor = (tau * m[2] as f64 + m[3] as f64).powi(k as i32);
    Ok(value / factor)
}

/// Classical `j(tau) = 1728 E4^3 / (E4^3 - E6^2)` evaluated from q-series.
pub fn j_classical(tau: Complex) -> Result<Complex> {
    let e4 = eisenstein_q(4, tau, 0)? / (2.0 * zeta(4));
    let e6 = eisenstein_q(6, tau, 0)? / (2.0 * zeta(6));
    let num = e4.powi(3);
    let den = num - e6 * e6;
    if den.norm() < 1e-14 * (num.norm() + e6.norm_sqr()) {
        return Err(Error::NearCusp { value: den.norm() });
    }
    Ok(1728.0 * num / den)
}
