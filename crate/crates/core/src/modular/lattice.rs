//! Lattices in `C`, Eisenstein lattice sums, Weierstrass invariants and `j`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{c, is_finite, Complex};
use crate::periods::PeriodMatrix2;

/// Sign in `g6 = G6_SIGN * 140 E6`. With `+1` the period lattice of
/// `y^2 = 4x^3 - t2 x - t3` returns `(g4, g6) = (t2, t3)`.
pub const G6_SIGN: f64 = 1.0;

const START_RADIUS: usize = 8;
const MAX_RADIUS: usize = 2048;
/// Successive extrapolants cannot agree better than this many ulps of the
/// largest term.
const ROUNDOFF_ULPS: f64 = 64.0;

/// `Z omega1 + Z omega2` with `Im(omega1 / omega2) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub omega1: Complex,
    pub omega2: Complex,
}

impl Lattice {
    pub fn new(omega1: Complex, omega2: Complex) -> Result<Self> {
        if !is_finite(omega1) || !is_finite(omega2) || omega2.norm() == 0.0 {
            return Err(Error::InvalidArgument("lattice generators must be finite and non-zero".into()));
        }
        let r = omega1 / omega2;
        if !(r.im > 0.0) {
            return Err(Error::NotInUpperHalfPlane { re: r.re, im: r.im });
        }
        Ok(Lattice { omega1, omega2 })
    }

    /// `Z tau + Z`.
    pub fn from_tau(tau: Complex) -> Result<Self> {
        Self::new(tau, c(1.0, 0.0))
    }

    /// Lattice of `int dx/y` over the rows of a period matrix.
    pub fn from_periods(p: &PeriodMatrix2) -> Result<Self> {
        Self::new(p.entries[0][0], p.entries[1][0])
    }

    pub fn tau(&self) -> Complex {
        self.omega1 / self.omega2
    }

    pub fn scaled(&self, mu: Complex) -> Result<Self> {
        Self::new(mu * self.omega1, mu * self.omega2)
    }

    /// Basis with `|Re(u / v)| <= 1/2` and `|u| >= |v|`, spanning the same
    /// lattice (orientation is not kept).
    pub fn reduced_basis(&self) -> (Complex, Complex) {
        let (mut u, mut v) = (self.omega1, self.omega2);
        for _ in 0..10_000 {
            if u.norm() < v.norm() {
                std::mem::swap(&mut u, &mut v);
            }
            let m = (u / v).re.round();
            if m == 0.0 {
                break;
            }
            u -= v * m;
        }
        (u, v)
    }
}

/// Half of shell `r` of the square lattice sum: one of each pair `+-(m, n)`.
fn half_shell(u: Complex, v: Complex, k: i32, r: i64) -> Complex {
    let mut acc = Compensated::default();
    for n in -r..=r {
        acc.add((u * r as f64 + v * n as f64).powi(-k));
    }
    for m in (-r + 1)..r {
        acc.add((u * m as f64 + v * r as f64).powi(-k));
    }
    acc.total()
}

/// Neumaier-compensated complex summation.
#[derive(Default)]
struct Compensated {
    sum: Complex,
    comp: Complex,
}

impl Compensated {
    fn add(&mut self, x: Complex) {
        let re = two_sum(self.sum.re, x.re);
        let im = two_sum(self.sum.im, x.im);
        self.sum = c(re.0, im.0);
        self.comp += c(re.1, im.1);
    }
    fn total(&self) -> Complex {
        self.sum + self.comp
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Integral of `(x u + y v)^{-k}` outside the square `max(|x|, |y|) <= R`,
/// divided by `R^{2-k}`.
fn tail_coefficient(u: Complex, v: Complex, k: i32) -> Complex {
    let e = 1 - k;
    let ix = ((u + v).powi(e) - (u - v).powi(e)) / (v * e as f64);
    let iy = ((u + v).powi(e) - (v - u).powi(e)) / (u * e as f64);
    2.0 * (ix + iy) / (k - 2) as f64
}

/// `E_k(L) = sum over non-zero a in L of a^{-k}`, for even `k >= 4`.
///
/// Square partial sums over `max(|m|, |n|) <= N` in a reduced basis get the
/// continuum tail outside radius `N + 1/2` added; the remaining `R^{-k}`
/// error term is removed by Richardson extrapolation between `N` and `2N`,
/// doubling `N` until successive extrapolants agree to `tol`, or to the
/// round-off floor set by the largest term when `tol` is below it.
pub fn eisenstein_lattice(k: u32, lattice: &Lattice, tol: f64) -> Result<Complex> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!("weight must be even and >= 4, got {k}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let ki = k as i32;
    let (u, v) = lattice.reduced_basis();
    let tail = tail_coefficient(u, v, ki);
    let floor = ROUNDOFF_ULPS * f64::EPSILON * u.norm().min(v.norm()).powi(-ki);
    let target = tol.max(floor);
    let corrected = |s: Complex, n: usize| {
        let r = n as f64 + 0.5;
        s + tail * r.powi(2 - ki)
    };
    let richardson = |t1: Complex, n1: usize, t2: Complex, n2: usize| {
        let w1 = (n1 as f64 + 0.5).powi(ki);
        let w2 = (n2 as f64 + 0.5).powi(ki);
        (t2 * w2 - t1 * w1) / (w2 - w1)
    };

    let mut partial = Compensated::default();
    let mut radius = 0usize;
    let mut advance = |partial: &mut Compensated, to: usize| {
        while radius < to {
            radius += 1;
            partial.add(2.0 * half_shell(u, v, ki, radius as i64));
        }
    };
    let mut n = START_RADIUS / 2;
    advance(&mut partial, n);
    let mut prev_t = corrected(partial.total(), n);
    let mut prev_est: Option<Complex> = None;
    let mut estimate = f64::INFINITY;
    while 2 * n <= MAX_RADIUS {
        advance(&mut partial, 2 * n);
        let t = corrected(partial.total(), 2 * n);
        let est = richardson(prev_t, n, t, 2 * n);
        if !is_finite(est) {
            return Err(Error::LatticeSumTolerance { estimate: f64::INFINITY, tol });
        }
        if let Some(p) = prev_est {
            estimate = (est - p).norm();
            if estimate <= target {
                return Ok(est);
            }
        }
        prev_est = Some(est);
        prev_t = t;
        n *= 2;
    }
    Err(Error::LatticeSumTolerance { estimate, tol })
}

/// `(g4, g6) = (60 E4, G6_SIGN 140 E6)`.
pub fn weierstrass_g(lattice: &Lattice, tol: f64) -> Result<(Complex, Complex)> {
    let e4 = eisenstein_lattice(4, lattice, tol / 60.0)?;
    let e6 = eisenstein_lattice(6, lattice, tol / 140.0)?;
    Ok((60.0 * e4, G6_SIGN * 140.0 * e6))
}

/// `g4^3 / (g4^3 - 27 g6^2)` on `Z tau + Z`; equals `j / 1728` for the
/// classical `j`.
pub fn j_normalized(tau: Complex, tol: f64) -> Result<Complex> {
    let lattice = Lattice::from_tau(tau)?;
    // tighter sums than requested, floored above round-off of the sums
    let inner = (tol.min(1e-10) * 1e-3).max(1e-12);
    let (g4, g6) = weierstrass_g(&lattice, inner)?;
    let num = g4.powi(3);
    let den = num - 27.0 * g6 * g6;
    let scale = num.norm() + 27.0 * g6.norm_sqr();
    if den.norm() < tol * scale {
        return Err(Error::NearCusp { value: den.norm() });
    }
    Ok(num / den)
}

/// Result of [`full_modular_weight_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightReport {
    pub weight: i32,
    pub samples: usize,
    /// Largest `|f(mu L) - mu^{-k} f(L)| / max(1, |mu^{-k} f(L)|)`.
    pub max_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks `f(mu L) = mu^{-k} f(L)` on `samples` random `mu` with
/// `0.5 <= |mu| <= 2` and random lattices, seeded by `seed`.
pub fn full_modular_weight_check<F>(f: F, k: i32, samples: usize, seed: u64, tol: f64) -> Result<WeightReport>
where
    F: Fn(&Lattice) -> Result<Complex>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation: f64 = 0.0;
    for _ in 0..samples {
        let tau = c(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..2.0));
        let omega2 = Complex::from_polar(rng.gen_range(0.7..1.4), rng.gen_range(-3.1..3.1));
        let lattice = Lattice::new(tau * omega2, omega2)?;
        let mu = Complex::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(-3.1..3.1));
        let expected = f(&lattice)? * mu.powi(-k);
        let got = f(&lattice.scaled(mu)?)?;
        max_deviation = max_deviation.max((got - expected).norm() / expected.norm().max(1.0));
    }
    Ok(WeightReport { weight: k, samples, max_deviation, tol, pass: max_deviation <= tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rho() -> Complex {
        Complex::from_polar(1.0, 2.0 * PI / 3.0)
    }

    #[test]
    fn symmetric_lattices_kill_a_weight() {
        let sq = Lattice::from_tau(c(0.0, 1.0)).unwrap();
        assert!(eisenstein_lattice(6, &sq, 1e-12).unwrap().norm() <= 1e-12);
        let hex = Lattice::from_tau(rho()).unwrap();
        assert!(eisenstein_lattice(4, &hex, 1e-12).unwrap().norm() <= 1e-12);
    }

    #[test]
    fn square_lattice_e4_against_brute_force() {
        // brute-force partial sum out to radius 400 plus the continuum tail;
        // agreement is limited by the O(R^-4) remainder of the crude oracle
        let l = Lattice::from_tau(c(0.0, 1.0)).unwrap();
        let mut s = 0.0;
        let n = 400i64;
        for m in -n..=n {
            for k in -n..=n {
                if m != 0 || k != 0 {
                    s += c(m as f64, k as f64).powi(-4).re;
                }
            }
        }
        s += tail_coefficient(c(0.0, 1.0), c(1.0, 0.0), 4).re * (n as f64 + 0.5).powi(-2);
        let e4 = eisenstein_lattice(4, &l, 1e-13).unwrap();
        assert!((e4.re - s).abs() < 1e-9, "{} vs {}", e4.re, s);
    }

    #[test]
    fn basis_change_does_not_matter() {
        let a = Lattice::from_tau(c(0.3, 1.1)).unwrap();
        let b = Lattice::new(c(0.3, 1.1) + c(1.0, 0.0) * 3.0, c(0.3, 1.1) * 2.0 + c(7.0, 0.0)).unwrap();
        let ea = eisenstein_lattice(6, &a, 1e-12).unwrap();
        let eb = eisenstein_lattice(6, &b, 1e-12).unwrap();
        assert!((ea - eb).norm() < 2e-12);
    }

    #[test]
    fn rejects_bad_weights_and_orientation() {
        let l = Lattice::from_tau(c(0.0, 1.0)).unwrap();
        assert!(eisenstein_lattice(3, &l, 1e-10).is_err());
        assert!(eisenstein_lattice(2, &l, 1e-10).is_err());
        assert!(matches!(Lattice::from_tau(c(0.0, -1.0)), Err(Error::NotInUpperHalfPlane { .. })));
    }

    #[test]
    fn j_special_values() {
        assert!((j_normalized(c(0.0, 1.0), 1e-10).unwrap() - c(1.0, 0.0)).norm() < 1e-10);
        assert!(j_normalized(rho(), 1e-10).unwrap().norm() < 1e-10);
        let t = c(0.17, 0.93);
        let d = j_normalized(t, 1e-10).unwrap() - j_normalized(t + 1.0, 1e-10).unwrap();
        assert!(d.norm() < 1e-10);
    }

    #[test]
    fn g_scaling_and_zero_g4() {
        let l = Lattice::from_tau(c(0.2, 1.3)).unwrap();
        let mu = c(0.8, 0.6) * 1.3;
        let (g4, g6) = weierstrass_g(&l, 1e-12).unwrap();
        let (h4, h6) = weierstrass_g(&l.scaled(mu).unwrap(), 1e-12).unwrap();
        assert!((h4 - g4 * mu.powi(-4)).norm() < 1e-9);
        assert!((h6 - g6 * mu.powi(-6)).norm() < 1e-9);
        let (z4, _) = weierstrass_g(&Lattice::from_tau(rho()).unwrap(), 1e-12).unwrap();
        assert!(z4.norm() < 1e-10);
    }

    #[test]
    fn weight_checks_pass() {
        let e4 = |l: &Lattice| eisenstein_lattice(4, l, 1e-13);
        let e6 = |l: &Lattice| eisenstein_lattice(6, l, 1e-13);
        let e4sq = |l: &Lattice| eisenstein_lattice(4, l, 1e-13).map(|z| z * z);
        assert!(full_modular_weight_check(e4, 4, 5, 1, 1e-8).unwrap().pass);
        assert!(full_modular_weight_check(e6, 6, 5, 2, 1e-8).unwrap().pass);
        assert!(full_modular_weight_check(e4sq, 8, 5, 3, 1e-8).unwrap().pass);
        // wrong weight is caught
        assert!(!full_modular_weight_check(e4, 6, 5, 4, 1e-8).unwrap().pass);
    }
}
