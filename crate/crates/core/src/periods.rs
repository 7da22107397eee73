//! Periods of the Weierstrass family `y^2 = 4x^3 - t2 x - t3` and of the
//! family `y^2 = 4 t0 (x - t1)^3 - t2 (x - t1) - t3`.
//!
//! Period matrices store raw integrals: row `i` is the cycle `delta_i`,
//! columns are `dx/y` and `x dx/y`. The cycle basis is fixed at `(4, 0)`
//! (segments `[-1, 0]` and `[0, 1]`) and carried to other parameters by
//! analytic continuation along [`default_path`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gauss_manin;
use crate::numerics::linalg::{poly_roots, CMatrix};
use crate::numerics::{c, is_finite, quad_endpoint_weighted, Complex, ParamPath, I};

/// Relative floor for `|Delta|` against `|t2|^3 + 27 |t3|^2`.
pub const DISC_FLOOR_REL: f64 = 1e-10;

/// Sign with `det(period_matrix(t)) = SIGMA * 2 pi i` in the fixed basis.
pub const SIGMA: f64 = -1.0;

/// Tolerance used for the continuation that fixes the cycle basis. Only the
/// nearest integer matrix is kept from that run.
const CONTINUATION_TOL: f64 = 1e-9;
const CONTINUATION_MAX_DEV: f64 = 1e-3;

const DETOUR_SIDES: usize = 16;
const ROOT_CLUSTER: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassPoint {
    pub t2: Complex,
    pub t3: Complex,
}

impl WeierstrassPoint {
    pub fn new(t2: Complex, t3: Complex) -> Self {
        WeierstrassPoint { t2, t3 }
    }

    pub fn real(t2: f64, t3: f64) -> Self {
        WeierstrassPoint { t2: c(t2, 0.0), t3: c(t3, 0.0) }
    }

    pub fn base() -> Self {
        Self::real(4.0, 0.0)
    }

    pub fn discriminant(&self) -> Complex {
        discriminant(self)
    }

    /// `|t2|^3 + 27 |t3|^2`, the size against which `|Delta|` is compared.
    pub fn scale(&self) -> f64 {
        self.t2.norm().powi(3) + 27.0 * self.t3.norm_sqr()
    }

    pub fn to_vec(&self) -> Vec<Complex> {
        vec![self.t2, self.t3]
    }

    pub fn from_slice(p: &[Complex]) -> Self {
        WeierstrassPoint { t2: p[0], t3: p[1] }
    }

    /// Fails with `NearDiscriminant` unless `|Delta|` clears the relative floor.
    pub fn check_smooth(&self) -> Result<()> {
        if !is_finite(self.t2) || !is_finite(self.t3) {
            return Err(Error::InvalidArgument("parameters must be finite".into()));
        }
        let floor = DISC_FLOOR_REL * self.scale();
        let value = self.discriminant().norm();
        if value <= floor || value == 0.0 {
            return Err(Error::NearDiscriminant { value, floor });
        }
        Ok(())
    }
}

pub fn discriminant(t: &WeierstrassPoint) -> Complex {
    t.t2.powi(3) - 27.0 * t.t3.powi(2)
}

/// Discriminant as a function on parameter space, for path clearance checks.
pub fn discriminant_of(p: &[Complex]) -> Complex {
    p[0].powi(3) - 27.0 * p[1].powi(2)
}

/// `lambda . (t2, t3) = (lambda^4 t2, lambda^6 t3)`.
pub fn scale_action(lambda: Complex, t: &WeierstrassPoint) -> Result<WeierstrassPoint> {
    if lambda.norm() == 0.0 {
        return Err(Error::ZeroLambda);
    }
    Ok(WeierstrassPoint { t2: lambda.powi(4) * t.t2, t3: lambda.powi(6) * t.t3 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodMatrix2 {
    pub entries: [[Complex; 2]; 2],
}

impl PeriodMatrix2 {
    pub fn new(entries: [[Complex; 2]; 2]) -> Self {
        PeriodMatrix2 { entries }
    }

    pub fn from_matrix(m: &CMatrix) -> Self {
        PeriodMatrix2 { entries: [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]] }
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[self.entries[0][0], self.entries[0][1], self.entries[1][0], self.entries[1][1]])
    }

    pub fn det(&self) -> Complex {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    /// `P[1,1] / P[2,1]`.
    pub fn tau(&self) -> Complex {
        self.entries[0][0] / self.entries[1][0]
    }

    pub fn column(&self, j: usize) -> [Complex; 2] {
        [self.entries[0][j], self.entries[1][j]]
    }

    /// Checks `|det - SIGMA 2 pi i| <= tol` and `Im tau > 0`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let dev = (self.det() - c(0.0, SIGMA * 2.0 * PI)).norm();
        if !(dev <= tol) {
            return Err(Error::InvalidArgument(format!("det deviates from sigma 2 pi i by {dev:e}")));
        }
        if !(self.tau().im > 0.0) {
            return Err(Error::InvalidArgument("Im tau is not positive".into()));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &PeriodMatrix2) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        m
    }
}

/// Roots of `4x^3 - t2 x - t3`.
pub fn branch_points(t: &WeierstrassPoint) -> [Complex; 3] {
    let r = poly_roots(&[c(4.0, 0.0), c(0.0, 0.0), -t.t2, -t.t3]);
    [r[0], r[1], r[2]]
}

/// Orders the roots so that `|e1 - e2| + |e2 - e3|` is smallest, which keeps
/// the third root off each integration segment.
fn label_roots(r: [Complex; 3]) -> [Complex; 3] {
    const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let key = |o: &[usize; 3]| {
        let e = [r[o[0]], r[o[1]], r[o[2]]];
        ((e[0] - e[1]).norm() + (e[1] - e[2]).norm(), e[0].re, e[0].im)
    };
    let best = ORDERS
        .iter()
        .min_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap();
    [r[best[0]], r[best[1]], r[best[2]]]
}

/// `(int dx/y, int x dx/y)` along the segment from `ei` to `ej`, with `ek`
/// the remaining root and the branch of `y` written explicitly:
/// `int dx/y = 1/(2i sqrt(ei - ek)) int_0^1 ds / (sqrt(s(1-s)) sqrt(w(s)))`,
/// `w(s) = 1 + s (ej - ei) / (ei - ek)`.
pub fn segment_integrals(ei: Complex, ej: Complex, ek: Complex, tol: f64) -> Result<[Complex; 2]> {
    let pref = (2.0 * I * (ei - ek).sqrt()).inv();
    let ratio = (ej - ei) / (ei - ek);
    let scale = pref.norm().max(f64::MIN_POSITIVE);
    let inner_tol = tol / (4.0 * scale * (1.0 + ei.norm().max(ej.norm())));
    let w = |s: f64| (c(1.0, 0.0) + ratio * s).sqrt();
    let a = quad_endpoint_weighted(|s| w(s).inv(), inner_tol)?;
    let b = quad_endpoint_weighted(|s| (ei + (ej - ei) * s) / w(s), inner_tol)?;
    Ok([pref * a, pref * b])
}

/// Period matrix in the basis of the cycles around `[e1, e2]` and `[e2, e3]`
/// for the labelled roots; a basis of the lattice, but not the continued one.
fn quadrature_basis(roots: [Complex; 3], tol: f64) -> Result<CMatrix> {
    let [e1, e2, e3] = roots;
    let r1 = segment_integrals(e1, e2, e3, tol / 4.0)?;
    let r2 = segment_integrals(e2, e3, e1, tol / 4.0)?;
    Ok(CMatrix::from_row_slice(2, 2, &[2.0 * r1[0], 2.0 * r1[1], 2.0 * r2[0], 2.0 * r2[1]]))
}

/// Period matrix at `(4, 0)` in the reference basis: rows over `[-1, 0]`
/// and `[0, 1]`, `P[1,1] > 0` and `Im tau > 0`.
pub fn base_period_matrix(tol: f64) -> Result<PeriodMatrix2> {
    let q = quadrature_basis([c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], tol)?;
    let mut p = PeriodMatrix2::from_matrix(&q);
    if p.entries[0][0].re < 0.0 {
        p.entries[0] = [-p.entries[0][0], -p.entries[0][1]];
    }
    if p.tau().im < 0.0 {
        p.entries[1] = [-p.entries[1][0], -p.entries[1][1]];
    }
    Ok(p)
}

/// Straight path `a -> b` in parameter space, deformed by a semicircle in
/// the path parameter around every zero of `Delta` that lies near the
/// segment. A semicircle passes on the side opposite the zero; zeros on the
/// segment itself are passed on the side `Im s > 0`.
pub fn default_path(a: &WeierstrassPoint, b: &WeierstrassPoint) -> Result<ParamPath> {
    let (a2, a3) = (a.t2, a.t3);
    let (d2, d3) = (b.t2 - a.t2, b.t3 - a.t3);
    // Delta(a + s (b - a)) as a cubic in s
    let coeffs = [
        d2.powi(3),
        3.0 * a2 * d2 * d2 - 27.0 * d3 * d3,
        3.0 * a2 * a2 * d2 - 54.0 * a3 * d3,
        a2.powi(3) - 27.0 * a3 * a3,
    ];
    let roots: Vec<Complex> = if coeffs[..3].iter().all(|z| z.norm() == 0.0) {
        Vec::new()
    } else {
        let mut rs = poly_roots(&coeffs);
        // a multiple zero comes back as a cluster of size ~ eps^{1/3}; merge
        // clusters into their centroid
        rs.sort_by(|x, y| x.re.total_cmp(&y.re));
        let mut groups: Vec<Vec<Complex>> = Vec::new();
        for r in rs {
            match groups.iter_mut().find(|g| g.iter().any(|z| (r - z).norm() < ROOT_CLUSTER)) {
                Some(g) => g.push(r),
                None => groups.push(vec![r]),
            }
        }
        groups.iter().map(|g| g.iter().sum::<Complex>() / g.len() as f64).collect()
    };
    let mut detours: Vec<(f64, f64, f64)> = Vec::new();
    for (k, s) in roots.iter().enumerate() {
        if !(s.re > 0.0 && s.re < 1.0) {
            continue;
        }
        let mut r = 0.1f64.min(0.45 * s.re).min(0.45 * (1.0 - s.re));
        for (j, o) in roots.iter().enumerate() {
            if j != k {
                r = r.min(0.45 * (s - o).norm());
            }
        }
        if s.im.abs() < 0.9 * r {
            let side = if s.im > 1e-9 { -1.0 } else { 1.0 };
            detours.push((s.re, r, side));
        }
    }
    let point = |s: Complex| vec![a.t2 + d2 * s, a.t3 + d3 * s];
    let mut waypoints = vec![point(c(0.0, 0.0))];
    for &(center, r, side) in &detours {
        for k in 0..=DETOUR_SIDES {
            let theta = PI * (1.0 - k as f64 / DETOUR_SIDES as f64);
            let s = c(center + r * theta.cos(), side * r * theta.sin());
            waypoints.push(point(s));
        }
    }
    waypoints.push(point(c(1.0, 0.0)));
    let endpoint_floor = discriminant(a).norm().min(discriminant(b).norm());
    let scale = a.scale().max(b.scale());
    let clearance = (1e-6 * scale).min(0.5 * endpoint_floor).max(f64::MIN_POSITIVE);
    ParamPath::new(waypoints, clearance, discriminant_of)
}

fn round_unimodular(m: &CMatrix) -> Result<[[i64; 2]; 2]> {
    let mut out = [[0i64; 2]; 2];
    let mut dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let z = m[(i, j)];
            let r = z.re.round();
            dev = dev.max((z - c(r, 0.0)).norm());
            out[i][j] = r as i64;
        }
    }
    // the quadrature basis carries no orientation, so det = -1 is allowed
    if !(dev <= CONTINUATION_MAX_DEV) || (out[0][0] * out[1][1] - out[0][1] * out[1][0]).abs() != 1 {
        return Err(Error::ContinuationMismatch { deviation: dev });
    }
    Ok(out)
}

/// Period matrix of `y^2 = 4x^3 - t2 x - t3` in the continued basis.
pub fn period_matrix(t: &WeierstrassPoint, tol: f64) -> Result<PeriodMatrix2> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    t.check_smooth()?;
    let base = WeierstrassPoint::base();
    if *t == base {
        return base_period_matrix(tol);
    }
    let q = quadrature_basis(label_roots(branch_points(t)), tol)?;
    let path = default_path(&base, t)?;
    let continued = gauss_manin::transport(&path, &base_period_matrix(CONTINUATION_TOL)?, CONTINUATION_TOL)?;
    let q_inv = q.clone().try_inverse().ok_or(Error::ContinuationMismatch { deviation: f64::INFINITY })?;
    let change = round_unimodular(&(continued.to_matrix() * q_inv))?;
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            c(change[0][0] as f64, 0.0),
            c(change[0][1] as f64, 0.0),
            c(change[1][0] as f64, 0.0),
            c(change[1][1] as f64, 0.0),
        ],
    );
    Ok(PeriodMatrix2::from_matrix(&(m * q)))
}

/// `tau = P[1,1] / P[2,1]` in the upper half-plane.
pub fn period_map_tau(t: &WeierstrassPoint, tol: f64) -> Result<Complex> {
    let p = period_matrix(t, tol)?;
    let tau = p.tau();
    if !(tau.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane { re: tau.re, im: tau.im });
    }
    Ok(tau)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KhodayaPoint {
    pub t0: Complex,
    pub t1: Complex,
    pub t2: Complex,
    pub t3: Complex,
}

impl KhodayaPoint {
    pub fn new(t0: Complex, t1: Complex, t2: Complex, t3: Complex) -> Self {
        KhodayaPoint { t0, t1, t2, t3 }
    }
}

/// Reduced Weierstrass point `(t2 s, t3)` and scale `s = t0^{-1/3}`
/// (principal branch), from `x - t1 = s v`.
pub fn reduce_khodaya(k: &KhodayaPoint) -> Result<(WeierstrassPoint, Complex)> {
    if k.t0.norm() == 0.0 {
        return Err(Error::ZeroT0);
    }
    let s = if k.t0 == c(1.0, 0.0) { c(1.0, 0.0) } else { (-k.t0.ln() / 3.0).exp() };
    Ok((WeierstrassPoint { t2: k.t2 * s, t3: k.t3 }, s))
}

/// Periods of `(dx/y, x dx/y)` on `y^2 = 4 t0 (x - t1)^3 - t2 (x - t1) - t3`
/// in the basis continued on the reduced curve. The determinant is
/// `SIGMA 2 pi i / t0`.
pub fn khodaya_period_matrix(k: &KhodayaPoint, tol: f64) -> Result<PeriodMatrix2> {
    let (red, s) = reduce_khodaya(k)?;
    let inner = tol / (1.0 + s.norm()).powi(2) / (1.0 + k.t1.norm());
    let p = period_matrix(&red, inner)?;
    let mut e = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        e[i][0] = s * p.entries[i][0];
        e[i][1] = s * (s * p.entries[i][1] + k.t1 * p.entries[i][0]);
    }
    Ok(PeriodMatrix2::new(e))
}
