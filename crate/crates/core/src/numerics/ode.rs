//! Adaptive Dormand-Prince 5(4) integration of linear matrix ODEs
//! `dY = Y * A(t; dt)^T` along a [`ParamPath`].
//!
//! Rows of `Y` are independent solutions of the column system
//! `d y^T = A(t; dt) y^T`, so composing two paths multiplies the solution
//! operators on the right.

use super::linalg::CMatrix;
use super::path::ParamPath;
use super::Complex;
use crate::error::{Error, Result};

/// A linear system whose coefficient matrix is a 1-form on parameter space:
/// `matrix(point, tangent)` is the contraction with the tangent vector.
pub trait LinearSystem {
    fn dim(&self) -> usize;
    fn matrix(&self, point: &[Complex], tangent: &[Complex]) -> CMatrix;
}

/// Closure-backed [`LinearSystem`].
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(&[Complex], &[Complex]) -> CMatrix,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnSystem { dim, f }
    }
}

impl<F> LinearSystem for FnSystem<F>
where
    F: Fn(&[Complex], &[Complex]) -> CMatrix,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn matrix(&self, point: &[Complex], tangent: &[Complex]) -> CMatrix {
        (self.f)(point, tangent)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 500_000;
const STEP_FLOOR: f64 = 1e3 * f64::EPSILON;

struct Segment<'a, S: LinearSystem + ?Sized> {
    system: &'a S,
    start: &'a [Complex],
    tangent: Vec<Complex>,
}

impl<S: LinearSystem + ?Sized> Segment<'_, S> {
    fn rhs(&self, s: f64, y: &CMatrix) -> Result<CMatrix> {
        let point: Vec<Complex> = self.start.iter().zip(&self.tangent).map(|(a, v)| a + v * s).collect();
        let a = self.system.matrix(&point, &self.tangent);
        if a.iter().any(|z| !super::is_finite(*z)) {
            return Err(Error::NonFiniteRhs { at: s });
        }
        Ok(y * a.transpose())
    }

    /// One Dormand-Prince step; returns the fifth-order update, the error
    /// estimate and the derivative at the new point.
    fn step(&self, s: f64, h: f64, y: &CMatrix, k1: &CMatrix) -> Result<(CMatrix, CMatrix, CMatrix)> {
        let mut k: Vec<CMatrix> = Vec::with_capacity(7);
        k.push(k1.clone());
        for stage in 1..7 {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[stage][j];
                if a != 0.0 {
                    yi += kj * Complex::new(h * a, 0.0);
                }
            }
            if stage == 6 {
                // last stage is evaluated at the fifth-order solution (FSAL)
                let k7 = self.rhs(s + h, &yi)?;
                k.push(k7);
                let mut err = CMatrix::zeros(y.nrows(), y.ncols());
                for (j, kj) in k.iter().enumerate() {
                    if E[j] != 0.0 {
                        err += kj * Complex::new(h * E[j], 0.0);
                    }
                }
                let k_end = k.pop().unwrap();
                return Ok((yi, err, k_end));
            }
            k.push(self.rhs(s + C[stage] * h, &yi)?);
        }
        unreachable!()
    }
}

fn check_inputs<S: LinearSystem + ?Sized>(system: &S, path: &ParamPath, y0: &CMatrix) -> Result<()> {
    let mu = system.dim();
    if y0.ncols() != mu {
        return Err(Error::SizeMismatch(format!("initial value has {} columns, system has dimension {mu}", y0.ncols())));
    }
    if y0.iter().any(|z| !super::is_finite(*z)) {
        return Err(Error::InvalidArgument("initial value must be finite".into()));
    }
    if path.dim() == 0 {
        return Err(Error::InvalidPath("empty parameter space".into()));
    }
    Ok(())
}

/// Solves `dY = Y A^T` along `path` from `y0` with local error per step at
/// most `tol` (max-abs norm). Returns the endpoint value.
pub fn integrate_linear_ode<S: LinearSystem + ?Sized>(
    system: &S,
    path: &ParamPath,
    y0: &CMatrix,
    tol: f64,
) -> Result<CMatrix> {
    integrate_linear_ode_with_stats(system, path, y0, tol).map(|(y, _)| y)
}

pub fn integrate_linear_ode_with_stats<S: LinearSystem + ?Sized>(
    system: &S,
    path: &ParamPath,
    y0: &CMatrix,
    tol: f64,
) -> Result<(CMatrix, OdeStats)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    check_inputs(system, path, y0)?;
    let mut stats = OdeStats::default();
    let mut y = y0.clone();
    let mut h = 0.05;
    for seg_index in 0..path.num_segments() {
        let (start, tangent) = path.segment(seg_index);
        if tangent.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let seg = Segment { system, start, tangent };
        let mut s = 0.0;
        let mut k1 = seg.rhs(0.0, &y)?;
        while s < 1.0 {
            if stats.accepted + stats.rejected > MAX_STEPS {
                return Err(Error::StepUnderflow { at: seg_index as f64 + s, floor: STEP_FLOOR });
            }
            let last = s + h >= 1.0;
            let step = if last { 1.0 - s } else { h };
            let (y_new, err, k_end) = seg.step(s, step, &y, &k1)?;
            let err_norm = err.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if !err_norm.is_finite() {
                return Err(Error::NonFiniteRhs { at: seg_index as f64 + s });
            }
            if err_norm <= tol {
                stats.accepted += 1;
                s = if last { 1.0 } else { s + step };
                y = y_new;
                k1 = k_end;
            } else {
                stats.rejected += 1;
            }
            let factor = if err_norm == 0.0 { 5.0 } else { (0.9 * (tol / err_norm).powf(0.2)).clamp(0.2, 5.0) };
            h = step * factor;
            if err_norm > tol && h < STEP_FLOOR {
                return Err(Error::StepUnderflow { at: seg_index as f64 + s, floor: STEP_FLOOR });
            }
        }
    }
    Ok((y, stats))
}

/// Fixed-step variant: `steps_per_segment` equal Dormand-Prince steps on each
/// segment, using the fifth-order solution. Used for convergence studies.
pub fn integrate_linear_ode_fixed<S: LinearSystem + ?Sized>(
    system: &S,
    path: &ParamPath,
    y0: &CMatrix,
    steps_per_segment: usize,
) -> Result<CMatrix> {
    if steps_per_segment == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    check_inputs(system, path, y0)?;
    let mut y = y0.clone();
    let h = 1.0 / steps_per_segment as f64;
    for seg_index in 0..path.num_segments() {
        let (start, tangent) = path.segment(seg_index);
        let seg = Segment { system, start, tangent };
        let mut k1 = seg.rhs(0.0, &y)?;
        for i in 0..steps_per_segment {
            let (y_new, _, k_end) = seg.step(i as f64 * h, h, &y, &k1)?;
            y = y_new;
            k1 = k_end;
        }
    }
    Ok(y)
}
