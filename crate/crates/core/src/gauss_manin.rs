//! The Picard-Fuchs connection of the Weierstrass family, transport of
//! period matrices and monodromy.
//!
//! With `d = dDelta(v) = 3 t2^2 v2 - 54 t3 v3` and
//! `e = delta(v) = 3 t3 v2 - 2 t2 v3`, the connection matrix is
//! `A(t; v) = [[-d/12, -3e/2], [t2 e/8, d/12]] / Delta` and each row
//! `(eta1, eta2)` of a period matrix solves `d(eta)^T = A eta^T`.
//!
//! The sign of the lower-left entry is the one forced by differentiating
//! the periods; see `tests::lower_left_sign_from_periods`.

use std::ops::Mul;

use crate::error::{Error, Result};
use crate::numerics::linalg::CMatrix;
use crate::numerics::{c, integrate_linear_ode, Complex, LinearSystem, ParamPath};
use crate::periods::{discriminant_of, PeriodMatrix2, WeierstrassPoint};

/// Deviation from the nearest integer matrix tolerated by [`monodromy`].
pub const INTEGRALITY_THRESHOLD: f64 = 1e-4;

/// Number of polygon sides per turn used for circular loops.
pub const LOOP_SIDES: usize = 64;

fn raw_connection(t2: Complex, t3: Complex, v: &[Complex]) -> CMatrix {
    let delta = t2.powi(3) - 27.0 * t3 * t3;
    let d = 3.0 * t2 * t2 * v[0] - 54.0 * t3 * v[1];
    let e = 3.0 * t3 * v[0] - 2.0 * t2 * v[1];
    CMatrix::from_row_slice(2, 2, &[-d / 12.0, -1.5 * e, t2 * e / 8.0, d / 12.0]) / delta
}

/// `A(t; v)`, linear in `v`.
pub fn connection_matrix(t: &WeierstrassPoint, v: [Complex; 2]) -> Result<CMatrix> {
    t.check_smooth()?;
    Ok(raw_connection(t.t2, t.t3, &v))
}

/// The connection as a [`LinearSystem`] on `(t2, t3)`-space.
#[derive(Debug, Clone, Copy, Default)]
pub struct GaussManinConnection;

impl LinearSystem for GaussManinConnection {
    fn dim(&self) -> usize {
        2
    }
    fn matrix(&self, point: &[Complex], tangent: &[Complex]) -> CMatrix {
        raw_connection(point[0], point[1], tangent)
    }
}

/// Solves `dP = P A^T` along `path` starting from `p0`.
pub fn transport(path: &ParamPath, p0: &PeriodMatrix2, tol: f64) -> Result<PeriodMatrix2> {
    if path.dim() != 2 {
        return Err(Error::InvalidPath("Weierstrass parameter space is two-dimensional".into()));
    }
    let y = integrate_linear_ode(&GaussManinConnection, path, &p0.to_matrix(), tol)?;
    Ok(PeriodMatrix2::from_matrix(&y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonodromyMatrix {
    pub entries: [[i64; 2]; 2],
}

impl MonodromyMatrix {
    pub fn identity() -> Self {
        MonodromyMatrix { entries: [[1, 0], [0, 1]] }
    }

    pub fn det(&self) -> i64 {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Inverse in `SL(2, Z)`.
    pub fn inverse(&self) -> Self {
        let e = &self.entries;
        MonodromyMatrix { entries: [[e[1][1], -e[0][1]], [-e[1][0], e[0][0]]] }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| acc * *self)
    }

    pub fn is_unipotent(&self) -> bool {
        let n = MonodromyMatrix {
            entries: [[self.entries[0][0] - 1, self.entries[0][1]], [self.entries[1][0], self.entries[1][1] - 1]],
        };
        (n * n).entries == [[0, 0], [0, 0]]
    }

    pub fn to_complex(&self) -> CMatrix {
        CMatrix::from_fn(2, 2, |i, j| c(self.entries[i][j] as f64, 0.0))
    }
}

impl Mul for MonodromyMatrix {
    type Output = MonodromyMatrix;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.entries, rhs.entries);
        let mut out = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        MonodromyMatrix { entries: out }
    }
}

/// `M` with `P_end = M P0` for the transport of `p0` around `loop_path`.
pub fn monodromy(loop_path: &ParamPath, p0: &PeriodMatrix2, tol: f64) -> Result<MonodromyMatrix> {
    monodromy_with_deviation(loop_path, p0, tol).map(|(m, _)| m)
}

/// [`monodromy`] together with the largest distance of `P_end P0^{-1}` from
/// the rounded integer matrix.
pub fn monodromy_with_deviation(loop_path: &ParamPath, p0: &PeriodMatrix2, tol: f64) -> Result<(MonodromyMatrix, f64)> {
    let scale = 1.0 + loop_path.start().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !loop_path.is_closed(1e-12 * scale) {
        return Err(Error::InvalidPath("monodromy needs a closed loop".into()));
    }
    let end = transport(loop_path, p0, tol)?;
    let p0_inv = p0
        .to_matrix()
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("base period matrix is singular".into()))?;
    let m = end.to_matrix() * p0_inv;
    let mut entries = [[0i64; 2]; 2];
    let mut deviation: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let z = m[(i, j)];
            let r = z.re.round();
            deviation = deviation.max((z - c(r, 0.0)).norm());
            entries[i][j] = r as i64;
        }
    }
    let out = MonodromyMatrix { entries };
    if !(deviation <= INTEGRALITY_THRESHOLD) || out.det() != 1 {
        return Err(Error::NonIntegralMonodromy { deviation });
    }
    Ok((out, deviation))
}

/// Loop in the `t3`-plane at fixed `t2`: a [`LOOP_SIDES`]-gon per turn around
/// `center`, starting at `center + radius` and counter-clockwise for
/// positive `turns`.
pub fn circle_loop(center: &WeierstrassPoint, radius: f64, turns: i32) -> Result<ParamPath> {
    let scale = (center.t2.norm() + radius).powi(3) + 27.0 * (center.t3.norm() + radius).powi(2);
    ParamPath::circle(&center.to_vec(), 1, radius, turns, LOOP_SIDES, 1e-9 * scale, discriminant_of)
}
