//! Piecewise-linear paths in a complex parameter space.

use super::Complex;
use crate::error::{Error, Result};

const SAMPLES_PER_SEGMENT: usize = 128;

/// A piecewise-linear path through `waypoints` in `C^s` that keeps at least
/// `clearance` away from the zero set of a discriminant, measured in
/// `|discriminant|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPath {
    waypoints: Vec<Vec<Complex>>,
    clearance: f64,
}

impl ParamPath {
    /// Builds a path and checks `|disc| >= clearance` along every segment.
    pub fn new<D>(waypoints: Vec<Vec<Complex>>, clearance: f64, disc: D) -> Result<Self>
    where
        D: Fn(&[Complex]) -> Complex,
    {
        if waypoints.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least two waypoints".into()));
        }
        let dim = waypoints[0].len();
        if dim == 0 || waypoints.iter().any(|w| w.len() != dim) {
            return Err(Error::InvalidPath("waypoints must share a non-zero dimension".into()));
        }
        if waypoints.iter().flatten().any(|z| !super::is_finite(*z)) {
            return Err(Error::InvalidPath("waypoints must be finite".into()));
        }
        if !(clearance > 0.0) {
            return Err(Error::InvalidPath("clearance must be positive".into()));
        }
        let path = ParamPath { waypoints, clearance };
        let value = path.min_abs_along(&disc);
        if value < clearance {
            return Err(Error::ClearanceViolated { value, clearance });
        }
        Ok(path)
    }

    /// Regular polygon with `sides_per_turn` vertices per turn, traversing the
    /// circle of `radius` about `center` in coordinate `axis`, starting and
    /// ending at `center + radius` (counter-clockwise for positive `turns`).
    pub fn circle<D>(
        center: &[Complex],
        axis: usize,
        radius: f64,
        turns: i32,
        sides_per_turn: usize,
        clearance: f64,
        disc: D,
    ) -> Result<Self>
    where
        D: Fn(&[Complex]) -> Complex,
    {
        if axis >= center.len() {
            return Err(Error::InvalidPath(format!("axis {axis} out of range")));
        }
        if turns == 0 || !(radius > 0.0) || sides_per_turn < 3 {
            return Err(Error::InvalidPath("circle needs non-zero turns, positive radius and >= 3 sides".into()));
        }
        let n = sides_per_turn * turns.unsigned_abs() as usize;
        let dir = turns.signum() as f64;
        let waypoints = (0..=n)
            .map(|k| {
                let theta = dir * std::f64::consts::TAU * (k % sides_per_turn) as f64 / sides_per_turn as f64;
                let mut p = center.to_vec();
                p[axis] += Complex::from_polar(radius, theta);
                p
            })
            .collect();
        Self::new(waypoints, clearance, disc)
    }

    pub fn waypoints(&self) -> &[Vec<Complex>] {
        &self.waypoints
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    pub fn dim(&self) -> usize {
        self.waypoints[0].len()
    }

    pub fn num_segments(&self) -> usize {
        self.waypoints.len() - 1
    }

    pub fn start(&self) -> &[Complex] {
        &self.waypoints[0]
    }

    pub fn end(&self) -> &[Complex] {
        self.waypoints.last().unwrap()
    }

    /// Start point and displacement of segment `k`.
    pub fn segment(&self, k: usize) -> (&[Complex], Vec<Complex>) {
        let a = &self.waypoints[k];
        let b = &self.waypoints[k + 1];
        (a, b.iter().zip(a).map(|(y, x)| y - x).collect())
    }

    /// Point at local parameter `s` in `[0, 1]` on segment `k`.
    pub fn point_on(&self, k: usize, s: f64) -> Vec<Complex> {
        let (a, d) = self.segment(k);
        a.iter().zip(&d).map(|(x, v)| x + v * s).collect()
    }

    /// Sum of the Euclidean lengths of the segments in `C^s`.
    pub fn length(&self) -> f64 {
        (0..self.num_segments())
            .map(|k| self.segment(k).1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .sum()
    }

    pub fn is_closed(&self, tol: f64) -> bool {
        self.start().iter().zip(self.end()).all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn reversed(&self) -> Self {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        ParamPath { waypoints, clearance: self.clearance }
    }

    /// `self` followed by `other`; the end of `self` must be the start of `other`.
    pub fn concat(&self, other: &ParamPath) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::InvalidPath("dimension mismatch".into()));
        }
        let gap = self
            .end()
            .iter()
            .zip(other.start())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if gap > 1e-12 * (1.0 + self.end().iter().map(|z| z.norm()).fold(0.0, f64::max)) {
            return Err(Error::InvalidPath("paths do not join".into()));
        }
        let mut waypoints = self.waypoints.clone();
        waypoints.extend(other.waypoints.iter().skip(1).cloned());
        Ok(ParamPath { waypoints, clearance: self.clearance.min(other.clearance) })
    }

    /// Repeats a closed path `times` times.
    pub fn repeated(&self, times: usize) -> Result<Self> {
        if times == 0 {
            return Err(Error::InvalidPath("repeat count must be positive".into()));
        }
        let mut out = self.clone();
        for _ in 1..times {
            out = out.concat(self)?;
        }
        Ok(out)
    }

    /// Minimum of `|disc|` along the path: dense sampling of every segment
    /// followed by a golden-section refinement around the smallest sample.
    pub fn min_abs_along<D>(&self, disc: &D) -> f64
    where
        D: Fn(&[Complex]) -> Complex,
    {
        let mut best = f64::INFINITY;
        for k in 0..self.num_segments() {
            let f = |s: f64| disc(&self.point_on(k, s)).norm();
            let n = SAMPLES_PER_SEGMENT;
            let (mut jmin, mut vmin) = (0, f64::INFINITY);
            for j in 0..=n {
                let v = f(j as f64 / n as f64);
                if v < vmin {
                    vmin = v;
                    jmin = j;
                }
            }
            let lo = jmin.saturating_sub(1) as f64 / n as f64;
            let hi = (jmin + 1).min(n) as f64 / n as f64;
            best = best.min(vmin).min(golden_min(&f, lo, hi));
        }
        best
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(_: &[Complex]) -> Complex {
        Complex::new(1.0, 0.0)
    }

    #[test]
    fn rejects_short_paths() {
        let r = ParamPath::new(vec![vec![Complex::new(0.0, 0.0)]], 1.0, one);
        assert!(matches!(r, Err(Error::InvalidPath(_))));
    }

    #[test]
    fn detects_clearance_violation() {
        // |z| along the segment from -1 to 1 vanishes at 0
        let r = ParamPath::new(
            vec![vec![Complex::new(-1.0, 0.0)], vec![Complex::new(1.0, 0.0)]],
            1e-3,
            |p: &[Complex]| p[0],
        );
        assert!(matches!(r, Err(Error::ClearanceViolated { .. })));
        let ok = ParamPath::new(
            vec![vec![Complex::new(-1.0, 0.01)], vec![Complex::new(1.0, 0.01)]],
            1e-3,
            |p: &[Complex]| p[0],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn circle_is_closed() {
        let p = ParamPath::circle(&[Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)], 1, 0.5, 2, 64, 1e-6, one)
            .unwrap();
        assert!(p.is_closed(1e-12));
        assert_eq!(p.num_segments(), 128);
        assert!((p.length() - 2.0 * 64.0 * 2.0 * 0.5 * (std::f64::consts::PI / 64.0).sin()).abs() < 1e-12);
    }
}
