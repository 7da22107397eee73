//! The integral group `{A : A Psi A^T = Psi}`, automorphy factors, the slash
//! operator and truncated Poincare series over coset representatives.
//!
//! Automorphy factors follow the left-action cocycle law
//! `j(x, AB) = j(B x, A) j(x, B)`, the one satisfied by `cz + d` under
//! Mobius maps; with `s|A (x) = j(x, A)^{-n} s(A x)` it gives
//! `s|(AB) = (s|A)|B`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hodge::preserves_form;
use crate::numerics::linalg::{integer_det, CMatrix};
use crate::numerics::{c, is_finite, Complex};
use crate::periods::PeriodMatrix2;

/// Relative tolerance of the cocycle and slash identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Relative deviation above which a declared stabilizer is rejected.
pub const STABILIZER_TOL: f64 = 1e-9;

/// `A Psi A^T = Psi`, exactly.
pub fn is_in_gamma(a: &DMatrix<i64>, psi: &DMatrix<i64>) -> Result<bool> {
    preserves_form(a, psi)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    entries: DMatrix<i64>,
}

impl GroupElement {
    pub fn new(entries: DMatrix<i64>, psi: &DMatrix<i64>) -> Result<Self> {
        if !is_in_gamma(&entries, psi)? {
            return Err(Error::NotInGroup);
        }
        Ok(GroupElement { entries })
    }

    /// `[[a, b], [c, d]]` with `ad - bc = 1`.
    pub fn sl2(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::NotInGroup);
        }
        Ok(GroupElement { entries: DMatrix::from_row_slice(2, 2, &[a, b, c, d]) })
    }

    pub fn identity(n: usize) -> Self {
        GroupElement { entries: DMatrix::identity(n, n) }
    }

    pub fn entries(&self) -> &DMatrix<i64> {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement { entries: &self.entries * &other.entries }
    }

    /// Adjugate over the determinant, which is `±1` for group elements.
    pub fn inverse(&self) -> GroupElement {
        let n = self.size();
        let det = integer_det(&self.entries);
        assert!(det == 1 || det == -1, "group elements are unimodular");
        if n == 1 {
            return GroupElement { entries: DMatrix::from_element(1, 1, det as i64) };
        }
        let inv = DMatrix::from_fn(n, n, |i, j| {
            let minor = self.entries.clone().remove_row(j).remove_column(i);
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            (sign * integer_det(&minor) * det) as i64
        });
        GroupElement { entries: inv }
    }

    fn abcd(&self) -> (f64, f64, f64, f64) {
        assert_eq!(self.size(), 2, "Mobius action needs a 2x2 matrix");
        let e = &self.entries;
        (e[(0, 0)] as f64, e[(0, 1)] as f64, e[(1, 0)] as f64, e[(1, 1)] as f64)
    }

    /// `(a z + b) / (c z + d)`.
    pub fn mobius(&self, z: Complex) -> Complex {
        let (a, b, cc, d) = self.abcd();
        (z * a + b) / (z * cc + d)
    }

    /// `c z + d`.
    pub fn cz_plus_d(&self, z: Complex) -> Complex {
        let (_, _, cc, d) = self.abcd();
        z * cc + d
    }

    /// `A X`.
    pub fn act_on(&self, x: &CMatrix) -> CMatrix {
        self.entries.map(|v| c(v as f64, 0.0)) * x
    }
}

/// The automorphy factor `cz + d` on the upper half-plane.
pub fn factor_cz_plus_d(z: Complex, a: &GroupElement) -> Complex {
    a.cz_plus_d(z)
}

/// `SL(2, Z)` elements with all entries bounded by `height`, in a fixed order.
pub fn sl2_elements(height: i64) -> Vec<GroupElement> {
    let r = -height..=height;
    let mut out = Vec::new();
    for a in r.clone() {
        for b in r.clone() {
            for cc in r.clone() {
                for d in r.clone() {
                    if a * d - b * cc == 1 {
                        out.push(GroupElement { entries: DMatrix::from_row_slice(2, 2, &[a, b, cc, d]) });
                    }
                }
            }
        }
    }
    out
}

/// Declared stabilizer `Gamma_P` in `SL(2, Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stabilizer {
    /// `c = 0`: cosets are labelled by the bottom row `(c, d)` up to sign.
    UpperTriangular,
    /// `b = 0`: cosets are labelled by the top row `(a, b)` up to sign.
    LowerTriangular,
    /// The whole group: a single coset.
    Whole,
}

impl Stabilizer {
    pub fn contains(&self, a: &GroupElement) -> bool {
        match self {
            Stabilizer::UpperTriangular => a.size() == 2 && a.entries[(1, 0)] == 0,
            Stabilizer::LowerTriangular => a.size() == 2 && a.entries[(0, 1)] == 0,
            Stabilizer::Whole => true,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Stabilizer::UpperTriangular => "upper-triangular",
            Stabilizer::LowerTriangular => "lower-triangular",
            Stabilizer::Whole => "whole",
        }
    }

    /// Elements of the stabilizer used to validate a functional.
    pub fn samples(&self) -> Vec<GroupElement> {
        match self {
            Stabilizer::Whole => sl2_elements(2),
            _ => sl2_elements(3).into_iter().filter(|a| self.contains(a)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosetFamily {
    pub representatives: Vec<GroupElement>,
    /// Height `max(|x|, |y|)` of the labelling pair of each representative.
    pub heights: Vec<u32>,
    pub stabilizer: Stabilizer,
    pub height_bound: u32,
}

impl CosetFamily {
    /// No two representatives lie in the same coset: `R1 R2^{-1}` is never
    /// in the stabilizer.
    pub fn is_sound(&self) -> bool {
        let reps = &self.representatives;
        for (i, r1) in reps.iter().enumerate() {
            for r2 in &reps[i + 1..] {
                if self.stabilizer.contains(&r1.mul(&r2.inverse())) {
                    return false;
                }
            }
        }
        true
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Coprime pairs of height exactly `h`, one per sign class (first non-zero
/// entry positive), in lexicographic order.
fn primitive_shell(h: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for x in 0..=h {
        for y in -h..=h {
            if x.abs().max(y.abs()) != h || (x == 0 && y <= 0) {
                continue;
            }
            if extended_gcd(x, y).0 == 1 {
                out.push((x, y));
            }
        }
    }
    out
}

fn complete(stab: Stabilizer, (x, y): (i64, i64)) -> GroupElement {
    let (_, s, t) = extended_gcd(x, y);
    // s x + t y = 1
    let m = match stab {
        Stabilizer::UpperTriangular => [t, -s, x, y],
        _ => [x, y, -t, s],
    };
    GroupElement { entries: DMatrix::from_row_slice(2, 2, &m) }
}

/// Representatives of `Gamma_P \ SL(2, Z)` whose labelling pair has height
/// at most `height`, listed by increasing height.
pub fn enumerate_cosets_sl2(stabilizer: Stabilizer, height: u32) -> Result<CosetFamily> {
    if height < 1 {
        return Err(Error::InvalidArgument("height must be at least 1".into()));
    }
    let mut representatives = Vec::new();
    let mut heights = Vec::new();
    if stabilizer == Stabilizer::Whole {
        representatives.push(GroupElement::identity(2));
        heights.push(1);
    } else {
        for h in 1..=height {
            for pair in primitive_shell(h as i64) {
                representatives.push(complete(stabilizer, pair));
                heights.push(h);
            }
        }
    }
    Ok(CosetFamily { representatives, heights, stabilizer, height_bound: height })
}

fn rel_dev(a: Complex, b: Complex) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// Largest relative deviation of `j(x, AB) = j(Bx, A) j(x, B)` on the samples.
pub fn cocycle_deviation<J>(j: J, samples: &[(Complex, GroupElement, GroupElement)]) -> f64
where
    J: Fn(Complex, &GroupElement) -> Complex,
{
    samples
        .iter()
        .map(|(x, a, b)| rel_dev(j(*x, &a.mul(b)), j(b.mobius(*x), a) * j(*x, b)))
        .fold(0.0, f64::max)
}

pub fn cocycle_check<J>(j: J, samples: &[(Complex, GroupElement, GroupElement)]) -> bool
where
    J: Fn(Complex, &GroupElement) -> Complex,
{
    cocycle_deviation(j, samples) <= IDENTITY_TOL
}

/// Seeded samples `(x, A, B)`: `x` in `[-1, 1] x [0.5, 2]`, `A`, `B` of
/// height at most `height`.
pub fn random_samples(n: usize, height: i64, seed: u64) -> Vec<(Complex, GroupElement, GroupElement)> {
    let pool = sl2_elements(height);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x = c(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0));
            let a = pool[rng.gen_range(0..pool.len())].clone();
            let b = pool[rng.gen_range(0..pool.len())].clone();
            (x, a, b)
        })
        .collect()
}

/// `(f|_n A)(x) = j(x, A)^{-n} f(A x)`.
pub fn slash<F, J>(f: F, n: i32, a: GroupElement, j: J) -> impl Fn(Complex) -> Complex
where
    F: Fn(Complex) -> Complex,
    J: Fn(Complex, &GroupElement) -> Complex,
{
    move |x| j(x, &a).powi(-n) * f(a.mobius(x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialSumsReport {
    pub heights: Vec<u32>,
    pub partial_sums: Vec<Complex>,
    /// Sum of `|term|` over the heights in `(heights[k-1], heights[k]]`.
    pub shell_mass: Vec<f64>,
    /// Decay exponent of the tail used for extrapolation, when known.
    pub decay: Option<f64>,
    /// `|extrapolated - last|`; infinite when no decay is available.
    pub tail_estimate: f64,
    pub extrapolated: Complex,
    /// Absolute bound on `|last - previous|` required for convergence.
    pub tolerance: f64,
    pub converged: bool,
    pub terms: usize,
}

impl PartialSumsReport {
    pub fn value(&self) -> Complex {
        *self.partial_sums.last().expect("at least one height")
    }

    fn build(heights: Vec<u32>, sums: Vec<Complex>, mass: Vec<f64>, decay: Option<f64>, exact: bool, rel_tol: f64, terms: usize) -> Self {
        let last = *sums.last().expect("at least one height");
        let tolerance = rel_tol * last.norm().max(1.0);
        if exact {
            return PartialSumsReport {
                heights,
                partial_sums: sums,
                shell_mass: mass,
                decay,
                tail_estimate: 0.0,
                extrapolated: last,
                tolerance,
                converged: true,
                terms,
            };
        }
        let k = sums.len();
        let mut extrapolated = last;
        let mut tail_estimate = f64::INFINITY;
        let mut converged = false;
        if k >= 2 {
            let diff = last - sums[k - 2];
            let (h0, h1) = (heights[k - 2] as f64, heights[k - 1] as f64);
            if let Some(beta) = decay.filter(|b| *b > 0.0) {
                // remainder ~ C h^{-beta}
                let ratio = h1.powf(-beta) / (h0.powf(-beta) - h1.powf(-beta));
                extrapolated = last + diff * ratio;
                tail_estimate = (diff * ratio).norm();
                converged = diff.norm() <= tolerance && is_finite(extrapolated);
            }
        }
        PartialSumsReport {
            heights,
            partial_sums: sums,
            shell_mass: mass,
            decay,
            tail_estimate,
            extrapolated,
            tolerance,
            converged,
            terms,
        }
    }
}

/// Heights `ceil(h / 2^k)`, increasing and ending at `h`.
fn checkpoints(h: u32) -> Vec<u32> {
    let mut v = vec![h];
    let mut cur = h;
    while cur > 1 {
        cur = cur.div_ceil(2);
        v.push(cur);
    }
    v.dedup();
    v.reverse();
    v
}

/// Sums `term(R)` over the family shell by shell (Neumaier-compensated),
/// recording partial sums at the checkpoints.
fn shell_sums<T>(family: &CosetFamily, term: T) -> (Vec<u32>, Vec<Complex>, Vec<f64>)
where
    T: Fn(&GroupElement) -> Complex,
{
    let marks = checkpoints(family.height_bound);
    let mut sums = Vec::with_capacity(marks.len());
    let mut masses = Vec::with_capacity(marks.len());
    let (mut s, mut comp) = (c(0.0, 0.0), c(0.0, 0.0));
    let mut mass = 0.0;
    let mut idx = 0;
    let reps = &family.representatives;
    for &mark in &marks {
        while idx < reps.len() && family.heights[idx] <= mark {
            let t = term(&reps[idx]);
            mass += t.norm();
            let u = s + t;
            comp += neumaier(s, t, u);
            s = u;
            idx += 1;
        }
        sums.push(s + comp);
        masses.push(mass);
        mass = 0.0;
    }
    (marks, sums, masses)
}

fn neumaier(s: Complex, t: Complex, u: Complex) -> Complex {
    let part = |a: f64, b: f64, sum: f64| if a.abs() >= b.abs() { (a - sum) + b } else { (b - sum) + a };
    c(part(s.re, t.re, u.re), part(s.im, t.im, u.im))
}

/// `sum_R (f|_n R)(tau)` with `j = cz + d`, over upper-triangular cosets up
/// to height `height`. The tail is extrapolated with exponent `n - 2`.
pub fn poincare_series_uhp<F>(f: F, n: i32, tau: Complex, height: u32, rel_tol: f64) -> Result<PartialSumsReport>
where
    F: Fn(Complex) -> Complex,
{
    if !(tau.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane { re: tau.re, im: tau.im });
    }
    let family = enumerate_cosets_sl2(Stabilizer::UpperTriangular, height)?;
    let (heights, sums, mass) = shell_sums(&family, |r| r.cz_plus_d(tau).powi(-n) * f(r.mobius(tau)));
    let decay = (n > 2).then_some((n - 2) as f64);
    Ok(PartialSumsReport::build(heights, sums, mass, decay, false, rel_tol, family.len()))
}

fn validate_stabilizer<P>(p: &P, x0: &CMatrix, stab: Stabilizer) -> Result<()>
where
    P: Fn(&CMatrix) -> Complex,
{
    let extra = [
        CMatrix::from_row_slice(2, 2, &[c(1.3, 0.2), c(-0.4, 1.0), c(0.7, -0.5), c(2.1, 0.3)]),
        CMatrix::from_row_slice(2, 2, &[c(-0.6, 1.1), c(0.9, 0.4), c(0.2, -1.7), c(-1.2, 0.8)]),
    ];
    let mut deviation: f64 = 0.0;
    for x in std::iter::once(x0).chain(extra.iter()) {
        let base = p(x);
        if !is_finite(base) {
            continue;
        }
        for a in stab.samples() {
            let v = p(&a.act_on(x));
            let d = if is_finite(v) { rel_dev(v, base) } else { f64::INFINITY };
            deviation = deviation.max(d);
        }
    }
    if deviation > STABILIZER_TOL {
        return Err(Error::StabilizerMismatch { deviation });
    }
    Ok(())
}

/// `sum_{A in Gamma_P \ Gamma} P(A pm)` over the cosets of `stabilizer` up
/// to height `height`. `decay` is the tail exponent for extrapolation (for
/// `P` homogeneous of degree `-n` it is `n - 2`); `None` estimates it from
/// the last two shells.
pub fn period_poincare<P>(
    p: P,
    pm: &PeriodMatrix2,
    stabilizer: Stabilizer,
    height: u32,
    decay: Option<f64>,
    rel_tol: f64,
) -> Result<PartialSumsReport>
where
    P: Fn(&CMatrix) -> Complex,
{
    let x = pm.to_matrix();
    validate_stabilizer(&p, &x, stabilizer)?;
    let family = enumerate_cosets_sl2(stabilizer, height)?;
    let (heights, sums, mass) = shell_sums(&family, |r| p(&r.act_on(&x)));
    let exact = stabilizer == Stabilizer::Whole;
    let decay = decay.or_else(|| estimate_decay(&heights, &mass));
    Ok(PartialSumsReport::build(heights, sums, mass, decay, exact, rel_tol, family.len()))
}

/// Slope of `log shell_mass` against `log height` over the last two shells.
pub fn estimate_decay(heights: &[u32], mass: &[f64]) -> Option<f64> {
    let k = heights.len();
    if k < 3 || !(mass[k - 1] > 0.0) || !(mass[k - 2] > 0.0) {
        return None;
    }
    let slope = (mass[k - 1] / mass[k - 2]).ln() / (heights[k - 1] as f64 / heights[k - 2] as f64).ln();
    Some(-slope)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValueReport {
    /// `|f(a)|^2`.
    pub lhs: f64,
    /// Area average of `|f|^2` over the disk.
    pub rhs: f64,
}

impl MeanValueReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12) + 1e-300
    }
}

/// Both sides of `|f(a)|^2 <= mean of |f|^2 on the disk |z - a| < r`, the
/// mean taken on a polar midpoint grid with `grid` radii and `4 grid` angles.
pub fn mean_value_diagnostic<F>(f: F, a: Complex, r: f64, grid: usize) -> Result<MeanValueReport>
where
    F: Fn(Complex) -> Complex,
{
    if !(r > 0.0) || grid == 0 {
        return Err(Error::InvalidArgument("radius and grid must be positive".into()));
    }
    let n_theta = 4 * grid;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..grid {
        let rho = r * (i as f64 + 0.5) / grid as f64;
        let mut ring = 0.0;
        for k in 0..n_theta {
            let th = std::f64::consts::TAU * k as f64 / n_theta as f64;
            ring += f(a + Complex::from_polar(rho, th)).norm_sqr();
        }
        num += rho * ring / n_theta as f64;
        den += rho;
    }
    Ok(MeanValueReport { lhs: f(a).norm_sqr(), rhs: num / den })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::{eisenstein_lattice, Lattice};
    use crate::numerics::I;

    fn sympl() -> DMatrix<i64> {
        DMatrix::from_row_slice(2, 2, &[0, 1, -1, 0])
    }

    #[test]
    fn membership() {
        let psi = sympl();
        assert!(is_in_gamma(&DMatrix::identity(2, 2), &psi).unwrap());
        assert!(is_in_gamma(&DMatrix::from_row_slice(2, 2, &[1, 1, 0, 1]), &psi).unwrap());
        assert!(!is_in_gamma(&DMatrix::from_row_slice(2, 2, &[2, 0, 0, 1]), &psi).unwrap());
        assert!(matches!(is_in_gamma(&DMatrix::identity(3, 3), &psi), Err(Error::SizeMismatch(_))));
    }

    #[test]
    fn coset_counts() {
        for stab in [Stabilizer::UpperTriangular, Stabilizer::LowerTriangular] {
            assert_eq!(enumerate_cosets_sl2(stab, 1).unwrap().len(), 4);
            let fam = enumerate_cosets_sl2(stab, 2).unwrap();
            assert_eq!(fam.len(), 8);
            assert!(fam.is_sound());
            for r in &fam.representatives {
                assert!(is_in_gamma(r.entries(), &sympl()).unwrap());
            }
        }
        assert_eq!(enumerate_cosets_sl2(Stabilizer::Whole, 5).unwrap().len(), 1);
    }

    #[test]
    fn inverse_is_exact() {
        for a in sl2_elements(2) {
            assert_eq!(a.mul(&a.inverse()), GroupElement::identity(2));
        }
        let psi = crate::hodge::HodgeType::standard_symplectic(2);
        let a = DMatrix::from_row_slice(4, 4, &[1, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1]);
        let g = GroupElement::new(a, &psi).unwrap();
        assert_eq!(g.mul(&g.inverse()), GroupElement::identity(4));
    }

    #[test]
    fn cocycles() {
        let samples = random_samples(50, 3, 7);
        assert!(cocycle_check(|_, _| c(1.0, 0.0), &samples));
        assert!(cocycle_check(factor_cz_plus_d, &samples));
        assert!(!cocycle_check(|_, _| c(2.0, 0.0), &samples));
    }

    #[test]
    fn slash_laws() {
        let f = |z: Complex| (z * I).exp() + z * z;
        let id = slash(f, 4, GroupElement::identity(2), factor_cz_plus_d);
        assert!(rel_dev(id(c(0.3, 1.2)), f(c(0.3, 1.2))) < 1e-15);
        let a = GroupElement::sl2(2, 1, 1, 1).unwrap();
        let back = slash(slash(f, 4, a.clone(), factor_cz_plus_d), 4, a.inverse(), factor_cz_plus_d);
        assert!(rel_dev(back(c(-0.2, 0.9)), f(c(-0.2, 0.9))) < 1e-12);
        let g4 = |z: Complex| eisenstein_lattice(4, &Lattice::from_tau(z).unwrap(), 1e-12).unwrap();
        let z = c(0.1, 1.3);
        let s = slash(g4, 4, a, factor_cz_plus_d);
        assert!(rel_dev(s(z), g4(z)) < 1e-8);
    }

    #[test]
    fn weight_four_series_is_eisenstein() {
        let tau = c(0.2, 1.1);
        let rep = poincare_series_uhp(|_| c(1.0, 0.0), 4, tau, 200, 1e-4).unwrap();
        assert!(rep.converged);
        let g4 = eisenstein_lattice(4, &Lattice::from_tau(tau).unwrap(), 1e-12).unwrap();
        let z4 = crate::modular::qseries::zeta(4);
        assert!(rel_dev(rep.value() * (2.0 * z4), g4) < 1e-4);
        assert!(rel_dev(rep.extrapolated * (2.0 * z4), g4) < rel_dev(rep.value() * (2.0 * z4), g4));
        let shifted = poincare_series_uhp(|_| c(1.0, 0.0), 4, tau + 1.0, 200, 1e-4).unwrap();
        assert!(rel_dev(shifted.extrapolated, rep.extrapolated) < 1e-6);
        let div = poincare_series_uhp(|_| c(1.0, 0.0), 0, tau, 200, 1e-4).unwrap();
        assert!(!div.converged);
    }

    #[test]
    fn declared_stabilizer_is_validated() {
        let pm = crate::periods::base_period_matrix(1e-12).unwrap();
        let p = |x: &CMatrix| x[(0, 0)].powi(-4);
        assert!(period_poincare(p, &pm, Stabilizer::LowerTriangular, 4, Some(2.0), 1e-4).is_ok());
        assert!(matches!(
            period_poincare(p, &pm, Stabilizer::UpperTriangular, 4, Some(2.0), 1e-4),
            Err(Error::StabilizerMismatch { .. })
        ));
        let det = period_poincare(|x: &CMatrix| x.determinant(), &pm, Stabilizer::Whole, 50, None, 1e-4).unwrap();
        assert!(det.converged && det.partial_sums.iter().all(|s| *s == pm.det()));
    }

    #[test]
    fn mean_values() {
        let one = mean_value_diagnostic(|_| c(1.0, 0.0), c(0.0, 0.0), 0.5, 16).unwrap();
        assert!((one.lhs - 1.0).abs() < 1e-15 && (one.rhs - 1.0).abs() < 1e-14);
        let z = mean_value_diagnostic(|z| z, c(0.0, 0.0), 0.5, 200).unwrap();
        assert_eq!(z.lhs, 0.0);
        assert!((z.rhs - 0.125).abs() < 1e-5 && z.holds());
    }
}
