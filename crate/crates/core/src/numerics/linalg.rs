//! Dense complex linear algebra on small matrices: ranks, null spaces,
//! subspace intersection and comparison, polynomial roots.

use nalgebra::{DMatrix, DVector};

use super::Complex;

pub type CMatrix = DMatrix<Complex>;
pub type CVector = DVector<Complex>;

/// Relative singular-value threshold for rank decisions.
pub const RANK_REL_TOL: f64 = 1e-8;

/// Singular values of `m` together with the full right-singular basis (as
/// columns). Wide matrices are padded with zero rows so every right singular
/// vector is available.
fn full_svd(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (rows, cols) = m.shape();
    let work = if rows < cols {
        let mut padded = CMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v = svd.v_t.expect("requested right singular vectors").adjoint();
    (svd.singular_values.iter().copied().collect(), v)
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

fn threshold(sv: &[f64], rel: f64) -> f64 {
    let max = sv.iter().copied().fold(0.0, f64::max);
    rel * max.max(f64::MIN_POSITIVE)
}

pub fn numerical_rank(m: &CMatrix, rel: f64) -> usize {
    let sv = singular_values(m);
    if sv.is_empty() || sv[0] == 0.0 {
        return 0;
    }
    let thr = threshold(&sv, rel);
    sv.iter().filter(|&&s| s > thr).count()
}

/// Orthonormal basis (columns) of the null space of `m`.
pub fn null_space(m: &CMatrix, rel: f64) -> CMatrix {
    let cols = m.ncols();
    if m.nrows() == 0 || m.iter().all(|z| z.norm() == 0.0) {
        return CMatrix::identity(cols, cols);
    }
    let (sv, v) = full_svd(m);
    let thr = threshold(&sv, rel);
    let picks: Vec<usize> = (0..cols).filter(|&j| sv[j] <= thr).collect();
    let mut out = CMatrix::zeros(cols, picks.len());
    for (k, &j) in picks.iter().enumerate() {
        out.set_column(k, &v.column(j));
    }
    out
}

/// Orthonormal basis of the column span of `m`.
pub fn orthonormal_basis(m: &CMatrix, rel: f64) -> CMatrix {
    let rows = m.nrows();
    if m.ncols() == 0 || m.iter().all(|z| z.norm() == 0.0) {
        return CMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested left singular vectors");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let thr = threshold(&sv, rel);
    let picks: Vec<usize> = (0..sv.len()).filter(|&j| sv[j] > thr).collect();
    let mut out = CMatrix::zeros(rows, picks.len());
    for (k, &j) in picks.iter().enumerate() {
        out.set_column(k, &u.column(j));
    }
    out
}

/// Orthonormal basis of the intersection of the column spans of `a` and `b`.
pub fn intersect(a: &CMatrix, b: &CMatrix, rel: f64) -> CMatrix {
    let n = a.nrows();
    if a.ncols() == 0 || b.ncols() == 0 {
        return CMatrix::zeros(n, 0);
    }
    let a = orthonormal_basis(a, rel);
    let b = orthonormal_basis(b, rel);
    let mut stacked = CMatrix::zeros(n, a.ncols() + b.ncols());
    stacked.view_mut((0, 0), (n, a.ncols())).copy_from(&a);
    stacked.view_mut((0, a.ncols()), (n, b.ncols())).copy_from(&(-&b));
    let ns = null_space(&stacked, rel);
    let coeffs = ns.rows(0, a.ncols()).into_owned();
    orthonormal_basis(&(&a * coeffs), rel)
}

/// Orthogonal projector onto the span of an orthonormal basis.
pub fn projector(u: &CMatrix) -> CMatrix {
    u * u.adjoint()
}

/// Largest absolute entry of the difference of the orthogonal projectors.
pub fn subspace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let pa = projector(&orthonormal_basis(a, RANK_REL_TOL));
    let pb = projector(&orthonormal_basis(b, RANK_REL_TOL));
    (pa - pb).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn hcat(blocks: &[&CMatrix]) -> CMatrix {
    let rows = blocks.first().map(|b| b.nrows()).unwrap_or(0);
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn to_complex(m: &DMatrix<i64>) -> CMatrix {
    m.map(|v| Complex::new(v as f64, 0.0))
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let herm = (m + m.adjoint()) * Complex::new(0.5, 0.0);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Eigenvalues (ascending) of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Exact determinant of an integer matrix (fraction-free Bareiss elimination).
pub fn integer_det(m: &DMatrix<i64>) -> i128 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "determinant of a non-square matrix");
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)] as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Roots of the polynomial with coefficients `coeffs` (highest degree first),
/// from companion-matrix eigenvalues polished by Newton steps.
pub fn poly_roots(coeffs: &[Complex]) -> Vec<Complex> {
    let lead = coeffs
        .iter()
        .position(|z| z.norm() > 0.0)
        .expect("zero polynomial has no well-defined roots");
    let p = &coeffs[lead..];
    let deg = p.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let mut comp = CMatrix::zeros(deg, deg);
    for j in 0..deg {
        comp[(0, j)] = -p[j + 1] / p[0];
    }
    for i in 1..deg {
        comp[(i, i - 1)] = Complex::new(1.0, 0.0);
    }
    let eig = comp
        .clone()
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect::<Vec<_>>())
        .unwrap_or_else(|| (0..deg).map(|i| comp[(i, i)]).collect());
    eig.into_iter().map(|z| newton_polish(p, z)).collect()
}

fn newton_polish(p: &[Complex], mut z: Complex) -> Complex {
    for _ in 0..4 {
        let (mut v, mut d) = (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
        for &a in p {
            d = d * z + v;
            v = v * z + a;
        }
        if d.norm() == 0.0 {
            break;
        }
        let step = v / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(rows: usize, cols: usize, v: &[(f64, f64)]) -> CMatrix {
        CMatrix::from_row_iterator(rows, cols, v.iter().map(|&(a, b)| Complex::new(a, b)))
    }

    #[test]
    fn rank_and_null_space_of_wide_matrix() {
        let m = cm(1, 3, &[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(numerical_rank(&m, RANK_REL_TOL), 1);
        let ns = null_space(&m, RANK_REL_TOL);
        assert_eq!(ns.ncols(), 2);
        assert!(max_abs(&(&m * &ns)) < 1e-14);
    }

    #[test]
    fn intersection_of_planes() {
        // span(e1, e2) and span(e2, e3) meet in span(e2)
        let a = cm(3, 2, &[(1., 0.), (0., 0.), (0., 0.), (1., 0.), (0., 0.), (0., 0.)]);
        let b = cm(3, 2, &[(0., 0.), (0., 0.), (1., 0.), (0., 0.), (0., 0.), (1., 0.)]);
        let i = intersect(&a, &b, RANK_REL_TOL);
        assert_eq!(i.ncols(), 1);
        let e2 = cm(3, 1, &[(0., 0.), (1., 0.), (0., 0.)]);
        assert!(subspace_distance(&i, &e2) < 1e-12);
    }

    #[test]
    fn bareiss_determinant() {
        let m = DMatrix::from_row_slice(3, 3, &[2i64, 0, 1, 1, 3, 2, 1, 1, 2]);
        assert_eq!(integer_det(&m), 6);
        let s = DMatrix::from_row_slice(2, 2, &[0i64, 1, -1, 0]);
        assert_eq!(integer_det(&s), 1);
        let z = DMatrix::from_row_slice(2, 2, &[1i64, 2, 2, 4]);
        assert_eq!(integer_det(&z), 0);
    }

    #[test]
    fn cubic_roots() {
        // 4x^3 - 4x = 4x(x-1)(x+1)
        let r = poly_roots(&[Complex::new(4.0, 0.0), 0.0.into(), Complex::new(-4.0, 0.0), 0.0.into()]);
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in re.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!(r.iter().all(|z| z.im.abs() < 1e-14));
    }
}
