//! Dimensions of the period domain `D` at a point, computed from the Lie
//! algebra `g = {N : N^T Psi + Psi N = 0}` and its Hodge filtration.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hodge::{decomposition_from_filtration, verify_polarization, HodgeFiltration, HodgeType};
use crate::numerics::linalg::{null_space, numerical_rank, CMatrix, RANK_REL_TOL};
use crate::numerics::{c, Complex, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HermitianCase {
    /// `m = 2a + 1`, only `h^{a+1,a}` and `h^{a,a+1}` non-zero.
    Case1,
    /// `m = 2a`, `h^{a+1,a-1} <= 1`, only the three middle numbers non-zero.
    Case2,
    No,
}

/// `h = (h^{m,0}, ..., h^{0,m})`. Input that is not palindromic of length
/// `m + 1` is classified `No`.
pub fn classify_hermitian(m: u32, h: &[usize]) -> HermitianCase {
    let m = m as usize;
    if m == 0 || h.len() != m + 1 || h.iter().zip(h.iter().rev()).any(|(a, b)| a != b) {
        return HermitianCase::No;
    }
    // h^{p, m-p} = h[m - p]
    let hp = |p: usize| h[m - p];
    let a = m / 2;
    if m % 2 == 1 {
        let ok = (0..=m).all(|p| p == a || p == a + 1 || hp(p) == 0);
        if ok {
            return HermitianCase::Case1;
        }
    } else {
        let ok = (0..=m).all(|p| p + 1 == a || p == a || p == a + 1 || hp(p) == 0);
        if ok && hp(a + 1) <= 1 {
            return HermitianCase::Case2;
        }
    }
    HermitianCase::No
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainReport {
    pub dim_compact_dual: usize,
    pub dim_d: usize,
    pub dim_f0_lie: usize,
    pub dim_horizontal: usize,
    pub hermitian_case: HermitianCase,
    /// `dim F^i g` for `i = 0, -1, ..., -m`.
    pub lie_dims: Vec<usize>,
}

/// `mu (mu + 1) / 2` for skew `Psi`, `mu (mu - 1) / 2` for symmetric `Psi`.
pub fn lie_algebra_dim(phi: &HodgeType) -> usize {
    let mu = phi.mu();
    if phi.weight() % 2 == 1 {
        mu * (mu + 1) / 2
    } else {
        mu * (mu - 1) / 2
    }
}

fn lie_algebra_rows(psi: &DMatrix<i64>) -> Vec<Vec<Complex>> {
    // vec(N) is column-major: N_{k,l} sits at k + l mu
    let mu = psi.nrows();
    let mut rows = Vec::with_capacity(mu * mu);
    for r in 0..mu {
        for s in r..mu {
            let mut row = vec![c(0.0, 0.0); mu * mu];
            for k in 0..mu {
                // (N^T Psi)_{r,s} = sum_k N_{k,r} Psi_{k,s}
                row[k + r * mu] += c(psi[(k, s)] as f64, 0.0);
                // (Psi N)_{r,s} = sum_k Psi_{r,k} N_{k,s}
                row[k + s * mu] += c(psi[(r, k)] as f64, 0.0);
            }
            rows.push(row);
        }
    }
    rows
}

fn flag_rows(f: &HodgeFiltration, m: u32, shift: i64) -> Vec<Vec<Complex>> {
    let mu = f.dim();
    let mut rows = Vec::new();
    for p in 1..=m as i64 {
        let target = p + shift;
        if target <= 0 {
            continue;
        }
        let u = f.level(p as u32);
        let w = if target > m as i64 {
            CMatrix::identity(mu, mu)
        } else {
            null_space(&f.level(target as u32).adjoint(), RANK_REL_TOL)
        };
        // w^* N u = 0
        for r in 0..w.ncols() {
            for s in 0..u.ncols() {
                let mut row = vec![c(0.0, 0.0); mu * mu];
                for k in 0..mu {
                    for l in 0..mu {
                        row[k + l * mu] = w[(k, r)].conj() * u[(l, s)];
                    }
                }
                rows.push(row);
            }
        }
    }
    rows
}

fn solution_dim(rows: &[Vec<Complex>], unknowns: usize) -> usize {
    if rows.is_empty() {
        return unknowns;
    }
    let m = CMatrix::from_fn(rows.len(), unknowns, |r, col| rows[r][col]);
    unknowns - numerical_rank(&m, RANK_REL_TOL)
}

/// `dim F^i g` for `i = 0, -1, ..., -m`, where
/// `F^i g = {N in g : N F^p ⊆ F^{p+i} for all p}`.
pub fn lie_filtration_dims(point: &HodgeFiltration, phi: &HodgeType) -> Result<Vec<usize>> {
    let m = phi.weight();
    if point.weight() != m || point.dim() != phi.mu() {
        return Err(Error::DegenerateFiltration("point does not match the Hodge type".into()));
    }
    for i in 0..=m {
        if point.level(i).ncols() != phi.dim_f(i) {
            return Err(Error::DegenerateFiltration(format!("dim F^{i} does not match the Hodge numbers")));
        }
    }
    let mu = phi.mu();
    let base = lie_algebra_rows(phi.psi());
    let mut dims = Vec::with_capacity(m as usize + 1);
    for i in 0..=m as i64 {
        let mut rows = base.clone();
        rows.extend(flag_rows(point, m, -i));
        dims.push(solution_dim(&rows, mu * mu));
    }
    Ok(dims)
}

pub fn domain_dims(phi: &HodgeType, base_point: &HodgeFiltration) -> Result<DomainReport> {
    let lie_dims = lie_filtration_dims(base_point, phi)?;
    let full = *lie_dims.last().expect("at least two levels");
    let f0 = lie_dims[0];
    let f_minus_1 = lie_dims[1];
    let dim = full - f0;
    Ok(DomainReport {
        dim_compact_dual: dim,
        dim_d: dim,
        dim_f0_lie: f0,
        dim_horizontal: f_minus_1 - f0,
        hermitian_case: classify_hermitian(phi.weight(), phi.hodge_numbers()),
        lie_dims,
    })
}

/// Built-in polarized points:
/// - weight 1 on the standard symplectic form: `F^1 = span(i e_k + e_{k+g})`;
/// - weight 2 on `diag(-1 (2a times), +1 (b times))`:
///   `H^{2,0} = span(e_{2k-1} + i e_{2k})`, `H^{1,1}` the last `b` axes;
/// - weight 3, `h = (1,1,1,1)`, standard symplectic form, with
///   `v_k = i e_k + e_{k+2}`: `H^{3,0} = conj v_1`, `H^{2,1} = v_2`.
pub fn base_point(phi: &HodgeType) -> Result<HodgeFiltration> {
    let m = phi.weight();
    let h = phi.hodge_numbers();
    let mu = phi.mu();
    let unsupported = || Error::UnsupportedType(format!("weight {m}, h = {h:?}"));
    let f = match m {
        1 => {
            let g = h[0];
            if *phi.psi() != HodgeType::standard_symplectic(g) {
                return Err(unsupported());
            }
            let f1 = CMatrix::from_fn(mu, g, |r, k| {
                if r == k {
                    I
                } else if r == k + g {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            });
            HodgeFiltration::from_top(vec![f1], phi)?
        }
        2 => {
            let (a, b) = (h[0], h[1]);
            if *phi != HodgeType::weight_two(a, b)? {
                return Err(unsupported());
            }
            let h20 = CMatrix::from_fn(mu, a, |r, k| {
                if r == 2 * k {
                    c(1.0, 0.0)
                } else if r == 2 * k + 1 {
                    I
                } else {
                    c(0.0, 0.0)
                }
            });
            let h11 = CMatrix::from_fn(mu, b, |r, k| if r == 2 * a + k { c(1.0, 0.0) } else { c(0.0, 0.0) });
            let f1 = crate::numerics::linalg::hcat(&[&h20, &h11]);
            HodgeFiltration::from_top(vec![h20, f1], phi)?
        }
        3 if h == [1, 1, 1, 1] && *phi.psi() == HodgeType::standard_symplectic(2) => {
            let v = |k: usize, sign: f64| {
                let mut col = CMatrix::zeros(4, 1);
                col[(k, 0)] = I * sign;
                col[(k + 2, 0)] = c(1.0, 0.0);
                col
            };
            let h30 = v(0, -1.0);
            let f2 = crate::numerics::linalg::hcat(&[&h30, &v(1, 1.0)]);
            let f1 = crate::numerics::linalg::hcat(&[&f2, &v(1, -1.0)]);
            HodgeFiltration::from_top(vec![h30, f2, f1], phi)?
        }
        _ => return Err(unsupported()),
    };
    let dec = decomposition_from_filtration(&f, phi)?;
    let report = verify_polarization(&dec, phi);
    if !report.passed() {
        return Err(Error::DegenerateFiltration(format!("built-in point is not polarized: {:?}", report.details)));
    }
    Ok(f)
}

fn binomial(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `C(n + 1 + d, d) - (n + 2)^2`.
pub fn kodaira_spencer_count(n: u64, d: u64) -> Result<i128> {
    if n < 1 || d < 1 {
        return Err(Error::InvalidArgument("n and d must be at least 1".into()));
    }
    let overflow = || Error::InvalidArgument("count overflows".into());
    let total = n.checked_add(1).and_then(|v| v.checked_add(d)).ok_or_else(overflow)?;
    let b = binomial(total, d).ok_or_else(overflow)?;
    let b = i128::try_from(b).map_err(|_| overflow())?;
    let sq = (n as i128 + 2).checked_mul(n as i128 + 2).ok_or_else(overflow)?;
    Ok(b - sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hodge::elliptic_hs;

    #[test]
    fn classification_examples() {
        assert_eq!(classify_hermitian(1, &[3, 3]), HermitianCase::Case1);
        assert_eq!(classify_hermitian(2, &[1, 20, 1]), HermitianCase::Case2);
        assert_eq!(classify_hermitian(3, &[1, 1, 1, 1]), HermitianCase::No);
        assert_eq!(classify_hermitian(2, &[2, 1, 2]), HermitianCase::No);
        assert_eq!(classify_hermitian(3, &[0, 2, 2, 0]), HermitianCase::Case1);
        assert_eq!(classify_hermitian(4, &[0, 1, 3, 1, 0]), HermitianCase::Case2);
    }

    #[test]
    fn elliptic_dims() {
        let (phi, f) = elliptic_hs(I).unwrap();
        assert_eq!(lie_filtration_dims(&f, &phi).unwrap(), vec![2, 3]);
        let r = domain_dims(&phi, &f).unwrap();
        assert_eq!((r.dim_d, r.dim_horizontal, r.hermitian_case), (1, 1, HermitianCase::Case1));
    }

    #[test]
    fn siegel_dims() {
        for g in 1..=3 {
            let phi = HodgeType::weight_one(g).unwrap();
            let r = domain_dims(&phi, &base_point(&phi).unwrap()).unwrap();
            assert_eq!(r.dim_d, g * (g + 1) / 2);
            assert_eq!(r.dim_horizontal, r.dim_d);
        }
    }

    #[test]
    fn weight_three_is_not_horizontal() {
        let phi = HodgeType::weight_three_cy().unwrap();
        let r = domain_dims(&phi, &base_point(&phi).unwrap()).unwrap();
        assert_eq!(*r.lie_dims.last().unwrap(), lie_algebra_dim(&phi));
        assert_eq!(r.dim_d, 4);
        assert_eq!(r.dim_horizontal, 2);
        assert_eq!(r.hermitian_case, HermitianCase::No);
    }

    #[test]
    fn base_points_are_polarized() {
        for phi in [
            HodgeType::weight_one(1).unwrap(),
            HodgeType::weight_one(2).unwrap(),
            HodgeType::weight_two(1, 1).unwrap(),
            HodgeType::weight_two(2, 3).unwrap(),
        ] {
            base_point(&phi).unwrap();
        }
        let (_, f) = elliptic_hs(I).unwrap();
        let phi = HodgeType::weight_one(1).unwrap();
        assert!(base_point(&phi).unwrap().distance(&f) < 1e-12);
        let odd = HodgeType::new(5, vec![1, 0, 0, 0, 0, 1], HodgeType::standard_symplectic(1)).unwrap();
        assert!(matches!(base_point(&odd), Err(Error::UnsupportedType(_))));
    }

    #[test]
    fn ks_counts() {
        assert_eq!(kodaira_spencer_count(2, 4).unwrap(), 19);
        assert_eq!(kodaira_spencer_count(1, 3).unwrap(), 1);
        assert_eq!(kodaira_spencer_count(2, 3).unwrap(), 4);
        assert!(kodaira_spencer_count(0, 3).is_err());
        assert!(kodaira_spencer_count(u64::MAX, 3).is_err());
    }
}
