//! Polarized Hodge structures on `Z^mu` with an explicit integer form `Psi`.
//!
//! Subspaces are stored as orthonormal complex basis matrices (columns) and
//! compared through their orthogonal projectors. The form is bilinear:
//! `psi(a, b) = a^T Psi b`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numerics::linalg::{
    conj, hcat, integer_det, intersect, numerical_rank, orthonormal_basis, subspace_distance, symmetric_eigenvalues,
    to_complex, CMatrix, RANK_REL_TOL,
};
use crate::numerics::{c, Complex, I};

/// Subspace equality threshold (projector distance).
pub const SUBSPACE_TOL: f64 = 1e-10;
/// Threshold for the vanishing clauses of the Riemann relations.
pub const RIEMANN_TOL: f64 = 1e-10;

/// Type `(m, h, Psi)`; `h = (h^{m,0}, ..., h^{0,m})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeType {
    m: u32,
    h: Vec<usize>,
    psi: DMatrix<i64>,
}

impl HodgeType {
    pub fn new(m: u32, h: Vec<usize>, psi: DMatrix<i64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidHodgeType("weight must be positive".into()));
        }
        if h.len() != m as usize + 1 {
            return Err(Error::InvalidHodgeType(format!("expected {} Hodge numbers, got {}", m + 1, h.len())));
        }
        if h.iter().zip(h.iter().rev()).any(|(a, b)| a != b) {
            return Err(Error::InvalidHodgeType("Hodge numbers must be palindromic".into()));
        }
        let mu: usize = h.iter().sum();
        if mu == 0 {
            return Err(Error::InvalidHodgeType("total dimension must be positive".into()));
        }
        if psi.nrows() != mu || psi.ncols() != mu {
            return Err(Error::InvalidHodgeType(format!("Psi must be {mu}x{mu}")));
        }
        let sign = if m % 2 == 0 { 1 } else { -1 };
        if psi.transpose() != psi.map(|v| sign * v) {
            return Err(Error::InvalidHodgeType(format!("Psi must satisfy Psi^T = (-1)^{m} Psi")));
        }
        if integer_det(&psi) == 0 {
            return Err(Error::InvalidHodgeType("Psi is degenerate".into()));
        }
        Ok(HodgeType { m, h, psi })
    }

    /// `[[0, I_g], [-I_g, 0]]`.
    pub fn standard_symplectic(g: usize) -> DMatrix<i64> {
        DMatrix::from_fn(2 * g, 2 * g, |i, j| {
            if j == i + g {
                1
            } else if i == j + g {
                -1
            } else {
                0
            }
        })
    }

    /// Weight 1, `h = (g, g)`, standard symplectic form.
    pub fn weight_one(g: usize) -> Result<Self> {
        Self::new(1, vec![g, g], Self::standard_symplectic(g))
    }

    /// Weight 3, `h = (1, 1, 1, 1)`, standard symplectic form.
    pub fn weight_three_cy() -> Result<Self> {
        Self::new(3, vec![1, 1, 1, 1], Self::standard_symplectic(2))
    }

    /// Weight 2, `h = (a, b, a)`, `Psi = diag(-1 (2a times), +1 (b times))`.
    pub fn weight_two(a: usize, b: usize) -> Result<Self> {
        let mu = 2 * a + b;
        let psi = DMatrix::from_fn(mu, mu, |i, j| if i != j { 0 } else if i < 2 * a { -1 } else { 1 });
        Self::new(2, vec![a, b, a], psi)
    }

    pub fn weight(&self) -> u32 {
        self.m
    }

    pub fn hodge_numbers(&self) -> &[usize] {
        &self.h
    }

    pub fn psi(&self) -> &DMatrix<i64> {
        &self.psi
    }

    pub fn psi_complex(&self) -> CMatrix {
        to_complex(&self.psi)
    }

    pub fn mu(&self) -> usize {
        self.psi.nrows()
    }

    /// `h^{p, m-p}`.
    pub fn h_pq(&self, p: u32) -> usize {
        self.h[(self.m - p) as usize]
    }

    /// `dim F^i = h^{m,0} + ... + h^{i,m-i}`.
    pub fn dim_f(&self, i: u32) -> usize {
        (i..=self.m).map(|p| self.h_pq(p)).sum()
    }

    /// Sign `(-1)^p i^m` making `sign * psi(a, conj a)` positive on `H^{p, m-p}`.
    pub fn positivity_sign(&self, p: u32) -> Complex {
        let s = if p % 2 == 0 { 1.0 } else { -1.0 };
        I.powi(self.m as i32) * s
    }
}

/// `F^m ⊆ ... ⊆ F^0 = C^mu`; `level(i)` is an orthonormal basis of `F^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeFiltration {
    levels: Vec<CMatrix>,
}

impl HodgeFiltration {
    /// From spanning sets of `F^0, ..., F^m` (index = level); checks the
    /// dimensions against `phi` and the nesting.
    pub fn new(levels: Vec<CMatrix>, phi: &HodgeType) -> Result<Self> {
        let m = phi.weight() as usize;
        if levels.len() != m + 1 {
            return Err(Error::DegenerateFiltration(format!("expected {} levels, got {}", m + 1, levels.len())));
        }
        let mu = phi.mu();
        let mut out = Vec::with_capacity(m + 1);
        for (i, f) in levels.iter().enumerate() {
            if f.nrows() != mu {
                return Err(Error::SizeMismatch(format!("level {i} has {} rows, expected {mu}", f.nrows())));
            }
            let basis = orthonormal_basis(f, RANK_REL_TOL);
            let want = phi.dim_f(i as u32);
            if basis.ncols() != want {
                return Err(Error::DegenerateFiltration(format!("dim F^{i} = {}, expected {want}", basis.ncols())));
            }
            out.push(basis);
        }
        for i in 1..=m {
            let both = hcat(&[&out[i - 1], &out[i]]);
            if numerical_rank(&both, RANK_REL_TOL) != out[i - 1].ncols() {
                return Err(Error::DegenerateFiltration(format!("F^{i} is not contained in F^{}", i - 1)));
            }
        }
        Ok(HodgeFiltration { levels: out })
    }

    /// From spanning sets of `F^m, ..., F^1` listed top-down; `F^0` is the
    /// whole space.
    pub fn from_top(top_down: Vec<CMatrix>, phi: &HodgeType) -> Result<Self> {
        let mu = phi.mu();
        let mut levels = vec![CMatrix::identity(mu, mu)];
        levels.extend(top_down.into_iter().rev());
        Self::new(levels, phi)
    }

    pub fn level(&self, i: u32) -> &CMatrix {
        &self.levels[i as usize]
    }

    pub fn weight(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn dim(&self) -> usize {
        self.levels[0].nrows()
    }

    /// Largest projector distance over the levels.
    pub fn distance(&self, other: &HodgeFiltration) -> f64 {
        self.levels.iter().zip(&other.levels).map(|(a, b)| subspace_distance(a, b)).fold(0.0, f64::max)
    }

    /// Image under `v -> A v`.
    pub fn transformed(&self, a: &CMatrix) -> HodgeFiltration {
        HodgeFiltration { levels: self.levels.iter().map(|f| orthonormal_basis(&(a * f), RANK_REL_TOL)).collect() }
    }
}

/// `H^{p, m-p}` for `p = 0..=m`, as orthonormal bases.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeDecomposition {
    pieces: Vec<CMatrix>,
}

impl HodgeDecomposition {
    /// From spanning sets of `H^{0,m}, ..., H^{m,0}` (index = `p`).
    pub fn new(pieces: Vec<CMatrix>, phi: &HodgeType) -> Result<Self> {
        let m = phi.weight() as usize;
        if pieces.len() != m + 1 {
            return Err(Error::DegenerateFiltration(format!("expected {} pieces, got {}", m + 1, pieces.len())));
        }
        let pieces: Vec<CMatrix> = pieces.iter().map(|b| orthonormal_basis(b, RANK_REL_TOL)).collect();
        let dec = HodgeDecomposition { pieces };
        dec.check(phi)?;
        Ok(dec)
    }

    fn check(&self, phi: &HodgeType) -> Result<()> {
        let m = phi.weight();
        for p in 0..=m {
            let got = self.piece(p).ncols();
            if got != phi.h_pq(p) {
                return Err(Error::DegenerateFiltration(format!("dim H^{{{p},{}}} = {got}, expected {}", m - p, phi.h_pq(p))));
            }
            if self.piece(p).nrows() != phi.mu() {
                return Err(Error::SizeMismatch("piece has the wrong ambient dimension".into()));
            }
        }
        let all: Vec<&CMatrix> = self.pieces.iter().collect();
        if numerical_rank(&hcat(&all), RANK_REL_TOL) != phi.mu() {
            return Err(Error::DegenerateFiltration("pieces do not form a direct sum".into()));
        }
        for p in 0..=m {
            if subspace_distance(&conj(self.piece(p)), self.piece(m - p)) > SUBSPACE_TOL.sqrt() {
                return Err(Error::DegenerateFiltration(format!("conj H^{{{p},{}}} is not H^{{{},{p}}}", m - p, m - p)));
            }
        }
        Ok(())
    }

    /// Basis of `H^{p, m-p}`.
    pub fn piece(&self, p: u32) -> &CMatrix {
        &self.pieces[p as usize]
    }

    pub fn weight(&self) -> u32 {
        (self.pieces.len() - 1) as u32
    }

    pub fn to_filtration(&self, phi: &HodgeType) -> Result<HodgeFiltration> {
        let m = self.weight();
        let levels = (0..=m)
            .map(|i| {
                let parts: Vec<&CMatrix> = (i..=m).map(|p| self.piece(p)).collect();
                hcat(&parts)
            })
            .collect();
        HodgeFiltration::new(levels, phi)
    }

    /// Largest projector distance over the pieces.
    pub fn distance(&self, other: &HodgeDecomposition) -> f64 {
        self.pieces.iter().zip(&other.pieces).map(|(a, b)| subspace_distance(a, b)).fold(0.0, f64::max)
    }
}

/// `H^{p,q} = F^p ∩ conj(F^q)`.
pub fn decomposition_from_filtration(f: &HodgeFiltration, phi: &HodgeType) -> Result<HodgeDecomposition> {
    let m = phi.weight();
    if f.weight() != m || f.dim() != phi.mu() {
        return Err(Error::SizeMismatch("filtration does not match the Hodge type".into()));
    }
    let mut pieces = Vec::with_capacity(m as usize + 1);
    for p in 0..=m {
        let piece = intersect(f.level(p), &conj(f.level(m - p)), RANK_REL_TOL);
        if piece.ncols() != phi.h_pq(p) {
            return Err(Error::DegenerateFiltration(format!(
                "dim F^{p} ∩ conj F^{} = {}, expected {}",
                m - p,
                piece.ncols(),
                phi.h_pq(p)
            )));
        }
        pieces.push(piece);
    }
    let dec = HodgeDecomposition { pieces };
    dec.check(phi)?;
    Ok(dec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationReport {
    /// `psi(H^{i,m-i}, H^{m-j,j}) = 0` for `i != j`.
    pub first: bool,
    /// `(-1)^p i^m psi(a, conj a) > 0` on every `H^{p,m-p}`.
    pub second: bool,
    /// Largest `|psi|` between orthonormal basis vectors of pieces that must
    /// be orthogonal.
    pub max_cross: f64,
    /// Smallest eigenvalue of the signed Hermitian forms.
    pub min_eigenvalue: f64,
    pub details: Vec<String>,
}

impl PolarizationReport {
    pub fn passed(&self) -> bool {
        self.first && self.second
    }
}

/// Both bilinear relations, evaluated on orthonormal bases of the pieces.
pub fn verify_polarization(dec: &HodgeDecomposition, phi: &HodgeType) -> PolarizationReport {
    let psi = phi.psi_complex();
    let m = phi.weight();
    let mut details = Vec::new();
    let mut max_cross: f64 = 0.0;
    for p in 0..=m {
        for p2 in 0..=m {
            // psi(H^{p, m-p}, H^{p2, m-p2}) may be non-zero only for p2 = m - p
            if p2 == m - p {
                continue;
            }
            let block = dec.piece(p).transpose() * &psi * dec.piece(p2);
            let v = block.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if v > RIEMANN_TOL {
                details.push(format!("psi(H^{{{p},{}}}, H^{{{p2},{}}}) = {v:e}", m - p, m - p2));
            }
            max_cross = max_cross.max(v);
        }
    }
    let mut min_eigenvalue = f64::INFINITY;
    for p in 0..=m {
        let u = dec.piece(p);
        if u.ncols() == 0 {
            continue;
        }
        let herm = u.transpose() * &psi * conj(u) * phi.positivity_sign(p);
        let ev = crate::numerics::linalg::hermitian_eigenvalues(&herm);
        let lo = ev.first().copied().unwrap_or(f64::INFINITY);
        if !(lo > 0.0) {
            details.push(format!("signed form on H^{{{p},{}}} has eigenvalue {lo:e}", m - p));
        }
        min_eigenvalue = min_eigenvalue.min(lo);
    }
    PolarizationReport { first: max_cross <= RIEMANN_TOL, second: min_eigenvalue > 0.0, max_cross, min_eigenvalue, details }
}

/// Weight 1, `mu = 2`, `F^1 = span(tau e1 + e2)`.
pub fn elliptic_hs(tau: Complex) -> Result<(HodgeType, HodgeFiltration)> {
    if tau.im == 0.0 || !crate::numerics::is_finite(tau) {
        return Err(Error::RealTau);
    }
    let phi = HodgeType::weight_one(1)?;
    let f1 = CMatrix::from_column_slice(2, 1, &[tau, c(1.0, 0.0)]);
    let f = HodgeFiltration::from_top(vec![f1], &phi)?;
    Ok((phi, f))
}

/// Real subspace `H^i` (from `H^{m-i,i}` and its conjugate) with `J_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPiece {
    pub index: u32,
    /// Columns form a basis of `H^i` in `R^mu`.
    pub basis: DMatrix<f64>,
    /// `J_i` in that basis.
    pub j: DMatrix<f64>,
}

/// Outcome of the four Riemann relations on the real pieces; `None` marks a
/// clause that does not apply to the weight's parity.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannRelations {
    pub orthogonal: bool,
    pub j_invariant: bool,
    pub odd_positive: Option<bool>,
    pub even_positive: Option<bool>,
}

impl RiemannRelations {
    pub fn all_hold(&self) -> bool {
        self.orthogonal && self.j_invariant && self.odd_positive.unwrap_or(true) && self.even_positive.unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealHodgeData {
    pub pieces: Vec<RealPiece>,
    pub relations: RiemannRelations,
}

fn real_basis_of_piece(a: &CMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    // x = a + conj a = 2 Re a, J x = i (a - conj a) = -2 Im a
    let k = a.ncols();
    let mu = a.nrows();
    let mut basis = DMatrix::zeros(mu, 2 * k);
    for col in 0..k {
        for row in 0..mu {
            basis[(row, col)] = 2.0 * a[(row, col)].re;
            basis[(row, col + k)] = -2.0 * a[(row, col)].im;
        }
    }
    let mut j = DMatrix::zeros(2 * k, 2 * k);
    for col in 0..k {
        j[(col + k, col)] = 1.0;
        j[(col, col + k)] = -1.0;
    }
    (basis, j)
}

fn real_span(a: &CMatrix) -> DMatrix<f64> {
    let (mu, k) = a.shape();
    let stacked = CMatrix::from_fn(mu, 2 * k, |r, col| if col < k { c(a[(r, col)].re, 0.0) } else { c(a[(r, col - k)].im, 0.0) });
    orthonormal_basis(&stacked, RANK_REL_TOL).map(|z| z.re)
}

/// `H^0 ⊕ ... ⊕ H^{floor(m/2)}` with the operators `J_i`, and the four
/// Riemann relations checked on them.
pub fn real_structure(dec: &HodgeDecomposition, phi: &HodgeType) -> Result<RealHodgeData> {
    let m = phi.weight();
    let psi = phi.psi().map(|v| v as f64);
    let mut pieces = Vec::new();
    for i in 0..=m / 2 {
        let p = m - i;
        if 2 * i < m {
            let (basis, j) = real_basis_of_piece(dec.piece(p));
            pieces.push(RealPiece { index: i, basis, j });
        } else {
            let basis = real_span(dec.piece(p));
            if basis.ncols() != phi.h_pq(p) {
                return Err(Error::DegenerateFiltration("middle piece is not defined over R".into()));
            }
            let j = DMatrix::identity(basis.ncols(), basis.ncols());
            pieces.push(RealPiece { index: i, basis, j });
        }
    }
    let scale = |b: &DMatrix<f64>| b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut orthogonal = true;
    for a in &pieces {
        for b in &pieces {
            if a.index != b.index {
                let v = (a.basis.transpose() * &psi * &b.basis).amax();
                orthogonal &= v <= RIEMANN_TOL * scale(&a.basis) * scale(&b.basis);
            }
        }
    }
    let mut j_invariant = true;
    let mut odd_ok = true;
    let mut even_ok = true;
    for piece in &pieces {
        let g = piece.basis.transpose() * &psi * &piece.basis;
        if g.is_empty() {
            continue;
        }
        let tol = RIEMANN_TOL * scale(&piece.basis).powi(2);
        j_invariant &= (piece.j.transpose() * &g * &piece.j - &g).amax() <= tol;
        let i = piece.index as i64;
        // psi(x, J y) in coordinates
        let gj = &g * &piece.j;
        let sym = (&gj + gj.transpose()) * 0.5;
        if m % 2 == 1 {
            let sign = if ((m as i64 - 1) / 2 + i) % 2 == 0 { 1.0 } else { -1.0 };
            odd_ok &= symmetric_eigenvalues(&(sym * sign)).first().is_some_and(|&v| v > 0.0);
        } else {
            let sign = if (m as i64 / 2 + i) % 2 == 0 { 1.0 } else { -1.0 };
            even_ok &= sym.amax() <= tol || piece.j == DMatrix::identity(piece.j.nrows(), piece.j.ncols());
            even_ok &= symmetric_eigenvalues(&(g * sign)).first().is_some_and(|&v| v > 0.0);
        }
    }
    let relations = RiemannRelations {
        orthogonal,
        j_invariant,
        odd_positive: (m % 2 == 1).then_some(odd_ok),
        even_positive: (m % 2 == 0).then_some(even_ok),
    };
    Ok(RealHodgeData { pieces, relations })
}

/// The Weil operator `C` as a real matrix: on `H^{p,q}` it multiplies by
/// `s i` (`p > q`) or `-s i` (`p < q`) with `s = (-1)^{(m-1)/2 + min(p,q)}`
/// for odd `m`, and by `(-1)^{m/2 + min(p,q)}` for even `m`.
pub fn weil_operator(dec: &HodgeDecomposition, phi: &HodgeType) -> Result<DMatrix<f64>> {
    let m = phi.weight();
    let mut cols = Vec::new();
    let mut eig = Vec::new();
    for p in 0..=m {
        let q = m - p;
        let i = p.min(q) as i64;
        let val = if m % 2 == 1 {
            let s = if ((m as i64 - 1) / 2 + i) % 2 == 0 { 1.0 } else { -1.0 };
            if p > q {
                I * s
            } else {
                -I * s
            }
        } else {
            c(if (m as i64 / 2 + i) % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        };
        let piece = dec.piece(p);
        for k in 0..piece.ncols() {
            cols.push(piece.column(k).into_owned());
            eig.push(val);
        }
    }
    let b = CMatrix::from_columns(&cols);
    let b_inv = b.clone().try_inverse().ok_or_else(|| Error::DegenerateFiltration("pieces are not independent".into()))?;
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(eig));
    let cm = &b * d * b_inv;
    if cm.iter().map(|z| z.im.abs()).fold(0.0, f64::max) > 1e-8 * (1.0 + cm.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
        return Err(Error::DegenerateFiltration("Weil operator is not real".into()));
    }
    Ok(cm.map(|z| z.re))
}

/// Symmetric matrix of the form `P(x, y) = psi(x, C y)`.
pub fn positive_form(dec: &HodgeDecomposition, phi: &HodgeType) -> Result<DMatrix<f64>> {
    let cm = weil_operator(dec, phi)?;
    let s = phi.psi().map(|v| v as f64) * cm;
    Ok((&s + s.transpose()) * 0.5)
}

/// Operator-norm bound `sqrt(lambda_max / lambda_min)` of `P` for real
/// maps preserving `P`, i.e. for the stabilizer of the point.
pub fn stabilizer_norm_bound(dec: &HodgeDecomposition, phi: &HodgeType) -> Result<f64> {
    let ev = symmetric_eigenvalues(&positive_form(dec, phi)?);
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if !(lo > 0.0) {
        return Err(Error::DegenerateFiltration("psi(x, Cx) is not positive definite".into()));
    }
    Ok((hi / lo).sqrt())
}

/// `A Psi A^T = Psi`, exactly.
pub fn preserves_form(a: &DMatrix<i64>, psi: &DMatrix<i64>) -> Result<bool> {
    if a.nrows() != a.ncols() || a.nrows() != psi.nrows() || psi.nrows() != psi.ncols() {
        return Err(Error::SizeMismatch(format!("A is {}x{}, Psi is {}x{}", a.nrows(), a.ncols(), psi.nrows(), psi.ncols())));
    }
    Ok(a * psi * a.transpose() == *psi)
}

/// `F -> A F` for `A` in the integral group. Both `A Psi A^T = Psi` and
/// `A^T Psi A = Psi` are required, the latter being what keeps the
/// polarization invariant under `v -> A v`.
pub fn group_element_action(a: &DMatrix<i64>, f: &HodgeFiltration, phi: &HodgeType) -> Result<HodgeFiltration> {
    if !preserves_form(a, phi.psi())? || a.transpose() * phi.psi() * a != *phi.psi() {
        return Err(Error::NotInGroup);
    }
    Ok(f.transformed(&to_complex(a)))
}

/// Projection of `Z^mu` into `F^{(m+1)/2}` along its conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianLattice {
    /// Orthonormal basis of `F^{(m+1)/2}` (columns).
    pub subspace: CMatrix,
    /// Column `j` holds the coordinates of the projection of `e_j`.
    pub generators: CMatrix,
    /// Rank over `R` of the generators.
    pub real_rank: usize,
}

pub fn jacobian_lattice(phi: &HodgeType, f: &HodgeFiltration) -> Result<JacobianLattice> {
    let m = phi.weight();
    if m % 2 == 0 {
        return Err(Error::InvalidHodgeType("Jacobian lattices need odd weight".into()));
    }
    let u = f.level(m.div_ceil(2)).clone();
    let d = u.ncols();
    let mu = phi.mu();
    let expected = 2 * d;
    let both = hcat(&[&u, &conj(&u)]);
    let rank = numerical_rank(&both, RANK_REL_TOL);
    let inv = match both.clone().try_inverse() {
        Some(inv) if rank == mu && expected == mu => inv,
        _ => return Err(Error::RankDeficient { rank, expected }),
    };
    // coordinates of e_j in [U | conj U]; the first d give the projection
    let coords = inv;
    let generators = coords.rows(0, d).into_owned();
    let real = DMatrix::from_fn(2 * d, mu, |r, col| {
        let z = generators[(r % d, col)];
        if r < d {
            z.re
        } else {
            z.im
        }
    });
    let sv = real.clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    let real_rank = sv.iter().filter(|&&s| s > RANK_REL_TOL * top).count();
    if real_rank != expected {
        return Err(Error::RankDeficient { rank: real_rank, expected });
    }
    Ok(JacobianLattice { subspace: u, generators, real_rank })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[Complex]) -> CMatrix {
        CMatrix::from_column_slice(v.len(), 1, v)
    }

    #[test]
    fn type_validation() {
        assert!(HodgeType::new(1, vec![1, 2], HodgeType::standard_symplectic(1)).is_err());
        assert!(HodgeType::new(1, vec![1, 1], DMatrix::from_row_slice(2, 2, &[0, 1, 1, 0])).is_err());
        assert!(HodgeType::new(2, vec![0, 2, 0], DMatrix::from_row_slice(2, 2, &[1, 0, 0, 0])).is_err());
        assert!(HodgeType::weight_two(1, 3).is_ok());
    }

    #[test]
    fn elliptic_decomposition() {
        let (phi, f) = elliptic_hs(I).unwrap();
        let dec = decomposition_from_filtration(&f, &phi).unwrap();
        assert!(subspace_distance(dec.piece(1), &col(&[I, c(1.0, 0.0)])) < 1e-12);
        assert!(subspace_distance(dec.piece(0), &col(&[-I, c(1.0, 0.0)])) < 1e-12);
        let r = verify_polarization(&dec, &phi);
        assert!(r.passed(), "{r:?}");
        assert!((r.min_eigenvalue - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lower_half_plane_fails_positivity() {
        let (phi, f) = elliptic_hs(-I).unwrap();
        let dec = decomposition_from_filtration(&f, &phi).unwrap();
        let r = verify_polarization(&dec, &phi);
        assert!(r.first && !r.second);
    }

    #[test]
    fn real_line_is_degenerate() {
        let phi = HodgeType::weight_one(1).unwrap();
        let f = HodgeFiltration::from_top(vec![col(&[c(1.0, 0.0), c(0.0, 0.0)])], &phi).unwrap();
        assert!(matches!(decomposition_from_filtration(&f, &phi), Err(Error::DegenerateFiltration(_))));
        assert!(matches!(elliptic_hs(c(1.0, 0.0)), Err(Error::RealTau)));
        assert!(matches!(jacobian_lattice(&phi, &f), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn round_trip() {
        let (phi, f) = elliptic_hs(c(0.3, 1.7)).unwrap();
        let dec = decomposition_from_filtration(&f, &phi).unwrap();
        let back = dec.to_filtration(&phi).unwrap();
        assert!(back.distance(&f) < SUBSPACE_TOL);
    }

    #[test]
    fn elliptic_real_structure_and_weil() {
        let (phi, f) = elliptic_hs(I).unwrap();
        let dec = decomposition_from_filtration(&f, &phi).unwrap();
        let rs = real_structure(&dec, &phi).unwrap();
        assert_eq!(rs.pieces.len(), 1);
        assert!(rs.relations.all_hold(), "{:?}", rs.relations);
        let cm = weil_operator(&dec, &phi).unwrap();
        // rotation by a quarter turn, with C^2 = -1
        assert!((&cm * &cm + DMatrix::identity(2, 2)).amax() < 1e-12);
        assert!(cm[(0, 0)].abs() < 1e-12 && (cm[(0, 1)].abs() - 1.0).abs() < 1e-12);
        let p = positive_form(&dec, &phi).unwrap();
        assert!(symmetric_eigenvalues(&p)[0] > 0.0);
    }

    #[test]
    fn middle_piece_only() {
        // weight 2, h = (0, 3, 0): C = Id with Psi = diag(1, 1, 1)
        let phi = HodgeType::weight_two(0, 3).unwrap();
        let id = CMatrix::identity(3, 3);
        let dec = HodgeDecomposition::new(vec![CMatrix::zeros(3, 0), id, CMatrix::zeros(3, 0)], &phi).unwrap();
        let cm = weil_operator(&dec, &phi).unwrap();
        assert!((cm - DMatrix::identity(3, 3)).amax() < 1e-12);
        assert!(real_structure(&dec, &phi).unwrap().relations.all_hold());
    }

    #[test]
    fn group_action_shear() {
        let tau = c(0.2, 1.1);
        let (phi, f) = elliptic_hs(tau).unwrap();
        let a = DMatrix::from_row_slice(2, 2, &[1i64, 1, 0, 1]);
        let g = group_element_action(&a, &f, &phi).unwrap();
        let (_, shifted) = elliptic_hs(tau + 1.0).unwrap();
        assert!(g.distance(&shifted) < 1e-12);
        let bad = DMatrix::from_row_slice(2, 2, &[2i64, 0, 0, 1]);
        assert_eq!(group_element_action(&bad, &f, &phi), Err(Error::NotInGroup));
        let id = DMatrix::<i64>::identity(2, 2);
        assert!(group_element_action(&id, &f, &phi).unwrap().distance(&f) < 1e-14);
    }

    #[test]
    fn elliptic_jacobian_lattice() {
        let (phi, f) = elliptic_hs(c(0.4, 0.9)).unwrap();
        let jl = jacobian_lattice(&phi, &f).unwrap();
        assert_eq!(jl.real_rank, 2);
        assert_eq!(jl.generators.shape(), (1, 2));
    }
}
