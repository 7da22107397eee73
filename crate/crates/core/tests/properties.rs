use periodlab_core::gauss_manin::{connection_matrix, transport};
use periodlab_core::griffiths::{
    base_point, classify_hermitian, domain_dims, lie_algebra_dim, lie_filtration_dims, HermitianCase,
};
use periodlab_core::hodge::{
    decomposition_from_filtration, elliptic_hs, group_element_action, real_structure, stabilizer_norm_bound,
    verify_polarization, weil_operator, HodgeType,
};
use periodlab_core::modular::{eisenstein_lattice, j_classical, weierstrass_g, Lattice};
use periodlab_core::numerics::{c, ParamPath};
use periodlab_core::periods::{discriminant_of, period_matrix, WeierstrassPoint};
use periodlab_core::poincare::{
    enumerate_cosets_sl2, estimate_decay, factor_cz_plus_d, is_in_gamma, poincare_series_uhp, sl2_elements, slash,
    GroupElement, Stabilizer,
};
use periodlab_core::Complex;
use proptest::prelude::*;

fn complex(re: std::ops::Range<f64>, im: std::ops::Range<f64>) -> impl Strategy<Value = Complex> {
    (re, im).prop_map(|(a, b)| c(a, b))
}

fn upper() -> impl Strategy<Value = Complex> {
    complex(-1.0..1.0, 0.5..2.0)
}

fn sl2() -> impl Strategy<Value = GroupElement> {
    let pool = sl2_elements(3);
    (0..pool.len()).prop_map(move |i| pool[i].clone())
}

fn rel(a: Complex, b: Complex) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn path_reversal_and_concat(
        a in complex(-2.0..2.0, -2.0..2.0),
        b in complex(-2.0..2.0, -2.0..2.0),
        d in complex(-2.0..2.0, -2.0..2.0),
    ) {
        let one = |_: &[Complex]| c(1.0, 0.0);
        let p = ParamPath::new(vec![vec![a], vec![b]], 0.5, one).unwrap();
        let q = ParamPath::new(vec![vec![b], vec![d]], 0.5, one).unwrap();
        prop_assert_eq!(p.reversed().reversed(), p.clone());
        let pq = p.concat(&q).unwrap();
        prop_assert!((pq.length() - p.length() - q.length()).abs() < 1e-12);
        prop_assert_eq!(pq.start(), p.start());
        prop_assert_eq!(pq.end(), q.end());
    }

    #[test]
    fn connection_is_trace_free(
        t2 in complex(-3.0..3.0, -1.0..1.0),
        t3 in complex(-3.0..3.0, -1.0..1.0),
        v2 in complex(-1.0..1.0, -1.0..1.0),
        v3 in complex(-1.0..1.0, -1.0..1.0),
    ) {
        let t = WeierstrassPoint::new(t2, t3);
        prop_assume!(t.discriminant().norm() > 1e-2);
        let a = connection_matrix(&t, [v2, v3]).unwrap();
        prop_assert!((a[(0, 0)] + a[(1, 1)]).norm() <= 1e-12 * (1.0 + a.iter().map(|z| z.norm()).fold(0.0, f64::max)));
    }

    #[test]
    fn eisenstein_scaling(tau in upper(), lambda in complex(0.5..2.0, -1.0..1.0), k in prop::sample::select(vec![4u32, 6, 8])) {
        let l = Lattice::from_tau(tau).unwrap();
        let e = eisenstein_lattice(k, &l, 1e-13).unwrap();
        let scaled = eisenstein_lattice(k, &l.scaled(lambda).unwrap(), 1e-13).unwrap();
        prop_assert!(rel(scaled, e * lambda.powi(-(k as i32))) < 1e-10);
        let (g4, g6) = weierstrass_g(&l, 1e-12).unwrap();
        let (h4, h6) = weierstrass_g(&l.scaled(lambda).unwrap(), 1e-12).unwrap();
        prop_assert!(rel(h4, g4 * lambda.powi(-4)) < 1e-10);
        prop_assert!(rel(h6, g6 * lambda.powi(-6)) < 1e-10 || g6.norm() < 1e-10);
    }

    #[test]
    fn j_is_modular_invariant(tau in upper(), a in sl2()) {
        let j0 = j_classical(tau).unwrap();
        let j1 = j_classical(a.mobius(tau)).unwrap();
        prop_assert!(rel(j1, j0) < 1e-9);
    }

    #[test]
    fn filtration_round_trip(tau in upper()) {
        let (phi, f) = elliptic_hs(tau).unwrap();
        let dec = decomposition_from_filtration(&f, &phi).unwrap();
        prop_assert!(dec.to_filtration(&phi).unwrap().distance(&f) < 1e-10);
        let rs = real_structure(&dec, &phi).unwrap();
        prop_assert!(rs.relations.all_hold());
    }

    #[test]
    fn polarization_is_group_invariant(tau in upper(), a in sl2()) {
        let (phi, f) = elliptic_hs(tau).unwrap();
        let moved = group_element_action(a.entries(), &f, &phi).unwrap();
        let dec = decomposition_from_filtration(&moved, &phi).unwrap();
        prop_assert!(verify_polarization(&dec, &phi).passed());
        prop_assert_eq!(domain_dims(&phi, &moved).unwrap(), domain_dims(&phi, &f).unwrap());
    }

    #[test]
    fn stabilizer_is_bounded(theta in 0.0..std::f64::consts::TAU) {
        // rotations fix the point i and preserve psi(x, Cx)
        let (phi, f) = elliptic_hs(c(0.0, 1.0)).unwrap();
        let dec = decomposition_from_filtration(&f, &phi).unwrap();
        let bound = stabilizer_norm_bound(&dec, &phi).unwrap();
        let rot = nalgebra::DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
        let cm = weil_operator(&dec, &phi).unwrap();
        prop_assert!((&rot * &cm - &cm * &rot).amax() < 1e-12);
        prop_assert!(rot.norm() / 2f64.sqrt() <= bound + 1e-12);
    }

    #[test]
    fn slash_composition(tau in upper(), a in sl2(), b in sl2(), n in -4i32..8) {
        let f = |z: Complex| (z * c(0.0, 1.0)).exp() + z * z;
        let left = slash(slash(f, n, a.clone(), factor_cz_plus_d), n, b.clone(), factor_cz_plus_d)(tau);
        let right = slash(f, n, a.mul(&b), factor_cz_plus_d)(tau);
        prop_assert!(rel(left, right) < 1e-12);
    }

    #[test]
    fn group_closure(i in 0usize..8, j in 0usize..8) {
        let fam = enumerate_cosets_sl2(Stabilizer::UpperTriangular, 2).unwrap();
        let psi = HodgeType::standard_symplectic(1);
        let (a, b) = (&fam.representatives[i], &fam.representatives[j]);
        prop_assert!(is_in_gamma(a.mul(b).entries(), &psi).unwrap());
        prop_assert!(is_in_gamma(a.inverse().entries(), &psi).unwrap());
        if i != j {
            prop_assert!(!fam.stabilizer.contains(&a.mul(&b.inverse())));
        }
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn determinant_is_constant_along_transport(
        d2 in complex(-0.8..0.8, -0.8..0.8),
        d3 in complex(-0.8..0.8, -0.8..0.8),
    ) {
        let a = WeierstrassPoint::base();
        let b = WeierstrassPoint::new(a.t2 + d2, a.t3 + d3);
        let path = ParamPath::new(vec![a.to_vec(), b.to_vec()], 1e-6, discriminant_of);
        prop_assume!(path.is_ok());
        let p0 = period_matrix(&a, 1e-12).unwrap();
        let p1 = transport(&path.unwrap(), &p0, 1e-11).unwrap();
        prop_assert!((p1.det() - p0.det()).norm() < 1e-8);
    }
}

#[test]
fn lie_filtration_is_monotone_and_complete() {
    let types = [
        HodgeType::weight_one(1).unwrap(),
        HodgeType::weight_one(2).unwrap(),
        HodgeType::weight_one(3).unwrap(),
        HodgeType::weight_two(1, 1).unwrap(),
        HodgeType::weight_two(1, 4).unwrap(),
        HodgeType::weight_three_cy().unwrap(),
    ];
    for phi in types {
        let dims = lie_filtration_dims(&base_point(&phi).unwrap(), &phi).unwrap();
        assert!(dims.windows(2).all(|w| w[0] <= w[1]), "{dims:?}");
        let mu = phi.mu();
        let closed = if phi.weight() % 2 == 1 { mu * (mu + 1) / 2 } else { mu * (mu - 1) / 2 };
        assert_eq!(*dims.last().unwrap(), closed);
        assert_eq!(lie_algebra_dim(&phi), closed);
    }
}

#[test]
fn hermitian_cases_have_full_horizontal_tangent() {
    let mut types: Vec<HodgeType> = (1..=3).map(|g| HodgeType::weight_one(g).unwrap()).collect();
    types.extend((0..=6).map(|b| HodgeType::weight_two(1, b).unwrap()));
    for phi in types {
        let r = domain_dims(&phi, &base_point(&phi).unwrap()).unwrap();
        assert_ne!(r.hermitian_case, HermitianCase::No);
        assert_eq!(r.dim_horizontal, r.dim_d, "{:?}", phi.hodge_numbers());
    }
    assert_eq!(classify_hermitian(2, &[2, 1, 2]), HermitianCase::No);
}

#[test]
fn weight_two_dimensions() {
    // h = (1, k, 1): D is a type IV domain of dimension k
    for k in 1..=5 {
        let phi = HodgeType::weight_two(1, k).unwrap();
        let r = domain_dims(&phi, &base_point(&phi).unwrap()).unwrap();
        assert_eq!((r.dim_d, r.dim_horizontal), (k, k));
    }
}

#[test]
fn shell_mass_decays_with_the_weight() {
    for n in [4, 6, 8] {
        let rep = poincare_series_uhp(|_| c(1.0, 0.0), n, c(0.1, 1.2), 256, 1e-4).unwrap();
        let slope = -estimate_decay(&rep.heights, &rep.shell_mass).unwrap();
        assert!((slope - (2 - n) as f64).abs() <= 0.5, "n = {n}: slope {slope}");
        assert!(rep.converged);
    }
}
