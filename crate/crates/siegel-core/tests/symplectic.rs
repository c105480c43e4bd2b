use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use siegel_core::linalg::{det_c, CMat};
use siegel_core::symplectic::*;
use siegel_core::SiegelError;

fn pt1(x: f64, y: f64) -> SiegelPoint {
    SiegelPoint::new(DMatrix::from_element(1, 1, x), DMatrix::from_element(1, 1, y)).unwrap()
}

fn random_point(n: usize, rng: &mut ChaCha8Rng) -> SiegelPoint {
    act(&random_symplectic(n, rng, 0.6), &SiegelPoint::base(n)).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn action_examples() {
    let g = SymplecticMatrix::identity(3);
    let z = SiegelPoint::base(3);
    assert!((act(&g, &z).unwrap().z() - z.z()).camax() < 1e-15);

    let t = SymplecticMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
    let w = act(&t, &pt1(0.0, 1.0)).unwrap();
    assert!((w.z()[(0, 0)] - Complex64::new(1.0, 1.0)).norm() < 1e-15);

    let w = act(&SymplecticMatrix::j(1), &pt1(0.0, 2.0)).unwrap();
    assert!((w.z()[(0, 0)] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
}

#[test]
fn point_validation() {
    let y = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
    assert!(matches!(SiegelPoint::new(DMatrix::zeros(2, 2), y), Err(SiegelError::Domain(_))));
    let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    assert!(SiegelPoint::new(x, DMatrix::identity(2, 2)).is_err());
}

#[test]
fn pair_examples() {
    let z = SiegelPoint::base(2);
    assert!(cross_ratio_spectrum(&z, &z).unwrap().rho.iter().all(|&v| v == 0.0));
    assert!(radial_coordinates(&z, &z).unwrap().r.iter().all(|&v| v == 0.0));
    assert_eq!(distance(&z, &z, DistanceConvention::Paper).unwrap(), 0.0);
    assert!((cosh_product(&z, &z).unwrap() - 1.0).abs() < 1e-15);

    // i e^{2r} against i
    let r = 0.7f64;
    let rho = cross_ratio_spectrum(&pt1(0.0, (2.0 * r).exp()), &pt1(0.0, 1.0)).unwrap().rho[0];
    assert!(rel(rho, r.tanh().powi(2)) < 1e-14);

    let e = std::f64::consts::E;
    let zd = SiegelPoint::imaginary_diagonal(&[e * e, e]).unwrap();
    let rv = radial_coordinates(&zd, &SiegelPoint::base(2)).unwrap();
    assert!((rv.r[0] - 1.0).abs() < 1e-13 && (rv.r[1] - 0.5).abs() < 1e-13, "{:?}", rv.r);

    for s in [0.0, 0.5, 1.0, 3.0, 10.0] {
        let c = cosh_product(&pt1(0.0, 1.0), &pt1(s, 1.0)).unwrap();
        assert!(rel(c, 4.0 / (s * s + 4.0)) < 1e-14, "s={s}");
    }
}

#[test]
fn cayley_examples() {
    for n in 1..=3 {
        assert!(cayley(&SiegelPoint::base(n)).unwrap().camax() < 1e-15);
        let back = inverse_cayley(&CMat::zeros(n, n)).unwrap();
        assert!((back.z() - SiegelPoint::base(n).z()).camax() < 1e-15);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=3 {
        let z = random_point(n, &mut rng);
        let back = inverse_cayley(&cayley(&z).unwrap()).unwrap();
        assert!((back.z() - z.z()).camax() < 1e-12 * (1.0 + z.z().camax()));
    }
}

#[test]
fn iwasawa_examples() {
    let h = iwasawa_a_part(&SymplecticMatrix::identity(2)).unwrap();
    assert!(h.iter().all(|v| v.abs() < 1e-15));
    let h = iwasawa_a_part(&SymplecticMatrix::diagonal_exp(&[1.0])).unwrap();
    assert!((h[0] - 1.0).abs() < 1e-14);
    let g = SymplecticMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0])).unwrap();
    // first column of g is k (e^H, 0), so e^H = sqrt(2)
    let h = iwasawa_a_part(&g).unwrap();
    assert!((h[0] - 0.5 * 2f64.ln()).abs() < 1e-14, "{h:?}");
}

#[test]
fn iwasawa_right_n_invariant_left_k_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 1..=3 {
        let g = random_symplectic(n, &mut rng, 0.5);
        let h0 = iwasawa_a_part(&g).unwrap();
        let k = siegel_core::integration::sample_unitary(n, &mut rng).1;
        let h1 = iwasawa_a_part(&k.compose(&g)).unwrap();
        for (a, b) in h0.iter().zip(&h1) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn laplacian_examples() {
    let one = |_: &SiegelPoint| Complex64::new(1.0, 0.0);
    for n in 1..=2 {
        let v = apply_maass_laplacian(one, &SiegelPoint::base(n), 0, 1e-3).unwrap();
        assert!(v.norm() < 1e-9);
    }
    let s = 1.7;
    let f = |p: &SiegelPoint| Complex64::new(p.y()[(0, 0)].powf(s), 0.0);
    let v = apply_maass_laplacian(f, &pt1(0.0, 1.0), 0, 1e-3).unwrap();
    assert!((v.re - s * (s - 1.0)).abs() < 1e-6);
    assert!(matches!(
        apply_maass_laplacian(f, &pt1(0.0, 1e-4), 0, 1e-3),
        Err(SiegelError::StepSize(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_point(n, &mut rng);
        let w = random_point(n, &mut rng);
        let g = random_symplectic(n, &mut rng, 0.6);
        let (gz, gw) = (act(&g, &z).unwrap(), act(&g, &w).unwrap());
        for c in [DistanceConvention::Paper, DistanceConvention::Metric] {
            let d0 = distance(&z, &w, c).unwrap();
            let d1 = distance(&gz, &gw, c).unwrap();
            prop_assert!((d0 - d1).abs() < 1e-9 * (1.0 + d0), "{d0} {d1}");
        }
        let a = cross_ratio_spectrum(&z, &w).unwrap().rho;
        let b = cross_ratio_spectrum(&w, &z).unwrap().rho;
        let c = cross_ratio_spectrum(&gz, &gw).unwrap().rho;
        for j in 0..n {
            prop_assert!((0.0..1.0).contains(&a[j]));
            prop_assert!((a[j] - b[j]).abs() < 1e-9 && (a[j] - c[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn cosh_product_matches_radial(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_point(n, &mut rng);
        let w = random_point(n, &mut rng);
        let r = radial_coordinates(&z, &w).unwrap();
        prop_assert!(r.canonical && r.r.windows(2).all(|p| p[0] >= p[1]));
        let direct: f64 = r.r.iter().map(|v| 1.0 / v.cosh().powi(2)).product();
        let c = cosh_product(&z, &w).unwrap();
        prop_assert!((c - direct).abs() < 1e-10 * direct.max(1e-300).max(c), "{c} {direct}");
    }

    #[test]
    fn action_composes(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_point(n, &mut rng);
        let g1 = random_symplectic(n, &mut rng, 0.4);
        let g2 = random_symplectic(n, &mut rng, 0.4);
        let a = act(&g1.compose(&g2), &z).unwrap().z();
        let b = act(&g1, &act(&g2, &z).unwrap()).unwrap().z();
        prop_assert!((&a - &b).camax() < 1e-10 * (1.0 + a.camax()));
        prop_assert!(symplectic_defect(g1.matrix()) < 1e-10);
    }

    #[test]
    fn imaginary_part_transforms(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_point(n, &mut rng);
        let g = random_symplectic(n, &mut rng, 0.5);
        let w = act(&g, &z).unwrap();
        let j = g.automorphy(&z);
        let expect = z.y().determinant() / det_c(&j).norm_sqr();
        let got = w.y().determinant();
        prop_assert!((got - expect).abs() < 1e-10 * expect.max(got), "{got} {expect}");
    }
}
