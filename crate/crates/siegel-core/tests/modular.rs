use num_complex::Complex64;
use proptest::prelude::*;
use siegel_core::modular::*;
use siegel_core::SiegelError;

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

fn mobius(g: &siegel_core::symplectic::SymplecticMatrix, z: Complex64) -> Complex64 {
    let m = g.matrix();
    (z * m[(0, 0)] + m[(0, 1)]) / (z * m[(1, 0)] + m[(1, 1)])
}

#[test]
fn tau_values() {
    let t = ramanujan_tau(12);
    assert_eq!(t, vec![1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944]);
    let q = delta_q_expansion(5);
    assert_eq!(q.weight, 12);
    assert_eq!(q.coefficients[..2], [1.0, -24.0]);
}

#[test]
fn tau_satisfies_hecke_relations() {
    let t = ramanujan_tau(200);
    let tau = |m: usize| t[m - 1];
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    for m in 2..=14 {
        for n in 2..=14 {
            if gcd(m, n) == 1 {
                assert_eq!(tau(m * n), tau(m) * tau(n), "m={m} n={n}");
            }
        }
    }
    // tau(p^{k+1}) = tau(p) tau(p^k) - p^11 tau(p^{k-1})
    for p in [2usize, 3, 5, 7, 11, 13] {
        let p11 = (p as i128).pow(11);
        let mut pk = p;
        while pk * p * p <= 200 {
            assert_eq!(tau(pk * p * p), tau(p) * tau(pk * p) - p11 * tau(pk), "p={p}");
            pk *= p;
        }
        assert_eq!(tau(p * p), tau(p) * tau(p) - p11);
    }
}

#[test]
fn delta_at_i() {
    let d = delta_cusp_form(c(0.0, 1.0), 100).unwrap();
    assert!(d.value.im.abs() < 1e-18);
    assert!((d.value.re - 0.0017853698).abs() < 1e-9, "{:?}", d.value);
    assert!(d.tail_bound <= 1e-10 * d.value.norm());
}

#[test]
fn delta_errors() {
    assert!(matches!(delta_cusp_form(c(0.0, 0.01), 200), Err(SiegelError::Domain(_))));
    assert!(matches!(delta_cusp_form(c(0.0, 1.0), 10), Err(SiegelError::Validation(_))));
    assert!(matches!(delta_cusp_form(c(0.0, 0.06), 50), Err(SiegelError::Numerical(_))));
}

#[test]
fn delta_is_modular() {
    let z = c(0.0, 2.0);
    let a = delta_cusp_form(-z.inv(), 200).unwrap().value;
    let b = z.powi(12) * delta_cusp_form(z, 200).unwrap().value;
    assert!((a - b).norm() < 1e-10 * b.norm(), "{a} {b}");
    for z in [c(0.3, 0.8), c(-0.41, 1.2), c(0.1, 0.5)] {
        let a = delta_cusp_form(z + 1.0, 200).unwrap().value;
        let b = delta_cusp_form(z, 200).unwrap().value;
        assert!((a - b).norm() < 1e-12 * b.norm());
    }
}

#[test]
fn petersson_examples() {
    let n = delta_petersson_norm_sq();
    assert!(n > 0.0);
    assert!((n - 1.035362056804322e-6).abs() < 1e-6 * n, "{n}");
    let fine = petersson_norm_sq_with(&delta_q_expansion(40), 1e-12).unwrap();
    assert!((fine - n).abs() < 1e-6 * n, "{fine} {n}");
    let twice = petersson_norm_sq(&delta_q_expansion(40).scaled(2.0)).unwrap();
    assert!((twice - 4.0 * n).abs() < 1e-9 * twice);
    let low = QExpansion { weight: 4, coefficients: vec![1.0] };
    assert!(petersson_norm_sq(&low).is_err());
}

#[test]
fn s12_invariance_and_decay() {
    let elems = sl2z_elements(3);
    for z in fundamental_domain_grid() {
        let s = s_kappa_direct(z, 12).unwrap();
        for g in elems.iter().step_by(7) {
            let w = mobius(g, z);
            if w.im < 0.06 {
                continue;
            }
            let t = s_kappa_direct(w, 12).unwrap();
            assert!((s - t).abs() < 1e-9 * s, "{z} -> {w}: {s} {t}");
        }
    }
    let top = s_kappa_direct(c(0.0, 20.0), 12).unwrap();
    assert!(top < 1e-80, "{top}");
    assert!(matches!(s_kappa_direct(c(0.0, 1.0), 10), Err(SiegelError::Unsupported(_))));
}

#[test]
fn eigen_check_at_ten_points() {
    let pts = [
        c(0.0, 1.1),
        c(0.2, 1.0),
        c(-0.3, 1.2),
        c(0.45, 1.5),
        c(0.1, 2.0),
        c(-0.1, 0.9),
        c(0.3, 0.7),
        c(0.0, 3.0),
        c(-0.45, 1.0),
        c(0.25, 1.6),
    ];
    let res = weight12_eigen_check(&pts, 1e-3).unwrap();
    assert_eq!(res.len(), 10);
    for r in res {
        assert!(r.rel_error < 1e-3, "{r:?}");
    }
}

#[test]
fn interior_maximum() {
    let f = |z: Complex64| z.im.powi(6) * delta_cusp_form(z, 200).unwrap().value.norm();
    let mut best = (0.0, c(0.0, 0.0));
    for i in 0..=20 {
        let x = -0.5 + i as f64 / 20.0;
        let y0 = (1.0 - x * x).sqrt();
        for j in 0..=80 {
            let z = c(x, y0 + j as f64 * (5.0 - y0) / 80.0);
            let v = f(z);
            if v > best.0 {
                best = (v, z);
            }
        }
    }
    assert!(best.1.im < 4.0);
    assert!(f(c(0.0, 5.0)) < 0.1 * best.0);
}

proptest! {
    #[test]
    fn reduction_lands_in_fundamental_domain(x in -5.0f64..5.0, y in 0.1f64..3.0) {
        let w = reduce_sl2z(c(x, y));
        prop_assert!(w.re.abs() <= 0.5 + 1e-12 && w.norm() >= 1.0 - 1e-12);
        let a = s_kappa_direct(c(x, y), 12).unwrap();
        let b = s_kappa_direct(w, 12).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * b.max(1e-300));
    }
}
