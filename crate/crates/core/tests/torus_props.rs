use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqc_core::matcore::{build_base_4x3, build_base_n, DiagRule, ExtensionParams, Mat};
use sqc_core::torus::{
    build_b3, build_bn, check_div_free, defect_of, integrate_composed, moments, random_solenoidal,
    required_nodes, sq_defect, Quadrature, TrigMatField,
};

#[test]
fn n4_and_n5_fields_are_solenoidal_and_in_l() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in [4, 5] {
        let b = build_base_n(n, n + 1, &DiagRule::default()).unwrap();
        let f = build_bn(&b);
        assert!(check_div_free(&f));
        assert_eq!(f.mean(), Mat::zeros(n + 1, n));
        for _ in 0..100 {
            let x: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            let v = f.eval(&x);
            let p = b.project(&v).unwrap();
            assert!((&v - &p).norm() <= 1e-12);
        }
    }
    let b3 = build_base_4x3();
    assert_eq!(build_bn(&b3), build_b3());
}

#[test]
fn higher_dimensional_moments() {
    // |V₁|² = 3, |V₂|² = 2, |V₃|² = 5 for n = 4; each ∫cos² = ½ and
    // ∫cos⁴ = 3/8, ∫cos²cos² = ¼ for distinct modes.
    let b = build_base_n(4, 5, &DiagRule::default()).unwrap();
    let mo = moments(&build_bn(&b), &b, 16).unwrap();
    let w = [3.0, 2.0, 5.0];
    let i4: f64 = w.iter().map(|x| x * x * 3.0 / 8.0).sum::<f64>()
        + 2.0 * (w[0] * w[1] + w[0] * w[2] + w[1] * w[2]) / 4.0;
    assert!((mo.i0 + 0.25).abs() < 1e-12);
    assert!((mo.i2 - 5.0).abs() < 1e-12);
    assert!((mo.i4 - i4).abs() < 1e-12, "{} vs {i4}", mo.i4);
}

#[test]
fn quadrature_negative_control() {
    let f = build_b3();
    let quartic = |x: &Mat| x.norm_sq().powi(2);
    let need = required_nodes(&f, 4);
    let exact = integrate_composed(&f, quartic, 4, Quadrature::exact(need)).unwrap();
    assert!((exact - 19.0).abs() < 1e-12);
    let halved = integrate_composed(&f, quartic, 4, Quadrature::inexact(need / 2)).unwrap();
    assert!((halved - 19.0).abs() > 1e-3);
    // doubling nodes leaves the result unchanged
    let doubled = integrate_composed(&f, quartic, 4, Quadrature::exact(2 * need)).unwrap();
    assert!((doubled - exact).abs() < 1e-12);
}

#[test]
fn defect_is_affine_in_epsilon() {
    let b = build_base_4x3();
    let f = build_b3();
    let d = |e: f64| sq_defect(&b, ExtensionParams::new(e, 0.0).unwrap(), &f, 16).unwrap().defect;
    let (d1, d2) = (d(0.001), d(0.003));
    let slope = (d2 - d1) / 0.002;
    assert!((slope - 23.0).abs() < 1e-8);
    assert!((d1 - slope * 0.001 + 0.25).abs() < 1e-12);
    assert!(d(0.25 / 23.0 + 1e-9) >= 0.0);
}

#[test]
fn defect_uses_f_of_mean() {
    let b = build_base_4x3();
    let c = b.combo([0.5, -0.2, 0.3]);
    let f = build_b3().plus(&TrigMatField::constant(c.clone())).unwrap();
    let p = ExtensionParams::new(0.01, 0.0).unwrap();
    let r = sq_defect(&b, p, &f, 16).unwrap();
    let ext = sqc_core::Extension::new(&b, p);
    assert_eq!(r.f_at_mean, ext.value(&c).unwrap());
}

#[test]
fn jensen_for_convex_controls() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let f = random_solenoidal(4, 3, 2, 3, true, &mut rng);
        for (deg, g) in [
            (2usize, &(|x: &Mat| x.norm_sq()) as &dyn Fn(&Mat) -> f64),
            (4, &|x: &Mat| x.norm_sq().powi(2)),
        ] {
            let (i, m) = defect_of(&f, g, deg, Quadrature::exact(required_nodes(&f, deg))).unwrap();
            assert!(i - m >= -1e-10, "{}", i - m);
        }
    }
}
