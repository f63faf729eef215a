use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqc_core::convexity::{
    default_rank_tol, find_k, line_convexity_defect, min_hess_defect, numeric_rank,
    quadform_lambda_convex, sample_low_rank, scan_axis_spectrum, search_radius, sigma_n,
    HessSearch, KBudget, LineGrid, QuadForm,
};
use sqc_core::matcore::{build_base_4x3, build_base_n, f_l, DiagRule, DiagSlot, Extension, ExtensionParams, Mat};
use sqc_core::tartar::random_quadform;

#[test]
fn generators_are_rank_deficient() {
    for n in 3..=7 {
        for rule in [DiagRule::Uniform(DiagSlot::Alpha1), DiagRule::Uniform(DiagSlot::Alpha2)] {
            let b = build_base_n(n, n + 1, &rule).unwrap();
            for g in b.generators() {
                let r = numeric_rank(g, default_rank_tol(n + 1, n));
                assert!(r < n, "n = {n}, rank {r}");
                if n == 3 {
                    assert_eq!(r, 2);
                }
            }
        }
    }
}

#[test]
fn off_axis_fullness_both_rules() {
    for n in 3..=6 {
        let rules: &[DiagRule] = if n == 3 {
            &[DiagRule::Uniform(DiagSlot::Alpha1)]
        } else {
            &[DiagRule::Uniform(DiagSlot::Alpha1), DiagRule::Uniform(DiagSlot::Alpha2)]
        };
        for rule in rules {
            let b = build_base_n(n, n + 1, rule).unwrap();
            let scan = scan_axis_spectrum(&b, 2048, 0.1).unwrap();
            assert!(scan.min_sigma_n > 10.0 * default_rank_tol(n + 1, n), "{scan:?}");
        }
    }
}

#[test]
fn sigma_n_vanishes_only_on_axes_along_a_great_circle() {
    // σ₃ along the circle through e₁ and e₂, brute force
    let b = build_base_4x3();
    for i in 1..100 {
        let t = i as f64 / 100.0 * std::f64::consts::FRAC_PI_2;
        assert!(sigma_n(&b, [t.cos(), t.sin(), 0.0]) > 0.0);
    }
    assert!(sigma_n(&b, [1.0, 0.0, 0.0]) < 1e-15);
}

#[test]
fn cubic_linear_along_each_generator_from_points_of_l() {
    let b = build_base_4x3();
    let g = |x: &Mat| f_l(&b.coords(x).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let a = b.combo(sample_low_rank(3, 1, 1, &mut rng).as_slice().try_into().unwrap());
        for v in b.generators() {
            let d = line_convexity_defect(g, &a, v, LineGrid::symmetric(1.0, 9));
            assert!(d.abs() <= 1e-12, "{d}");
        }
    }
}

#[test]
fn min_defect_monotone_in_k_at_fixed_pairs() {
    let b = build_base_4x3();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pairs: Vec<(Mat, Mat)> = (0..200)
        .map(|_| (sample_low_rank(4, 3, 3, &mut rng).scaled(3.0), sample_low_rank(4, 3, 2, &mut rng)))
        .collect();
    let mut prev = f64::NEG_INFINITY;
    for k in [0.0, 1.0, 10.0, 100.0, 1e3, 1e4] {
        let ext = Extension::new(&b, ExtensionParams::new(0.005, k).unwrap());
        let m = pairs
            .iter()
            .map(|(a, y)| ext.hess_form(a, y).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(m >= prev);
        prev = m;
    }
}

#[test]
fn no_penalty_no_convexity() {
    let b = build_base_4x3();
    let ext = Extension::new(&b, ExtensionParams::new(0.005, 0.0).unwrap());
    let search = HessSearch {
        search_radius: search_radius(&b, 0.005),
        samples: 20_000,
        restarts: 8,
        seed: 0,
    };
    assert!(min_hess_defect(&ext, &search).unwrap().value < 0.0);
}

#[test]
fn found_k_survives_an_independent_seed() {
    let b = build_base_4x3();
    let budget = KBudget {
        samples: 20_000,
        restarts: 8,
        seed: 3,
        max_doublings: 40,
    };
    let r = find_k(&b, 0.005, 1e-8, &budget).unwrap();
    assert!(r.success && r.k.is_finite(), "{r:?}");
    assert!(r.shell_min_defect >= 0.0);
    let ext = Extension::new(&b, ExtensionParams::new(0.005, r.k).unwrap());
    let again = min_hess_defect(
        &ext,
        &HessSearch {
            search_radius: r.search_radius,
            samples: 20_000,
            restarts: 8,
            seed: 4,
        },
    )
    .unwrap();
    assert!(again.value >= -1e-8, "{}", again.value);
    // the search does not overshoot by more than the lattice allows
    let half = Extension::new(&b, ExtensionParams::new(0.005, r.k / 2.0).unwrap());
    let below = min_hess_defect(
        &half,
        &HessSearch {
            search_radius: r.search_radius,
            samples: 20_000,
            restarts: 8,
            seed: 3,
        },
    )
    .unwrap();
    assert!(below.value < -1e-8);
}

#[test]
fn lambda_convexity_verdict_is_seed_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..10 {
        let q = random_quadform(4, 3, &mut rng);
        assert_eq!(
            quadform_lambda_convex(&q, 20_000, 0),
            quadform_lambda_convex(&q, 20_000, 1)
        );
    }
}

#[test]
fn lambda_convexity_controls() {
    assert!(quadform_lambda_convex(&QuadForm::scaled_identity(4, 3, 1.0), 10_000, 0));
    assert!(!quadform_lambda_convex(&QuadForm::scaled_identity(4, 3, -1.0), 10_000, 0));
}
