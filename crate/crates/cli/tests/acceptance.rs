//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! fails. Run with `cargo test -p sqc-cli --test acceptance`.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sqc_core::convexity::{
    default_rank_tol, find_k, line_convexity_defect, min_hess_defect, numeric_rank,
    scan_axis_spectrum, search_radius, HessSearch, KBudget, LineGrid,
};
use sqc_core::matcore::{build_base_4x3, build_base_n, f_l, DiagRule, Mat};
use sqc_core::tartar::{tartar_suite, TartarConfig, CONTROL_TOL, TARTAR_TOL};
use sqc_core::torus::{build_b3, check_div_free, choose_epsilon, moments, sq_defect};
use sqc_core::{Extension, ExtensionParams};

/// `k` found for `ε = 0.005` at the full budget with seed 0.
const GOLDEN_K_N3: f64 = 31000.0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn gaussian(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Mat {
    Mat::from_vec(m, n, (0..m * n).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
}

fn moment_values() -> Outcome {
    let start = Instant::now();
    let mo = moments(&build_b3(), &build_base_4x3(), 16).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ok = (mo.i0 + 0.25).abs() <= 1e-10
        && (mo.i2 - 4.0).abs() <= 1e-10
        && (mo.i4 - 19.0).abs() <= 1e-10
        && secs < 1.0;
    outcome(
        ok,
        format!("I0 = {:.12}, I2 = {:.12}, I4 = {:.12}, {secs:.3} s", mo.i0, mo.i2, mo.i4),
    )
}

fn structural_checks() -> Outcome {
    let b = build_b3();
    let basis = build_base_4x3();
    let mean_zero = b.mean() == Mat::zeros(4, 3);
    let div_free = check_div_free(&b);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
        let v = b.eval(&x);
        worst = worst.max((&v - &basis.project(&v).unwrap()).norm());
    }
    outcome(
        mean_zero && div_free && worst <= 1e-12,
        format!("mean zero {mean_zero}, divergence-free {div_free}, max |B - PB| = {worst:.2e}"),
    )
}

fn counterexample_defect() -> Outcome {
    let basis = build_base_4x3();
    let b = build_b3();
    let defects: Vec<f64> = [0.0, 1.0, 1e3]
        .iter()
        .map(|&k| {
            sq_defect(&basis, ExtensionParams::new(0.005, k).unwrap(), &b, 16)
                .unwrap()
                .defect
        })
        .collect();
    let spread = defects.iter().map(|d| (d - defects[0]).abs()).fold(0.0, f64::max);
    outcome(
        (defects[0] + 0.135).abs() <= 1e-9 && spread <= 1e-12,
        format!("defect {:.12} at k = 0, spread over k in {{0, 1, 1e3}} = {spread:.1e}", defects[0]),
    )
}

fn epsilon_selection() -> Outcome {
    let basis = build_base_4x3();
    let b = build_b3();
    let eps = choose_epsilon(&b, &basis, 0.5).unwrap();
    let mo = moments(&b, &basis, 16).unwrap();
    let margin = -mo.defect_at(eps);
    outcome(
        (eps - 0.25 / 46.0).abs() <= 1e-9 && (margin - 0.125).abs() <= 1e-9,
        format!("epsilon = {eps:.10}, margin = {margin:.12}"),
    )
}

fn rank_spectrum() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 3..=6 {
        let start = Instant::now();
        let basis = build_base_n(n, n + 1, &DiagRule::default()).unwrap();
        let coarse = scan_axis_spectrum(&basis, 4096, 0.1).unwrap();
        let fine = scan_axis_spectrum(&basis, 8192, 0.1).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let drift = (coarse.min_sigma_n - fine.min_sigma_n).abs() / coarse.min_sigma_n;
        let axes = coarse.axis_sigmas.iter().fold(0.0f64, |a, s| a.max(*s));
        ok &= coarse.min_sigma_n > 0.0 && drift <= 0.05 && axes <= 1e-12 && secs < 30.0;
        parts.push(format!(
            "n={n}: min {:.4e}, drift {:.1}%, axes {axes:.0e}, {secs:.1} s",
            coarse.min_sigma_n,
            100.0 * drift
        ));
    }
    let b4 = build_base_n(4, 5, &DiagRule::default()).unwrap();
    let tol = default_rank_tol(5, 4);
    let ranks = [0, 1, 2].map(|i| numeric_rank(b4.generator(i), tol));
    ok &= ranks == [3, 2, 3];
    parts.push(format!("n=4 ranks {ranks:?}"));
    outcome(ok, parts.join("; "))
}

fn k_certification() -> Outcome {
    let basis = build_base_4x3();
    let start = Instant::now();
    let r = find_k(&basis, 0.005, 1e-8, &KBudget::default()).unwrap();
    let ext = Extension::new(&basis, ExtensionParams::new(0.005, r.k).unwrap());
    let recheck = min_hess_defect(
        &ext,
        &HessSearch {
            search_radius: search_radius(&basis, 0.005),
            samples: 100_000,
            restarts: 32,
            seed: 1,
        },
    )
    .unwrap()
    .value;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        r.success && r.k.is_finite() && recheck >= -1e-8 && r.k == GOLDEN_K_N3,
        format!(
            "k = {} (golden {GOLDEN_K_N3}), min defect {:.3e}, seed-1 recheck {recheck:.3e}, {secs:.1} s",
            r.k, r.min_defect
        ),
    )
}

fn derivative_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, m) in [(3, 4), (4, 5)] {
        let basis = build_base_n(n, m, &DiagRule::default()).unwrap();
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let eps = 10f64.powf(rng.random_range(-3.0..0.0));
            let k = rng.random_range(0.0..10.0);
            let ext = Extension::new(&basis, ExtensionParams::new(eps, k).unwrap());
            let a = gaussian(&mut rng, m, n).normalized().unwrap().scaled(rng.random_range(0.0..2.0));
            let y = gaussian(&mut rng, m, n).normalized().unwrap();
            let h = 1e-4;
            let at = |t: f64| {
                let mut x = a.clone();
                x.axpy(t, &y);
                ext.value(&x).unwrap()
            };
            let fd = (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h);
            let exact = ext.hess_form(&a, &y).unwrap();
            worst = worst.max((exact - fd).abs() / exact.abs().max(1.0));
        }
        ok &= worst <= 1e-6;
        parts.push(format!("n={n}: worst relative error {worst:.2e}"));
    }
    outcome(ok, parts.join("; "))
}

fn linearity_on_span() -> Outcome {
    let basis = build_base_4x3();
    let g = |x: &Mat| f_l(&basis.coords(x).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for i in 0..3 {
        for _ in 0..10 {
            let a = gaussian(&mut rng, 4, 3);
            let d = line_convexity_defect(g, &a, basis.generator(i), LineGrid::symmetric(1.0, 21));
            worst = worst.max(d.abs());
        }
    }
    outcome(worst <= 1e-12, format!("max |second difference| = {worst:.2e}"))
}

fn tartar_remark() -> Outcome {
    let start = Instant::now();
    let s = tartar_suite(&TartarConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        s.violations == 0
            && s.control_violations == 0
            && s.min_scaled_defect >= -TARTAR_TOL
            && s.control_min_defect >= -CONTROL_TOL
            && secs < 60.0,
        format!(
            "{} of 100 forms accepted ({} indefinite), min scaled defect {:.3e}, control min {:.3e}, {secs:.1} s",
            s.accepted, s.accepted_indefinite, s.min_scaled_defect, s.control_min_defect
        ),
    )
}

fn end_to_end() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, m) in [(3, 4), (4, 5)] {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_sqc"))
                .args(["certify", "--n", &n.to_string(), "--m", &m.to_string(), "--seed", "0"])
                .output()
                .expect("binary runs")
        };
        let (first, second) = (run(), run());
        let masked = |out: &std::process::Output| {
            String::from_utf8_lossy(&out.stdout)
                .lines()
                .filter(|l| !l.trim_start().starts_with("\"wall_time_s\""))
                .collect::<Vec<_>>()
                .join("\n")
        };
        let certified = masked(&first).contains("\"verdict\": \"counterexample-certified\"");
        let exits = (first.status.code(), second.status.code());
        let identical = masked(&first) == masked(&second);
        ok &= exits == (Some(0), Some(0)) && certified && identical;
        parts.push(format!(
            "n={n}: exits {:?}/{:?}, certified {certified}, identical {identical}",
            exits.0, exits.1
        ));
    }
    outcome(ok, parts.join("; "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("moment values", moment_values),
        ("structural checks", structural_checks),
        ("counterexample defect", counterexample_defect),
        ("epsilon selection", epsilon_selection),
        ("rank spectrum", rank_spectrum),
        ("k certification", k_certification),
        ("derivative oracle", derivative_oracle),
        ("linearity on span axes", linearity_on_span),
        ("quadratic forms on solenoidal fields", tartar_remark),
        ("end-to-end certify", end_to_end),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {} [{:.1} s]",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
