//! Quadratic forms that are convex along rank-`(n−1)` lines are quasiconvex
//! with respect to divergence-free fields. This module samples random forms,
//! filters them with [`quadform_lambda_convex`] and checks the defect of the
//! survivors on random solenoidal fields.
//!
//! For a quadratic `Q` and a field with modes `(k, C, S)`, the defect is
//! `½ Σ (Q(C) + Q(S))`, and every `C`, `S` annihilates its `k`, so it has
//! rank at most `n − 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::convexity::{quadform_lambda_convex, QuadForm};
use crate::matcore::Mat;
use crate::torus::{defect_of, random_solenoidal, required_nodes, Quadrature, TrigMatField};
use crate::{Error, Result};

/// Tolerance on `defect / scale` for accepted forms.
pub const TARTAR_TOL: f64 = 1e-8;
/// Tolerance on the defect of the convex controls `|X|²` and `|X|⁴`.
pub const CONTROL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TartarConfig {
    pub m: usize,
    pub n: usize,
    pub forms: usize,
    /// Direction samples per form for the rank-`(n−1)` filter.
    pub samples: usize,
    pub fields: usize,
    pub max_freq: i64,
    pub modes_per_field: usize,
    pub seed: u64,
}

impl Default for TartarConfig {
    fn default() -> Self {
        Self {
            m: 4,
            n: 3,
            forms: 100,
            samples: 100_000,
            fields: 20,
            max_freq: 2,
            modes_per_field: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TartarSummary {
    pub config: TartarConfig,
    pub accepted: usize,
    /// Accepted forms with a negative eigenvalue: convex on the cone but not
    /// convex outright.
    pub accepted_indefinite: usize,
    /// Smallest `defect / scale` over accepted forms and all fields.
    pub min_scaled_defect: f64,
    pub violations: usize,
    pub control_min_defect: f64,
    pub control_violations: usize,
}

/// A random symmetric form `N + cI`, `N` a scaled Gaussian symmetric array and
/// the shift `c` straddling `−λ_min(N)`, so that both definite and indefinite
/// forms occur.
pub fn random_quadform<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> QuadForm {
    let d = m * n;
    let mut g: Vec<f64> = (0..d * d).map(|_| rng.sample(StandardNormal)).collect();
    let norm = 1.0 / (2.0 * (d as f64).sqrt());
    for i in 0..d {
        for j in 0..i {
            let s = (g[i * d + j] + g[j * d + i]) * norm;
            g[i * d + j] = s;
            g[j * d + i] = s;
        }
        g[i * d + i] *= 2.0 * norm;
    }
    let base = QuadForm::new(m, n, g.clone()).expect("symmetric by construction");
    let lam = base.min_eigenvalue();
    let shift = -lam + rng.random_range(-0.5..0.25) * lam.abs();
    for i in 0..d {
        g[i * d + i] += shift;
    }
    QuadForm::new(m, n, g).expect("symmetric by construction")
}

fn field_energy(field: &TrigMatField) -> f64 {
    field
        .modes()
        .iter()
        .map(|md| md.cos.norm_sq() + md.sin.norm_sq())
        .sum()
}

pub fn tartar_suite(cfg: &TartarConfig) -> Result<TartarSummary> {
    if cfg.n < 2 || cfg.m < 1 {
        return Err(Error::Dimension(format!("{}x{} forms", cfg.m, cfg.n)));
    }
    if cfg.forms == 0 || cfg.fields == 0 || cfg.samples == 0 || cfg.max_freq < 1 {
        return Err(Error::Precondition("all counts must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let fields: Vec<TrigMatField> = (0..cfg.fields)
        .map(|_| random_solenoidal(cfg.m, cfg.n, cfg.max_freq, cfg.modes_per_field, true, &mut rng))
        .collect();
    let quad = |f: &TrigMatField, deg| Quadrature::exact(required_nodes(f, deg).max(2));

    let mut control_min = f64::INFINITY;
    let mut control_violations = 0;
    for f in &fields {
        for (g, deg) in [
            (&(|x: &Mat| x.norm_sq()) as &dyn Fn(&Mat) -> f64, 2),
            (&|x: &Mat| x.norm_sq().powi(2), 4),
        ] {
            let (integral, at_mean) = defect_of(f, g, deg, quad(f, deg))?;
            let d = integral - at_mean;
            control_min = control_min.min(d);
            if d < -CONTROL_TOL {
                control_violations += 1;
            }
        }
    }

    let mut summary = TartarSummary {
        config: *cfg,
        accepted: 0,
        accepted_indefinite: 0,
        min_scaled_defect: f64::INFINITY,
        violations: 0,
        control_min_defect: control_min,
        control_violations,
    };
    for i in 0..cfg.forms {
        let q = random_quadform(cfg.m, cfg.n, &mut rng);
        if !quadform_lambda_convex(&q, cfg.samples, cfg.seed.wrapping_add(1 + i as u64)) {
            continue;
        }
        summary.accepted += 1;
        if q.min_eigenvalue() < 0.0 {
            summary.accepted_indefinite += 1;
        }
        for f in &fields {
            let (integral, at_mean) = defect_of(f, |x| q.eval(x), 2, quad(f, 2))?;
            let scale = q.scale() * field_energy(f).max(1.0);
            let s = (integral - at_mean) / scale;
            summary.min_scaled_defect = summary.min_scaled_defect.min(s);
            if s < -TARTAR_TOL {
                summary.violations += 1;
            }
        }
    }
    Ok(summary)
}
