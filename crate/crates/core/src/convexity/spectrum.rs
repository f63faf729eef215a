use serde::{Deserialize, Serialize};

use crate::matcore::SpanBasis;
use crate::optim::{nelder_mead, SimplexOptions};
use crate::{Error, Result};

/// Summary of `σ_n(M(α))` over the unit sphere of coefficients `α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumScan {
    pub n: usize,
    pub m: usize,
    pub grid_resolution: usize,
    pub exclusion_radius: f64,
    /// Number of grid points outside the axis neighbourhoods.
    pub admissible_points: usize,
    /// Smallest `σ_n` on the admissible grid, before refinement.
    pub grid_min_sigma_n: f64,
    /// Smallest `σ_n` after local refinement; never above `grid_min_sigma_n`.
    pub min_sigma_n: f64,
    pub argmin_alpha: [f64; 3],
    /// `σ_n` at `e₁`, `e₂`, `e₃`.
    pub axis_sigmas: [f64; 3],
}

/// One point of a sphere scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub alpha: [f64; 3],
    pub sigma_n: f64,
    pub admissible: bool,
}

/// `count` nearly uniform points on the unit sphere.
pub fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Smallest (`n`-th) singular value of `M(α)`.
pub fn sigma_n(basis: &SpanBasis, alpha: [f64; 3]) -> f64 {
    let sv = basis.combo(alpha).singular_values();
    sv[basis.n() - 1]
}

/// Angular distance at least `exclusion` from all six signed axes.
fn admissible(alpha: &[f64; 3], exclusion: f64) -> bool {
    let c = exclusion.cos();
    alpha.iter().all(|a| a.abs() <= c)
}

fn unit(a: &[f64]) -> Option<[f64; 3]> {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    (n > 0.0).then(|| [a[0] / n, a[1] / n, a[2] / n])
}

fn check_args(grid_resolution: usize, exclusion: f64) -> Result<()> {
    if grid_resolution < 16 {
        return Err(Error::Precondition(format!(
            "grid resolution {grid_resolution} < 16"
        )));
    }
    if !(exclusion > 0.0 && exclusion < std::f64::consts::FRAC_PI_4) {
        return Err(Error::Precondition(format!(
            "exclusion radius {exclusion} outside (0, pi/4)"
        )));
    }
    Ok(())
}

/// `σ_n` at every point of the Fibonacci grid.
pub fn spectrum_samples(
    basis: &SpanBasis,
    grid_resolution: usize,
    exclusion: f64,
) -> Result<Vec<SpectrumSample>> {
    check_args(grid_resolution, exclusion)?;
    Ok(fibonacci_sphere(grid_resolution)
        .into_iter()
        .map(|alpha| SpectrumSample {
            alpha,
            sigma_n: sigma_n(basis, alpha),
            admissible: admissible(&alpha, exclusion),
        })
        .collect())
}

/// Scans the sphere, then refines the best few admissible grid points with
/// a simplex search constrained to the admissible region.
pub fn scan_axis_spectrum(
    basis: &SpanBasis,
    grid_resolution: usize,
    exclusion: f64,
) -> Result<SpectrumScan> {
    let samples = spectrum_samples(basis, grid_resolution, exclusion)?;
    let mut adm: Vec<&SpectrumSample> = samples.iter().filter(|s| s.admissible).collect();
    if adm.is_empty() {
        return Err(Error::Precondition("no admissible grid points".into()));
    }
    adm.sort_by(|a, b| a.sigma_n.total_cmp(&b.sigma_n));
    let grid_min = adm[0].sigma_n;

    let spacing = (4.0 * std::f64::consts::PI / grid_resolution as f64).sqrt();
    let objective = |a: &[f64]| match unit(a) {
        Some(u) if admissible(&u, exclusion) => sigma_n(basis, u),
        _ => f64::INFINITY,
    };
    let mut best = (grid_min, adm[0].alpha);
    for start in adm.iter().take(8) {
        let r = nelder_mead(
            objective,
            &start.alpha,
            SimplexOptions {
                initial_step: spacing,
                max_evals: 600,
                f_tol: 1e-15,
            },
        );
        if r.value < best.0 {
            best = (r.value, unit(&r.x).expect("finite value implies nonzero"));
        }
    }

    let axis_sigmas = [
        sigma_n(basis, [1.0, 0.0, 0.0]),
        sigma_n(basis, [0.0, 1.0, 0.0]),
        sigma_n(basis, [0.0, 0.0, 1.0]),
    ];
    Ok(SpectrumScan {
        n: basis.n(),
        m: basis.m(),
        grid_resolution,
        exclusion_radius: exclusion,
        admissible_points: adm.len(),
        grid_min_sigma_n: grid_min,
        min_sigma_n: best.0,
        argmin_alpha: best.1,
        axis_sigmas,
    })
}
