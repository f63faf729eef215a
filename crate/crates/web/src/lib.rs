//! WebAssembly bindings for the browser demo.
//!
//! Every export returns a flat `Float64Array`; the layouts are documented on
//! the native functions, which carry the logic and are tested without a
//! browser.

use sqc_core::convexity::{scan_axis_spectrum, spectrum_samples};
use sqc_core::matcore::{build_base_n, DiagRule, SpanBasis};
use sqc_core::torus::{build_bn, moments, DEFAULT_NODES};
use sqc_core::{Extension, ExtensionParams};
use wasm_bindgen::prelude::*;

fn basis(n: usize, diag_rule: &str) -> Result<SpanBasis, String> {
    let rule: DiagRule = diag_rule.parse().map_err(|e: sqc_core::Error| e.to_string())?;
    build_base_n(n, n + 1, &rule).map_err(|e| e.to_string())
}

/// `σ_n` over a Fibonacci grid of the coefficient sphere.
///
/// Layout: a header `[min_sigma_n, argmin α₁, α₂, α₃]` (refined minimum over
/// the admissible region), then five values per grid point:
/// `α₁, α₂, α₃, σ_n, admissible (1 or 0)`.
pub fn sigma_map_native(
    n: usize,
    diag_rule: &str,
    grid: usize,
    exclusion: f64,
) -> Result<Vec<f64>, String> {
    let b = basis(n, diag_rule)?;
    let scan = scan_axis_spectrum(&b, grid, exclusion).map_err(|e| e.to_string())?;
    let samples = spectrum_samples(&b, grid, exclusion).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(4 + 5 * samples.len());
    out.push(scan.min_sigma_n);
    out.extend_from_slice(&scan.argmin_alpha);
    for s in samples {
        out.extend_from_slice(&s.alpha);
        out.push(s.sigma_n);
        out.push(if s.admissible { 1.0 } else { 0.0 });
    }
    Ok(out)
}

/// The defect `∫F(B) dx` of the canonical field as a function of `ε`.
///
/// The defect is affine in `ε`: `I₀ + ε (I₂ + I₄)`. Layout: a header
/// `[I₀, I₂, I₄, ε*]` with `ε*` the zero crossing, then `(ε, defect)` pairs
/// at `points` equally spaced `ε ∈ [0, eps_max]`.
pub fn defect_curve_native(
    n: usize,
    diag_rule: &str,
    eps_max: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    if !(eps_max > 0.0 && eps_max.is_finite()) || points < 2 {
        return Err("need eps_max > 0 and at least two points".into());
    }
    let b = basis(n, diag_rule)?;
    let mo = moments(&build_bn(&b), &b, DEFAULT_NODES).map_err(|e| e.to_string())?;
    let mut out = vec![mo.i0, mo.i2, mo.i4, -mo.i0 / (mo.i2 + mo.i4)];
    for i in 0..points {
        let eps = eps_max * i as f64 / (points - 1) as f64;
        out.push(eps);
        out.push(mo.defect_at(eps));
    }
    Ok(out)
}

/// `F(B(x))` on the `(x₁, x₃)` torus slice, the only axes the canonical field
/// depends on.
///
/// Layout: `[mean, min, max]`, then `resolution²` values in row-major order
/// with `x₃` along rows and `x₁` along columns, sampled at cell corners
/// `j / resolution`. On this grid the mean equals the integral exactly once
/// `resolution ≥ 5`.
pub fn f_slice_native(
    n: usize,
    diag_rule: &str,
    epsilon: f64,
    k: f64,
    resolution: usize,
) -> Result<Vec<f64>, String> {
    if resolution < 2 {
        return Err("resolution must be at least 2".into());
    }
    let b = basis(n, diag_rule)?;
    let params = ExtensionParams::new(epsilon, k).map_err(|e| e.to_string())?;
    let ext = Extension::new(&b, params);
    let field = build_bn(&b);
    let mut x = vec![0.0; n];
    let mut values = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        x[2] = row as f64 / resolution as f64;
        for col in 0..resolution {
            x[0] = col as f64 / resolution as f64;
            values.push(ext.value(&field.eval(&x)).map_err(|e| e.to_string())?);
        }
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = vec![mean, min, max];
    out.extend(values);
    Ok(out)
}

#[wasm_bindgen]
pub fn sigma_map(n: usize, diag_rule: &str, grid: usize, exclusion: f64) -> Result<Vec<f64>, JsError> {
    sigma_map_native(n, diag_rule, grid, exclusion).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn defect_curve(n: usize, diag_rule: &str, eps_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    defect_curve_native(n, diag_rule, eps_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn f_slice(
    n: usize,
    diag_rule: &str,
    epsilon: f64,
    k: f64,
    resolution: usize,
) -> Result<Vec<f64>, JsError> {
    f_slice_native(n, diag_rule, epsilon, k, resolution).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_map_layout() {
        let v = sigma_map_native(3, "alpha1", 256, 0.1).unwrap();
        assert_eq!(v.len(), 4 + 5 * 256);
        assert!(v[0] > 0.0);
        let rows = v[4..].chunks(5);
        let adm_min = rows
            .filter(|r| r[4] == 1.0)
            .map(|r| r[3])
            .fold(f64::INFINITY, f64::min);
        assert!(v[0] <= adm_min);
    }

    #[test]
    fn defect_curve_is_affine_with_known_moments() {
        let v = defect_curve_native(3, "alpha1", 0.02, 5).unwrap();
        assert!((v[0] + 0.25).abs() < 1e-12);
        assert!((v[3] - 0.25 / 23.0).abs() < 1e-12);
        assert_eq!(v[4], 0.0);
        assert!((v[5] + 0.25).abs() < 1e-12);
        // ε = 0.005 is the second sample
        assert!((v[7] + 0.135).abs() < 1e-12);
        assert!(defect_curve_native(3, "alpha1", 0.0, 5).is_err());
    }

    #[test]
    fn slice_mean_is_the_integral() {
        let v = f_slice_native(3, "alpha1", 0.005, 0.0, 16).unwrap();
        assert_eq!(v.len(), 3 + 256);
        assert!((v[0] + 0.135).abs() < 1e-12, "{}", v[0]);
        assert!(v[1] <= v[0] && v[0] <= v[2]);
        // penalty vanishes on the span, so k does not matter
        let w = f_slice_native(3, "alpha1", 0.005, 1e4, 16).unwrap();
        assert!((w[0] - v[0]).abs() < 1e-12);
    }

    #[test]
    fn bad_inputs() {
        assert!(sigma_map_native(2, "alpha1", 256, 0.1).is_err());
        assert!(sigma_map_native(4, "3", 256, 0.1).is_err());
        assert!(f_slice_native(3, "alpha1", -1.0, 0.0, 8).is_err());
    }
}
