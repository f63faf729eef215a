//! Numeric ranks, low-rank direction sampling, line-convexity tests, sphere
//! scans of the generator pencil and the search for the penalty weight `k`.

mod kfind;
mod line;
mod quadform;
mod rank;
mod spectrum;

pub use kfind::{
    find_k, min_hess_defect, search_radius, trilinear_bound, HessDefectMin, HessSearch, KBudget,
    KSearchResult,
};
pub use line::{line_convexity_defect, LineGrid};
pub use quadform::{lambda_min_sampled, quadform_lambda_convex, QuadForm, LAMBDA_CONVEX_TOL};
pub use rank::{default_rank_tol, numeric_rank, refine_low_rank, sample_factors, sample_low_rank};
pub use spectrum::{
    fibonacci_sphere, scan_axis_spectrum, sigma_n, spectrum_samples, SpectrumSample, SpectrumScan,
};
