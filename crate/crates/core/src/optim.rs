//! Small numerical helpers shared by the scans: a derivative-free simplex
//! minimiser, compensated summation and seeded parallel lanes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result of [`nelder_mead`].
#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

/// Options for [`nelder_mead`].
#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub initial_step: f64,
    pub max_evals: usize,
    /// Stop when the spread of simplex values drops below this.
    pub f_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            max_evals: 4000,
            f_tol: 1e-14,
        }
    }
}

/// Nelder–Mead with the adaptive coefficients of Gao and Han, which behave
/// better than the classical ones in a dozen or more dimensions.
///
/// `f` may return `+∞` to mark infeasible points.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: SimplexOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert!(dim > 0);
    let d = dim as f64;
    let (alpha, gamma) = (1.0, 1.0 + 2.0 / d);
    let (rho, sigma) = (0.75 - 1.0 / (2.0 * d), 1.0 - 1.0 / d);

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        let step = if x[i].abs() > 1e-8 {
            opts.initial_step * x[i].abs().max(0.25)
        } else {
            opts.initial_step
        };
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let sort = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    sort(&mut simplex);

    let point = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect()
    };

    while evals < opts.max_evals {
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if worst.is_finite() && (worst - best).abs() <= opts.f_tol * (1.0 + best.abs()) {
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / d;
            }
        }
        let xw = simplex[dim].0.clone();
        let xr = point(&centroid, &xw, -alpha);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = point(&centroid, &xw, -alpha * gamma);
            let fe = eval(&xe, &mut evals);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            let outside = fr < worst;
            let xc = if outside {
                point(&centroid, &xw, -alpha * rho)
            } else {
                point(&centroid, &xw, rho)
            };
            let fc = eval(&xc, &mut evals);
            if (outside && fc <= fr) || (!outside && fc < worst) {
                simplex[dim] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let xs = point(&x_best, &entry.0, sigma);
                    let fs = eval(&xs, &mut evals);
                    *entry = (xs, fs);
                }
            }
        }
        sort(&mut simplex);
    }

    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, evals }
}

/// Neumaier-compensated sum; the result does not depend on how the terms
/// are grouped beyond the last few ulps.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        iter.into_iter().for_each(|v| s.add(v));
        s
    }
}

/// Number of independent random substreams per seeded sampling loop. Fixed so
/// that results do not depend on the machine's thread count.
pub const LANES: usize = 16;

/// The generator for one lane of a seeded loop.
pub fn lane_rng(seed: u64, lane: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(lane as u64 + 1);
    rng
}

/// Splits `total` items into [`LANES`] near-equal counts.
pub fn lane_counts(total: usize) -> Vec<usize> {
    (0..LANES)
        .map(|l| total / LANES + usize::from(l < total % LANES))
        .collect()
}

/// Maps `f` over the lanes, in parallel when the `parallel` feature is on.
/// Output order is lane order either way.
pub fn map_lanes<T, F>(f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..LANES).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..LANES).map(f).collect()
    }
}

/// Like [`map_lanes`] but over an arbitrary index range.
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}
