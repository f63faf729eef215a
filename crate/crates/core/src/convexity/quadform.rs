use super::rank::{refine_low_rank, sample_factors};
use crate::matcore::Mat;
use crate::optim::{lane_counts, lane_rng, map_indexed, map_lanes};
use crate::{Error, Result};

/// Sampled values below this count as negative.
pub const LAMBDA_CONVEX_TOL: f64 = 1e-10;

/// Quadratic form `Q(X) = xᵀ S x` on `m × n` matrices, `x` the row-major
/// flattening of `X` and `S` symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadForm {
    m: usize,
    n: usize,
    coeffs: Vec<f64>,
}

impl QuadForm {
    pub fn new(m: usize, n: usize, coeffs: Vec<f64>) -> Result<Self> {
        let d = m * n;
        if coeffs.len() != d * d {
            return Err(Error::Dimension(format!(
                "{} coefficients for a {d}-dimensional form",
                coeffs.len()
            )));
        }
        for i in 0..d {
            for j in 0..i {
                let (a, b) = (coeffs[i * d + j], coeffs[j * d + i]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::Precondition(format!(
                        "coefficient array not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { m, n, coeffs })
    }

    /// `Q(X) = s |X|²`.
    pub fn scaled_identity(m: usize, n: usize, s: f64) -> Self {
        let d = m * n;
        let mut coeffs = vec![0.0; d * d];
        for i in 0..d {
            coeffs[i * d + i] = s;
        }
        Self { m, n, coeffs }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn dim(&self) -> usize {
        self.m * self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Largest absolute coefficient.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn eval(&self, x: &Mat) -> f64 {
        debug_assert_eq!(x.shape(), (self.m, self.n));
        let v = x.as_slice();
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            if v[i] == 0.0 {
                continue;
            }
            let row = &self.coeffs[i * d..(i + 1) * d];
            acc += v[i] * row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        }
        acc
    }

    /// Smallest eigenvalue of the coefficient array (the minimum over all unit
    /// matrices, with no rank restriction).
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        nalgebra::DMatrix::from_row_slice(d, d, &self.coeffs)
            .symmetric_eigenvalues()
            .min()
    }
}

/// Smallest `Q(Y)` found over unit `Y` of rank at most `n − 1`.
///
/// Samples `samples` random directions on seeded lanes, then refines the
/// four best by a simplex search over low-rank factors. Lanes stop early once
/// they see a value below `−LAMBDA_CONVEX_TOL` when `stop_early` is set.
pub fn lambda_min_sampled(
    q: &QuadForm,
    samples: usize,
    seed: u64,
    stop_early: bool,
) -> (f64, Mat) {
    let (m, n) = q.shape();
    let r = (n - 1).max(1).min(m);
    let counts = lane_counts(samples);
    const KEEP: usize = 4;
    let lanes = map_lanes(|lane| {
        let mut rng = lane_rng(seed, lane);
        let mut kept: Vec<(f64, Mat, Mat)> = Vec::with_capacity(KEEP + 1);
        for _ in 0..counts[lane] {
            let (u, w) = sample_factors(m, n, r, &mut rng);
            let Some(y) = u.matmul(&w).normalized() else {
                continue;
            };
            let v = q.eval(&y);
            if kept.len() < KEEP || v < kept[KEEP - 1].0 {
                let pos = kept.partition_point(|c| c.0 <= v);
                kept.insert(pos, (v, u, w));
                kept.truncate(KEEP);
            }
            if stop_early && v < -LAMBDA_CONVEX_TOL {
                break;
            }
        }
        kept
    });
    let mut all: Vec<(f64, Mat, Mat)> = lanes.into_iter().flatten().collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    all.truncate(KEEP);
    if all.is_empty() {
        return (f64::INFINITY, Mat::zeros(m, n));
    }
    if stop_early && all[0].0 < -LAMBDA_CONVEX_TOL {
        let (v, u, w) = &all[0];
        return (*v, u.matmul(w).normalized().expect("nonzero sample"));
    }
    let evals = 200 * (m * r + r * n);
    map_indexed(all.len(), |i| {
        let (v0, u, w) = &all[i];
        let (v, y) = refine_low_rank(u, w, |y| q.eval(y), evals);
        if v < *v0 {
            (v, y)
        } else {
            (*v0, u.matmul(w).normalized().expect("nonzero sample"))
        }
    })
    .into_iter()
    .min_by(|a, b| a.0.total_cmp(&b.0))
    .expect("at least one candidate")
}

/// Whether `Q` is convex along every sampled rank-`(n − 1)` line, i.e.
/// `Q(Y) ≥ −LAMBDA_CONVEX_TOL` on sampled unit directions of rank `≤ n − 1`.
pub fn quadform_lambda_convex(q: &QuadForm, samples: usize, seed: u64) -> bool {
    lambda_min_sampled(q, samples, seed, true).0 >= -LAMBDA_CONVEX_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_negative_identity() {
        let q = QuadForm::scaled_identity(4, 3, 1.0);
        assert!(quadform_lambda_convex(&q, 2000, 1));
        let q = QuadForm::scaled_identity(4, 3, -1.0);
        assert!(!quadform_lambda_convex(&q, 2000, 1));
    }

    #[test]
    fn rejects_asymmetric() {
        let mut c = vec![0.0; 4];
        c[1] = 1.0;
        assert!(QuadForm::new(1, 2, c).is_err());
        assert!(QuadForm::new(1, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn eval_matches_identity() {
        let q = QuadForm::scaled_identity(2, 3, 2.5);
        let x = Mat::from_vec(2, 3, vec![1.0, -2.0, 0.5, 0.0, 3.0, 1.0]).unwrap();
        assert!((q.eval(&x) - 2.5 * x.norm_sq()).abs() < 1e-13);
    }

    #[test]
    fn rank_restriction_matters() {
        // Q(X) = −det X on 2×2 vanishes on rank-one matrices but has
        // eigenvalue −½ on the full space.
        let mut c = vec![0.0; 16];
        c[3] = -0.5;
        c[12] = -0.5;
        c[4 + 2] = 0.5;
        c[2 * 4 + 1] = 0.5;
        let q = QuadForm::new(2, 2, c).unwrap();
        let x = Mat::from_vec(2, 2, vec![1.0, 2.0, 3.0, 5.0]).unwrap();
        assert!((q.eval(&x) + (5.0 - 6.0)).abs() < 1e-14);
        assert!((q.min_eigenvalue() + 0.5).abs() < 1e-12);
        let (v, _) = lambda_min_sampled(&q, 4000, 9, false);
        assert!(v.abs() < 1e-12, "{v}");
        assert!(quadform_lambda_convex(&q, 4000, 9));
    }
}
