use rand::Rng;
use rand_distr::StandardNormal;

use crate::matcore::Mat;
use crate::optim::{nelder_mead, SimplexOptions};

/// Relative singular-value threshold used for rank decisions on `m × n` data.
pub fn default_rank_tol(m: usize, n: usize) -> f64 {
    1e-10 * m.max(n) as f64
}

/// Number of singular values above `tol · σ_max`; zero for the zero matrix.
pub fn numeric_rank(x: &Mat, tol: f64) -> usize {
    assert!(tol > 0.0, "rank tolerance must be positive");
    let sv = x.singular_values();
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * top).count()
}

/// Gaussian factors `U` (`m × r`) and `W` (`r × n`).
pub fn sample_factors<R: Rng + ?Sized>(m: usize, n: usize, r: usize, rng: &mut R) -> (Mat, Mat) {
    assert!(r >= 1 && r <= m.min(n), "rank {r} out of range for {m}x{n}");
    let mut draw = |rows, cols| {
        let data = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
        Mat::from_vec(rows, cols, data).expect("finite gaussian samples")
    };
    let u = draw(m, r);
    let w = draw(r, n);
    (u, w)
}

/// A unit-norm `m × n` matrix of rank at most `r`, drawn as a normalised
/// product of Gaussian factors.
pub fn sample_low_rank<R: Rng + ?Sized>(m: usize, n: usize, r: usize, rng: &mut R) -> Mat {
    loop {
        let (u, w) = sample_factors(m, n, r, rng);
        if let Some(y) = u.matmul(&w).normalized() {
            return y;
        }
    }
}

fn split_factors(p: &[f64], m: usize, n: usize, r: usize) -> Mat {
    let u = Mat::from_vec(m, r, p[..m * r].to_vec());
    let w = Mat::from_vec(r, n, p[m * r..].to_vec());
    match (u, w) {
        (Ok(u), Ok(w)) => u.matmul(&w),
        _ => Mat::zeros(m, n),
    }
}

/// Locally minimises `objective(UW / |UW|)` over the factors, starting from
/// `(u, w)`. Returns the best value and the unit direction attaining it.
pub fn refine_low_rank<F>(u: &Mat, w: &Mat, objective: F, max_evals: usize) -> (f64, Mat)
where
    F: Fn(&Mat) -> f64,
{
    let (m, r, n) = (u.rows(), u.cols(), w.cols());
    let mut p0 = u.as_slice().to_vec();
    p0.extend_from_slice(w.as_slice());
    let eval = |p: &[f64]| match split_factors(p, m, n, r).normalized() {
        Some(y) => objective(&y),
        None => f64::INFINITY,
    };
    let res = nelder_mead(
        eval,
        &p0,
        SimplexOptions {
            initial_step: 0.25,
            max_evals,
            f_tol: 1e-15,
        },
    );
    let y = split_factors(&res.x, m, n, r)
        .normalized()
        .unwrap_or_else(|| u.matmul(w).normalized().expect("nonzero start"));
    (objective(&y), y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{build_base_4x3, build_base_n, DiagRule};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Determinant by cofactor expansion; independent of the SVD path.
    fn det(x: &Mat) -> f64 {
        let k = x.rows();
        if k == 1 {
            return x[(0, 0)];
        }
        (0..k)
            .map(|j| {
                let mut sub = Vec::with_capacity((k - 1) * (k - 1));
                for i in 1..k {
                    for c in (0..k).filter(|c| *c != j) {
                        sub.push(x[(i, c)]);
                    }
                }
                let s = Mat::from_vec(k - 1, k - 1, sub).unwrap();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * x[(0, j)] * det(&s)
            })
            .sum()
    }

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = combinations(n - 1, k);
        for mut c in combinations(n - 1, k - 1) {
            c.push(n - 1);
            out.push(c);
        }
        out
    }

    #[test]
    fn ranks_of_generators() {
        let tol = 1e-10;
        assert_eq!(numeric_rank(&Mat::zeros(4, 3), tol), 0);
        let b = build_base_4x3();
        for g in b.generators() {
            assert_eq!(numeric_rank(g, tol), 2);
        }
        let b4 = build_base_n(4, 5, &DiagRule::default()).unwrap();
        let r: Vec<usize> = b4.generators().iter().map(|g| numeric_rank(g, tol)).collect();
        assert_eq!(r, vec![3, 2, 3]);
    }

    #[test]
    fn low_rank_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let y = sample_low_rank(4, 3, 1, &mut rng);
        assert_eq!(numeric_rank(&y, 1e-10), 1);
        let y = sample_low_rank(4, 3, 2, &mut rng);
        assert!(numeric_rank(&y, 1e-10) <= 2);
        assert!((y.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_three_samples_have_vanishing_4x4_minors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let y = sample_low_rank(5, 4, 3, &mut rng);
            for rows in combinations(5, 4) {
                let mut sub = Vec::new();
                for &i in &rows {
                    sub.extend_from_slice(y.row(i));
                }
                let d = det(&Mat::from_vec(4, 4, sub).unwrap());
                assert!(d.abs() < 1e-10, "minor {rows:?} = {d}");
            }
        }
    }

    #[test]
    fn refinement_improves_rayleigh_quotient() {
        // minimise -X[0][0]² over unit rank-1 matrices: optimum −1.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (u, w) = sample_factors(3, 3, 1, &mut rng);
        let (v, y) = refine_low_rank(&u, &w, |y| -y[(0, 0)] * y[(0, 0)], 4000);
        assert!(v < -1.0 + 1e-8, "{v}");
        assert!((y.norm() - 1.0).abs() < 1e-12);
    }
}
