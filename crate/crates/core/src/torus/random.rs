use rand::Rng;
use rand_distr::StandardNormal;

use super::TrigMatField;
use crate::matcore::Mat;

fn gaussian<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Mat {
    let data = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    Mat::from_vec(m, n, data).expect("finite samples")
}

/// Replaces every row `r` of `c` by `r − (r·k / |k|²) k`, so that `c k = 0`.
fn annihilate(c: &mut Mat, k: &[f64]) {
    let kk: f64 = k.iter().map(|v| v * v).sum();
    for i in 0..c.rows() {
        let dot: f64 = c.row(i).iter().zip(k).map(|(a, b)| a * b).sum();
        for (j, kj) in k.iter().enumerate() {
            c[(i, j)] -= dot / kk * kj;
        }
    }
}

/// A random divergence-free field: `num_modes` draws of a nonzero frequency
/// with `|k|∞ ≤ max_freq` and Gaussian coefficients whose rows are projected
/// onto `k^⊥`. With `with_mean`, a Gaussian constant is added.
pub fn random_solenoidal<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    max_freq: i64,
    num_modes: usize,
    with_mean: bool,
    rng: &mut R,
) -> TrigMatField {
    assert!(max_freq >= 1, "max_freq must be at least 1");
    let mut field = TrigMatField::zero(m, n);
    for _ in 0..num_modes {
        let freq: Vec<i64> = loop {
            let k: Vec<i64> = (0..n).map(|_| rng.random_range(-max_freq..=max_freq)).collect();
            if k.iter().any(|v| *v != 0) {
                break k;
            }
        };
        let kf: Vec<f64> = freq.iter().map(|v| *v as f64).collect();
        let mut c = gaussian(m, n, rng);
        let mut s = gaussian(m, n, rng);
        annihilate(&mut c, &kf);
        annihilate(&mut s, &kf);
        field.add_mode(&freq, c, s).expect("shapes agree");
    }
    if with_mean {
        let c = gaussian(m, n, rng);
        field
            .add_mode(&vec![0; n], c, Mat::zeros(m, n))
            .expect("shapes agree");
    }
    field
}
