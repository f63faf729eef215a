use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::rank::{refine_low_rank, sample_factors};
use crate::matcore::{Extension, ExtensionParams, Mat, SpanBasis};
use crate::optim::{lane_counts, lane_rng, map_indexed, map_lanes};
use crate::{Error, Result};

/// Sampling budget for [`min_hess_defect`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessSearch {
    /// Random base points are drawn from the ball `|A| ≤ search_radius`.
    pub search_radius: f64,
    pub samples: usize,
    pub restarts: usize,
    pub seed: u64,
}

/// Smallest second directional derivative found, with the pair attaining it.
#[derive(Clone, Debug)]
pub struct HessDefectMin {
    pub value: f64,
    pub a: Mat,
    pub y: Mat,
}

/// Per-term bound `κ` with `|ηᵢ(A) ηⱼ(Y) ηₗ(Y)| ≤ κ |A| |Y|²`.
///
/// `ηᵢ(X) = ⟨X, Dᵢ⟩` with `|Dᵢ|² = (G⁻¹)ᵢᵢ`, so `κ = max (G⁻¹)ᵢᵢ^{3/2}`.
pub fn trilinear_bound(basis: &SpanBasis) -> f64 {
    let gi = basis.gram_inverse();
    (0..3).map(|i| gi[i][i]).fold(0.0, f64::max).powf(1.5)
}

/// Radius beyond which `4ε|A|²|Y|²` dominates the cubic part `6κ|A||Y|²`
/// of the second derivative: `R = 1 + 3κ / (2ε)`.
pub fn search_radius(basis: &SpanBasis, epsilon: f64) -> f64 {
    1.0 + 3.0 * trilinear_bound(basis) / (2.0 * epsilon)
}

fn random_in_ball<R: Rng + ?Sized>(m: usize, n: usize, radius: f64, rng: &mut R) -> Mat {
    let dim = (m * n) as f64;
    let mut x = Mat::zeros(m, n);
    x.as_mut_slice()
        .iter_mut()
        .for_each(|v| *v = rng.sample(StandardNormal));
    let scale = radius * rng.random::<f64>().powf(1.0 / dim) / x.norm().max(f64::MIN_POSITIVE);
    x.scaled(scale)
}

struct Candidate {
    value: f64,
    u: Mat,
    w: Mat,
}

struct LaneResult {
    best: Option<(f64, Mat, Mat)>,
    candidates: Vec<Candidate>,
}

/// Minimises `D²F(A)[Y, Y]` over base points `A` and unit directions `Y` of
/// rank at most `n − 1`.
///
/// Random pairs `(A, Y)` are drawn with `|A| ≤ search_radius`. For every
/// sampled `Y` the exact minimiser over all `A` is evaluated as well, and the
/// `restarts` most negative directions are refined by a simplex search over
/// low-rank factors of `Y`. Sampling runs on fixed seeded lanes, so the result
/// depends only on the inputs.
pub fn min_hess_defect(ext: &Extension<'_>, search: &HessSearch) -> Result<HessDefectMin> {
    if search.search_radius.is_nan() || search.search_radius <= 0.0 {
        return Err(Error::Precondition("search radius must be positive".into()));
    }
    if search.samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let (m, n) = (ext.basis.m(), ext.basis.n());
    let r = n - 1;
    let keep = search.restarts;
    let counts = lane_counts(search.samples);

    let lanes = map_lanes(|lane| {
        let mut rng = lane_rng(search.seed, lane);
        let mut out = LaneResult {
            best: None,
            candidates: Vec::with_capacity(keep + 1),
        };
        for _ in 0..counts[lane] {
            let (u, w) = sample_factors(m, n, r, &mut rng);
            let Some(y) = u.matmul(&w).normalized() else {
                continue;
            };
            let a = random_in_ball(m, n, search.search_radius, &mut rng);
            let sampled = ext.hess_form_unchecked(&a, &y);
            if out.best.as_ref().is_none_or(|b| sampled < b.0) {
                out.best = Some((sampled, a, y.clone()));
            }
            if keep > 0 {
                let value = ext.min_over_base_unit(&y);
                if out.candidates.len() < keep || value < out.candidates[keep - 1].value {
                    let pos = out.candidates.partition_point(|c| c.value <= value);
                    out.candidates.insert(pos, Candidate { value, u, w });
                    out.candidates.truncate(keep);
                }
            }
        }
        out
    });

    let mut best: Option<(f64, Mat, Mat)> = None;
    let mut candidates = Vec::new();
    for lane in lanes {
        if let Some(b) = lane.best {
            if best.as_ref().is_none_or(|cur| b.0 < cur.0) {
                best = Some(b);
            }
        }
        candidates.extend(lane.candidates);
    }
    // stable sort keeps lane order among ties
    candidates.sort_by(|a, b| a.value.total_cmp(&b.value));
    candidates.truncate(keep);

    let evals = 150 * (m * r + r * n);
    let refined = map_indexed(candidates.len(), |i| {
        let c = &candidates[i];
        let (_, y) = refine_low_rank(&c.u, &c.w, |y| ext.min_over_base_unit(y), evals);
        let a = ext.optimal_base_point_unit(&y);
        (ext.hess_form_unchecked(&a, &y), a, y)
    });
    for cand in refined {
        if best.as_ref().is_none_or(|cur| cand.0 < cur.0) {
            best = Some(cand);
        }
    }
    let (value, a, y) = best.ok_or_else(|| Error::Precondition("no usable samples".into()))?;
    Ok(HessDefectMin { value, a, y })
}

/// Budget for [`find_k`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KBudget {
    pub samples: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_doublings: u32,
}

impl Default for KBudget {
    fn default() -> Self {
        Self {
            samples: 100_000,
            restarts: 32,
            seed: 0,
            max_doublings: 40,
        }
    }
}

/// Outcome of the search for the penalty weight `k(ε)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSearchResult {
    pub epsilon: f64,
    pub k: f64,
    /// Smallest second derivative found at `k`.
    pub min_defect: f64,
    pub defect_tolerance: f64,
    pub search_radius: f64,
    pub trilinear_bound: f64,
    /// Smallest second derivative (with `k = 0`) found on the sphere `|A| = R`.
    pub shell_min_defect: f64,
    pub samples: usize,
    pub restarts: usize,
    pub seed: u64,
    pub probes: usize,
    /// `false` when the budget ran out; this is inconclusive, not a refutation.
    pub success: bool,
}

/// Unit of the second significant digit of `x`.
fn second_digit_unit(x: f64) -> f64 {
    10f64.powf(x.log10().floor() - 1.0)
}

fn round_up_two_digits(x: f64) -> f64 {
    let unit = second_digit_unit(x);
    let steps = (x / unit * (1.0 - 1e-12)).ceil();
    steps * unit
}

fn shell_check(basis: &SpanBasis, epsilon: f64, radius: f64, samples: usize, seed: u64) -> f64 {
    let ext = Extension::new(basis, ExtensionParams { epsilon, k: 0.0 });
    let (m, n) = (basis.m(), basis.n());
    let counts = lane_counts(samples);
    map_lanes(|lane| {
        let mut rng = lane_rng(seed ^ 0x5eed_5be1, lane);
        let mut best = f64::INFINITY;
        for _ in 0..counts[lane] {
            let y = super::sample_low_rank(m, n, n - 1, &mut rng);
            let a = random_in_ball(m, n, 1.0, &mut rng);
            let Some(a) = a.normalized() else { continue };
            best = best.min(ext.hess_form_unchecked(&a.scaled(radius), &y));
        }
        best
    })
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

/// Finds a penalty weight `k` making `F` convex along every sampled
/// rank-`(n−1)` line.
///
/// `k` doubles from 1 until [`min_hess_defect`] reports no value below
/// `−defect_tolerance`, then bisects down to two significant digits.
pub fn find_k(
    basis: &SpanBasis,
    epsilon: f64,
    defect_tolerance: f64,
    budget: &KBudget,
) -> Result<KSearchResult> {
    let params = ExtensionParams::new(epsilon, 0.0)?;
    let radius = search_radius(basis, epsilon);
    let search = HessSearch {
        search_radius: radius,
        samples: budget.samples,
        restarts: budget.restarts,
        seed: budget.seed,
    };
    let mut probes = 0usize;
    let mut probe = |k: f64| -> Result<f64> {
        probes += 1;
        let ext = Extension::new(basis, params.with_k(k)?);
        Ok(min_hess_defect(&ext, &search)?.value)
    };

    let mut k = 1.0;
    let mut value = probe(k)?;
    let mut doublings = 0;
    while value < -defect_tolerance && doublings < budget.max_doublings {
        k *= 2.0;
        doublings += 1;
        value = probe(k)?;
    }
    let success = value >= -defect_tolerance;

    if success && doublings > 0 {
        let (mut lo, mut hi) = (k / 2.0, k);
        let mut hi_value = value;
        while hi - lo > second_digit_unit(hi) {
            let mid = 0.5 * (lo + hi);
            let v = probe(mid)?;
            if v >= -defect_tolerance {
                hi = mid;
                hi_value = v;
            } else {
                lo = mid;
            }
        }
        k = round_up_two_digits(hi);
        value = if k == hi { hi_value } else { probe(k)? };
        // sampling noise can break monotonicity; step up the lattice if so
        while value < -defect_tolerance {
            k = round_up_two_digits(k + second_digit_unit(k));
            value = probe(k)?;
        }
    }

    let shell = shell_check(basis, epsilon, radius, budget.samples.min(20_000), budget.seed);
    Ok(KSearchResult {
        epsilon,
        k,
        min_defect: value,
        defect_tolerance,
        search_radius: radius,
        trilinear_bound: trilinear_bound(basis),
        shell_min_defect: shell,
        samples: budget.samples,
        restarts: budget.restarts,
        seed: budget.seed,
        probes,
        success: success && shell >= -defect_tolerance,
    })
}
