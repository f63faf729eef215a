use crate::matcore::Mat;

/// Equally spaced parameters `t` on `[−half_width, half_width]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineGrid {
    pub half_width: f64,
    pub points: usize,
}

impl LineGrid {
    pub fn symmetric(half_width: f64, points: usize) -> Self {
        assert!(points >= 3, "need at least three grid points");
        assert!(half_width > 0.0);
        Self { half_width, points }
    }

    fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    fn t(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.step()
    }
}

/// Minimum centred second difference of `t ↦ g(A + tY)` over the interior
/// grid points. Nonnegative (to rounding) iff `g` is convex on the sampled
/// segment.
pub fn line_convexity_defect<G>(g: G, a: &Mat, y: &Mat, grid: LineGrid) -> f64
where
    G: Fn(&Mat) -> f64,
{
    let h = grid.step();
    let at = |t: f64| {
        let mut x = a.clone();
        x.axpy(t, y);
        g(&x)
    };
    let values: Vec<f64> = (0..grid.points).map(|i| at(grid.t(i))).collect();
    values
        .windows(3)
        .map(|w| (w[2] - 2.0 * w[1] + w[0]) / (h * h))
        .fold(f64::INFINITY, f64::min)
}
