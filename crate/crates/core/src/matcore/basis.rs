use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::Mat;
use crate::{Error, Result};

/// Gram matrices with a condition number above this are treated as singular.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Which coefficient fills the new diagonal entry at each step of the
/// dimension recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagSlot {
    Alpha1,
    Alpha2,
}

/// Selector for the diagonal entries `a_44, a_55, …` of the generated pencil.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagRule {
    /// The same slot at every step.
    Uniform(DiagSlot),
    /// One slot per step, starting at `n = 4`. Must have exactly `n − 3` entries.
    Pattern(Vec<DiagSlot>),
}

impl Default for DiagRule {
    fn default() -> Self {
        DiagRule::Uniform(DiagSlot::Alpha1)
    }
}

impl DiagRule {
    fn slot(&self, step_n: usize, n: usize) -> Result<DiagSlot> {
        match self {
            DiagRule::Uniform(s) => Ok(*s),
            DiagRule::Pattern(p) => {
                if p.len() != n - 3 {
                    return Err(Error::Dimension(format!(
                        "diag pattern has {} entries, n = {n} needs {}",
                        p.len(),
                        n - 3
                    )));
                }
                Ok(p[step_n - 4])
            }
        }
    }
}

impl fmt::Display for DiagRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = |s: &DiagSlot| match s {
            DiagSlot::Alpha1 => "1",
            DiagSlot::Alpha2 => "2",
        };
        match self {
            DiagRule::Uniform(DiagSlot::Alpha1) => write!(f, "alpha1"),
            DiagRule::Uniform(DiagSlot::Alpha2) => write!(f, "alpha2"),
            DiagRule::Pattern(p) => {
                let parts: Vec<&str> = p.iter().map(tag).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

impl FromStr for DiagRule {
    type Err = Error;

    /// Accepts `alpha1`, `alpha2`, or a comma-separated pattern of `1`/`2`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "alpha1" | "a1" => Ok(DiagRule::Uniform(DiagSlot::Alpha1)),
            "alpha2" | "a2" => Ok(DiagRule::Uniform(DiagSlot::Alpha2)),
            other => other
                .split(',')
                .map(|t| match t.trim() {
                    "1" => Ok(DiagSlot::Alpha1),
                    "2" => Ok(DiagSlot::Alpha2),
                    bad => Err(Error::Precondition(format!("unknown diag slot {bad:?}"))),
                })
                .collect::<Result<Vec<_>>>()
                .map(DiagRule::Pattern),
        }
    }
}

/// Three generators `V₁, V₂, V₃` spanning the subspace `L`, with the Gram
/// data needed for coordinates and the orthogonal projection onto `L`.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    gens: [Mat; 3],
    gram: [[f64; 3]; 3],
    gram_inv: [[f64; 3]; 3],
}

/// Coordinates `(η₁, η₂, η₃)` of `PX` in the generator basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordTriple {
    pub eta: [f64; 3],
}

impl CoordTriple {
    pub fn new(eta1: f64, eta2: f64, eta3: f64) -> Self {
        Self {
            eta: [eta1, eta2, eta3],
        }
    }
}

impl SpanBasis {
    pub fn new(v1: Mat, v2: Mat, v3: Mat) -> Result<Self> {
        v1.check_shape(&v2)?;
        v1.check_shape(&v3)?;
        let gens = [v1, v2, v3];
        let mut gram = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                gram[i][j] = gens[i].dot(&gens[j]);
            }
        }
        let g = Matrix3::from_fn(|i, j| gram[i][j]);
        let eig = g.symmetric_eigen().eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        if lo <= 0.0 || hi / lo > MAX_GRAM_CONDITION {
            let cond = if lo <= 0.0 { f64::INFINITY } else { hi / lo };
            return Err(Error::DegenerateBasis(cond));
        }
        let inv = g.try_inverse().ok_or(Error::DegenerateBasis(f64::INFINITY))?;
        let mut gram_inv = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                // symmetrize away rounding in the inverse
                gram_inv[i][j] = 0.5 * (inv[(i, j)] + inv[(j, i)]);
            }
        }
        Ok(Self {
            gens,
            gram,
            gram_inv,
        })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.gens[0].rows()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.gens[0].cols()
    }

    #[inline]
    pub fn generators(&self) -> &[Mat; 3] {
        &self.gens
    }

    #[inline]
    pub fn generator(&self, i: usize) -> &Mat {
        &self.gens[i]
    }

    pub fn gram(&self) -> [[f64; 3]; 3] {
        self.gram
    }

    pub fn gram_inverse(&self) -> [[f64; 3]; 3] {
        self.gram_inv
    }

    /// Smallest eigenvalue of the Gram matrix.
    pub fn gram_min_eigenvalue(&self) -> f64 {
        Matrix3::from_fn(|i, j| self.gram[i][j])
            .symmetric_eigen()
            .eigenvalues
            .min()
    }

    fn check(&self, x: &Mat) -> Result<()> {
        self.gens[0].check_shape(x)
    }

    /// `M(α) = α₁V₁ + α₂V₂ + α₃V₃`.
    pub fn combo(&self, alpha: [f64; 3]) -> Mat {
        let mut out = Mat::zeros(self.m(), self.n());
        for (a, v) in alpha.iter().zip(&self.gens) {
            out.axpy(*a, v);
        }
        out
    }

    /// Solves `G η = (⟨X,V₁⟩, ⟨X,V₂⟩, ⟨X,V₃⟩)`.
    pub fn coords(&self, x: &Mat) -> Result<CoordTriple> {
        self.check(x)?;
        Ok(self.coords_unchecked(x))
    }

    #[inline]
    pub(crate) fn coords_unchecked(&self, x: &Mat) -> CoordTriple {
        let b = [x.dot(&self.gens[0]), x.dot(&self.gens[1]), x.dot(&self.gens[2])];
        let mut eta = [0.0; 3];
        for (i, e) in eta.iter_mut().enumerate() {
            *e = (0..3).map(|j| self.gram_inv[i][j] * b[j]).sum();
        }
        CoordTriple { eta }
    }

    /// Orthogonal projection onto `L`.
    pub fn project(&self, x: &Mat) -> Result<Mat> {
        let eta = self.coords(x)?;
        Ok(self.combo(eta.eta))
    }

    /// `|X − PX|²`.
    pub fn residual_sq(&self, x: &Mat) -> Result<f64> {
        self.check(x)?;
        Ok(self.residual_sq_unchecked(x, &self.coords_unchecked(x)))
    }

    #[inline]
    pub(crate) fn residual_sq_unchecked(&self, x: &Mat, eta: &CoordTriple) -> f64 {
        let (a, b, c) = (
            self.gens[0].as_slice(),
            self.gens[1].as_slice(),
            self.gens[2].as_slice(),
        );
        let [e1, e2, e3] = eta.eta;
        x.as_slice()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let r = v - e1 * a[i] - e2 * b[i] - e3 * c[i];
                r * r
            })
            .sum()
    }
}

/// The three 4×3 generators of the base construction.
pub fn build_base_4x3() -> SpanBasis {
    let v1 = Mat::from_rows(&[
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
    ]);
    let v2 = Mat::from_rows(&[
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0],
    ]);
    let v3 = Mat::from_rows(&[
        [0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [1.0, 1.0, 1.0],
    ]);
    SpanBasis::new(v1, v2, v3).expect("base generators are independent")
}

/// Generators for general `n ≥ 3`, `m ≥ n + 1`.
///
/// Each step from `n − 1` to `n` copies the previous pencil into rows `≤ n`,
/// columns `≤ n − 1`, puts the selected `α₁`/`α₂` slot at `(n, n)` and `α₃` at
/// `(n + 1, n)`. Extra rows for `m > n + 1` are zero rows at the bottom.
pub fn build_base_n(n: usize, m: usize, rule: &DiagRule) -> Result<SpanBasis> {
    if n < 3 {
        return Err(Error::Dimension(format!("n = {n}, need n >= 3")));
    }
    if m < n + 1 {
        return Err(Error::Dimension(format!("m = {m}, need m >= n + 1 = {}", n + 1)));
    }
    let base = build_base_4x3();
    let mut gens: [Mat; 3] = base.generators().clone();
    for step in 4..=n {
        let mut next: [Mat; 3] = std::array::from_fn(|_| Mat::zeros(step + 1, step));
        for (g, prev) in next.iter_mut().zip(&gens) {
            for i in 0..step {
                for j in 0..step - 1 {
                    g[(i, j)] = prev[(i, j)];
                }
            }
        }
        let slot = match rule.slot(step, n)? {
            DiagSlot::Alpha1 => 0,
            DiagSlot::Alpha2 => 1,
        };
        next[slot][(step - 1, step - 1)] = 1.0;
        next[2][(step, step - 1)] = 1.0;
        gens = next;
    }
    if let DiagRule::Pattern(p) = rule {
        if n == 3 && !p.is_empty() {
            return Err(Error::Dimension("diag pattern given for n = 3".into()));
        }
    }
    let [v1, v2, v3] = gens.map(|g| g.pad_rows(m));
    SpanBasis::new(v1, v2, v3)
}
