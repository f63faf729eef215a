use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::matcore::{build_base_4x3, Mat, SpanBasis};
use crate::{Error, Result};

/// One Fourier mode `C cos(2π k·x) + S sin(2π k·x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub freq: Vec<i64>,
    pub cos: Mat,
    pub sin: Mat,
}

/// A `Tⁿ`-periodic trigonometric polynomial with `m × n` matrix coefficients.
///
/// Frequencies are kept canonical: `k` and `−k` are folded onto the
/// representative whose first nonzero entry is positive, duplicates are
/// merged, and the zero mode has no sine part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigMatField {
    m: usize,
    n: usize,
    modes: Vec<Mode>,
}

fn canonical(freq: &[i64]) -> (Vec<i64>, f64) {
    match freq.iter().find(|k| **k != 0) {
        Some(k) if *k < 0 => (freq.iter().map(|v| -v).collect(), -1.0),
        _ => (freq.to_vec(), 1.0),
    }
}

impl TrigMatField {
    pub fn zero(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            modes: Vec::new(),
        }
    }

    /// The constant field `C`.
    pub fn constant(c: Mat) -> Self {
        let (m, n) = c.shape();
        let mut f = Self::zero(m, n);
        f.add_mode(&vec![0; n], c, Mat::zeros(m, n))
            .expect("shapes agree");
        f
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Adds `C cos(2π k·x) + S sin(2π k·x)`, merging with an existing mode of
    /// the same canonical frequency.
    pub fn add_mode(&mut self, freq: &[i64], cos: Mat, sin: Mat) -> Result<()> {
        if freq.len() != self.n {
            return Err(Error::Dimension(format!(
                "frequency of length {} in a field on T^{}",
                freq.len(),
                self.n
            )));
        }
        if cos.shape() != (self.m, self.n) || sin.shape() != (self.m, self.n) {
            return Err(Error::Dimension(format!(
                "mode coefficients must be {}x{}",
                self.m, self.n
            )));
        }
        let (freq, sign) = canonical(freq);
        let is_zero = freq.iter().all(|k| *k == 0);
        let sin = if is_zero {
            Mat::zeros(self.m, self.n)
        } else {
            sin.scaled(sign)
        };
        if let Some(mode) = self.modes.iter_mut().find(|md| md.freq == freq) {
            mode.cos += &cos;
            mode.sin += &sin;
        } else {
            self.modes.push(Mode { freq, cos, sin });
        }
        Ok(())
    }

    /// Pointwise sum of two fields.
    pub fn plus(&self, other: &TrigMatField) -> Result<TrigMatField> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::Dimension("fields of different shape".into()));
        }
        let mut out = self.clone();
        for md in &other.modes {
            out.add_mode(&md.freq, md.cos.clone(), md.sin.clone())?;
        }
        Ok(out)
    }

    /// The field scaled by `s`.
    pub fn scaled(&self, s: f64) -> TrigMatField {
        let mut out = self.clone();
        for md in &mut out.modes {
            md.cos = md.cos.scaled(s);
            md.sin = md.sin.scaled(s);
        }
        out
    }

    /// Value at `x ∈ ℝⁿ`.
    pub fn eval(&self, x: &[f64]) -> Mat {
        assert_eq!(x.len(), self.n, "point dimension");
        let mut out = Mat::zeros(self.m, self.n);
        for md in &self.modes {
            let phase = TAU * md.freq.iter().zip(x).map(|(k, xi)| *k as f64 * xi).sum::<f64>();
            out.axpy(phase.cos(), &md.cos);
            out.axpy(phase.sin(), &md.sin);
        }
        out
    }

    /// `∫_{Tⁿ} B dx`: the zero-frequency cosine coefficient.
    pub fn mean(&self) -> Mat {
        self.modes
            .iter()
            .find(|md| md.freq.iter().all(|k| *k == 0))
            .map(|md| md.cos.clone())
            .unwrap_or_else(|| Mat::zeros(self.m, self.n))
    }

    /// Axes on which some mode has a nonzero frequency component.
    pub fn active_axes(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&j| self.modes.iter().any(|md| md.freq[j] != 0))
            .collect()
    }

    /// `max |k_j|` over all modes and axes.
    pub fn max_axis_frequency(&self) -> u64 {
        self.modes
            .iter()
            .flat_map(|md| md.freq.iter().map(|k| k.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    /// `max |k|₁` over all modes.
    pub fn max_l1_frequency(&self) -> u64 {
        self.modes
            .iter()
            .map(|md| md.freq.iter().map(|k| k.unsigned_abs()).sum())
            .max()
            .unwrap_or(0)
    }
}

/// `Div B = 0` row by row. Differentiating `C cos(2πk·x)` gives row sums
/// `−2π (Ck)ᵢ sin(2πk·x)`, so the field is solenoidal iff each coefficient
/// annihilates its own frequency vector.
pub fn check_div_free(field: &TrigMatField) -> bool {
    field.modes().iter().all(|md| {
        let k: Vec<f64> = md.freq.iter().map(|v| *v as f64).collect();
        [&md.cos, &md.sin].iter().all(|c| {
            let scale = c.norm() * k.iter().map(|v| v * v).sum::<f64>().sqrt();
            c.mul_vec(&k)
                .iter()
                .all(|v| v.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE))
        })
    })
}

/// Frequencies of the three canonical modes, embedded in `ℤⁿ` on axes 1 and 3.
fn canonical_frequencies(n: usize) -> [Vec<i64>; 3] {
    let mut f1 = vec![0; n];
    f1[2] = 1;
    let mut f2 = vec![0; n];
    f2[0] = 1;
    let mut f3 = vec![0; n];
    f3[0] = 1;
    f3[2] = -1;
    [f1, f2, f3]
}

/// `B(x) = cos(2πx₃)V₁ + cos(2πx₁)V₂ + cos(2π(x₁ − x₃))V₃` for any basis.
pub fn build_bn(basis: &SpanBasis) -> TrigMatField {
    let (m, n) = (basis.m(), basis.n());
    let mut field = TrigMatField::zero(m, n);
    for (freq, v) in canonical_frequencies(n).iter().zip(basis.generators()) {
        field
            .add_mode(freq, v.clone(), Mat::zeros(m, n))
            .expect("shapes agree");
    }
    field
}

/// The 4×3 field on `T³` built from the base generators.
pub fn build_b3() -> TrigMatField {
    build_bn(&build_base_4x3())
}
