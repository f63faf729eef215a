use serde::{Deserialize, Serialize};

use super::{CoordTriple, Mat, SpanBasis};
use crate::{Error, Result};

/// The cubic on `L`: `f(η₁V₁ + η₂V₂ + η₃V₃) = −η₁η₂η₃`.
#[inline]
pub fn f_l(eta: &CoordTriple) -> f64 {
    -eta.eta[0] * eta.eta[1] * eta.eta[2]
}

/// Weights of the quartic extension: `ε` on `|X|² + |X|⁴`, `k` on `|X − PX|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionParams {
    pub epsilon: f64,
    pub k: f64,
}

impl ExtensionParams {
    pub fn new(epsilon: f64, k: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Precondition(format!("epsilon must be > 0, got {epsilon}")));
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::Precondition(format!("k must be >= 0, got {k}")));
        }
        Ok(Self { epsilon, k })
    }

    pub fn with_k(self, k: f64) -> Result<Self> {
        Self::new(self.epsilon, k)
    }
}

/// `F(X) = f(PX) + ε|X|² + ε|X|⁴ + k|X − PX|²`
#[derive(Clone, Copy, Debug)]
pub struct Extension<'a> {
    pub basis: &'a SpanBasis,
    pub params: ExtensionParams,
}

impl<'a> Extension<'a> {
    pub fn new(basis: &'a SpanBasis, params: ExtensionParams) -> Self {
        Self { basis, params }
    }

    pub fn value(&self, x: &Mat) -> Result<f64> {
        self.basis.coords(x)?;
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: &Mat) -> f64 {
        let eta = self.basis.coords_unchecked(x);
        let n2 = x.norm_sq();
        let ExtensionParams { epsilon, k } = self.params;
        let penalty = if k == 0.0 {
            0.0
        } else {
            k * self.basis.residual_sq_unchecked(x, &eta)
        };
        f_l(&eta) + epsilon * (n2 + n2 * n2) + penalty
    }

    /// The second directional derivative `d²/dt² F(A + tY)` at `t = 0`.
    pub fn hess_form(&self, a: &Mat, y: &Mat) -> Result<f64> {
        self.basis.coords(a)?;
        self.basis.coords(y)?;
        Ok(self.hess_form_unchecked(a, y))
    }

    pub(crate) fn hess_form_unchecked(&self, a: &Mat, y: &Mat) -> f64 {
        let ea = self.basis.coords_unchecked(a).eta;
        let ey = self.basis.coords_unchecked(y);
        let ExtensionParams { epsilon, k } = self.params;
        let [y1, y2, y3] = ey.eta;
        let cubic = -2.0 * (ea[0] * y2 * y3 + ea[1] * y1 * y3 + ea[2] * y1 * y2);
        let ny = y.norm_sq();
        let ay = a.dot(y);
        let quartic = epsilon * (4.0 * a.norm_sq() * ny + 8.0 * ay * ay);
        let penalty = if k == 0.0 {
            0.0
        } else {
            2.0 * k * self.basis.residual_sq_unchecked(y, &ey)
        };
        cubic + 2.0 * epsilon * ny + quartic + penalty
    }

    /// The cubic part of `hess_form` is linear in `A`: it equals `⟨A, W(Y)⟩`.
    /// Returns `W(Y)`.
    pub(crate) fn cubic_gradient(&self, y: &Mat) -> Mat {
        let [y1, y2, y3] = self.basis.coords_unchecked(y).eta;
        let w = [-2.0 * y2 * y3, -2.0 * y1 * y3, -2.0 * y1 * y2];
        let gi = self.basis.gram_inverse();
        let c: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| gi[i][j] * w[j]).sum());
        self.basis.combo(c)
    }

    /// For a unit direction `Y`, the base point `A*` minimising
    /// `A ↦ hess_form(A, Y)` over all of matrix space.
    ///
    /// The form is `⟨A, W⟩ + 4ε|A|² + 8ε⟨A, Y⟩² + const`, a strictly convex
    /// quadratic in `A` with Hessian `8ε(I + 2Y⊗Y)`, so
    /// `A* = −(W − ⅔⟨W, Y⟩Y) / (8ε)`.
    pub fn optimal_base_point(&self, y: &Mat) -> Result<Mat> {
        self.basis.coords(y)?;
        let y = y
            .normalized()
            .ok_or_else(|| Error::Precondition("direction must be nonzero".into()))?;
        Ok(self.optimal_base_point_unit(&y))
    }

    pub(crate) fn optimal_base_point_unit(&self, y: &Mat) -> Mat {
        let w = self.cubic_gradient(y);
        let wy = w.dot(y);
        let mut a = w;
        a.axpy(-2.0 / 3.0 * wy, y);
        a.scaled(-1.0 / (8.0 * self.params.epsilon))
    }

    /// `min_A hess_form(A, Y)` for unit `Y`, in closed form.
    pub(crate) fn min_over_base_unit(&self, y: &Mat) -> f64 {
        let w = self.cubic_gradient(y);
        let wy = w.dot(y);
        let ExtensionParams { epsilon, k } = self.params;
        let ey = self.basis.coords_unchecked(y);
        let penalty = 2.0 * k * self.basis.residual_sq_unchecked(y, &ey);
        2.0 * epsilon - (w.norm_sq() - 2.0 / 3.0 * wy * wy) / (16.0 * epsilon) + penalty
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::build_base_4x3;

    fn params(e: f64, k: f64) -> ExtensionParams {
        ExtensionParams::new(e, k).unwrap()
    }

    #[test]
    fn cubic_values() {
        assert_eq!(f_l(&CoordTriple::new(1.0, 1.0, 1.0)), -1.0);
        assert_eq!(f_l(&CoordTriple::new(2.0, 3.0, -1.0)), 6.0);
        assert_eq!(f_l(&CoordTriple::new(5.5, 0.0, -3.0)), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(ExtensionParams::new(0.0, 1.0).is_err());
        assert!(ExtensionParams::new(1.0, -1.0).is_err());
        assert!(ExtensionParams::new(f64::NAN, 1.0).is_err());
        assert!(ExtensionParams::new(1e-3, 0.0).is_ok());
    }

    #[test]
    fn extension_values() {
        let b = build_base_4x3();
        let ext = Extension::new(&b, params(0.3, 7.0));
        assert_eq!(ext.value(&Mat::zeros(4, 3)).unwrap(), 0.0);
        // |V₁|² = 2, f(V₁) = 0
        assert!((ext.value(b.generator(0)).unwrap() - (0.3 * 2.0 + 0.3 * 4.0)).abs() < 1e-15);
        // unit matrix orthogonal to L: entry (2,3) is zero in every generator
        let x = Mat::indicator(4, 3, &[(1, 2)]);
        assert!((ext.value(&x).unwrap() - (2.0 * 0.3 + 7.0)).abs() < 1e-15);
    }

    #[test]
    fn hessian_special_cases() {
        let b = build_base_4x3();
        let ext = Extension::new(&b, params(0.2, 5.0));
        let zero = Mat::zeros(4, 3);
        let y_in = b.generator(2).normalized().unwrap();
        assert!((ext.hess_form(&zero, &y_in).unwrap() - 0.4).abs() < 1e-15);
        let y_out = Mat::indicator(4, 3, &[(1, 2)]);
        assert!((ext.hess_form(&zero, &y_out).unwrap() - (0.4 + 10.0)).abs() < 1e-15);
    }

    #[test]
    fn optimal_base_point_is_stationary() {
        let b = build_base_4x3();
        let ext = Extension::new(&b, params(0.01, 3.0));
        let y = Mat::from_vec(4, 3, (0..12).map(|i| ((i * 7 % 5) as f64) - 2.0).collect())
            .unwrap()
            .normalized()
            .unwrap();
        let a = ext.optimal_base_point(&y).unwrap();
        let best = ext.hess_form(&a, &y).unwrap();
        assert!((best - ext.min_over_base_unit(&y)).abs() < 1e-9 * best.abs().max(1.0));
        for i in 0..12 {
            for s in [-1e-3, 1e-3] {
                let mut p = a.clone();
                p.as_mut_slice()[i] += s;
                assert!(ext.hess_form(&p, &y).unwrap() >= best - 1e-12);
            }
        }
    }
}
