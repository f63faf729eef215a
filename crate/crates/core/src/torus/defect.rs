use serde::{Deserialize, Serialize};

use super::{integrate_composed, required_nodes, Quadrature, TrigMatField};
use crate::matcore::{f_l, Extension, ExtensionParams, Mat, SpanBasis};
use crate::{Error, Result};

/// Default nodes per active axis.
pub const DEFAULT_NODES: usize = 16;

/// Both sides of the quasiconvexity inequality for the extension `F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    #[serde(rename = "integral_F_of_B")]
    pub integral_f_of_b: f64,
    #[serde(rename = "F_at_mean")]
    pub f_at_mean: f64,
    /// `integral_F_of_B − F_at_mean`.
    pub defect: f64,
    pub epsilon: f64,
    pub k: f64,
    pub nodes_per_axis: usize,
    pub active_axes: Vec<usize>,
}

/// `(∫g(B) dx, g(∫B dx))` for a polynomial `g` of degree `≤ degree_bound`.
pub fn defect_of<G>(
    field: &TrigMatField,
    g: G,
    degree_bound: usize,
    quad: Quadrature,
) -> Result<(f64, f64)>
where
    G: Fn(&Mat) -> f64,
{
    let integral = integrate_composed(field, &g, degree_bound, quad)?;
    Ok((integral, g(&field.mean())))
}

fn check_field(field: &TrigMatField, basis: &SpanBasis) -> Result<()> {
    if (field.m(), field.n()) != (basis.m(), basis.n()) {
        return Err(Error::Dimension(format!(
            "field is {}x{}, basis is {}x{}",
            field.m(),
            field.n(),
            basis.m(),
            basis.n()
        )));
    }
    Ok(())
}

/// `∫F(B) dx − F(∫B dx)` with `F` the quartic extension.
pub fn sq_defect(
    basis: &SpanBasis,
    params: ExtensionParams,
    field: &TrigMatField,
    nodes_per_axis: usize,
) -> Result<DefectReport> {
    check_field(field, basis)?;
    let ext = Extension::new(basis, params);
    let (integral, at_mean) = defect_of(
        field,
        |x| ext.value_unchecked(x),
        4,
        Quadrature::exact(nodes_per_axis),
    )?;
    Ok(DefectReport {
        integral_f_of_b: integral,
        f_at_mean: at_mean,
        defect: integral - at_mean,
        epsilon: params.epsilon,
        k: params.k,
        nodes_per_axis,
        active_axes: field.active_axes(),
    })
}

/// The three integrals that decide the sign of the defect for a mean-zero
/// field with values in `L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    /// `∫ f(PB) dx`
    pub i0: f64,
    /// `∫ |B|² dx`
    pub i2: f64,
    /// `∫ |B|⁴ dx`
    pub i4: f64,
}

impl Moments {
    /// `∫ (f(PB) + ε|B|² + ε|B|⁴) dx`.
    pub fn defect_at(&self, epsilon: f64) -> f64 {
        self.i0 + epsilon * (self.i2 + self.i4)
    }
}

pub fn moments(field: &TrigMatField, basis: &SpanBasis, nodes_per_axis: usize) -> Result<Moments> {
    check_field(field, basis)?;
    let q = Quadrature::exact(nodes_per_axis);
    let i0 = integrate_composed(field, |x| f_l(&basis.coords_unchecked(x)), 3, q)?;
    let i2 = integrate_composed(field, Mat::norm_sq, 2, q)?;
    let i4 = integrate_composed(field, |x| x.norm_sq().powi(2), 4, q)?;
    Ok(Moments { i0, i2, i4 })
}

/// `ε = safety · (−I₀) / (I₂ + I₄)`, which leaves `∫(f(PB) + ε|B|² + ε|B|⁴)`
/// at `(1 − safety) · I₀ < 0`.
pub fn choose_epsilon(field: &TrigMatField, basis: &SpanBasis, safety: f64) -> Result<f64> {
    if !(safety > 0.0 && safety < 1.0) {
        return Err(Error::Precondition(format!("safety {safety} outside (0, 1)")));
    }
    let nodes = DEFAULT_NODES.max(required_nodes(field, 4));
    let mo = moments(field, basis, nodes)?;
    if mo.i0 >= 0.0 {
        return Err(Error::NotACounterexample(mo.i0));
    }
    Ok(safety * (-mo.i0) / (mo.i2 + mo.i4))
}
