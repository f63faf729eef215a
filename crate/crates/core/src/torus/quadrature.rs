use super::TrigMatField;
use crate::matcore::Mat;
use crate::optim::CompensatedSum;
use crate::{Error, Result};

/// Equispaced tensor-product rule on the active axes of a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quadrature {
    pub nodes_per_axis: usize,
    /// Skip the exactness check.
    pub allow_inexact: bool,
}

impl Quadrature {
    pub fn exact(nodes_per_axis: usize) -> Self {
        Self {
            nodes_per_axis,
            allow_inexact: false,
        }
    }

    pub fn inexact(nodes_per_axis: usize) -> Self {
        Self {
            nodes_per_axis,
            allow_inexact: true,
        }
    }
}

/// Fewest nodes per axis that integrate `g ∘ B` exactly when `g` is a
/// polynomial of degree `≤ degree_bound`.
///
/// Along axis `j` the integrand has frequencies of modulus at most
/// `degree_bound · max |k_j|`, and the `N`-point periodic trapezoidal rule is
/// exact for every frequency below `N`.
pub fn required_nodes(field: &TrigMatField, degree_bound: usize) -> usize {
    degree_bound * field.max_axis_frequency() as usize + 1
}

/// `∫_{Tⁿ} g(B(x)) dx` by the periodic trapezoidal rule on the active axes.
pub fn integrate_composed<G>(
    field: &TrigMatField,
    g: G,
    degree_bound: usize,
    quad: Quadrature,
) -> Result<f64>
where
    G: Fn(&Mat) -> f64,
{
    let nodes = quad.nodes_per_axis;
    if nodes == 0 {
        return Err(Error::Precondition("need at least one node".into()));
    }
    let required = required_nodes(field, degree_bound);
    if !quad.allow_inexact && nodes < required {
        return Err(Error::Inexact { nodes, required });
    }
    let axes = field.active_axes();
    let mut x = vec![0.0; field.n()];
    if axes.is_empty() {
        return Ok(g(&field.eval(&x)));
    }
    let total = nodes
        .checked_pow(axes.len() as u32)
        .ok_or_else(|| Error::Precondition("quadrature grid too large".into()))?;
    let h = 1.0 / nodes as f64;
    let mut idx = vec![0usize; axes.len()];
    let mut sum = CompensatedSum::default();
    for _ in 0..total {
        for (a, &i) in axes.iter().zip(&idx) {
            x[*a] = i as f64 * h;
        }
        sum.add(g(&field.eval(&x)));
        for d in idx.iter_mut() {
            *d += 1;
            if *d < nodes {
                break;
            }
            *d = 0;
        }
    }
    Ok(sum.value() / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure_mode(freq: &[i64]) -> TrigMatField {
        let mut f = TrigMatField::zero(1, freq.len());
        let mut c = Mat::zeros(1, freq.len());
        c[(0, 0)] = 1.0;
        f.add_mode(freq, c, Mat::zeros(1, freq.len())).unwrap();
        f
    }

    #[test]
    fn pure_mode_integrals() {
        for freq in [[1, 0], [2, -1], [0, 3]] {
            let f = pure_mode(&freq);
            let g1 = |x: &Mat| x[(0, 0)];
            let g2 = |x: &Mat| x[(0, 0)] * x[(0, 0)];
            let n = required_nodes(&f, 2);
            assert!(integrate_composed(&f, g1, 1, Quadrature::exact(n)).unwrap().abs() < 1e-14);
            let v = integrate_composed(&f, g2, 2, Quadrature::exact(n)).unwrap();
            assert!((v - 0.5).abs() < 1e-14, "{freq:?}: {v}");
        }
    }

    #[test]
    fn too_few_nodes_refused_and_wrong() {
        let f = pure_mode(&[1, 0]);
        let g2 = |x: &Mat| x[(0, 0)] * x[(0, 0)];
        let err = integrate_composed(&f, g2, 2, Quadrature::exact(2)).unwrap_err();
        assert_eq!(err, Error::Inexact { nodes: 2, required: 3 });
        let v = integrate_composed(&f, g2, 2, Quadrature::inexact(2)).unwrap();
        assert!((v - 0.5).abs() > 0.1);
    }

    #[test]
    fn constant_field_needs_one_evaluation() {
        let f = TrigMatField::constant(Mat::from_rows(&[[2.0]]));
        let v = integrate_composed(&f, |x| x[(0, 0)].powi(3), 3, Quadrature::exact(1)).unwrap();
        assert_eq!(v, 8.0);
    }
}
