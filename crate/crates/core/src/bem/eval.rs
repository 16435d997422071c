use rayon::prelude::*;

use super::integrals::{inner, Kernel, OnPanel};
use super::{assemble_galerkin, BoundaryDensity, TraceData};
use crate::error::{Error, Result};
use crate::geometry::{Point2, QuadratureRule, BOUNDARY_TOL};
use crate::specfun::FracOrder;

/// `u(x) = S_α G(x) = Σ_j G_j ∫_{Γ_j} φ_α(x - y) ds(y)` at points off the boundary.
pub fn eval_single_layer(density: &BoundaryDensity, order: FracOrder, points: &[Point2]) -> Result<Vec<f64>> {
    if order.dim() != 2 {
        return Err(Error::Domain("single-layer evaluation is two-dimensional".into()));
    }
    let mesh = density.mesh();
    let tol = BOUNDARY_TOL * mesh.curve().diameter();
    let bad: Vec<String> = points
        .iter()
        .filter(|x| !(mesh.distance_to(**x) > tol))
        .map(|x| format!("({}, {})", x[0], x[1]))
        .collect();
    if !bad.is_empty() {
        return Err(Error::Evaluation(format!(
            "points on the boundary: {}",
            bad.join(", ")
        )));
    }
    let k = Kernel::new(order);
    points
        .par_iter()
        .map(|&x| potential_at(&k, density, x, OnPanel::Reject))
        .collect()
}

pub(crate) fn potential_at(k: &Kernel, density: &BoundaryDensity, x: Point2, mode: OnPanel) -> Result<f64> {
    let mut acc = 0.0;
    for (g, p) in density.coeffs().iter().zip(density.mesh().panels()) {
        if *g != 0.0 {
            acc += g * inner(k, p, x, mode)?;
        }
    }
    Ok(acc)
}

/// Panel-averaged trace `(1/|Γ_i|) ∫_{Γ_i} S_α G ds = (A G)_i / |Γ_i|`.
pub fn eval_trace(density: &BoundaryDensity, order: FracOrder, quad: &QuadratureRule) -> Result<TraceData> {
    let a = assemble_galerkin(density.mesh().clone(), order, quad)?;
    a.trace_of(density)
}

impl super::SingleLayerMatrix {
    /// Panel-averaged trace of `S_α G`, reusing the assembled matrix.
    pub fn trace_of(&self, density: &BoundaryDensity) -> Result<TraceData> {
        if density.coeffs().len() != self.len() {
            return Err(Error::Data("density does not match the matrix size".into()));
        }
        let ag = self.apply(density.coeffs());
        TraceData::new(
            ag.iter()
                .zip(self.mesh().lengths())
                .map(|(v, l)| v / l)
                .collect(),
        )
    }
}
