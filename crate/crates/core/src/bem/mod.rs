//! Symmetric Galerkin discretisation of the single-layer operator `γ S_α` with
//! piecewise-constant densities on straight panels.
//!
//! `A[i][j] = ∫_{Γ_i} ∫_{Γ_j} φ_α(x - y) ds(y) ds(x)`. Self pairs are exact,
//! pairs sharing a vertex reduce to a smooth angular integral, and the rest use
//! Gauss quadrature on cells graded towards the closest points.

mod assembly;
mod eval;
mod integrals;
mod solve;
mod trace;

use std::sync::Arc;

pub use assembly::{assemble_galerkin, SingleLayerMatrix, SYMMETRY_DEFECT_LIMIT};
pub use eval::{eval_single_layer, eval_trace};
pub use integrals::{panel_inner_integral, OnPanel};
pub use solve::{solve_density, DensitySolve, SolverMethod};
pub use trace::{assemble_rhs, curve_single_layer_trace};
pub(crate) use eval::potential_at;
pub(crate) use integrals::Kernel;

use crate::error::{Error, Result};
use crate::geometry::PanelMesh;

/// Panel-wise constant density `G` on a mesh.
#[derive(Debug, Clone)]
pub struct BoundaryDensity {
    coeffs: Vec<f64>,
    mesh: Arc<PanelMesh>,
}

impl BoundaryDensity {
    pub fn new(mesh: Arc<PanelMesh>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != mesh.len() {
            return Err(Error::Data(format!(
                "density has {} coefficients for {} panels",
                coeffs.len(),
                mesh.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::Data(format!("density coefficient {i} is not finite")));
        }
        Ok(BoundaryDensity { coeffs, mesh })
    }

    /// Samples `f(curve parameter)` at panel midpoints.
    pub fn from_param_fn<F: Fn(f64) -> f64>(mesh: Arc<PanelMesh>, f: F) -> Result<Self> {
        let coeffs = mesh.panels().iter().map(|p| f(p.param(0.5))).collect();
        BoundaryDensity::new(mesh, coeffs)
    }

    pub fn constant(mesh: Arc<PanelMesh>, value: f64) -> Result<Self> {
        let n = mesh.len();
        BoundaryDensity::new(mesh, vec![value; n])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn mesh(&self) -> &Arc<PanelMesh> {
        &self.mesh
    }

    /// `‖G‖_{L₁(∂Ω)} = Σ |G_j| |Γ_j|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(self.mesh.lengths())
            .map(|(g, l)| g.abs() * l)
            .sum()
    }

    /// Total mass `Σ G_j |Γ_j|`.
    pub fn total_mass(&self) -> f64 {
        self.coeffs.iter().zip(self.mesh.lengths()).map(|(g, l)| g * l).sum()
    }

    /// `a·self + b·other` on the same mesh.
    pub fn combine(&self, a: f64, other: &BoundaryDensity, b: f64) -> Result<Self> {
        if !Arc::ptr_eq(&self.mesh, &other.mesh) && *self.mesh != *other.mesh {
            return Err(Error::Data("densities live on different meshes".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| a * x + b * y)
            .collect();
        BoundaryDensity::new(self.mesh.clone(), coeffs)
    }
}

/// Panel-averaged boundary values, `(1/|Γ_i|) ∫_{Γ_i} g ds`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceData {
    values: Vec<f64>,
}

impl TraceData {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("trace value {i} is not finite")));
        }
        Ok(TraceData { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Galerkin load vector `b[i] = ∫_{Γ_i} g ds`.
    pub fn moments(&self, mesh: &PanelMesh) -> Vec<f64> {
        self.values.iter().zip(mesh.lengths()).map(|(v, l)| v * l).collect()
    }
}
