use nalgebra::DVector;

use super::{BoundaryDensity, SingleLayerMatrix, TraceData};
use crate::error::{Error, Result};

/// Required `‖A G - b‖₂ / ‖b‖₂`.
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    Cholesky,
    /// Fallback when the Cholesky factorisation broke down.
    PivotedLu,
}

#[derive(Debug, Clone)]
pub struct DensitySolve {
    pub density: BoundaryDensity,
    pub method: SolverMethod,
    pub relative_residual: f64,
}

impl DensitySolve {
    /// Set when the matrix was not numerically SPD and LU was used instead.
    pub fn fallback_warning(&self) -> bool {
        self.method == SolverMethod::PivotedLu
    }
}

/// Solves `A G = b` with `b[i] = ∫_{Γ_i} g ds`.
pub fn solve_density(a: &SingleLayerMatrix, rhs: &TraceData) -> Result<DensitySolve> {
    let mesh = a.mesh();
    if rhs.values().len() != mesh.len() {
        return Err(Error::Data(format!(
            "trace has {} values for {} panels",
            rhs.values().len(),
            mesh.len()
        )));
    }
    let b = DVector::from_vec(rhs.moments(mesh));
    let m = a.entries();
    let (mut x, method) = match m.clone().cholesky() {
        Some(ch) => (ch.solve(&b), SolverMethod::Cholesky),
        None => {
            log::warn!("Cholesky factorisation failed, falling back to pivoted LU");
            let lu = m.clone().full_piv_lu();
            match lu.solve(&b) {
                Some(x) => (x, SolverMethod::PivotedLu),
                None => return Err(Error::Solver("single-layer matrix is singular".into())),
            }
        }
    };
    let bnorm = b.norm();
    let mut res = (&b - m * &x).norm();
    // one step of iterative refinement
    if bnorm > 0.0 && res > RESIDUAL_TOL * bnorm {
        let r = &b - m * &x;
        let dx = match method {
            SolverMethod::Cholesky => m.clone().cholesky().map(|c| c.solve(&r)),
            SolverMethod::PivotedLu => m.clone().full_piv_lu().solve(&r),
        };
        if let Some(dx) = dx {
            x += dx;
            res = (&b - m * &x).norm();
        }
    }
    let relative_residual = if bnorm > 0.0 { res / bnorm } else { res };
    if !x.iter().all(|v| v.is_finite()) || relative_residual > RESIDUAL_TOL {
        return Err(Error::Solver(format!(
            "density solve residual {relative_residual:e} exceeds {RESIDUAL_TOL:e}"
        )));
    }
    let density = BoundaryDensity::new(mesh.clone(), x.iter().copied().collect())?;
    Ok(DensitySolve {
        density,
        method,
        relative_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bem::{assemble_galerkin, assemble_rhs, curve_single_layer_trace};
    use crate::geometry::{discretize, gauss_rule, BoundaryCurve};
    use crate::specfun::FracOrder;
    use nalgebra::DMatrix;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn scaled_identity() {
        let mesh = Arc::new(discretize(&BoundaryCurve::unit_square(), 8).unwrap());
        let a = SingleLayerMatrix::from_entries(
            mesh.clone(),
            FracOrder::new(2, 0.6).unwrap(),
            DMatrix::identity(8, 8) * 3.0,
        );
        let vals: Vec<f64> = (0..8).map(|i| i as f64 - 2.5).collect();
        let s = solve_density(&a, &TraceData::new(vals.clone()).unwrap()).unwrap();
        assert_eq!(s.method, SolverMethod::Cholesky);
        for (g, v) in s.density.coeffs().iter().zip(&vals) {
            assert!((g - v * 0.5 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn indefinite_falls_back_to_lu() {
        let mesh = Arc::new(discretize(&BoundaryCurve::unit_circle(), 3).unwrap());
        let mut m = DMatrix::identity(3, 3);
        m[(2, 2)] = -1.0;
        let a = SingleLayerMatrix::from_entries(mesh, FracOrder::new(2, 0.6).unwrap(), m);
        let s = solve_density(&a, &TraceData::new(vec![1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!(s.fallback_warning());
        assert!(s.relative_residual < 1e-14);
    }

    #[test]
    fn mismatched_sizes() {
        let mesh = Arc::new(discretize(&BoundaryCurve::unit_circle(), 4).unwrap());
        let a = SingleLayerMatrix::from_entries(mesh, FracOrder::new(2, 0.6).unwrap(), DMatrix::identity(4, 4));
        assert!(solve_density(&a, &TraceData::new(vec![1.0; 3]).unwrap()).is_err());
    }

    #[test]
    fn constant_data_on_circle() {
        let mesh = Arc::new(discretize(&BoundaryCurve::unit_circle(), 64).unwrap());
        let q = gauss_rule(10).unwrap();
        let a = assemble_galerkin(mesh.clone(), FracOrder::new(2, 0.7).unwrap(), &q).unwrap();
        let rhs = assemble_rhs(|_, _| 1.0, &mesh, &q).unwrap();
        let s = solve_density(&a, &rhs).unwrap();
        let c = s.density.coeffs();
        let spread = c.iter().fold(0.0f64, |m, x| m.max((x - c[0]).abs()));
        assert!(spread <= 1e-8 * c[0].abs());
        assert!(c[0] > 0.0);
        assert!(s.relative_residual <= 1e-10);
    }

    #[test]
    fn recovers_manufactured_density() {
        let alpha = 0.7;
        let o = FracOrder::new(2, alpha).unwrap();
        let circle = BoundaryCurve::unit_circle();
        let exact = |t: f64| 1.0 + 0.5 * (2.0 * PI * t).cos();
        let mesh = Arc::new(discretize(&circle, 128).unwrap());
        let q = gauss_rule(10).unwrap();
        let a = assemble_galerkin(mesh.clone(), o, &q).unwrap();
        let rhs = assemble_rhs(
            |_, t| curve_single_layer_trace(&circle, o, exact, t).unwrap(),
            &mesh,
            &q,
        )
        .unwrap();
        let s = solve_density(&a, &rhs).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for (g, p) in s.density.coeffs().iter().zip(mesh.panels()) {
            let e = exact(p.param(0.5));
            num += (g - e).powi(2) * p.length();
            den += e * e * p.length();
        }
        let rel = (num / den).sqrt();
        assert!(rel <= 1e-2, "relative L2 error {rel}");
    }
}
