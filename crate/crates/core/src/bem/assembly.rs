use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::integrals::{closest_on_first, graded, inner, self_pair, vertex_pair, Kernel, OnPanel};
use crate::error::{Error, Result};
use crate::geometry::{PanelMesh, QuadratureRule};
use crate::specfun::FracOrder;

/// Largest tolerated `max|A - Aᵀ| / max|A|` before symmetrisation.
pub const SYMMETRY_DEFECT_LIMIT: f64 = 1e-8;

/// Dense symmetric Galerkin matrix of `γ S_α`.
#[derive(Debug, Clone)]
pub struct SingleLayerMatrix {
    entries: DMatrix<f64>,
    mesh: Arc<PanelMesh>,
    order: FracOrder,
    symmetry_defect: f64,
}

/// Assembles `A[i][j] = ∫_{Γ_i} ∫_{Γ_j} φ_α(x - y) ds(y) ds(x)`.
///
/// Every entry is computed independently (outer integral over `Γ_i` with
/// `quad`) so the relative pre-symmetrisation defect is a genuine accuracy
/// measure; the stored matrix is `(A + Aᵀ)/2`.
pub fn assemble_galerkin(
    mesh: Arc<PanelMesh>,
    order: FracOrder,
    quad: &QuadratureRule,
) -> Result<SingleLayerMatrix> {
    if order.dim() != 2 || !order.is_solvable() {
        return Err(Error::Config(format!(
            "alpha out of admissible range (d={}, alpha={})",
            order.dim(),
            order.alpha()
        )));
    }
    let n = mesh.len();
    if n < 3 {
        return Err(Error::Config(format!("need at least 3 panels, got {n}")));
    }
    let k = Kernel::new(order);
    let rows: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| pair_entry(&k, &mesh, quad, i, j)).collect())
        .collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row?.into_iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    let max_abs = a.amax();
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            defect = defect.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    let symmetry_defect = defect / max_abs;
    if symmetry_defect > SYMMETRY_DEFECT_LIMIT {
        return Err(Error::Assembly(format!(
            "symmetry defect {symmetry_defect:e} exceeds {SYMMETRY_DEFECT_LIMIT:e}"
        )));
    }
    let entries = (&a + a.transpose()) * 0.5;
    Ok(SingleLayerMatrix {
        entries,
        mesh,
        order,
        symmetry_defect,
    })
}

fn pair_entry(k: &Kernel, mesh: &PanelMesh, quad: &QuadratureRule, i: usize, j: usize) -> Result<f64> {
    let (pi, pj) = (mesh.panel(i), mesh.panel(j));
    let (li, lj) = (pi.length(), pj.length());
    let n = mesh.len();
    let v = if i == j {
        self_pair(k, li)
    } else if (i + 1) % n == j || (j + 1) % n == i {
        let (vtx, xi, yj) = if (i + 1) % n == j {
            (pi.b, pi.a, pj.b)
        } else {
            (pi.a, pi.b, pj.a)
        };
        let e1 = [(xi[0] - vtx[0]) / li, (xi[1] - vtx[1]) / li];
        let e2 = [(yj[0] - vtx[0]) / lj, (yj[1] - vtx[1]) / lj];
        vertex_pair(k, li, lj, e1[0] * e2[0] + e1[1] * e2[1])
    } else {
        let (at, dist) = closest_on_first(pi, pj);
        if dist <= 0.0 {
            return Err(Error::Assembly(format!("panels {i} and {j} touch but are not adjacent")));
        }
        let f = |s: f64| inner(k, pj, pi.point(s / li), OnPanel::Reject).unwrap_or(f64::NAN);
        if dist >= 2.0 * li {
            quad.integrate(0.0, li, f)
        } else {
            graded(at, li, dist, quad, f)
        }
    };
    if !v.is_finite() {
        return Err(Error::Assembly(format!("quadrature failed on panel pair ({i}, {j})")));
    }
    Ok(v)
}

impl SingleLayerMatrix {
    #[cfg(test)]
    pub(crate) fn from_entries(mesh: Arc<PanelMesh>, order: FracOrder, entries: DMatrix<f64>) -> Self {
        SingleLayerMatrix {
            entries,
            mesh,
            order,
            symmetry_defect: 0.0,
        }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn mesh(&self) -> &Arc<PanelMesh> {
        &self.mesh
    }

    pub fn order(&self) -> FracOrder {
        self.order
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.nrows() == 0
    }

    /// `max|A - Aᵀ| / max|A|` measured before symmetrisation.
    pub fn symmetry_defect(&self) -> f64 {
        self.symmetry_defect
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.amax()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.entries * DVector::from_column_slice(x);
        v.iter().copied().collect()
    }

    /// Whether a Cholesky factorisation exists (the matrix is positive definite).
    pub fn is_positive_definite(&self) -> bool {
        self.entries.clone().cholesky().is_some()
    }

    /// Eigenvalues in ascending order (dense symmetric eigensolver).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// 2-norm condition number `λ_max / λ_min`. `None` if `A` is not SPD.
    pub fn condition_estimate(&self) -> Option<f64> {
        let ev = self.eigenvalues();
        let (lo, hi) = (*ev.first()?, *ev.last()?);
        (lo > 0.0).then(|| hi / lo)
    }
}
