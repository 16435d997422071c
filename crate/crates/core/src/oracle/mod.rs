//! Independent checks: the pointwise fractional Laplacian by truncated
//! hypersingular quadrature, Fourier symbols of the cut-off Riesz kernel, and
//! far-field decay of single-layer potentials.

mod adaptive;
mod symbol;

use std::f64::consts::PI;
use std::sync::Mutex;

use serde::Serialize;

pub use symbol::{cutoff, cutoff_kernel_symbol, normalization_constant, symbol_decay_check, SymbolSample};

use crate::bem::{potential_at, BoundaryDensity, Kernel, OnPanel};
use crate::error::{Error, Result};
use crate::geometry::{PanelMesh, Point2};
use crate::specfun::{flap_constant, unit_sphere_area, FracOrder};
use adaptive::{integrate, Budget};

/// Truncation of the hypersingular integral to the annulus `r_inner < |z| < r_outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationWindow {
    pub r_inner: f64,
    pub r_outer: f64,
    /// Base cells in `log |z|`.
    pub n_radial: usize,
    /// Base cells per angular coordinate.
    pub n_angular: usize,
}

impl TruncationWindow {
    pub const MIN_DENSITY: usize = 8;

    pub fn new(r_inner: f64, r_outer: f64, n_radial: usize, n_angular: usize) -> Result<Self> {
        if !(r_inner > 0.0 && r_inner < r_outer && r_outer.is_finite()) {
            return Err(Error::Config(format!(
                "window needs 0 < r_inner < r_outer, got {r_inner} and {r_outer}"
            )));
        }
        if n_radial < Self::MIN_DENSITY || n_angular < Self::MIN_DENSITY {
            return Err(Error::Config(format!(
                "window densities must be at least {}, got {n_radial} and {n_angular}",
                Self::MIN_DENSITY
            )));
        }
        Ok(TruncationWindow {
            r_inner,
            r_outer,
            n_radial,
            n_angular,
        })
    }

    /// `r_inner = 10⁻³ · scale`, `r_outer = 10³`, densities 8.
    pub fn default_for(scale: f64) -> Result<Self> {
        TruncationWindow::new(1e-3 * scale, 1e3, 8, 8)
    }

    /// Halves `r_inner` and doubles both densities.
    pub fn refined(&self) -> Self {
        TruncationWindow {
            r_inner: 0.5 * self.r_inner,
            n_radial: 2 * self.n_radial,
            n_angular: 2 * self.n_angular,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        TruncationWindow::new(self.r_inner, self.r_outer, self.n_radial, self.n_angular).map(|_| ())
    }
}

/// Estimate of `-(-Δ)^α u(x)` with its truncation error bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub point: Vec<f64>,
    pub value: f64,
    /// Bound on the contribution of `|z| < r_inner`.
    pub inner_tail: f64,
    /// Bound on the contribution of `|z| > r_outer`.
    pub outer_tail: f64,
    /// `inner_tail + outer_tail`.
    pub uncertainty: f64,
    /// Estimated quadrature error on the annulus, kept below 1% of the uncertainty.
    pub quadrature_error: f64,
    /// Quadrature nodes used at all nesting levels.
    pub evaluations: usize,
    /// `‖G‖_{L₁(∂Ω)}` when `u` is a single-layer potential.
    pub l1_norm: Option<f64>,
    pub window: TruncationWindow,
}

impl ResidualReport {
    /// Whether `|value| ≤ uncertainty`.
    pub fn within_uncertainty(&self) -> bool {
        self.value.abs() <= self.uncertainty
    }
}

/// Upper limit on quadrature nodes per call.
pub const EVALUATION_BUDGET: usize = 200_000_000;
/// Smallest step used to sample the local curvature of `u`; shorter steps
/// lose the second difference to rounding.
const CURVATURE_STEP_FLOOR: f64 = 1e-4;
/// Quadrature tolerance as a fraction of the uncertainty.
const QUAD_FRACTION: f64 = 1e-2;

/// Points along a ray where `u` is known to be non-smooth.
pub trait RayBreaks: Sync {
    /// Radii `ρ > 0` where `u(x + ρω)` or `u(x - ρω)` may be non-smooth.
    fn radial_breaks(&self, x: &[f64], dir: &[f64]) -> Vec<f64>;
}

struct NoBreaks;

impl RayBreaks for NoBreaks {
    fn radial_breaks(&self, _: &[f64], _: &[f64]) -> Vec<f64> {
        Vec::new()
    }
}

/// `-(-Δ)^α u(x) ≈ c ∫_{r_inner<|z|<r_outer} (u(x+z) - u(x)) / |z|^{d+2α} dz`.
///
/// The integrand is symmetrised to `u(x+z) + u(x-z) - 2u(x)` over half the
/// directions and integrated in polar coordinates, `log |z|` innermost, by
/// nested adaptive Gauss-Kronrod quadrature. The inner tail comes from the
/// sampled second differences of `u` at `x`, the outer tail from sampled
/// `sup |u|` beyond `r_outer`.
pub fn pointwise_flap<F>(u: F, order: FracOrder, x: &[f64], w: TruncationWindow) -> Result<ResidualReport>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    flap_with_breaks(&u, order, x, w, &NoBreaks)
}

/// [`pointwise_flap`] with known non-smooth radii along each ray.
pub fn pointwise_flap_with_breaks<F, B>(
    u: F,
    order: FracOrder,
    x: &[f64],
    w: TruncationWindow,
    breaks: &B,
) -> Result<ResidualReport>
where
    F: Fn(&[f64]) -> f64 + Sync,
    B: RayBreaks,
{
    flap_with_breaks(&u, order, x, w, breaks)
}

fn sample<F: Fn(&[f64]) -> f64>(u: &F, p: &[f64]) -> Result<f64> {
    let v = u(p);
    if !v.is_finite() {
        return Err(Error::Data(format!("u is not finite at {p:?}")));
    }
    Ok(v)
}

fn shifted(x: &[f64], dir: &[f64], s: f64) -> Vec<f64> {
    x.iter().zip(dir).map(|(a, b)| a + s * b).collect()
}

// Fixed direction sets: a half circle / half sphere for curvature, full sets for sup|u|.
fn half_directions(d: usize) -> Vec<Vec<f64>> {
    if d == 2 {
        (0..8)
            .map(|k| {
                let t = PI * k as f64 / 8.0;
                vec![t.cos(), t.sin()]
            })
            .collect()
    } else {
        let mut v = Vec::new();
        for a in [-1.0f64, 0.0, 1.0] {
            for b in [-1.0f64, 0.0, 1.0] {
                for c in [0.0f64, 1.0] {
                    let first_nonzero = [c, b, a].into_iter().find(|t| *t != 0.0);
                    if first_nonzero == Some(1.0) {
                        let n = (a * a + b * b + c * c).sqrt();
                        v.push(vec![a / n, b / n, c / n]);
                    }
                }
            }
        }
        v
    }
}

fn full_directions(d: usize) -> Vec<Vec<f64>> {
    half_directions(d)
        .into_iter()
        .flat_map(|v| {
            let m: Vec<f64> = v.iter().map(|t| -t).collect();
            [v, m]
        })
        .collect()
}

fn flap_with_breaks<F, B>(u: &F, order: FracOrder, x: &[f64], w: TruncationWindow, breaks: &B) -> Result<ResidualReport>
where
    F: Fn(&[f64]) -> f64 + Sync,
    B: RayBreaks + ?Sized,
{
    w.validate()?;
    let d = order.dim();
    if x.len() != d {
        return Err(Error::Domain(format!("point has {} coordinates, expected {d}", x.len())));
    }
    let alpha = order.alpha();
    let c = flap_constant(order);
    let sphere = unit_sphere_area(d);
    let ux = sample(u, x)?;

    // inner tail: |u(x+h) + u(x-h) - 2u(x)| ≤ M h² on B(0, r_inner), safety factor 2
    let step = w.r_inner.max(CURVATURE_STEP_FLOOR);
    let mut curv: f64 = 0.0;
    for dir in half_directions(d) {
        for h in [step, 0.5 * step] {
            let d2 = sample(u, &shifted(x, &dir, h))? + sample(u, &shifted(x, &dir, -h))? - 2.0 * ux;
            curv = curv.max(d2.abs() / (h * h));
        }
    }
    let two_minus = 2.0 - 2.0 * alpha;
    let inner_tail = 2.0 * c * 0.5 * curv * sphere * w.r_inner.powf(two_minus) / two_minus;

    // outer tail from sup |u| sampled on spheres of radius r_outer, 2 r_outer, 4 r_outer
    let mut sup: f64 = 0.0;
    for dir in full_directions(d) {
        for k in 0..3 {
            let r = w.r_outer * (1 << k) as f64;
            sup = sup.max(sample(u, &shifted(x, &dir, r))?.abs());
        }
    }
    let outer_tail = c * (sup + ux.abs()) * sphere * w.r_outer.powf(-2.0 * alpha) / (2.0 * alpha);
    let uncertainty = inner_tail + outer_tail;

    let budget = Budget::new(EVALUATION_BUDGET);
    let tol = (QUAD_FRACTION * uncertainty).max(1e-15 * (ux.abs() + sup).max(f64::MIN_POSITIVE)) / c;
    let (t0, t1) = (w.r_inner.ln(), w.r_outer.ln());
    let radial_base: Vec<f64> = (0..=w.n_radial)
        .map(|k| t0 + (t1 - t0) * k as f64 / w.n_radial as f64)
        .collect();
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let fail = |e: Error| {
        let mut slot = failure.lock().expect("error slot poisoned");
        if slot.is_none() {
            *slot = Some(e);
        }
        f64::NAN
    };

    // ∫ (u(x+ρω) + u(x-ρω) - 2u(x)) ρ^{-2α} d(log ρ)
    let ray = |dir: &[f64], tol: f64| -> Result<(f64, f64)> {
        let mut cuts = radial_base.clone();
        for r in breaks.radial_breaks(x, dir) {
            if r > w.r_inner && r < w.r_outer {
                cuts.push(r.ln());
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        let f = |t: f64| {
            let rho = t.exp();
            let up = u(&shifted(x, dir, rho));
            let um = u(&shifted(x, dir, -rho));
            (up + um - 2.0 * ux) * rho.powf(-2.0 * alpha)
        };
        let q = integrate(&f, &cuts, tol, false, &budget)?;
        Ok((q.value, q.error))
    };

    let inner_err = Mutex::new(0.0f64);
    let note_err = |e: f64| {
        let mut m = inner_err.lock().expect("error slot poisoned");
        *m = m.max(e);
    };
    let (value, outer_error, measure) = if d == 2 {
        let ray_tol = tol / (4.0 * PI);
        let g = |theta: f64| match ray(&[theta.cos(), theta.sin()], ray_tol) {
            Ok((v, e)) => {
                note_err(e);
                v
            }
            Err(e) => fail(e),
        };
        let base: Vec<f64> = (0..=w.n_angular).map(|k| PI * k as f64 / w.n_angular as f64).collect();
        let q = integrate(&g, &base, 0.5 * tol, true, &budget);
        let q = take_failure(q, &failure)?;
        (q.value, q.error, PI)
    } else {
        // half sphere μ = cos θ ∈ [0, 1], φ ∈ [0, 2π)
        let mid_tol = tol / (8.0 * PI);
        let ray_tol = mid_tol / 4.0;
        let mid_err = Mutex::new(0.0f64);
        let n_mu = (w.n_angular / 2).max(1);
        let mu_base: Vec<f64> = (0..=n_mu).map(|k| k as f64 / n_mu as f64).collect();
        let g = |phi: f64| {
            let (sp, cp) = phi.sin_cos();
            let h = |mu: f64| {
                let s = (1.0 - mu * mu).max(0.0).sqrt();
                match ray(&[s * cp, s * sp, mu], ray_tol) {
                    Ok((v, e)) => {
                        note_err(e);
                        v
                    }
                    Err(e) => fail(e),
                }
            };
            match integrate(&h, &mu_base, mid_tol, false, &budget) {
                Ok(q) => {
                    let mut m = mid_err.lock().expect("error slot poisoned");
                    *m = m.max(q.error);
                    q.value
                }
                Err(e) => fail(e),
            }
        };
        let base: Vec<f64> = (0..=w.n_angular)
            .map(|k| 2.0 * PI * k as f64 / w.n_angular as f64)
            .collect();
        let q = integrate(&g, &base, 0.5 * tol, true, &budget);
        let q = take_failure(q, &failure)?;
        let mid = *mid_err.lock().expect("error slot poisoned");
        (q.value, q.error + 2.0 * PI * mid, 2.0 * PI)
    };
    let ray_err = *inner_err.lock().expect("error slot poisoned");
    let quadrature_error = c * (outer_error + measure * ray_err);
    if quadrature_error > uncertainty.max(f64::MIN_POSITIVE) {
        return Err(Error::Oracle(format!(
            "quadrature error {quadrature_error:e} exceeds the truncation uncertainty {uncertainty:e}"
        )));
    }
    Ok(ResidualReport {
        point: x.to_vec(),
        value: c * value,
        inner_tail,
        outer_tail,
        uncertainty,
        quadrature_error,
        evaluations: budget.used(),
        l1_norm: None,
        window: w,
    })
}

fn take_failure(q: Result<adaptive::Quad>, failure: &Mutex<Option<Error>>) -> Result<adaptive::Quad> {
    if let Some(e) = failure.lock().expect("error slot poisoned").take() {
        return Err(e);
    }
    q
}

struct PanelCrossings<'a>(&'a PanelMesh);

impl RayBreaks for PanelCrossings<'_> {
    fn radial_breaks(&self, x: &[f64], dir: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        for p in self.0.panels() {
            let e = [p.b[0] - p.a[0], p.b[1] - p.a[1]];
            let det = dir[0] * (-e[1]) + dir[1] * e[0];
            if det.abs() < 1e-300 {
                continue;
            }
            let r = [p.a[0] - x[0], p.a[1] - x[1]];
            // x + s·dir = a + τ·e
            let s = (r[0] * (-e[1]) + r[1] * e[0]) / det;
            let tau = (dir[0] * r[1] - dir[1] * r[0]) / det;
            if (-1e-12..=1.0 + 1e-12).contains(&tau) && s != 0.0 {
                out.push(s.abs());
            }
        }
        out
    }
}

/// [`pointwise_flap`] applied to the single-layer potential `S_α G`.
///
/// The exact value is 0 off the boundary; panel crossings of each ray are
/// passed to the radial quadrature.
pub fn bem_residual(density: &BoundaryDensity, order: FracOrder, x: Point2, w: TruncationWindow) -> Result<ResidualReport> {
    if order.dim() != 2 {
        return Err(Error::Domain("single-layer residual is two-dimensional".into()));
    }
    let mesh = density.mesh();
    let dist = mesh.distance_to(x);
    if !(dist > 2.0 * w.r_inner) {
        return Err(Error::Domain(format!(
            "point ({}, {}) is within 2·r_inner of the boundary (distance {dist:e})",
            x[0], x[1]
        )));
    }
    let k = Kernel::new(order);
    // rays may graze the panels, where the potential is continuous
    let u = |p: &[f64]| potential_at(&k, density, [p[0], p[1]], OnPanel::ClosedForm).unwrap_or(f64::NAN);
    let mut report = flap_with_breaks(&u, order, &x, w, &PanelCrossings(mesh))?;
    report.l1_norm = Some(density.l1_norm());
    Ok(report)
}

/// One far-field sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarFieldRow {
    pub radius: f64,
    pub direction: Point2,
    pub value: f64,
    /// `|u(R x̂)| R^{d-2α}`.
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarFieldTable {
    pub rows: Vec<FarFieldRow>,
    /// Largest `(max - min) / max` of the scaled value per direction.
    pub max_variation: f64,
    /// Set when the scaled value grows by more than 10% from the smallest to the largest radius.
    pub violation: bool,
}

/// Tabulates `|u(R x̂)| R^{d-2α}` for `u = S_α G`.
pub fn far_field_decay(
    density: &BoundaryDensity,
    order: FracOrder,
    radii: &[f64],
    directions: &[Point2],
) -> Result<FarFieldTable> {
    let mesh = density.mesh();
    let limit = 2.0 * mesh.curve().diameter();
    if let Some(r) = radii.iter().find(|&&r| !(r > limit)) {
        return Err(Error::Domain(format!("radius {r} is not beyond twice the diameter ({limit})")));
    }
    if let Some(d) = directions.iter().find(|d| ((d[0] * d[0] + d[1] * d[1]).sqrt() - 1.0).abs() > 1e-12) {
        return Err(Error::Domain(format!("direction ({}, {}) is not a unit vector", d[0], d[1])));
    }
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    let points: Vec<Point2> = directions
        .iter()
        .flat_map(|d| sorted.iter().map(move |&r| [r * d[0], r * d[1]]))
        .collect();
    let values = crate::bem::eval_single_layer(density, order, &points)?;
    let p = order.dim() as f64 - 2.0 * order.alpha();
    let mut rows = Vec::with_capacity(points.len());
    let mut max_variation: f64 = 0.0;
    let mut violation = false;
    for (i, d) in directions.iter().enumerate() {
        let chunk = &values[i * sorted.len()..(i + 1) * sorted.len()];
        let scaled: Vec<f64> = chunk.iter().zip(&sorted).map(|(v, r)| v.abs() * r.powf(p)).collect();
        for ((v, s), r) in chunk.iter().zip(&scaled).zip(&sorted) {
            rows.push(FarFieldRow {
                radius: *r,
                direction: *d,
                value: *v,
                scaled: *s,
            });
        }
        if let (Some(first), Some(last)) = (scaled.first(), scaled.last()) {
            let hi = scaled.iter().copied().fold(0.0, f64::max);
            let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
            if hi > 0.0 {
                max_variation = max_variation.max((hi - lo) / hi);
            }
            if *last > 1.1 * first {
                violation = true;
            }
        }
    }
    Ok(FarFieldTable {
        rows,
        max_variation,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{discretize, BoundaryCurve};
    use crate::specfun::{fundamental_solution, gamma_fn};
    use std::sync::Arc;

    fn gaussian(p: &[f64]) -> f64 {
        (-0.5 * p.iter().map(|t| t * t).sum::<f64>()).exp()
    }

    // -(-Δ)^α e^{-|x|²/2} at 0 from the Fourier side: -2^α Γ(α + d/2) / Γ(d/2)
    fn gaussian_exact(d: usize, alpha: f64) -> f64 {
        let h = 0.5 * d as f64;
        -(2f64.powf(alpha)) * gamma_fn(alpha + h).unwrap() / gamma_fn(h).unwrap()
    }

    #[test]
    fn constant_gives_zero() {
        let o = FracOrder::new(2, 0.6).unwrap();
        let r = pointwise_flap(|_| 3.0, o, &[0.2, 0.1], TruncationWindow::default_for(1.0).unwrap()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.inner_tail, 0.0);
        assert!(r.outer_tail > 0.0);
        assert!((r.uncertainty - r.inner_tail - r.outer_tail).abs() == 0.0);
    }

    #[test]
    fn gaussian_half_order() {
        let o = FracOrder::kernel(2, 0.5).unwrap();
        let w = TruncationWindow::new(1e-6, 1e4, 8, 8).unwrap();
        let r = pointwise_flap(gaussian, o, &[0.0, 0.0], w).unwrap();
        let exact = -(PI / 2.0).sqrt();
        assert!((gaussian_exact(2, 0.5) - exact).abs() < 1e-14);
        assert!((r.value - exact).abs() <= 1e-3f64.max(r.uncertainty), "{r:?}");
        assert!(r.quadrature_error <= 0.01 * r.uncertainty);
    }

    #[test]
    fn gaussian_in_three_dimensions() {
        let o = FracOrder::kernel(3, 0.6).unwrap();
        let w = TruncationWindow::new(1e-6, 1e4, 8, 8).unwrap();
        let r = pointwise_flap(gaussian, o, &[0.0, 0.0, 0.0], w).unwrap();
        let exact = gaussian_exact(3, 0.6);
        assert!((r.value - exact).abs() <= 1e-3f64.max(r.uncertainty), "{} vs {exact}: {r:?}", r.value);
    }

    #[test]
    fn negative_at_a_strict_maximum() {
        let o = FracOrder::new(2, 0.7).unwrap();
        let bump = |p: &[f64]| 1.0 / (1.0 + (p[0] - 0.3).powi(2) + 2.0 * (p[1] + 0.1).powi(2));
        let r = pointwise_flap(bump, o, &[0.3, -0.1], TruncationWindow::default_for(1.0).unwrap()).unwrap();
        assert!(r.value < 0.0);
        assert!(r.value.abs() > r.uncertainty);
    }

    #[test]
    fn linear_in_u() {
        let o = FracOrder::new(2, 0.65).unwrap();
        let w = TruncationWindow::default_for(1.0).unwrap();
        let x = [0.1, 0.2];
        let a = |p: &[f64]| gaussian(p);
        let b = |p: &[f64]| (p[0] - 0.5) / (1.0 + p[0] * p[0] + p[1] * p[1]).powi(2);
        let ra = pointwise_flap(a, o, &x, w).unwrap();
        let rb = pointwise_flap(b, o, &x, w).unwrap();
        let rs = pointwise_flap(|p: &[f64]| a(p) + b(p), o, &x, w).unwrap();
        let slack = ra.uncertainty + rb.uncertainty + rs.uncertainty;
        assert!((rs.value - ra.value - rb.value).abs() <= slack);
    }

    #[test]
    fn annihilates_the_fundamental_solution() {
        let o = FracOrder::new(2, 0.75).unwrap();
        let y = [1.0, 0.0];
        let u = |p: &[f64]| fundamental_solution(o, &[p[0] - y[0], p[1] - y[1]]).unwrap_or(f64::NAN);
        let mut w = TruncationWindow::new(1e-2, 1e4, 8, 8).unwrap();
        let mut prev = f64::INFINITY;
        for _ in 0..3 {
            let r = pointwise_flap(u, o, &[0.0, 0.0], w).unwrap();
            assert!(r.within_uncertainty(), "{r:?}");
            assert!(r.value.abs() < prev);
            prev = r.value.abs();
            w = w.refined();
        }
    }

    #[test]
    fn rejects_bad_input() {
        let o = FracOrder::new(2, 0.6).unwrap();
        let w = TruncationWindow::default_for(1.0).unwrap();
        assert!(pointwise_flap(gaussian, o, &[0.0, 0.0, 0.0], w).is_err());
        assert!(pointwise_flap(|p: &[f64]| 1.0 / p[0], o, &[0.0, 0.0], w).is_err());
        assert!(TruncationWindow::new(1.0, 0.5, 8, 8).is_err());
        assert!(TruncationWindow::new(1e-3, 10.0, 4, 8).is_err());
        let r = w.refined();
        assert_eq!((r.r_inner, r.n_radial, r.n_angular), (5e-4, 16, 16));
    }

    fn circle_density(n: usize, f: impl Fn(f64) -> f64) -> BoundaryDensity {
        let mesh = Arc::new(discretize(&BoundaryCurve::unit_circle(), n).unwrap());
        BoundaryDensity::from_param_fn(mesh, f).unwrap()
    }

    #[test]
    fn residual_of_zero_density() {
        let o = FracOrder::new(2, 0.75).unwrap();
        let g = circle_density(16, |_| 0.0);
        let w = TruncationWindow::default_for(1.0).unwrap();
        let r = bem_residual(&g, o, [0.0, 0.0], w).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.l1_norm, Some(0.0));
        assert!(bem_residual(&g, o, [0.999, 0.0], w).is_err());
    }

    #[test]
    fn residual_of_a_single_layer_potential() {
        let o = FracOrder::new(2, 0.75).unwrap();
        let g = circle_density(32, |t| 1.0 + 0.3 * (2.0 * PI * t).cos());
        let w = TruncationWindow::default_for(1.0).unwrap();
        for x in [[0.0, 0.0], [3.0, 0.0]] {
            let r = bem_residual(&g, o, x, w).unwrap();
            assert!(r.within_uncertainty(), "{r:?}");
            assert!((r.l1_norm.unwrap() - g.l1_norm()).abs() == 0.0);
        }
    }

    #[test]
    fn panel_crossings() {
        let mesh = discretize(&BoundaryCurve::unit_square(), 4).unwrap();
        let mut b = PanelCrossings(&mesh).radial_breaks(&[0.25, 0.5], &[1.0, 0.0]);
        b.sort_by(f64::total_cmp);
        assert_eq!(b.len(), 2);
        assert!((b[0] - 0.25).abs() < 1e-15 && (b[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn far_field_of_constant_density() {
        let o = FracOrder::new(2, 0.7).unwrap();
        let g = circle_density(64, |_| 1.0);
        let dirs: Vec<Point2> = (0..8).map(|k| {
            let t = PI * k as f64 / 4.0;
            [t.cos(), t.sin()]
        }).collect();
        let t = far_field_decay(&g, o, &[10.0, 100.0, 1000.0], &dirs).unwrap();
        let lead = crate::specfun::riesz_constant(o) * 2.0 * PI;
        for row in &t.rows {
            assert!(((row.scaled - lead) / lead).abs() < 1e-2, "{row:?}");
        }
        assert!(!t.violation);
        assert!(t.max_variation < 0.1);
        // zero total mass decays one order faster
        let dip = circle_density(64, |s| (2.0 * PI * s).cos());
        let t = far_field_decay(&dip, o, &[10.0, 100.0, 1000.0], &dirs[..1]).unwrap();
        assert!(!t.violation);
        assert!(t.rows[2].scaled < 0.02 * t.rows[0].scaled);
        let z = circle_density(8, |_| 0.0);
        let t = far_field_decay(&z, o, &[10.0], &dirs).unwrap();
        assert!(t.rows.iter().all(|r| r.value == 0.0));
        assert!(far_field_decay(&g, o, &[3.0], &dirs).is_err());
    }
}
